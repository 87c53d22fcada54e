//! Command-line front end for the power-confluent drawing pipeline.

use clap::{Parser, ValueEnum};
use pcdraw::layout::LayoutConfig;
use pcdraw::pipeline::{
    format_benchmark_table, load_graph, records_to_json_lines, run_benchmark, run_single,
    InputFormat, PipelineError, PipelineOptions, RunRecord, TableRow,
};
use pcdraw::power::ScoreWeights;
use pcdraw::render::{render_svg, Overlay, RenderStyle};
use pcdraw::spline::EndMethod;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Edgelist,
    Gml,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

fn nonneg_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err("must be non-negative".into())
    }
}

fn split_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("must be strictly between 0 and 1".into())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EndArg {
    Clamp,
    Duplicate,
}

/// Draws a graph as a power-confluent diagram: vertices are grouped into
/// nested modules, bicliques collapse to single power edges, and every
/// original edge is rendered as a B-spline bundled along the module tree.
#[derive(Debug, Parser)]
#[command(name = "pcdraw", version, about)]
struct Args {
    /// Input graph file.
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Treat the input as a directed graph.
    #[arg(long)]
    directed: bool,
    /// Reward per shared neighbour when scoring a merge.
    #[arg(long, default_value_t = 10.0, value_parser = positive_f64)]
    w_cap: f64,
    /// Penalty per unshared neighbour ("inf" forbids any mismatch).
    #[arg(long, default_value_t = 1.0, value_parser = nonneg_f64)]
    w_tri: f64,
    /// Spline degree.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    degree: u8,
    /// End-point handling for the splines.
    #[arg(long, value_enum, default_value_t = EndArg::Clamp)]
    end_method: EndArg,
    /// Base random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeds to run (seed, seed+1, ...); more than one run also
    /// prints a best/worst summary table and renders the best run.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    /// Polyline samples per spline span.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Target length of split-junction edges (regular edges have length 1).
    #[arg(long, default_value_t = 0.25, value_parser = split_fraction)]
    split_length: f64,
    /// Write the rendered SVG here.
    #[arg(long)]
    svg_out: Option<PathBuf>,
    /// Write per-run stats as JSON lines here (default: stdout).
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// Overlay the routing tree, power edges and junctions on the SVG.
    #[arg(long)]
    debug_overlay: bool,
}

fn write_out(path: &PathBuf, content: &str) -> Result<(), PipelineError> {
    std::fs::write(path, content).map_err(|source| PipelineError::Unreadable {
        path: path.display().to_string(),
        source,
    })
}

fn run(args: &Args) -> Result<(), PipelineError> {
    let format = args.format.map(|f| match f {
        FormatArg::Edgelist => InputFormat::EdgeList,
        FormatArg::Gml => InputFormat::Gml,
    });
    let g = load_graph(&args.input, format, args.directed)?;
    let opts = PipelineOptions {
        weights: ScoreWeights::new(args.w_cap, args.w_tri),
        degree: args.degree as usize,
        end_method: match args.end_method {
            EndArg::Clamp => EndMethod::Clamp,
            EndArg::Duplicate => EndMethod::Duplicate,
        },
        seed: args.seed,
        samples: args.samples as usize,
        layout: LayoutConfig {
            split_edge_length: args.split_length,
            ..LayoutConfig::default()
        },
    };

    let (records, chosen) = if args.runs == 1 {
        let run = run_single(&g, &opts)?;
        let record = RunRecord {
            seed: opts.seed,
            stats: run.drawing.stats.clone(),
        };
        (vec![record], run)
    } else {
        let res = run_benchmark(&g, &opts, args.runs as usize)?;
        eprintln!("best seed: {}", res.best_seed);
        (res.records, res.best)
    };

    let lines = records_to_json_lines(&records);
    match &args.stats_out {
        Some(path) => write_out(path, &lines)?,
        None => print!("{lines}"),
    }
    if args.runs > 1 {
        let name = args
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into());
        let row = TableRow::from_records(&name, g.edge_count(), &records);
        print!("{}", format_benchmark_table(&[row]));
    }
    if let Some(path) = &args.svg_out {
        let style = RenderStyle {
            overlay: args.debug_overlay.then(|| Overlay {
                tree_edges: chosen.routing.tree_edges().to_vec(),
                power_edges: chosen.routing.power_edges().to_vec(),
            }),
            ..RenderStyle::default()
        };
        write_out(path, &render_svg(&chosen.drawing, &style))?;
    }
    Ok(())
}

fn main() {
    let args = Args::parse();
    if let Err(e) = run(&args) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
