//! SVG rendering and crossing statistics for finished drawings.
//!
//! A [`Drawing`] couples node positions with the sampled spline polylines
//! and per-run statistics. [`render_svg`] emits a deterministic SVG 1.1
//! document (fixed numeric precision, stable element order), and
//! [`count_crossings`] counts transversal intersections between polylines
//! of distinct edges while ignoring bundled (near-collinear) overlaps and
//! meetings at shared endpoints.

use crate::layout::Positions;
use crate::routing::{NodeId, SplinePath};
use crate::spline::Point;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

/// Summary numbers for one pipeline run.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DrawingStats {
    pub power_edges: usize,
    pub groups: usize,
    pub crossings: usize,
    pub routing_planar: bool,
    pub runtime_ms: u64,
}

/// A fully realized drawing: positions for every routing node, one sampled
/// polyline per original edge, and labels for the leaves.
#[derive(Debug, Clone)]
pub struct Drawing {
    pub positions: Positions,
    pub edges: Vec<(SplinePath, Vec<Point>)>,
    pub vertex_labels: BTreeMap<NodeId, String>,
    pub stats: DrawingStats,
}

/// Extra geometry drawn when the debug overlay is enabled.
#[derive(Debug, Clone, Default)]
pub struct Overlay {
    pub tree_edges: Vec<(NodeId, NodeId)>,
    pub power_edges: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone)]
pub struct RenderStyle {
    /// Pixels per layout unit.
    pub scale: f64,
    pub node_radius: f64,
    pub stroke_width: f64,
    pub font_size: f64,
    pub overlay: Option<Overlay>,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            scale: 60.0,
            node_radius: 5.0,
            stroke_width: 1.6,
            font_size: 11.0,
            overlay: None,
        }
    }
}

fn fmt_coord(v: f64) -> String {
    // Fixed precision keeps the byte output identical across runs.
    let mut s = format!("{v:.3}");
    if s == "-0.000" {
        s = "0.000".into();
    }
    s
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders a drawing to an SVG document string. Identical inputs produce
/// identical bytes.
pub fn render_svg(d: &Drawing, style: &RenderStyle) -> String {
    let s = style.scale;
    // Bounding box over everything we draw, in pixel space.
    let mut min = (f64::MAX, f64::MAX);
    let mut max = (f64::MIN, f64::MIN);
    let mut cover = |x: f64, y: f64, pad: f64| {
        min.0 = min.0.min(x - pad);
        min.1 = min.1.min(y - pad);
        max.0 = max.0.max(x + pad);
        max.1 = max.1.max(y + pad);
    };
    for (_, poly) in &d.edges {
        for p in poly {
            cover(p.x * s, p.y * s, 0.0);
        }
    }
    for (&id, _) in &d.vertex_labels {
        let p = d.positions[id as usize];
        cover(p.x * s, p.y * s, style.node_radius + style.font_size);
    }
    let (vb, origin) = if min.0 > max.0 {
        ("0.000 0.000 10.000 10.000".to_string(), (0.0, 0.0))
    } else {
        let w = max.0 - min.0;
        let h = max.1 - min.1;
        let margin = 0.05 * w.max(h).max(1.0);
        (
            format!(
                "0.000 0.000 {} {}",
                fmt_coord(w + 2.0 * margin),
                fmt_coord(h + 2.0 * margin)
            ),
            (min.0 - margin, min.1 - margin),
        )
    };
    let px = |p: Point| (p.x * s - origin.0, p.y * s - origin.1);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{vb}\">"
    );
    if let Some(ov) = &style.overlay {
        let _ = writeln!(out, "  <g stroke=\"#c0c0c0\" stroke-dasharray=\"4 3\" stroke-width=\"1\">");
        for &(a, b) in &ov.tree_edges {
            let (x1, y1) = px(d.positions[a as usize]);
            let (x2, y2) = px(d.positions[b as usize]);
            let _ = writeln!(
                out,
                "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                fmt_coord(x1),
                fmt_coord(y1),
                fmt_coord(x2),
                fmt_coord(y2)
            );
        }
        let _ = writeln!(out, "  </g>");
        let _ = writeln!(out, "  <g stroke=\"#d04040\" stroke-dasharray=\"2 2\" stroke-width=\"1\">");
        for &(a, b) in &ov.power_edges {
            let (x1, y1) = px(d.positions[a as usize]);
            let (x2, y2) = px(d.positions[b as usize]);
            let _ = writeln!(
                out,
                "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                fmt_coord(x1),
                fmt_coord(y1),
                fmt_coord(x2),
                fmt_coord(y2)
            );
        }
        let _ = writeln!(out, "  </g>");
        let _ = writeln!(out, "  <g fill=\"#c0c0c0\">");
        for id in 0..d.positions.len() as NodeId {
            if !d.vertex_labels.contains_key(&id) {
                let (x, y) = px(d.positions[id as usize]);
                let _ = writeln!(
                    out,
                    "    <circle cx=\"{}\" cy=\"{}\" r=\"2.500\"/>",
                    fmt_coord(x),
                    fmt_coord(y)
                );
            }
        }
        let _ = writeln!(out, "  </g>");
    }
    let _ = writeln!(
        out,
        "  <g fill=\"none\" stroke=\"#2b6cb0\" stroke-opacity=\"0.75\" stroke-width=\"{}\" stroke-linecap=\"round\">",
        fmt_coord(style.stroke_width)
    );
    for (_, poly) in &d.edges {
        let mut path = String::new();
        for (i, &p) in poly.iter().enumerate() {
            let (x, y) = px(p);
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{}{} {} ", cmd, fmt_coord(x), fmt_coord(y));
        }
        let _ = writeln!(out, "    <path d=\"{}\"/>", path.trim_end());
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(out, "  <g font-family=\"sans-serif\" font-size=\"{}\">", fmt_coord(style.font_size));
    for (&id, label) in &d.vertex_labels {
        let (x, y) = px(d.positions[id as usize]);
        let _ = writeln!(
            out,
            "    <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#ffffff\" stroke=\"#333333\"/>",
            fmt_coord(x),
            fmt_coord(y),
            fmt_coord(style.node_radius)
        );
        let _ = writeln!(
            out,
            "    <text x=\"{}\" y=\"{}\" fill=\"#111111\">{}</text>",
            fmt_coord(x + style.node_radius + 2.0),
            fmt_coord(y - style.node_radius - 2.0),
            xml_escape(label)
        );
    }
    let _ = writeln!(out, "  </g>");
    out.push_str("</svg>\n");
    out
}

/// Tolerance for treating points as coincident or segments as bundled.
const GEOM_TOL: f64 = 1e-9;

#[derive(Clone, Copy)]
struct Segment {
    a: Point,
    b: Point,
    poly: u32,
}

/// Classifies one pair of segments: `true` iff they cross transversally,
/// strictly interior to both (the crossing point farther than the tolerance
/// from all four endpoints). Near-collinear overlaps count as bundled.
fn transversal(s: &Segment, t: &Segment) -> bool {
    let r = s.b - s.a;
    let q = t.b - t.a;
    let denom = r.x * q.y - r.y * q.x;
    let scale = r.norm() * q.norm();
    if scale < GEOM_TOL * GEOM_TOL {
        return false;
    }
    if denom.abs() < 1e-12 * scale {
        // Parallel. An overlap within tolerance is bundling, never a
        // crossing; disjoint parallels do not cross either.
        return false;
    }
    let d = t.a - s.a;
    let tt = (d.x * q.y - d.y * q.x) / denom;
    let uu = (d.x * r.y - d.y * r.x) / denom;
    if !(0.0..=1.0).contains(&tt) || !(0.0..=1.0).contains(&uu) {
        return false;
    }
    let p = s.a + r * tt;
    [s.a, s.b, t.a, t.b].iter().all(|&e| p.dist(e) > GEOM_TOL)
}

/// Counts transversal crossings between segments of distinct polylines.
/// Shared endpoints and bundled (near-collinear, overlapping) stretches are
/// excluded, so confluent bundles do not inflate the count.
pub fn count_polyline_crossings(polys: &[Vec<Point>]) -> usize {
    let mut segs: Vec<Segment> = Vec::new();
    let mut total_len = 0.0;
    for (pi, poly) in polys.iter().enumerate() {
        for w in poly.windows(2) {
            let len = w[0].dist(w[1]);
            if len > GEOM_TOL {
                segs.push(Segment { a: w[0], b: w[1], poly: pi as u32 });
                total_len += len;
            }
        }
    }
    if segs.len() < 2 {
        return 0;
    }
    // Grid binning: cell size near the average segment length keeps the
    // candidate set close to linear for spline polylines.
    let cell = (total_len / segs.len() as f64).max(1e-6);
    let key = |v: f64| (v / cell).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    for (i, s) in segs.iter().enumerate() {
        let (x0, x1) = (s.a.x.min(s.b.x), s.a.x.max(s.b.x));
        let (y0, y1) = (s.a.y.min(s.b.y), s.a.y.max(s.b.y));
        for gx in key(x0)..=key(x1) {
            for gy in key(y0)..=key(y1) {
                grid.entry((gx, gy)).or_default().push(i as u32);
            }
        }
    }
    let mut seen: HashSet<(u32, u32)> = HashSet::new();
    let mut count = 0;
    for ids in grid.values() {
        for (k, &i) in ids.iter().enumerate() {
            for &j in &ids[k + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                let (s, t) = (&segs[i as usize], &segs[j as usize]);
                if s.poly == t.poly || !seen.insert((i, j)) {
                    continue;
                }
                if transversal(s, t) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Crossing count of a drawing's sampled polylines.
pub fn count_crossings(d: &Drawing) -> usize {
    let polys: Vec<Vec<Point>> = d.edges.iter().map(|(_, poly)| poly.clone()).collect();
    count_polyline_crossings(&polys)
}
