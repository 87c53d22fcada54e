//! Simple labelled graphs plus parsers for whitespace edge lists and a GML
//! subset.
//!
//! Vertices are interned to dense `u32` ids in order of first appearance.
//! Graphs are always simple: self loops and duplicate edges are rejected at
//! construction time, in both undirected and directed mode.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use thiserror::Error;

pub type VertexId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected two whitespace-separated endpoints, got {found:?}")]
    MalformedLine { line: usize, found: String },
    #[error("self-loop on {label:?} is not allowed")]
    SelfLoop { label: String },
    #[error("duplicate edge {a:?} -- {b:?}")]
    DuplicateEdge { a: String, b: String },
    #[error("unknown vertex id {id}")]
    UnknownVertex { id: VertexId },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
    #[error("GML: {0}")]
    Gml(String),
    #[error("edge references undeclared node id {id}")]
    DanglingEndpoint { id: i64 },
    #[error("complete bipartite sides must both be non-empty (got {m} x {n})")]
    EmptySide { m: usize, n: usize },
}

/// A simple graph with string-labelled vertices.
///
/// In undirected mode edges are stored with their endpoints in ascending id
/// order; in directed mode the stored order is the edge direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    directed: bool,
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    edge_set: HashSet<(VertexId, VertexId)>,
}

impl Graph {
    pub fn new(directed: bool) -> Self {
        Graph {
            directed,
            labels: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            edge_set: HashSet::new(),
        }
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    /// Edges in insertion order, endpoints normalised (ascending ids when
    /// undirected, source then target when directed).
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// The edge set with normalised endpoint order, for containment checks
    /// and whole-graph comparisons.
    pub fn edge_set(&self) -> &HashSet<(VertexId, VertexId)> {
        &self.edge_set
    }

    fn normalise(&self, u: VertexId, v: VertexId) -> (VertexId, VertexId) {
        if self.directed || u <= v {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_set.contains(&self.normalise(u, v))
    }

    /// Interns a label, returning the existing id if already present.
    pub fn intern(&mut self, label: &str) -> VertexId {
        if let Some(&v) = self.index.get(label) {
            return v;
        }
        let v = self.labels.len() as VertexId;
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), v);
        v
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        let n = self.labels.len() as VertexId;
        for w in [u, v] {
            if w >= n {
                return Err(GraphError::UnknownVertex { id: w });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop {
                label: self.labels[u as usize].clone(),
            });
        }
        let key = self.normalise(u, v);
        if !self.edge_set.insert(key) {
            return Err(GraphError::DuplicateEdge {
                a: self.labels[u as usize].clone(),
                b: self.labels[v as usize].clone(),
            });
        }
        self.edges.push(key);
        Ok(())
    }

    pub fn add_edge_by_labels(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        let u = self.intern(a);
        let v = self.intern(b);
        self.add_edge(u, v)
    }

    /// Neighbour lists (both directions folded together when undirected),
    /// each sorted ascending.
    pub fn neighbour_lists(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    /// Out- and in-neighbour lists; for undirected graphs both sides equal
    /// the plain neighbour lists.
    pub fn directed_neighbour_lists(&self) -> (Vec<Vec<VertexId>>, Vec<Vec<VertexId>>) {
        if !self.directed {
            let adj = self.neighbour_lists();
            return (adj.clone(), adj);
        }
        let mut out = vec![Vec::new(); self.vertex_count()];
        let mut inc = vec![Vec::new(); self.vertex_count()];
        for &(u, v) in &self.edges {
            out[u as usize].push(v);
            inc[v as usize].push(u);
        }
        for l in out.iter_mut().chain(inc.iter_mut()) {
            l.sort_unstable();
        }
        (out, inc)
    }

    /// Parses a whitespace-separated edge list. Blank lines and lines whose
    /// first non-blank character is `#` are skipped. Tokens are interned as
    /// vertex labels in order of first appearance.
    pub fn parse_edge_list(text: &str, directed: bool) -> Result<Graph, GraphError> {
        let mut g = Graph::new(directed);
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b, rest) = (it.next(), it.next(), it.next());
            let (a, b) = match (a, b, rest) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(GraphError::MalformedLine {
                        line: line_no,
                        found: line.to_owned(),
                    })
                }
            };
            g.add_edge_by_labels(a, b).map_err(|e| GraphError::AtLine {
                line: line_no,
                source: Box::new(e),
            })?;
        }
        Ok(g)
    }

    /// Serialises to the edge-list format accepted by [`Graph::parse_edge_list`].
    /// Isolated vertices cannot be represented and are dropped.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", self.labels[u as usize], self.labels[v as usize]);
        }
        out
    }

    /// Parses the GML subset used by the common network-dataset files:
    /// a `graph [ ... ]` block containing `node [ id N label "..." ]` and
    /// `edge [ source A target B ]` blocks. Unknown keys (including nested
    /// blocks such as `graphics [...]`) are skipped. Node labels default to
    /// the declared id when absent.
    pub fn parse_gml(text: &str, directed: bool) -> Result<Graph, GraphError> {
        let tokens = gml_tokenise(text)?;
        let mut pos = 0;
        // Skip anything before the top-level `graph [`.
        while pos < tokens.len() && !matches!(&tokens[pos], GmlTok::Key(k) if k == "graph") {
            pos += 1;
        }
        if pos + 1 >= tokens.len() || !matches!(tokens[pos + 1], GmlTok::Open) {
            return Err(GraphError::Gml("missing `graph [` block".into()));
        }
        pos += 2;

        let mut g = Graph::new(directed);
        let mut gml_ids: HashMap<i64, VertexId> = HashMap::new();
        let mut pending_edges: Vec<(i64, i64)> = Vec::new();

        while pos < tokens.len() {
            match &tokens[pos] {
                GmlTok::Close => break,
                GmlTok::Key(k) if k == "node" => {
                    let (fields, next) = gml_block(&tokens, pos + 1)?;
                    pos = next;
                    let id = match fields.get("id") {
                        Some(GmlVal::Int(n)) => *n,
                        _ => return Err(GraphError::Gml("node block missing integer id".into())),
                    };
                    if gml_ids.contains_key(&id) {
                        return Err(GraphError::Gml(format!("duplicate node id {id}")));
                    }
                    let label = match fields.get("label") {
                        Some(GmlVal::Str(s)) => s.clone(),
                        Some(GmlVal::Int(n)) => n.to_string(),
                        _ => id.to_string(),
                    };
                    if g.index.contains_key(&label) {
                        return Err(GraphError::Gml(format!("duplicate node label {label:?}")));
                    }
                    let v = g.intern(&label);
                    gml_ids.insert(id, v);
                }
                GmlTok::Key(k) if k == "edge" => {
                    let (fields, next) = gml_block(&tokens, pos + 1)?;
                    pos = next;
                    let src = match fields.get("source") {
                        Some(GmlVal::Int(n)) => *n,
                        _ => return Err(GraphError::Gml("edge block missing source".into())),
                    };
                    let tgt = match fields.get("target") {
                        Some(GmlVal::Int(n)) => *n,
                        _ => return Err(GraphError::Gml("edge block missing target".into())),
                    };
                    pending_edges.push((src, tgt));
                }
                GmlTok::Key(_) => {
                    // Unknown graph-level key: skip its value (scalar or block).
                    pos += 1;
                    match tokens.get(pos) {
                        Some(GmlTok::Open) => {
                            let (_, next) = gml_block(&tokens, pos)?;
                            pos = next;
                        }
                        Some(_) => pos += 1,
                        None => return Err(GraphError::Gml("dangling key at end of input".into())),
                    }
                }
                t => return Err(GraphError::Gml(format!("unexpected token {t:?}"))),
            }
        }

        for (src, tgt) in pending_edges {
            let &u = gml_ids
                .get(&src)
                .ok_or(GraphError::DanglingEndpoint { id: src })?;
            let &v = gml_ids
                .get(&tgt)
                .ok_or(GraphError::DanglingEndpoint { id: tgt })?;
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Serialises to the GML subset accepted by [`Graph::parse_gml`].
    /// Unlike the edge-list format this round-trips isolated vertices.
    pub fn to_gml(&self) -> String {
        let mut out = String::from("graph [\n");
        if self.directed {
            out.push_str("  directed 1\n");
        }
        for (i, label) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "  node [\n    id {i}\n    label \"{label}\"\n  ]");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  edge [\n    source {u}\n    target {v}\n  ]");
        }
        out.push_str("]\n");
        out
    }

    /// The complete bipartite graph K(m, n) with spreadsheet-style letter
    /// labels: the first side takes the first `m` labels, the second side the
    /// next `n` (so K(2, 2) is labelled a, b / c, d).
    pub fn complete_bipartite(m: usize, n: usize) -> Result<Graph, GraphError> {
        if m == 0 || n == 0 {
            return Err(GraphError::EmptySide { m, n });
        }
        let mut g = Graph::new(false);
        let left: Vec<VertexId> = (0..m).map(|i| g.intern(&letter_label(i))).collect();
        let right: Vec<VertexId> = (0..n).map(|j| g.intern(&letter_label(m + j))).collect();
        for &u in &left {
            for &v in &right {
                g.add_edge(u, v)?;
            }
        }
        Ok(g)
    }
}

/// 0 -> "a", 1 -> "b", ..., 25 -> "z", 26 -> "aa", ...
pub fn letter_label(mut i: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'a' + (i % 26) as u8);
        i /= 26;
        if i == 0 {
            break;
        }
        i -= 1;
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

#[derive(Debug, Clone, PartialEq)]
enum GmlTok {
    Open,
    Close,
    Key(String),
    Int(i64),
    Real(f64),
    Str(String),
}

#[derive(Debug, Clone)]
enum GmlVal {
    Int(i64),
    Str(String),
}

fn gml_tokenise(text: &str) -> Result<Vec<GmlTok>, GraphError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '[' => {
                chars.next();
                toks.push(GmlTok::Open);
            }
            ']' => {
                chars.next();
                toks.push(GmlTok::Close);
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                        None => return Err(GraphError::Gml("unterminated string".into())),
                    }
                }
                toks.push(GmlTok::Str(s));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut w = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '[' || ch == ']' || ch == '"' {
                        break;
                    }
                    w.push(ch);
                    chars.next();
                }
                if let Ok(n) = w.parse::<i64>() {
                    toks.push(GmlTok::Int(n));
                } else if let Ok(x) = w.parse::<f64>() {
                    toks.push(GmlTok::Real(x));
                } else {
                    toks.push(GmlTok::Key(w));
                }
            }
        }
    }
    Ok(toks)
}

/// Parses `[ key value ... ]` starting at the `[`; returns the scalar fields
/// and the index just past the closing `]`. Nested blocks are skipped.
fn gml_block(
    tokens: &[GmlTok],
    start: usize,
) -> Result<(HashMap<String, GmlVal>, usize), GraphError> {
    if !matches!(tokens.get(start), Some(GmlTok::Open)) {
        return Err(GraphError::Gml("expected `[`".into()));
    }
    let mut fields = HashMap::new();
    let mut pos = start + 1;
    while pos < tokens.len() {
        match &tokens[pos] {
            GmlTok::Close => return Ok((fields, pos + 1)),
            GmlTok::Key(k) => {
                pos += 1;
                match tokens.get(pos) {
                    Some(GmlTok::Open) => {
                        let (_, next) = gml_block(tokens, pos)?;
                        pos = next;
                    }
                    Some(GmlTok::Int(n)) => {
                        fields.entry(k.clone()).or_insert(GmlVal::Int(*n));
                        pos += 1;
                    }
                    Some(GmlTok::Str(s)) => {
                        fields.entry(k.clone()).or_insert(GmlVal::Str(s.clone()));
                        pos += 1;
                    }
                    Some(GmlTok::Real(_)) => pos += 1,
                    _ => return Err(GraphError::Gml(format!("key {k:?} has no value"))),
                }
            }
            t => return Err(GraphError::Gml(format!("unexpected token {t:?} in block"))),
        }
    }
    Err(GraphError::Gml("unterminated block".into()))
}
