//! Shared helpers for integration tests.
#![allow(dead_code)]

use pcdraw::graph::Graph;
use pcdraw::power::{Hierarchy, HierarchyBuilder, ModuleId};
use pcdraw::routing::{NodeId, RoutingGraph};
use rand::{Rng, SeedableRng};
use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Loads a fixture by file name, picking the parser from the extension.
pub fn fixture(name: &str) -> Graph {
    let text = fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("fixture {name} unreadable: {e}"));
    let parsed = if name.ends_with(".gml") {
        Graph::parse_gml(&text, false)
    } else {
        Graph::parse_edge_list(&text, false)
    };
    parsed.unwrap_or_else(|e| panic!("fixture {name} unparseable: {e}"))
}

/// The seven benchmark networks: (file, |V|, |E|).
pub const BENCHMARK_FIXTURES: [(&str, usize, usize); 7] = [
    ("florentine.txt", 15, 20),
    ("karate.txt", 34, 78),
    ("southern.gml", 32, 89),
    ("dolphins.gml", 62, 159),
    ("lesmis.gml", 77, 254),
    ("football.gml", 115, 613),
    ("netsci.gml", 379, 914),
];

/// Hand-built hierarchy that defeats shortest-path routing: the chain of
/// nested groups g1 = {a, e1}, g2 = {g1, e2}, g3 = {g2, e3} makes the
/// legitimate route for edge (a, b) climb the whole chain to the g3-b
/// power edge, while the power edges a-d and d-b offer a two-hop shortcut
/// through leaf d that crosses two power edges. Returns the hierarchy and
/// the module id of every named part.
pub fn short_circuit_fixture() -> (Hierarchy, HashMap<&'static str, ModuleId>) {
    let mut b = HierarchyBuilder::new(false);
    let mut ids = HashMap::new();
    for name in ["a", "e1", "e2", "e3", "d", "b", "c"] {
        ids.insert(name, b.leaf());
    }
    let g1 = b.group(&[ids["a"], ids["e1"]]).unwrap();
    let g2 = b.group(&[g1, ids["e2"]]).unwrap();
    let g3 = b.group(&[g2, ids["e3"]]).unwrap();
    ids.insert("g1", g1);
    ids.insert("g2", g2);
    ids.insert("g3", g3);
    b.power_edge(ids["a"], ids["e1"]).unwrap();
    b.power_edge(g1, ids["e2"]).unwrap();
    b.power_edge(g2, ids["e3"]).unwrap();
    b.power_edge(g3, ids["b"]).unwrap();
    b.power_edge(ids["a"], ids["d"]).unwrap();
    b.power_edge(ids["d"], ids["b"]).unwrap();
    b.power_edge(ids["a"], ids["c"]).unwrap();
    (b.build().unwrap(), ids)
}

/// Breadth-first shortest path over the routing graph with tree and power
/// edges treated alike — the naive routing scheme that the enumeration in
/// the library deliberately replaces. Deterministic: neighbours explored
/// in ascending id order.
pub fn legacy_shortest_path(r: &RoutingGraph, from: NodeId, to: NodeId) -> Option<Vec<NodeId>> {
    let n = r.node_count();
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for &(a, b) in r.tree_edges().iter().chain(r.power_edges().iter()) {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut prev: Vec<Option<NodeId>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[from as usize] = true;
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut cur = to;
            while let Some(p) = prev[cur as usize] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &v in &adj[u as usize] {
            if !seen[v as usize] {
                seen[v as usize] = true;
                prev[v as usize] = Some(u);
                queue.push_back(v);
            }
        }
    }
    None
}

/// Number of power edges a node sequence traverses.
pub fn power_edge_hops(r: &RoutingGraph, path: &[NodeId]) -> usize {
    let set: std::collections::HashSet<(NodeId, NodeId)> = r
        .power_edges()
        .iter()
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .collect();
    path.windows(2).filter(|w| set.contains(&(w[0], w[1]))).count()
}

/// Seeded Erdős–Rényi graph with single-letter-style labels.
pub fn random_graph(n: usize, p: f64, seed: u64, directed: bool) -> Graph {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(directed);
    for i in 0..n {
        g.intern(&pcdraw::graph::letter_label(i));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if directed {
                for (s, t) in [(u, v), (v, u)] {
                    if rng.random_bool(p) {
                        g.add_edge(s as u32, t as u32).unwrap();
                    }
                }
            } else if rng.random_bool(p) {
                g.add_edge(u as u32, v as u32).unwrap();
            }
        }
    }
    g
}
