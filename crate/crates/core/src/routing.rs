//! Hierarchical edge routing.
//!
//! The module hierarchy becomes a routing graph: a forest of junction nodes
//! (one or two per module) joined leafward by tree edges, with power edges
//! attached at the junction side. Every original edge is then drawn as one
//! path that climbs from a leaf to the power edge's junction, crosses that
//! single power edge, and descends to a leaf on the other side. Paths that
//! share tree edges share the corresponding control points, which is what
//! makes the drawn splines merge into bundles.

use crate::graph::VertexId;
use crate::power::{Hierarchy, ModuleId};
use petgraph::graph::UnGraph;
use serde::Serialize;
use std::collections::{HashMap, HashSet};

pub type NodeId = u32;

/// What a routing node stands for.
///
/// `Junction` is the power-edge side of a module (undirected); splitting
/// moves its leafward fan-out to a companion `JunctionFan` node. Directed
/// hierarchies use `UpJunction` for leaf-to-power flow and `DownJunction`
/// for power-to-leaf flow; a module carrying both is doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeRole {
    Leaf,
    Junction,
    JunctionFan,
    UpJunction,
    UpJunctionFan,
    DownJunction,
    DownJunctionFan,
}

impl NodeRole {
    fn fan(self) -> NodeRole {
        match self {
            NodeRole::Junction => NodeRole::JunctionFan,
            NodeRole::UpJunction => NodeRole::UpJunctionFan,
            NodeRole::DownJunction => NodeRole::DownJunctionFan,
            other => panic!("role {other:?} cannot split"),
        }
    }

    pub fn is_fan(self) -> bool {
        matches!(
            self,
            NodeRole::JunctionFan | NodeRole::UpJunctionFan | NodeRole::DownJunctionFan
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoutingNode {
    pub module: ModuleId,
    pub vertex: Option<VertexId>,
    pub role: NodeRole,
}

/// One drawn strand: the node path for a single original edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplinePath {
    /// Index into `RoutingGraph::power_edges`.
    pub power_edge: usize,
    pub nodes: Vec<NodeId>,
}

/// Routing structure derived from a hierarchy; see the module docs.
///
/// Tree edges are stored junction-side first (the end closer to the power
/// edges), leafward second. In a directed hierarchy the up-forest and
/// down-forest share leaf nodes, so a leaf may sit below two tree edges.
#[derive(Debug, Clone)]
pub struct RoutingGraph {
    directed: bool,
    nodes: Vec<RoutingNode>,
    tree_edges: Vec<(NodeId, NodeId)>,
    power_edges: Vec<(NodeId, NodeId)>,
    /// `(junction half, fan half)` for every split node.
    splits: Vec<(NodeId, NodeId)>,
    children: Vec<Vec<NodeId>>,
    power_degree: Vec<usize>,
}

/// Builds the routing graph for a hierarchy.
///
/// Undirected: one node per non-root module. Directed: groups get an up
/// and/or down copy depending on which flows pass them (a group with no
/// power edge at itself or any ancestor carries no flow and is dropped);
/// leaves always get exactly one node. A node whose leafward fan-out and
/// junction-side attachments (tree edge plus power edges) both reach two is
/// split so bundles pass straight through it.
pub fn build_routing_graph(h: &Hierarchy) -> RoutingGraph {
    let root = h.root();
    let mods: Vec<ModuleId> = h.alive_modules().into_iter().filter(|&m| m != root).collect();

    // Flow analysis (directed only): does any self-or-ancestor module have
    // outgoing (up) or incoming (down) power edges? Flow closes leafward,
    // so process parents before children and inherit their flags.
    let mut up_flow: HashMap<ModuleId, bool> = HashMap::new();
    let mut down_flow: HashMap<ModuleId, bool> = HashMap::new();
    if h.directed() {
        let mut order = mods.clone();
        order.sort_by_key(|&m| depth(h, m));
        for &m in &order {
            let (pu, pd) = match h.parent(m) {
                Some(p) if p != root => (up_flow[&p], down_flow[&p]),
                _ => (false, false),
            };
            up_flow.insert(m, pu || !h.out_neighbours_sorted(m).is_empty());
            down_flow.insert(m, pd || !h.in_neighbours_sorted(m).is_empty());
        }
    }

    let mut nodes: Vec<RoutingNode> = Vec::new();
    let mut leaf_copy: HashMap<ModuleId, NodeId> = HashMap::new();
    let mut whole_copy: HashMap<ModuleId, NodeId> = HashMap::new();
    let mut up_copy: HashMap<ModuleId, NodeId> = HashMap::new();
    let mut down_copy: HashMap<ModuleId, NodeId> = HashMap::new();
    let push = |nodes: &mut Vec<RoutingNode>, n: RoutingNode| -> NodeId {
        nodes.push(n);
        (nodes.len() - 1) as NodeId
    };
    for &m in &mods {
        if let Some(v) = h.leaf_vertex(m) {
            let id = push(
                &mut nodes,
                RoutingNode { module: m, vertex: Some(v), role: NodeRole::Leaf },
            );
            leaf_copy.insert(m, id);
        } else if !h.directed() {
            let id = push(
                &mut nodes,
                RoutingNode { module: m, vertex: None, role: NodeRole::Junction },
            );
            whole_copy.insert(m, id);
        } else {
            if up_flow[&m] {
                let id = push(
                    &mut nodes,
                    RoutingNode { module: m, vertex: None, role: NodeRole::UpJunction },
                );
                up_copy.insert(m, id);
            }
            if down_flow[&m] {
                let id = push(
                    &mut nodes,
                    RoutingNode { module: m, vertex: None, role: NodeRole::DownJunction },
                );
                down_copy.insert(m, id);
            }
        }
    }

    let mut tree_edges: Vec<(NodeId, NodeId)> = Vec::new();
    for &m in &mods {
        let p = h.parent(m).expect("non-root module has a parent");
        if p == root {
            continue;
        }
        if !h.directed() {
            let child = *leaf_copy.get(&m).or_else(|| whole_copy.get(&m)).unwrap();
            tree_edges.push((whole_copy[&p], child));
        } else {
            if up_flow[&p] {
                let child = *leaf_copy.get(&m).or_else(|| up_copy.get(&m)).unwrap();
                tree_edges.push((up_copy[&p], child));
            }
            if down_flow[&p] {
                let child = *leaf_copy.get(&m).or_else(|| down_copy.get(&m)).unwrap();
                tree_edges.push((down_copy[&p], child));
            }
        }
    }

    let junction_side = |m: ModuleId, outgoing: bool| -> NodeId {
        if let Some(&id) = leaf_copy.get(&m) {
            id
        } else if !h.directed() {
            whole_copy[&m]
        } else if outgoing {
            up_copy[&m]
        } else {
            down_copy[&m]
        }
    };
    let power_edges: Vec<(NodeId, NodeId)> = h
        .neighbour_pairs()
        .into_iter()
        .map(|(m, n)| (junction_side(m, true), junction_side(n, false)))
        .collect();

    let mut g = RoutingGraph {
        directed: h.directed(),
        nodes,
        tree_edges,
        power_edges,
        splits: Vec::new(),
        children: Vec::new(),
        power_degree: Vec::new(),
    };
    g.rebuild_adjacency();
    g.split_junctions();
    g
}

fn depth(h: &Hierarchy, m: ModuleId) -> usize {
    let mut d = 0;
    let mut cur = h.parent(m);
    while let Some(p) = cur {
        d += 1;
        cur = h.parent(p);
    }
    d
}

impl RoutingGraph {
    fn rebuild_adjacency(&mut self) {
        let n = self.nodes.len();
        self.children = vec![Vec::new(); n];
        self.power_degree = vec![0; n];
        for &(a, b) in &self.tree_edges {
            self.children[a as usize].push(b);
        }
        for c in &mut self.children {
            c.sort_unstable();
        }
        for &(a, b) in &self.power_edges {
            self.power_degree[a as usize] += 1;
            self.power_degree[b as usize] += 1;
        }
    }

    /// Splits every node with at least two leafward tree edges and at least
    /// two junction-side attachments (an incoming tree edge counts as one,
    /// each incident power edge as one). The junction half keeps the power
    /// edges; a new fan half takes the leafward edges. Fan halves have one
    /// junction-side attachment by construction, so no node splits twice.
    fn split_junctions(&mut self) {
        let mut parent_edge_count = vec![0usize; self.nodes.len()];
        for &(_, b) in &self.tree_edges {
            parent_edge_count[b as usize] += 1;
        }
        let orig = self.nodes.len();
        for v in 0..orig {
            let leafward = self.children[v].len();
            let junctionward = parent_edge_count[v] + self.power_degree[v];
            if leafward < 2 || junctionward < 2 {
                continue;
            }
            let fan = self.nodes.len() as NodeId;
            let base = self.nodes[v];
            self.nodes.push(RoutingNode {
                module: base.module,
                vertex: None,
                role: base.role.fan(),
            });
            for e in &mut self.tree_edges {
                if e.0 == v as NodeId {
                    e.0 = fan;
                }
            }
            self.tree_edges.push((v as NodeId, fan));
            self.splits.push((v as NodeId, fan));
        }
        self.rebuild_adjacency();
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &RoutingNode {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[RoutingNode] {
        &self.nodes
    }

    pub fn tree_edges(&self) -> &[(NodeId, NodeId)] {
        &self.tree_edges
    }

    pub fn power_edges(&self) -> &[(NodeId, NodeId)] {
        &self.power_edges
    }

    pub fn splits(&self) -> &[(NodeId, NodeId)] {
        &self.splits
    }

    pub fn children_of(&self, id: NodeId) -> &[NodeId] {
        &self.children[id as usize]
    }

    /// All leafward paths from `v` down to leaves, each starting at `v`.
    fn descend(&self, v: NodeId) -> Vec<Vec<NodeId>> {
        let kids = &self.children[v as usize];
        if kids.is_empty() {
            debug_assert!(
                self.nodes[v as usize].vertex.is_some(),
                "leafward dead end must be a leaf"
            );
            return vec![vec![v]];
        }
        let mut out = Vec::new();
        for &c in kids {
            for mut tail in self.descend(c) {
                let mut path = Vec::with_capacity(tail.len() + 1);
                path.push(v);
                path.append(&mut tail);
                out.push(path);
            }
        }
        out
    }

    /// One path per original edge: climb from a leaf to the power edge,
    /// cross it, descend to a leaf on the far side. Paths are grouped by
    /// power edge, in power-edge order.
    pub fn enumerate_spline_paths(&self) -> Vec<SplinePath> {
        let mut out = Vec::new();
        for (idx, &(a, b)) in self.power_edges.iter().enumerate() {
            let ups = self.descend(a);
            let downs = self.descend(b);
            for up in &ups {
                for down in &downs {
                    let mut nodes: Vec<NodeId> = up.iter().rev().copied().collect();
                    nodes.extend_from_slice(down);
                    out.push(SplinePath { power_edge: idx, nodes });
                }
            }
        }
        out
    }

    /// Reads the drawn adjacency back off the enumerated paths' endpoints.
    /// Undirected pairs are normalised small-id-first.
    pub fn recover_graph(&self) -> HashSet<(VertexId, VertexId)> {
        let mut edges = HashSet::new();
        for path in self.enumerate_spline_paths() {
            let first = self.nodes[*path.nodes.first().unwrap() as usize]
                .vertex
                .expect("path starts at a leaf");
            let last = self.nodes[*path.nodes.last().unwrap() as usize]
                .vertex
                .expect("path ends at a leaf");
            let key = if !self.directed && first > last {
                (last, first)
            } else {
                (first, last)
            };
            edges.insert(key);
        }
        edges
    }

    /// Planarity of the routing structure with split halves contracted
    /// (splitting is a drawing device and must not change the verdict).
    /// A planar routing graph means the drawing style can realise the graph
    /// without strand crossings.
    pub fn is_planar(&self) -> bool {
        let mut rep: Vec<NodeId> = (0..self.nodes.len() as NodeId).collect();
        for &(v, fan) in &self.splits {
            rep[fan as usize] = v;
        }
        let mut g: UnGraph<(), ()> = UnGraph::default();
        let idx: Vec<_> = (0..self.nodes.len()).map(|_| g.add_node(())).collect();
        let mut seen = HashSet::new();
        for &(a, b) in self.tree_edges.iter().chain(self.power_edges.iter()) {
            let (x, y) = (rep[a as usize], rep[b as usize]);
            if x == y {
                continue;
            }
            let key = (x.min(y), x.max(y));
            if seen.insert(key) {
                g.add_edge(idx[x as usize], idx[y as usize], ());
            }
        }
        rustworkx_core::planar::is_planar(&g)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct NodeDoc {
            id: NodeId,
            module: ModuleId,
            #[serde(skip_serializing_if = "Option::is_none")]
            vertex: Option<VertexId>,
            role: NodeRole,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            directed: bool,
            nodes: Vec<NodeDoc>,
            tree_edges: &'a [(NodeId, NodeId)],
            power_edges: &'a [(NodeId, NodeId)],
            splits: &'a [(NodeId, NodeId)],
        }
        let doc = Doc {
            directed: self.directed,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| NodeDoc {
                    id: i as NodeId,
                    module: n.module,
                    vertex: n.vertex,
                    role: n.role,
                })
                .collect(),
            tree_edges: &self.tree_edges,
            power_edges: &self.power_edges,
            splits: &self.splits,
        };
        serde_json::to_string_pretty(&doc).expect("routing graph serialises")
    }
}
