//! Power graph decomposition: vertices are grouped into a module hierarchy so
//! that many original edges can be replaced by few module-to-module "power
//! edges", each standing for the complete biclique between the leaf sets of
//! its two endpoints.
//!
//! The decomposition is greedy: repeatedly merge the pair of top-level
//! modules with the best score, where the score rewards shared neighbours
//! and penalises unshared ones. Neighbour sets are hash sets, so a single
//! score evaluation costs time proportional to the smaller set.

use crate::graph::{Graph, VertexId};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

pub type ModuleId = u32;

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("cannot merge module {0} with itself")]
    SelfMerge(ModuleId),
    #[error("module {0} does not exist or was removed")]
    DeadModule(ModuleId),
    #[error("module {0} is not top-level")]
    NotTopLevel(ModuleId),
    #[error("module {0} already has a parent")]
    AlreadyParented(ModuleId),
    #[error("group needs at least one child")]
    EmptyGroup,
    #[error("power edge endpoints must be distinct (got {0} twice)")]
    SelfNeighbour(ModuleId),
    #[error("duplicate power edge between {0} and {1}")]
    DuplicatePowerEdge(ModuleId, ModuleId),
    #[error("invalid hierarchy: {0}")]
    Invalid(String),
    #[error("malformed hierarchy document: {0}")]
    Document(String),
}

/// Scoring weights: `w_cap` rewards each shared neighbour, `w_tri` penalises
/// each unshared one. `w_tri` may be infinite, which forbids any merge whose
/// members have differing neighbourhoods (and then only sets of true twins
/// collapse, i.e. a modular decomposition).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreWeights {
    pub w_cap: f64,
    pub w_tri: f64,
}

impl ScoreWeights {
    pub fn new(w_cap: f64, w_tri: f64) -> Self {
        assert!(w_cap > 0.0, "w_cap must be positive");
        assert!(w_tri >= 0.0, "w_tri must be non-negative");
        ScoreWeights { w_cap, w_tri }
    }

    /// The default (10, 1): strongly favour shared neighbours but break the
    /// tie between equal-intersection candidates with the unshared count.
    pub fn default_weights() -> Self {
        ScoreWeights::new(10.0, 1.0)
    }

    /// Intersection-only scoring (1, 0).
    pub fn intersection_only() -> Self {
        ScoreWeights::new(1.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ModuleData {
    alive: bool,
    /// `Some(v)` iff this module is the leaf for original vertex `v`.
    vertex: Option<VertexId>,
    parent: Option<ModuleId>,
    children: HashSet<ModuleId>,
    /// Neighbour set; in undirected mode the only one used.
    out: HashSet<ModuleId>,
    /// Incoming neighbour set (directed mode only; empty otherwise).
    inc: HashSet<ModuleId>,
}

impl ModuleData {
    fn leaf(vertex: VertexId) -> Self {
        ModuleData {
            alive: true,
            vertex: Some(vertex),
            parent: None,
            children: HashSet::new(),
            out: HashSet::new(),
            inc: HashSet::new(),
        }
    }

    fn group() -> Self {
        ModuleData {
            alive: true,
            vertex: None,
            parent: None,
            children: HashSet::new(),
            out: HashSet::new(),
            inc: HashSet::new(),
        }
    }

    fn is_leaf(&self) -> bool {
        self.vertex.is_some()
    }
}

/// What a merge did to the participating modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeOutcome {
    /// Neither side could be absorbed: both became children of a new module.
    NewParent(ModuleId),
    /// One side subsumed the pair; the other became its child.
    AbsorbedInto(ModuleId),
    /// Both sides had identical neighbourhoods; `kept` adopted the children
    /// of `removed`, which no longer exists.
    Collapsed { kept: ModuleId, removed: ModuleId },
}

/// A module hierarchy over the vertices of one graph, together with the
/// power-edge neighbour relation between modules.
///
/// Invariants (checked by [`Hierarchy::validate`]): parent/child links form a
/// tree rooted at `root`; leaves are exactly the original vertices; the
/// neighbour relation is irreflexive and (per direction) symmetric; no vertex
/// pair is covered by more than one power edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    directed: bool,
    modules: Vec<ModuleData>,
    root: ModuleId,
    n_leaves: usize,
}

impl Hierarchy {
    /// One leaf per vertex carrying that vertex's adjacency, all children of
    /// a fresh root.
    pub fn init_from_graph(g: &Graph) -> Hierarchy {
        let n = g.vertex_count();
        let mut modules: Vec<ModuleData> = (0..n).map(|v| ModuleData::leaf(v as VertexId)).collect();
        let root = n as ModuleId;
        let mut root_data = ModuleData::group();
        for (v, m) in modules.iter_mut().enumerate() {
            m.parent = Some(root);
            root_data.children.insert(v as ModuleId);
        }
        let (out, inc) = g.directed_neighbour_lists();
        for v in 0..n {
            modules[v].out = out[v].iter().map(|&u| u as ModuleId).collect();
            if g.directed() {
                modules[v].inc = inc[v].iter().map(|&u| u as ModuleId).collect();
            }
        }
        modules.push(root_data);
        Hierarchy {
            directed: g.directed(),
            modules,
            root,
            n_leaves: n,
        }
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn root(&self) -> ModuleId {
        self.root
    }

    pub fn leaf_count(&self) -> usize {
        self.n_leaves
    }

    pub fn is_alive(&self, m: ModuleId) -> bool {
        self.modules
            .get(m as usize)
            .map(|d| d.alive)
            .unwrap_or(false)
    }

    pub fn is_leaf(&self, m: ModuleId) -> bool {
        self.modules[m as usize].is_leaf()
    }

    /// The original vertex behind a leaf module.
    pub fn leaf_vertex(&self, m: ModuleId) -> Option<VertexId> {
        self.modules[m as usize].vertex
    }

    pub fn parent(&self, m: ModuleId) -> Option<ModuleId> {
        self.modules[m as usize].parent
    }

    pub fn children_sorted(&self, m: ModuleId) -> Vec<ModuleId> {
        let mut c: Vec<ModuleId> = self.modules[m as usize].children.iter().copied().collect();
        c.sort_unstable();
        c
    }

    pub fn out_neighbours_sorted(&self, m: ModuleId) -> Vec<ModuleId> {
        let mut v: Vec<ModuleId> = self.modules[m as usize].out.iter().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn in_neighbours_sorted(&self, m: ModuleId) -> Vec<ModuleId> {
        let mut v: Vec<ModuleId> = self.modules[m as usize].inc.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Ids of all alive modules, sorted.
    pub fn alive_modules(&self) -> Vec<ModuleId> {
        (0..self.modules.len() as ModuleId)
            .filter(|&m| self.modules[m as usize].alive)
            .collect()
    }

    /// Children of the root, sorted: the candidate set for greedy merging.
    pub fn top_level(&self) -> Vec<ModuleId> {
        self.children_sorted(self.root)
    }

    /// Leaf vertices contained in the subtree of `m`, sorted.
    pub fn leaves_under(&self, m: ModuleId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            let d = &self.modules[x as usize];
            if let Some(v) = d.vertex {
                out.push(v);
            }
            stack.extend(d.children.iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// Number of shared neighbours (summed over both directions when
    /// directed).
    pub fn kappa_intersection(&self, m: ModuleId, n: ModuleId) -> usize {
        let a = &self.modules[m as usize];
        let b = &self.modules[n as usize];
        let mut k = set_intersection_len(&a.out, &b.out);
        if self.directed {
            k += set_intersection_len(&a.inc, &b.inc);
        }
        k
    }

    /// Number of unshared neighbours (symmetric difference, summed over both
    /// directions when directed).
    pub fn kappa_symdiff(&self, m: ModuleId, n: ModuleId) -> usize {
        let a = &self.modules[m as usize];
        let b = &self.modules[n as usize];
        let mut k = a.out.len() + b.out.len() - 2 * set_intersection_len(&a.out, &b.out);
        if self.directed {
            k += a.inc.len() + b.inc.len() - 2 * set_intersection_len(&a.inc, &b.inc);
        }
        k
    }

    /// `w_cap * intersection - w_tri * symdiff`, with the convention that a
    /// zero symdiff never incurs a penalty even for infinite `w_tri`.
    pub fn kappa_score(&self, m: ModuleId, n: ModuleId, w: &ScoreWeights) -> f64 {
        score_from_counts(self.kappa_intersection(m, n), self.kappa_symdiff(m, n), w)
    }

    fn assert_mergeable(&self, m: ModuleId, n: ModuleId) -> Result<(), HierarchyError> {
        if m == n {
            return Err(HierarchyError::SelfMerge(m));
        }
        for x in [m, n] {
            if !self.is_alive(x) {
                return Err(HierarchyError::DeadModule(x));
            }
            if self.modules[x as usize].parent != Some(self.root) {
                return Err(HierarchyError::NotTopLevel(x));
            }
        }
        Ok(())
    }

    fn sides(&self) -> &'static [Side] {
        if self.directed {
            &[Side::Out, Side::Inc]
        } else {
            &[Side::Out]
        }
    }

    fn nb(&self, m: ModuleId, side: Side) -> &HashSet<ModuleId> {
        let d = &self.modules[m as usize];
        match side {
            Side::Out => &d.out,
            Side::Inc => &d.inc,
        }
    }

    /// Removes the link `m --side--> s` together with its mirror entry at `s`.
    fn remove_link(&mut self, m: ModuleId, s: ModuleId, side: Side) {
        match side {
            Side::Out => {
                self.modules[m as usize].out.remove(&s);
                if self.directed {
                    self.modules[s as usize].inc.remove(&m);
                } else {
                    self.modules[s as usize].out.remove(&m);
                }
            }
            Side::Inc => {
                self.modules[m as usize].inc.remove(&s);
                self.modules[s as usize].out.remove(&m);
            }
        }
    }

    /// Adds the link `m --side--> s` together with its mirror entry at `s`.
    fn add_link(&mut self, m: ModuleId, s: ModuleId, side: Side) {
        match side {
            Side::Out => {
                self.modules[m as usize].out.insert(s);
                if self.directed {
                    self.modules[s as usize].inc.insert(m);
                } else {
                    self.modules[s as usize].out.insert(m);
                }
            }
            Side::Inc => {
                self.modules[m as usize].inc.insert(s);
                self.modules[s as usize].out.insert(m);
            }
        }
    }

    fn reparent(&mut self, child: ModuleId, new_parent: ModuleId) {
        if let Some(p) = self.modules[child as usize].parent {
            self.modules[p as usize].children.remove(&child);
        }
        self.modules[child as usize].parent = Some(new_parent);
        self.modules[new_parent as usize].children.insert(child);
    }

    /// A non-leaf module whose neighbour sets empty out no longer stands for
    /// any power edge, so it dissolves into its parent. Unreachable from the
    /// greedy loop (each case provably leaves neighbours behind) but kept so
    /// `merge` matches the always-create-a-parent formulation on hand-built
    /// hierarchies too.
    fn dissolve_if_empty(&mut self, m: ModuleId) {
        let d = &self.modules[m as usize];
        if !d.alive || d.is_leaf() || !d.out.is_empty() || !d.inc.is_empty() || m == self.root {
            return;
        }
        let parent = d.parent.expect("non-root module has a parent");
        for c in self.children_sorted(m) {
            self.reparent(c, parent);
        }
        self.modules[parent as usize].children.remove(&m);
        self.modules[m as usize].alive = false;
        self.modules[m as usize].parent = None;
    }

    /// Merges two top-level modules.
    ///
    /// A side can be absorbed if it is not a leaf and all its neighbours are
    /// shared with the other side. Neither absorbable: both become children
    /// of a new module that takes over the shared neighbours. Exactly one
    /// absorbable: it adopts the other, which keeps only its unshared
    /// neighbours. Both absorbable: the first adopts the children of the
    /// second, which is removed.
    pub fn merge(&mut self, m: ModuleId, n: ModuleId) -> Result<MergeOutcome, HierarchyError> {
        self.assert_mergeable(m, n)?;
        let shared: Vec<(Side, Vec<ModuleId>)> = self
            .sides()
            .iter()
            .map(|&side| {
                let mut s: Vec<ModuleId> = self
                    .nb(m, side)
                    .intersection(self.nb(n, side))
                    .copied()
                    .collect();
                s.sort_unstable();
                (side, s)
            })
            .collect();
        let absorbable = |h: &Self, x: ModuleId, y: ModuleId| {
            !h.modules[x as usize].is_leaf()
                && h.sides()
                    .iter()
                    .all(|&side| h.nb(x, side).is_subset(h.nb(y, side)))
        };
        let m_abs = absorbable(self, m, n);
        let n_abs = absorbable(self, n, m);

        let outcome = match (m_abs, n_abs) {
            (false, false) => {
                let p = self.modules.len() as ModuleId;
                self.modules.push(ModuleData::group());
                self.reparent(p, self.root);
                self.reparent(m, p);
                self.reparent(n, p);
                for (side, ss) in &shared {
                    for &s in ss {
                        self.remove_link(m, s, *side);
                        self.remove_link(n, s, *side);
                        self.add_link(p, s, *side);
                    }
                }
                MergeOutcome::NewParent(p)
            }
            (true, false) | (false, true) => {
                let (absorber, adopted) = if m_abs { (m, n) } else { (n, m) };
                self.reparent(adopted, absorber);
                for (side, ss) in &shared {
                    for &s in ss {
                        self.remove_link(adopted, s, *side);
                    }
                }
                MergeOutcome::AbsorbedInto(absorber)
            }
            (true, true) => {
                for c in self.children_sorted(n) {
                    self.reparent(c, m);
                }
                for &side in self.sides() {
                    let mut links: Vec<ModuleId> = self.nb(n, side).iter().copied().collect();
                    links.sort_unstable();
                    for s in links {
                        self.remove_link(n, s, side);
                    }
                }
                self.modules[self.root as usize].children.remove(&n);
                self.modules[n as usize].alive = false;
                self.modules[n as usize].parent = None;
                MergeOutcome::Collapsed { kept: m, removed: n }
            }
        };
        self.dissolve_if_empty(m);
        if self.is_alive(n) {
            self.dissolve_if_empty(n);
        }
        Ok(outcome)
    }

    /// All power edges as module pairs: unordered with `a < b` when
    /// undirected, ordered `(from, to)` when directed. Sorted.
    pub fn neighbour_pairs(&self) -> Vec<(ModuleId, ModuleId)> {
        let mut pairs = Vec::new();
        for m in self.alive_modules() {
            for &n in &self.modules[m as usize].out {
                if self.directed || m < n {
                    pairs.push((m, n));
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// Expands every power edge to the biclique over its endpoints' leaves.
    /// Errors if any vertex pair is covered twice (which would mean the
    /// hierarchy does not partition the edge set).
    pub fn expanded_edges(&self) -> Result<HashSet<(VertexId, VertexId)>, HierarchyError> {
        let mut edges = HashSet::new();
        for (m, n) in self.neighbour_pairs() {
            for &u in &self.leaves_under(m) {
                for &v in &self.leaves_under(n) {
                    if u == v {
                        return Err(HierarchyError::Invalid(format!(
                            "power edge between {m} and {n} has overlapping leaf sets"
                        )));
                    }
                    let key = if !self.directed && u > v { (v, u) } else { (u, v) };
                    if !edges.insert(key) {
                        return Err(HierarchyError::Invalid(format!(
                            "vertex pair ({u}, {v}) covered by more than one power edge"
                        )));
                    }
                }
            }
        }
        Ok(edges)
    }

    /// Power-edge count and group count (non-leaf modules, root excluded).
    pub fn stats(&self) -> DecompositionStats {
        let groups = self
            .alive_modules()
            .into_iter()
            .filter(|&m| m != self.root && !self.is_leaf(m))
            .count();
        DecompositionStats {
            power_edges: self.neighbour_pairs().len(),
            groups,
        }
    }

    /// Structural invariant check; see the type-level docs.
    pub fn validate(&self) -> Result<(), HierarchyError> {
        let invalid = |msg: String| Err(HierarchyError::Invalid(msg));
        if !self.is_alive(self.root) || self.is_leaf(self.root) {
            return invalid("root must be an alive group".into());
        }
        let rd = &self.modules[self.root as usize];
        if rd.parent.is_some() || !rd.out.is_empty() || !rd.inc.is_empty() {
            return invalid("root must be parentless with no power edges".into());
        }
        let mut seen_vertices = HashSet::new();
        for m in self.alive_modules() {
            let d = &self.modules[m as usize];
            if let Some(v) = d.vertex {
                if !d.children.is_empty() {
                    return invalid(format!("leaf {m} has children"));
                }
                if !seen_vertices.insert(v) {
                    return invalid(format!("vertex {v} appears in two leaves"));
                }
            } else if m != self.root && d.children.is_empty() {
                return invalid(format!("group {m} has no children"));
            }
            if m != self.root {
                let p = match d.parent {
                    Some(p) => p,
                    None => return invalid(format!("module {m} has no parent")),
                };
                if !self.is_alive(p) || !self.modules[p as usize].children.contains(&m) {
                    return invalid(format!("module {m} not registered with its parent"));
                }
            }
            for &c in &d.children {
                if !self.is_alive(c) || self.modules[c as usize].parent != Some(m) {
                    return invalid(format!("child {c} of {m} has inconsistent parent link"));
                }
            }
            for (set, mirror_gets_inc) in [(&d.out, true), (&d.inc, false)] {
                for &s in set {
                    if s == m {
                        return invalid(format!("module {m} neighbours itself"));
                    }
                    if s == self.root || !self.is_alive(s) {
                        return invalid(format!("module {m} has invalid neighbour {s}"));
                    }
                    let sd = &self.modules[s as usize];
                    let mirrored = if self.directed {
                        if mirror_gets_inc {
                            sd.inc.contains(&m)
                        } else {
                            sd.out.contains(&m)
                        }
                    } else {
                        sd.out.contains(&m)
                    };
                    if !mirrored {
                        return invalid(format!("asymmetric power edge between {m} and {s}"));
                    }
                }
            }
            if !self.directed && !d.inc.is_empty() {
                return invalid(format!("undirected module {m} has incoming set"));
            }
        }
        if seen_vertices.len() != self.n_leaves
            || seen_vertices.iter().any(|&v| v as usize >= self.n_leaves)
        {
            return invalid("leaves do not cover the vertex range exactly".into());
        }
        // Walking up from every module must terminate at the root.
        for m in self.alive_modules() {
            let mut steps = 0;
            let mut cur = m;
            while let Some(p) = self.modules[cur as usize].parent {
                cur = p;
                steps += 1;
                if steps > self.modules.len() {
                    return invalid("parent chain contains a cycle".into());
                }
            }
            if cur != self.root {
                return invalid(format!("module {m} is not connected to the root"));
            }
        }
        self.expanded_edges()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = HierarchyDoc {
            directed: self.directed,
            root: self.root,
            modules: self
                .alive_modules()
                .into_iter()
                .map(|m| ModuleDoc {
                    id: m,
                    vertex: self.modules[m as usize].vertex,
                    parent: self.modules[m as usize].parent,
                    children: self.children_sorted(m),
                    out: self.out_neighbours_sorted(m),
                    inc: if self.directed {
                        Some(self.in_neighbours_sorted(m))
                    } else {
                        None
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("hierarchy serialises")
    }

    pub fn from_json(text: &str) -> Result<Hierarchy, HierarchyError> {
        let doc: HierarchyDoc =
            serde_json::from_str(text).map_err(|e| HierarchyError::Document(e.to_string()))?;
        let max_id = doc
            .modules
            .iter()
            .map(|m| m.id)
            .max()
            .ok_or_else(|| HierarchyError::Document("no modules".into()))?;
        if doc.root > max_id {
            return Err(HierarchyError::Document("root id out of range".into()));
        }
        let mut modules = vec![
            ModuleData {
                alive: false,
                vertex: None,
                parent: None,
                children: HashSet::new(),
                out: HashSet::new(),
                inc: HashSet::new(),
            };
            max_id as usize + 1
        ];
        let mut n_leaves = 0;
        for m in &doc.modules {
            let slot = &mut modules[m.id as usize];
            if slot.alive {
                return Err(HierarchyError::Document(format!("duplicate module id {}", m.id)));
            }
            slot.alive = true;
            slot.vertex = m.vertex;
            slot.parent = m.parent;
            slot.children = m.children.iter().copied().collect();
            slot.out = m.out.iter().copied().collect();
            slot.inc = m.inc.as_ref().map(|v| v.iter().copied().collect()).unwrap_or_default();
            if m.vertex.is_some() {
                n_leaves += 1;
            }
        }
        let h = Hierarchy {
            directed: doc.directed,
            modules,
            root: doc.root,
            n_leaves,
        };
        h.validate()?;
        Ok(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionStats {
    pub power_edges: usize,
    pub groups: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Out,
    Inc,
}

#[derive(Serialize, Deserialize)]
struct HierarchyDoc {
    directed: bool,
    root: ModuleId,
    modules: Vec<ModuleDoc>,
}

#[derive(Serialize, Deserialize)]
struct ModuleDoc {
    id: ModuleId,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertex: Option<VertexId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parent: Option<ModuleId>,
    children: Vec<ModuleId>,
    out: Vec<ModuleId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inc: Option<Vec<ModuleId>>,
}

fn set_intersection_len(a: &HashSet<ModuleId>, b: &HashSet<ModuleId>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|x| large.contains(x)).count()
}

pub fn score_from_counts(kappa_int: usize, kappa_sym: usize, w: &ScoreWeights) -> f64 {
    if kappa_sym == 0 {
        w.w_cap * kappa_int as f64
    } else {
        w.w_cap * kappa_int as f64 - w.w_tri * kappa_sym as f64
    }
}

/// Greedy decomposition. Each round scores every top-level pair that shares
/// at least one neighbour and merges the best one; rounds continue until no
/// candidate remains. Candidate order is a seeded shuffle and ties keep the
/// first candidate encountered, so different seeds may produce different
/// (equally valid) hierarchies while a fixed seed is fully deterministic.
pub fn decompose(g: &Graph, w: &ScoreWeights, seed: u64) -> Hierarchy {
    decompose_observed(g, w, seed, |_| {})
}

/// Like [`decompose`] but invokes `observer` after every merge, for invariant
/// checking in tests.
pub fn decompose_observed(
    g: &Graph,
    w: &ScoreWeights,
    seed: u64,
    mut observer: impl FnMut(&Hierarchy),
) -> Hierarchy {
    let mut h = Hierarchy::init_from_graph(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut tops = h.top_level();
        tops.shuffle(&mut rng);
        let mut best: Option<(f64, ModuleId, ModuleId)> = None;
        for i in 0..tops.len() {
            for j in (i + 1)..tops.len() {
                let (m, n) = (tops[i], tops[j]);
                let ki = h.kappa_intersection(m, n);
                if ki == 0 {
                    continue;
                }
                let s = score_from_counts(ki, h.kappa_symdiff(m, n), w);
                if s == f64::NEG_INFINITY {
                    continue; // infinite w_tri forbids this merge outright
                }
                if best.map_or(true, |(bs, _, _)| s > bs) {
                    best = Some((s, m, n));
                }
            }
        }
        match best {
            None => break,
            Some((_, m, n)) => {
                h.merge(m, n).expect("greedy candidates are mergeable");
                observer(&h);
            }
        }
    }
    debug_assert!(h.validate().is_ok(), "decompose output validates");
    h
}

/// Constructs hierarchies directly, for tests and hand-made fixtures.
///
/// Leaves and groups are added bottom-up; any module still parentless when
/// `build` runs becomes a child of the root.
pub struct HierarchyBuilder {
    directed: bool,
    modules: Vec<ModuleData>,
    n_leaves: usize,
}

impl HierarchyBuilder {
    pub fn new(directed: bool) -> Self {
        HierarchyBuilder {
            directed,
            modules: Vec::new(),
            n_leaves: 0,
        }
    }

    pub fn leaf(&mut self) -> ModuleId {
        let id = self.modules.len() as ModuleId;
        self.modules.push(ModuleData::leaf(self.n_leaves as VertexId));
        self.n_leaves += 1;
        id
    }

    pub fn leaves(&mut self, n: usize) -> Vec<ModuleId> {
        (0..n).map(|_| self.leaf()).collect()
    }

    pub fn group(&mut self, children: &[ModuleId]) -> Result<ModuleId, HierarchyError> {
        if children.is_empty() {
            return Err(HierarchyError::EmptyGroup);
        }
        let id = self.modules.len() as ModuleId;
        for &c in children {
            let d = self
                .modules
                .get_mut(c as usize)
                .ok_or(HierarchyError::DeadModule(c))?;
            if d.parent.is_some() {
                return Err(HierarchyError::AlreadyParented(c));
            }
            d.parent = Some(id);
        }
        let mut g = ModuleData::group();
        g.children = children.iter().copied().collect();
        self.modules.push(g);
        Ok(id)
    }

    /// Undirected power edge.
    pub fn power_edge(&mut self, a: ModuleId, b: ModuleId) -> Result<(), HierarchyError> {
        if a == b {
            return Err(HierarchyError::SelfNeighbour(a));
        }
        for x in [a, b] {
            if x as usize >= self.modules.len() {
                return Err(HierarchyError::DeadModule(x));
            }
        }
        if !self.modules[a as usize].out.insert(b) {
            return Err(HierarchyError::DuplicatePowerEdge(a, b));
        }
        self.modules[b as usize].out.insert(a);
        Ok(())
    }

    /// Directed power edge `from -> to`.
    pub fn directed_power_edge(&mut self, from: ModuleId, to: ModuleId) -> Result<(), HierarchyError> {
        if from == to {
            return Err(HierarchyError::SelfNeighbour(from));
        }
        for x in [from, to] {
            if x as usize >= self.modules.len() {
                return Err(HierarchyError::DeadModule(x));
            }
        }
        if !self.modules[from as usize].out.insert(to) {
            return Err(HierarchyError::DuplicatePowerEdge(from, to));
        }
        self.modules[to as usize].inc.insert(from);
        Ok(())
    }

    pub fn build(mut self) -> Result<Hierarchy, HierarchyError> {
        let root = self.modules.len() as ModuleId;
        let mut root_data = ModuleData::group();
        for (i, d) in self.modules.iter_mut().enumerate() {
            if d.parent.is_none() {
                d.parent = Some(root);
                root_data.children.insert(i as ModuleId);
            }
        }
        self.modules.push(root_data);
        let h = Hierarchy {
            directed: self.directed,
            modules: self.modules,
            root,
            n_leaves: self.n_leaves,
        };
        h.validate()?;
        Ok(h)
    }
}
