//! The canonical 1,3-trees `T_i`, Hists (spanning trees with no vertex of
//! degree two) and outer-cycle multisets.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::CubicGraph;

pub const MIN_DEPTH: usize = 1;
pub const MAX_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree depth {0} is outside {MIN_DEPTH}..={MAX_DEPTH}")]
    DepthOutOfRange(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HistError {
    #[error("edge {0}-{1} is not an edge of the graph")]
    NotAnEdge(usize, usize),
    #[error("expected {expected} tree edges, got {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("tree edges contain a cycle")]
    NotAcyclic,
    #[error("vertex {vertex} has tree degree {degree}")]
    Degree { vertex: usize, degree: usize },
}

/// Number of leaves of `T_i`: `3 * 2^(i-1)`.
pub fn leaf_count(depth: usize) -> usize {
    3 << (depth - 1)
}

/// Number of vertices of `T_i`: `1 + 3 * (2^i - 1)`.
pub fn vertex_count(depth: usize) -> usize {
    1 + 3 * ((1 << depth) - 1)
}

/// Depth `i` with `leaf_count(i) == leaves`, if any.
pub fn depth_for_leaf_count(leaves: usize) -> Option<usize> {
    (MIN_DEPTH..=MAX_DEPTH).find(|&i| leaf_count(i) == leaves)
}

/// `T_i` with its canonical labelling.
///
/// Leaves are `0..l` from left to right, so branch `k` of the centre owns
/// the contiguous block `[k*l/3, (k+1)*l/3)` and shifting labels by `l/3`
/// rotates the branches. The centre is `l`; the remaining internal vertices
/// follow level by level, left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiTree {
    depth: usize,
    parent: Vec<Option<usize>>,
    level: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

pub fn build_ti(depth: usize) -> Result<TiTree, TreeError> {
    TiTree::new(depth)
}

impl TiTree {
    pub fn new(depth: usize) -> Result<Self, TreeError> {
        if !(MIN_DEPTH..=MAX_DEPTH).contains(&depth) {
            return Err(TreeError::DepthOutOfRange(depth));
        }
        let leaves = leaf_count(depth);
        let total = vertex_count(depth);
        let label = |d: usize, j: usize| -> usize {
            if d == depth {
                j
            } else if d == 0 {
                leaves
            } else {
                leaves + 1 + 3 * ((1 << (d - 1)) - 1) + j
            }
        };
        let mut parent = vec![None; total];
        let mut level = vec![0; total];
        let mut edges = Vec::with_capacity(total - 1);
        for d in 1..=depth {
            for j in 0..(3usize << (d - 1)) {
                let v = label(d, j);
                let p = if d == 1 { label(0, 0) } else { label(d - 1, j / 2) };
                parent[v] = Some(p);
                level[v] = d;
                edges.push((v.min(p), v.max(p)));
            }
        }
        edges.sort_unstable();
        Ok(Self {
            depth,
            parent,
            level,
            edges,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaf_count(&self) -> usize {
        leaf_count(self.depth)
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn center(&self) -> usize {
        self.leaf_count()
    }

    /// Label shift that rotates the three branches.
    pub fn rotation_shift(&self) -> usize {
        self.leaf_count() / 3
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v < self.leaf_count()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Distance from the centre.
    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn branch(&self, leaf: usize) -> usize {
        leaf / self.rotation_shift()
    }

    /// Tree edges as sorted `(min, max)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Distance in the tree between two leaves.
    pub fn leaf_distance(&self, a: usize, b: usize) -> usize {
        if self.branch(a) != self.branch(b) {
            return 2 * self.depth;
        }
        let per_branch = self.rotation_shift();
        let diff = (a % per_branch) ^ (b % per_branch);
        2 * (usize::BITS - diff.leading_zeros()) as usize
    }

    /// The tree edges as a 0/1 mask over the edge ids of `g`, or `None` if
    /// some tree edge is missing from `g`.
    pub fn edge_ids_in(&self, g: &CubicGraph) -> Option<Vec<usize>> {
        self.edges.iter().map(|&(u, v)| g.edge_id(u, v)).collect()
    }
}

/// Multiset of outer-cycle lengths, kept in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OcMultiset(Vec<usize>);

impl OcMultiset {
    pub fn new(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Self(lengths)
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for OcMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl std::str::FromStr for OcMultiset {
    type Err = String;

    /// Accepts `{8,8,8}`, `8,8,8` or `8 8 8`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let lengths = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|e| format!("bad length {t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if lengths.is_empty() {
            return Err("empty multiset".into());
        }
        Ok(OcMultiset::new(lengths))
    }
}

/// A Hist of a cubic graph together with its outer cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistWitness {
    /// Sorted `(min, max)` pairs, `n - 1` of them.
    pub tree_edges: Vec<(usize, usize)>,
    pub leaves: Vec<usize>,
    /// Outer cycles as vertex sequences.
    pub outer_cycles: Vec<Vec<usize>>,
    pub oc: OcMultiset,
}

impl HistWitness {
    /// Checks that `tree_edges` is a Hist of `g` and collects its outer
    /// cycles.
    pub fn new(g: &CubicGraph, tree_edges: &[(usize, usize)]) -> Result<Self, HistError> {
        let n = g.order();
        if tree_edges.len() != n - 1 {
            return Err(HistError::EdgeCount {
                expected: n - 1,
                found: tree_edges.len(),
            });
        }
        let mut in_tree = vec![false; g.size()];
        let mut degree = vec![0usize; n];
        let mut dsu = Dsu::new(n);
        for &(u, v) in tree_edges {
            let e = g.edge_id(u, v).ok_or(HistError::NotAnEdge(u, v))?;
            if in_tree[e] || !dsu.union(u, v) {
                return Err(HistError::NotAcyclic);
            }
            in_tree[e] = true;
            degree[u] += 1;
            degree[v] += 1;
        }
        if let Some(vertex) = (0..n).find(|&v| degree[v] != 1 && degree[v] != 3) {
            return Err(HistError::Degree {
                vertex,
                degree: degree[vertex],
            });
        }
        let leaves: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        // Leaves have two non-tree edges; internal vertices have none, so
        // the non-tree edges form a 2-factor on the leaves.
        let mut visited = vec![false; n];
        let mut outer_cycles = Vec::new();
        for &start in &leaves {
            if visited[start] {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut prev = usize::MAX;
            let mut cur = start;
            loop {
                let next = g
                    .neighbors(cur)
                    .iter()
                    .zip(g.incident_edges(cur))
                    .find(|&(&w, &e)| !in_tree[e] && w != prev)
                    .map(|(&w, _)| w)
                    .expect("leaf has two non-tree edges");
                if next == start {
                    break;
                }
                visited[next] = true;
                cycle.push(next);
                prev = cur;
                cur = next;
            }
            outer_cycles.push(cycle);
        }
        let oc = OcMultiset::new(outer_cycles.iter().map(Vec::len).collect());
        let mut tree_edges: Vec<(usize, usize)> =
            tree_edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        tree_edges.sort_unstable();
        Ok(Self {
            tree_edges,
            leaves,
            outer_cycles,
            oc,
        })
    }

    /// Depth `i` if this Hist is isomorphic to `T_i`.
    pub fn ti_depth(&self, n: usize) -> Option<usize> {
        ti_depth_of_tree(n, &self.tree_edges)
    }
}

pub fn oc_of_hist(g: &CubicGraph, tree_edges: &[(usize, usize)]) -> Result<OcMultiset, HistError> {
    HistWitness::new(g, tree_edges).map(|w| w.oc)
}

/// `true` iff `tree_edges` is a Hist of `g` isomorphic to `T_i`.
pub fn is_ti_hist(g: &CubicGraph, tree_edges: &[(usize, usize)], depth: usize) -> bool {
    HistWitness::new(g, tree_edges)
        .ok()
        .and_then(|w| w.ti_depth(g.order()))
        == Some(depth)
}

/// Every Hist of `g` isomorphic to `T_depth`. Internal vertices of a Hist
/// keep all three edges, so such a Hist is fixed by its centre: it exists
/// iff growing the tree outwards from the centre for `depth` levels never
/// meets a vertex twice and reaches all of `g`.
pub fn ti_hists(g: &CubicGraph, depth: usize) -> Vec<HistWitness> {
    let n = g.order();
    if !(MIN_DEPTH..=MAX_DEPTH).contains(&depth) || vertex_count(depth) != n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut seen = vec![usize::MAX; n];
    for centre in 0..n {
        seen[centre] = centre;
        let mut edges = Vec::with_capacity(n - 1);
        let mut frontier = vec![(centre, usize::MAX)];
        let mut ok = true;
        'grow: for _ in 0..depth {
            let mut next = Vec::with_capacity(2 * frontier.len() + 1);
            for &(v, parent) in &frontier {
                for &w in g.neighbors(v) {
                    if w == parent {
                        continue;
                    }
                    if seen[w] == centre {
                        ok = false;
                        break 'grow;
                    }
                    seen[w] = centre;
                    edges.push((v.min(w), v.max(w)));
                    next.push((w, v));
                }
            }
            frontier = next;
        }
        if ok && edges.len() == n - 1 {
            out.push(HistWitness::new(g, &edges).expect("grown tree is a Hist"));
        }
    }
    out
}

/// For a 1,3-tree on `0..n`: the depth `i` of a vertex at equal distance
/// `i` from every leaf, if one exists.
fn ti_depth_of_tree(n: usize, tree_edges: &[(usize, usize)]) -> Option<usize> {
    let mut adj = vec![Vec::with_capacity(3); n];
    for &(u, v) in tree_edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for center in (0..n).filter(|&v| adj[v].len() == 3) {
        dist.fill(usize::MAX);
        dist[center] = 0;
        queue.push_back(center);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        let mut leaf_dists = (0..n).filter(|&v| adj[v].len() == 1).map(|v| dist[v]);
        let first = leaf_dists.next()?;
        if leaf_dists.all(|d| d == first) {
            return Some(first);
        }
    }
    None
}

// ---- Hist search ---------------------------------------------------------------

pub const DEFAULT_HIST_LIMIT: usize = 64;
pub const DEFAULT_HIST_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistSearchOptions {
    /// Stop after this many Hists.
    pub limit: Option<usize>,
    /// Stop after this many search nodes.
    pub budget: Option<u64>,
}

impl Default for HistSearchOptions {
    fn default() -> Self {
        Self {
            limit: Some(DEFAULT_HIST_LIMIT),
            budget: Some(DEFAULT_HIST_BUDGET),
        }
    }
}

impl HistSearchOptions {
    pub fn unbounded() -> Self {
        Self {
            limit: None,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistSearch {
    pub hists: Vec<HistWitness>,
    /// The search stopped at the limit or the budget before finishing.
    pub truncated: bool,
    pub nodes: u64,
}

/// Enumerates the Hists of `g`, each edge set once.
///
/// A Hist is determined by its set `I` of internal vertices: `I` induces a
/// tree and every other vertex has exactly one neighbour in `I`. The search
/// grows `I` as a connected set from vertex 0 (or from one of its
/// neighbours when 0 is a leaf), deciding frontier vertices in index order.
pub fn find_hists(g: &CubicGraph, options: HistSearchOptions) -> HistSearch {
    let mut search = HistSearcher {
        g,
        limit: options.limit.unwrap_or(usize::MAX),
        budget: options.budget.unwrap_or(u64::MAX),
        nodes: 0,
        truncated: false,
        found: Vec::new(),
    };
    let n = g.order();
    if n % 2 == 0 && crate::graph::is_connected(g) {
        let root = HistState::new(n);
        // Vertex 0 internal.
        if let Some(state) = root.clone().set_internal(g, 0) {
            search.descend(state);
        }
        // Vertex 0 a leaf hanging from neighbour w.
        for &w in g.neighbors(0) {
            if search.stopped() {
                break;
            }
            let state = root.clone().set_internal(g, w).and_then(|s| s.set_leaf(g, 0));
            if let Some(state) = state {
                search.descend(state);
            }
        }
    }
    HistSearch {
        hists: search.found,
        truncated: search.truncated,
        nodes: search.nodes,
    }
}

const UNDECIDED: u8 = 0;
const INTERNAL: u8 = 1;
const LEAF: u8 = 2;

#[derive(Clone)]
struct HistState {
    status: Vec<u8>,
    /// Number of internal neighbours.
    internal_nbrs: Vec<u8>,
    internal: usize,
}

impl HistState {
    fn new(n: usize) -> Self {
        Self {
            status: vec![UNDECIDED; n],
            internal_nbrs: vec![0; n],
            internal: 0,
        }
    }

    fn set_internal(mut self, g: &CubicGraph, v: usize) -> Option<Self> {
        if self.status[v] != UNDECIDED || self.internal_nbrs[v] > 1 {
            return None;
        }
        if self.internal > 0 && self.internal_nbrs[v] != 1 {
            return None;
        }
        self.status[v] = INTERNAL;
        self.internal += 1;
        if 2 * self.internal > g.order() - 2 {
            return None;
        }
        let mut forced = Vec::new();
        for &w in g.neighbors(v) {
            self.internal_nbrs[w] += 1;
            match self.status[w] {
                // An undecided vertex with two internal neighbours can be
                // neither internal (cycle) nor a leaf.
                UNDECIDED if self.internal_nbrs[w] >= 2 => return None,
                LEAF if self.internal_nbrs[w] >= 2 => return None,
                LEAF => forced.push(w),
                _ => {}
            }
        }
        let mut state = self;
        for w in forced {
            state = state.close_leaf(g, w)?;
        }
        Some(state)
    }

    fn set_leaf(mut self, g: &CubicGraph, v: usize) -> Option<Self> {
        if self.status[v] != UNDECIDED || self.internal_nbrs[v] > 1 {
            return None;
        }
        self.status[v] = LEAF;
        if self.internal_nbrs[v] == 1 {
            self.close_leaf(g, v)
        } else {
            Some(self)
        }
    }

    /// `v` is a leaf that already has its internal neighbour: its other
    /// neighbours must be leaves too.
    fn close_leaf(mut self, g: &CubicGraph, v: usize) -> Option<Self> {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if self.status[w] == UNDECIDED {
                    if self.internal_nbrs[w] > 1 {
                        return None;
                    }
                    self.status[w] = LEAF;
                    if self.internal_nbrs[w] == 1 {
                        stack.push(w);
                    }
                }
            }
        }
        Some(self)
    }

    /// Leaves still waiting for an internal neighbour need an undecided one.
    fn viable(&self, g: &CubicGraph) -> bool {
        (0..g.order()).all(|v| {
            self.status[v] != LEAF
                || self.internal_nbrs[v] == 1
                || g.neighbors(v).iter().any(|&w| self.status[w] == UNDECIDED)
        })
    }
}

struct HistSearcher<'a> {
    g: &'a CubicGraph,
    limit: usize,
    budget: u64,
    nodes: u64,
    truncated: bool,
    found: Vec<HistWitness>,
}

impl HistSearcher<'_> {
    fn stopped(&self) -> bool {
        self.truncated || self.found.len() >= self.limit
    }

    fn descend(&mut self, state: HistState) {
        if self.stopped() {
            return;
        }
        if self.nodes >= self.budget {
            self.truncated = true;
            return;
        }
        self.nodes += 1;
        if !state.viable(self.g) {
            return;
        }
        let g = self.g;
        let frontier = (0..g.order())
            .find(|&v| state.status[v] == UNDECIDED && state.internal_nbrs[v] == 1);
        match frontier {
            Some(v) => {
                if let Some(next) = state.clone().set_internal(g, v) {
                    self.descend(next);
                }
                if let Some(next) = state.set_leaf(g, v) {
                    self.descend(next);
                }
            }
            None => self.complete(&state),
        }
    }

    fn complete(&mut self, state: &HistState) {
        let g = self.g;
        let n = g.order();
        let done = (0..n).all(|v| match state.status[v] {
            INTERNAL => true,
            LEAF => state.internal_nbrs[v] == 1,
            _ => false,
        });
        if !done || 2 * state.internal != n - 2 {
            return;
        }
        let tree: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| state.status[u] == INTERNAL || state.status[v] == INTERNAL)
            .collect();
        let witness = HistWitness::new(g, &tree).expect("search produces Hists");
        self.found.push(witness);
        if self.found.len() >= self.limit {
            self.truncated = true;
        }
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
