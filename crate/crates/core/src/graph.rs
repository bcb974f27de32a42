//! Immutable simple cubic graphs.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// Smallest cubic graph (`K_4`).
pub const MIN_VERTICES: usize = 4;
/// Largest supported order. Large enough for the depth-6 tree (190 vertices).
pub const MAX_VERTICES: usize = 190;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex count {0} is outside {MIN_VERTICES}..={MAX_VERTICES}")]
    VertexCount(usize),
    #[error("cubic graphs have an even number of vertices, got {0}")]
    OddOrder(usize),
    #[error("edge endpoint {vertex} out of range for {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    Loop(usize),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(usize, usize),
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    Degree { vertex: usize, degree: usize },
}

/// A simple 3-regular graph on vertices `0..n`.
///
/// Neighbour triples are kept sorted, and edges are numbered in lexicographic
/// order of their `(min, max)` endpoint pairs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CubicGraph {
    adj: Vec<[usize; 3]>,
    edges: Vec<(usize, usize)>,
    incident: Vec<[usize; 3]>,
}

impl CubicGraph {
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if !(MIN_VERTICES..=MAX_VERTICES).contains(&n) {
            return Err(GraphError::VertexCount(n));
        }
        if n % 2 == 1 {
            return Err(GraphError::OddOrder(n));
        }
        let mut lists: Vec<Vec<usize>> = vec![Vec::with_capacity(3); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::OutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            if lists[u].contains(&v) {
                return Err(GraphError::ParallelEdge(u.min(v), u.max(v)));
            }
            lists[u].push(v);
            lists[v].push(u);
        }
        let mut adj = Vec::with_capacity(n);
        for (vertex, list) in lists.iter_mut().enumerate() {
            if list.len() != 3 {
                return Err(GraphError::Degree {
                    vertex,
                    degree: list.len(),
                });
            }
            list.sort_unstable();
            adj.push([list[0], list[1], list[2]]);
        }
        Ok(Self::from_sorted_adjacency(adj))
    }

    fn from_sorted_adjacency(adj: Vec<[usize; 3]>) -> Self {
        let mut edges = Vec::with_capacity(adj.len() * 3 / 2);
        for (u, nbrs) in adj.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        let mut incident = vec![[usize::MAX; 3]; adj.len()];
        for (id, &(u, v)) in edges.iter().enumerate() {
            let iu = adj[u].iter().position(|&x| x == v).unwrap();
            let iv = adj[v].iter().position(|&x| x == u).unwrap();
            incident[u][iu] = id;
            incident[v][iv] = id;
        }
        Self {
            adj,
            edges,
            incident,
        }
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize; 3] {
        &self.adj[v]
    }

    /// Edge ids incident to `v`, aligned with [`Self::neighbors`].
    #[inline]
    pub fn incident_edges(&self, v: usize) -> &[usize; 3] {
        &self.incident[v]
    }

    /// All edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.order() && self.adj[u].contains(&v)
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// The graph with every vertex `v` renamed to `perm[v]`.
    ///
    /// Panics if `perm` is not a permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> CubicGraph {
        assert_eq!(perm.len(), self.order(), "permutation length mismatch");
        let mut adj = vec![[0usize; 3]; self.order()];
        let mut seen = vec![false; self.order()];
        for (v, nbrs) in self.adj.iter().enumerate() {
            let image = perm[v];
            assert!(!seen[image], "not a permutation");
            seen[image] = true;
            let mut row = [perm[nbrs[0]], perm[nbrs[1]], perm[nbrs[2]]];
            row.sort_unstable();
            adj[image] = row;
        }
        Self::from_sorted_adjacency(adj)
    }

    pub fn complete4() -> CubicGraph {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        CubicGraph::from_edges(4, edges).expect("K4 is cubic")
    }

    pub fn complete_bipartite33() -> CubicGraph {
        let edges = (0..3).flat_map(|a| (3..6).map(move |b| (a, b)));
        CubicGraph::from_edges(6, edges).expect("K3,3 is cubic")
    }

    /// Disjoint union, `other` shifted past `self`.
    pub fn disjoint_union(&self, other: &CubicGraph) -> Result<CubicGraph, GraphError> {
        let shift = self.order();
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        CubicGraph::from_edges(shift + other.order(), edges)
    }
}

impl fmt::Debug for CubicGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CubicGraph")
            .field("n", &self.order())
            .field("edges", &self.edges)
            .finish()
    }
}

pub fn is_connected(g: &CubicGraph) -> bool {
    let comp = components(g, &[]);
    comp.iter().all(|&c| c == 0)
}

/// Component index for every vertex after deleting the edges flagged in
/// `removed` (indexed by edge id; shorter slices mean "not removed").
/// Components are numbered in order of their smallest vertex.
pub fn components(g: &CubicGraph, removed: &[bool]) -> Vec<usize> {
    let n = g.order();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for (&w, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
                if removed.get(e).copied().unwrap_or(false) || comp[w] != usize::MAX {
                    continue;
                }
                comp[w] = next;
                queue.push_back(w);
            }
        }
        next += 1;
    }
    comp
}

/// Length of a shortest cycle.
pub fn girth(g: &CubicGraph) -> usize {
    shortest_cycle(g).len()
}

/// A shortest cycle as a vertex sequence. Among shortest cycles the one
/// found from the smallest BFS root is returned.
pub fn shortest_cycle(g: &CubicGraph) -> Vec<usize> {
    let n = g.order();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut best = usize::MAX;
    let mut best_at = (0, 0, 0);
    for root in 0..n {
        bfs_tree(g, root, &mut dist, &mut parent, &mut queue, |u, w, dist| {
            let len = dist[u] + dist[w] + 1;
            if len < best {
                best = len;
                best_at = (root, u, w);
            }
            2 * dist[u] >= best
        });
    }
    let (root, u, w) = best_at;
    bfs_tree(g, root, &mut dist, &mut parent, &mut queue, |_, _, _| false);
    let mut left = vec![u];
    while *left.last().unwrap() != root {
        left.push(parent[*left.last().unwrap()]);
    }
    let mut right = vec![w];
    while *right.last().unwrap() != root {
        right.push(parent[*right.last().unwrap()]);
    }
    right.pop();
    left.reverse();
    left.extend(right);
    left
}

/// Full BFS from `root`. `on_cross(u, w, dist)` is called for every non-tree
/// edge seen from `u` to an already discovered `w`; returning `true` stops
/// the search.
fn bfs_tree<F>(
    g: &CubicGraph,
    root: usize,
    dist: &mut [usize],
    parent: &mut [usize],
    queue: &mut VecDeque<usize>,
    mut on_cross: F,
) where
    F: FnMut(usize, usize, &[usize]) -> bool,
{
    dist.fill(usize::MAX);
    parent.fill(usize::MAX);
    queue.clear();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if w == parent[u] {
                continue;
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            } else if on_cross(u, w, dist) {
                return;
            }
        }
    }
}

/// BFS distances from `source`.
pub fn distances_from(g: &CubicGraph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.order()];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prism(k: usize) -> CubicGraph {
        let mut edges = Vec::new();
        for i in 0..k {
            edges.push((i, (i + 1) % k));
            edges.push((k + i, k + (i + 1) % k));
            edges.push((i, k + i));
        }
        CubicGraph::from_edges(2 * k, edges).unwrap()
    }

    #[test]
    fn rejects_invalid_input() {
        assert_eq!(
            CubicGraph::from_edges(2, [(0, 1)]),
            Err(GraphError::VertexCount(2))
        );
        assert_eq!(
            CubicGraph::from_edges(5, []),
            Err(GraphError::OddOrder(5))
        );
        assert_eq!(
            CubicGraph::from_edges(4, [(0, 0)]),
            Err(GraphError::Loop(0))
        );
        assert_eq!(
            CubicGraph::from_edges(4, [(0, 1), (1, 0)]),
            Err(GraphError::ParallelEdge(0, 1))
        );
        assert!(matches!(
            CubicGraph::from_edges(4, [(0, 1), (2, 3)]),
            Err(GraphError::Degree { vertex: 0, degree: 1 })
        ));
        assert!(matches!(
            CubicGraph::from_edges(4, [(0, 9)]),
            Err(GraphError::OutOfRange { vertex: 9, n: 4 })
        ));
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = prism(5);
        assert_eq!(g.size(), 15);
        for v in 0..g.order() {
            let row = g.neighbors(v);
            assert!(row[0] < row[1] && row[1] < row[2]);
            for &w in row {
                assert!(g.has_edge(w, v));
            }
            for (&w, &e) in row.iter().zip(g.incident_edges(v)) {
                assert_eq!(g.edge(e), (v.min(w), v.max(w)));
            }
        }
    }

    #[test]
    fn girth_of_small_graphs() {
        assert_eq!(girth(&CubicGraph::complete4()), 3);
        assert_eq!(girth(&CubicGraph::complete_bipartite33()), 4);
        assert_eq!(girth(&prism(3)), 3);
        assert_eq!(girth(&prism(6)), 4);
    }

    #[test]
    fn shortest_cycle_is_a_cycle() {
        let g = prism(7);
        let c = shortest_cycle(&g);
        assert_eq!(c.len(), 4);
        for i in 0..c.len() {
            assert!(g.has_edge(c[i], c[(i + 1) % c.len()]));
        }
    }

    #[test]
    fn connectivity() {
        let k4 = CubicGraph::complete4();
        assert!(is_connected(&k4));
        assert!(!is_connected(&k4.disjoint_union(&k4).unwrap()));
    }

    #[test]
    fn relabel_preserves_structure() {
        let g = prism(4);
        let perm: Vec<usize> = (0..8).rev().collect();
        let h = g.relabel(&perm);
        for &(u, v) in g.edges() {
            assert!(h.has_edge(perm[u], perm[v]));
        }
    }
}
