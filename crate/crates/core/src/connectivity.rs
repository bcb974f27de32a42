//! Cyclic edge connectivity of cubic graphs.
//!
//! A cut is *cyclic* when both sides contain a cycle. In a cubic graph a
//! side `A` of a cut of size `k` spans `(3|A| - k) / 2` edges, so it contains
//! a cycle as soon as `|A| >= k - 1`. Both sides of a minimum cyclic cut are
//! connected with minimum degree two, hence either a `k`-cycle or a set
//! containing some closed neighbourhood `N[u]`. The search below uses these
//! facts to pick flow terminals:
//!
//! * cuts of size at most three come from bridge / cycle-space labels,
//! * sizes four and five from max-flows between disjoint closed
//!   neighbourhoods,
//! * the girth cycle bounds everything from above,
//! * larger cuts (girth seven and up, or tiny graphs) fall back to flows
//!   between all connected vertex sets of size `k - 1`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::{components, is_connected, shortest_cycle, CubicGraph};

/// An edge cut with the two vertex sets it separates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCut {
    pub edges: Vec<(usize, usize)>,
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

impl EdgeCut {
    fn from_side(g: &CubicGraph, in_a: &[bool]) -> EdgeCut {
        let mut side_a = Vec::new();
        let mut side_b = Vec::new();
        for v in 0..g.order() {
            if in_a[v] {
                side_a.push(v);
            } else {
                side_b.push(v);
            }
        }
        let edges = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| in_a[u] != in_a[v])
            .collect();
        // Smaller side first; ties go to the side holding vertex 0.
        if side_b.len() < side_a.len() || (side_b.len() == side_a.len() && !in_a[0]) {
            std::mem::swap(&mut side_a, &mut side_b);
        }
        EdgeCut {
            edges,
            side_a,
            side_b,
        }
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

/// Result of [`cyclic_edge_connectivity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CyclicConnectivity {
    /// A minimum cyclic cut; its size is the cyclic edge connectivity.
    Cut(EdgeCut),
    /// No edge cut leaves two cyclic sides (e.g. `K_4`, `K_{3,3}`).
    NoCyclicCut,
}

impl CyclicConnectivity {
    pub fn value(&self) -> Option<usize> {
        match self {
            CyclicConnectivity::Cut(cut) => Some(cut.size()),
            CyclicConnectivity::NoCyclicCut => None,
        }
    }

    pub fn witness(&self) -> Option<&EdgeCut> {
        match self {
            CyclicConnectivity::Cut(cut) => Some(cut),
            CyclicConnectivity::NoCyclicCut => None,
        }
    }
}

pub fn cyclic_edge_connectivity(g: &CubicGraph) -> CyclicConnectivity {
    match min_cyclic_cut_below(g, usize::MAX) {
        Some(cut) => CyclicConnectivity::Cut(cut),
        None => CyclicConnectivity::NoCyclicCut,
    }
}

/// `true` iff every cyclic cut has at least `k` edges (vacuously true when
/// there is no cyclic cut).
pub fn is_cyclically_k_connected(g: &CubicGraph, k: usize) -> bool {
    min_cyclic_cut_below(g, k).is_none()
}

/// A minimum cyclic cut if the cyclic edge connectivity is below `bound`.
fn min_cyclic_cut_below(g: &CubicGraph, bound: usize) -> Option<EdgeCut> {
    if bound == 0 {
        return None;
    }
    if !is_connected(g) {
        let comp = components(g, &[]);
        let in_a: Vec<bool> = comp.iter().map(|&c| c == 0).collect();
        return Some(EdgeCut::from_side(g, &in_a));
    }
    if let Some(cut) = small_cyclic_cut(g, (bound - 1).min(3)) {
        return Some(cut);
    }
    if bound <= 4 {
        return None;
    }

    let Some(upper) = girth_cut(g) else {
        // Tiny graphs whose girth cycle leaves an acyclic remainder.
        return connected_set_stages(g, 4, bound);
    };
    let girth = upper.size();
    let within = |cut: EdgeCut| (cut.size() < bound).then_some(cut);
    // From here the value lies in 4..=girth.
    let cap = girth.min(bound).min(6);
    if cap > 4 {
        if let Some(cut) = closed_neighbourhood_flows(g, cap) {
            return Some(cut);
        }
    }
    if girth <= 6 || bound <= 6 {
        return within(upper);
    }
    connected_set_stages(g, 6, girth.min(bound)).or_else(|| within(upper))
}

/// The cut around a shortest cycle, if the rest of the graph is cyclic.
fn girth_cut(g: &CubicGraph) -> Option<EdgeCut> {
    let cycle = shortest_cycle(g);
    let mut in_a = vec![false; g.order()];
    for &v in &cycle {
        in_a[v] = true;
    }
    let rest: Vec<bool> = in_a.iter().map(|&x| !x).collect();
    has_cycle_within(g, &rest).then(|| EdgeCut::from_side(g, &in_a))
}

/// Does the subgraph induced on `mask` contain a cycle?
pub(crate) fn has_cycle_within(g: &CubicGraph, mask: &[bool]) -> bool {
    let edges = g
        .edges()
        .iter()
        .filter(|&&(u, v)| mask[u] && mask[v])
        .count();
    // A forest has |V| - c edges.
    let mut seen = vec![false; g.order()];
    let mut forest_edges = 0;
    for s in 0..g.order() {
        if !mask[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if mask[w] && !seen[w] {
                    seen[w] = true;
                    forest_edges += 1;
                    stack.push(w);
                }
            }
        }
    }
    edges > forest_edges
}

// ---- cuts of size <= 3 -------------------------------------------------------

/// Minimum cyclic cut of size at most `max_size` (<= 3), assuming `g` is
/// connected.
///
/// Two edges of a 2-edge-connected graph form a cut iff they lie on exactly
/// the same cycles. Each edge gets a label in the cycle space (XOR of random
/// words of the non-tree edges whose fundamental cycle uses it); equal
/// labels are necessary for a cut and every candidate is verified, so the
/// result is exact.
fn small_cyclic_cut(g: &CubicGraph, max_size: usize) -> Option<EdgeCut> {
    if max_size == 0 {
        return None;
    }
    let m = g.size();
    let mut removed = vec![false; m];

    let labels = cycle_space_labels(g, &removed);
    for e in 0..m {
        if labels[e] == 0 {
            if let Some(cut) = verified_cut(g, &[e], 1) {
                return Some(cut);
            }
        }
    }
    if max_size == 1 {
        return None;
    }
    for group in equal_label_groups(&labels, &removed) {
        for (i, &a) in group.iter().enumerate() {
            for &b in &group[i + 1..] {
                if let Some(cut) = verified_cut(g, &[a, b], 1) {
                    return Some(cut);
                }
            }
        }
    }
    if max_size == 2 {
        return None;
    }
    // Three-edge cuts are cyclic iff both sides have at least 3 vertices.
    for first in 0..m {
        removed[first] = true;
        let labels = cycle_space_labels(g, &removed);
        for group in equal_label_groups(&labels, &removed) {
            for (i, &a) in group.iter().enumerate() {
                for &b in &group[i + 1..] {
                    let mut cut = [first, a, b];
                    cut.sort_unstable();
                    if let Some(found) = verified_cut(g, &cut, 3) {
                        return Some(found);
                    }
                }
            }
        }
        removed[first] = false;
    }
    None
}

fn equal_label_groups(labels: &[u64], removed: &[bool]) -> Vec<Vec<usize>> {
    let mut groups: HashMap<u64, Vec<usize>> = HashMap::new();
    for (e, &label) in labels.iter().enumerate() {
        if !removed[e] {
            groups.entry(label).or_default().push(e);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() > 1).collect();
    out.sort();
    out
}

/// If deleting `cut` splits `g` into exactly two parts, each with at least
/// `min_side` vertices, return it.
fn verified_cut(g: &CubicGraph, cut: &[usize], min_side: usize) -> Option<EdgeCut> {
    let mut removed = vec![false; g.size()];
    for &e in cut {
        removed[e] = true;
    }
    let comp = components(g, &removed);
    if comp.iter().any(|&c| c > 1) || comp.iter().all(|&c| c == 0) {
        return None;
    }
    let in_a: Vec<bool> = comp.iter().map(|&c| c == 0).collect();
    let a = in_a.iter().filter(|&&x| x).count();
    if a < min_side || g.order() - a < min_side {
        return None;
    }
    let found = EdgeCut::from_side(g, &in_a);
    // Removing the edges must be exactly the boundary of the two parts.
    (found.size() == cut.len()).then_some(found)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Cycle-space label for every edge of `g` minus `removed`, using a DFS
/// spanning forest. Removed edges get label 0 and must be ignored.
fn cycle_space_labels(g: &CubicGraph, removed: &[bool]) -> Vec<u64> {
    let n = g.order();
    let m = g.size();
    let mut labels = vec![0u64; m];
    let mut parent_edge = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut tree = vec![false; m];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            order.push(u);
            for (&w, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
                if removed[e] || visited[w] {
                    continue;
                }
                visited[w] = true;
                parent_edge[w] = e;
                tree[e] = true;
                stack.push(w);
            }
        }
    }
    let mut acc = vec![0u64; n];
    for e in 0..m {
        if removed[e] || tree[e] {
            continue;
        }
        let word = splitmix(e as u64 + 1);
        labels[e] = word;
        let (u, v) = g.edge(e);
        acc[u] ^= word;
        acc[v] ^= word;
    }
    // Children are visited after their parents, so fold in reverse order.
    for &v in order.iter().rev() {
        let e = parent_edge[v];
        if e == usize::MAX {
            continue;
        }
        labels[e] = acc[v];
        let (a, b) = g.edge(e);
        let parent = if a == v { b } else { a };
        acc[parent] ^= acc[v];
    }
    labels
}

// ---- flow-based stages ---------------------------------------------------------

/// Unit-capacity max-flow between disjoint vertex sets, stopped at `cap`.
/// Returns the flow value and, when it is below `cap`, the source side of a
/// minimum cut.
fn capped_flow(
    g: &CubicGraph,
    source: &[bool],
    sink: &[bool],
    cap: usize,
) -> (usize, Option<Vec<bool>>) {
    let n = g.order();
    // flow[e] is +1 when one unit runs from the smaller to the larger endpoint.
    let mut flow = vec![0i8; g.size()];
    let mut pred: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut value = 0;
    loop {
        seen.fill(false);
        queue.clear();
        for v in 0..n {
            if source[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        let mut reached = None;
        'bfs: while let Some(u) = queue.pop_front() {
            for (&w, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
                if seen[w] {
                    continue;
                }
                let forward = if u < w { flow[e] } else { -flow[e] };
                if forward >= 1 {
                    continue;
                }
                seen[w] = true;
                pred[w] = (u, e);
                if sink[w] {
                    reached = Some(w);
                    break 'bfs;
                }
                queue.push_back(w);
            }
        }
        match reached {
            None => return (value, Some(seen)),
            Some(mut w) => {
                while !source[w] {
                    let (u, e) = pred[w];
                    flow[e] += if u < w { 1 } else { -1 };
                    w = u;
                }
                value += 1;
                if value >= cap {
                    return (value, None);
                }
            }
        }
    }
}

/// Smallest cut (below `cap`) between some pair of disjoint closed
/// neighbourhoods.
fn closed_neighbourhood_flows(g: &CubicGraph, cap: usize) -> Option<EdgeCut> {
    let n = g.order();
    let mut cap = cap;
    let mut best = None;
    let closed: Vec<[usize; 4]> = (0..n)
        .map(|u| {
            let [a, b, c] = *g.neighbors(u);
            [u, a, b, c]
        })
        .collect();
    let mut source = vec![false; n];
    let mut sink = vec![false; n];
    for u in 0..n {
        for &x in &closed[u] {
            source[x] = true;
        }
        for w in u + 1..n {
            if closed[w].iter().any(|&x| source[x]) {
                continue;
            }
            for &x in &closed[w] {
                sink[x] = true;
            }
            let (value, side) = capped_flow(g, &source, &sink, cap);
            for &x in &closed[w] {
                sink[x] = false;
            }
            if value < cap {
                best = Some(EdgeCut::from_side(g, &side.unwrap()));
                cap = value;
            }
        }
        for &x in &closed[u] {
            source[x] = false;
        }
    }
    best
}

/// Generic search for stages `first..limit`: at stage `k`, flows between
/// all pairs of disjoint connected `(k - 1)`-sets. Any cut of value `f <= k`
/// found this way is cyclic.
fn connected_set_stages(g: &CubicGraph, first: usize, limit: usize) -> Option<EdgeCut> {
    let n = g.order();
    let mut k = first;
    while k < limit && 2 * (k - 1) <= n {
        let sets = connected_sets(g, (k - 1).max(1));
        let mut source = vec![false; n];
        let mut sink = vec![false; n];
        for (i, s) in sets.iter().enumerate() {
            for &x in s {
                source[x] = true;
            }
            for t in &sets[i + 1..] {
                if t.iter().any(|&x| source[x]) {
                    continue;
                }
                for &x in t {
                    sink[x] = true;
                }
                let (value, side) = capped_flow(g, &source, &sink, k + 1);
                for &x in t {
                    sink[x] = false;
                }
                if value <= k {
                    return Some(EdgeCut::from_side(g, &side.unwrap()));
                }
            }
            for &x in s {
                source[x] = false;
            }
        }
        k += 1;
    }
    None
}

/// All connected vertex sets of the given size, each as a sorted list.
fn connected_sets(g: &CubicGraph, size: usize) -> Vec<Vec<usize>> {
    let mut layer: BTreeSet<Vec<usize>> = (0..g.order()).map(|v| vec![v]).collect();
    for _ in 1..size {
        let mut next = BTreeSet::new();
        for set in &layer {
            for &v in set {
                for &w in g.neighbors(v) {
                    if set.binary_search(&w).is_err() {
                        let mut grown = set.clone();
                        let pos = grown.binary_search(&w).unwrap_err();
                        grown.insert(pos, w);
                        next.insert(grown);
                    }
                }
            }
        }
        layer = next;
    }
    layer.into_iter().collect()
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
    fn k4_and_k33_have_no_cyclic_cut() {
        assert_eq!(
            cyclic_edge_connectivity(&CubicGraph::complete4()),
            CyclicConnectivity::NoCyclicCut
        );
        let k33 = CubicGraph::complete_bipartite33();
        assert_eq!(cyclic_edge_connectivity(&k33), CyclicConnectivity::NoCyclicCut);
        assert!(is_cyclically_k_connected(&k33, 4));
    }

    #[test]
    fn prism_cyclic_connectivity() {
        // The triangles of the 3-prism are split by 3 edges; larger prisms
        // are cut around a square face.
        assert_eq!(cyclic_edge_connectivity(&prism(3)).value(), Some(3));
        for k in 4..9 {
            let cc = cyclic_edge_connectivity(&prism(k));
            assert_eq!(cc.value(), Some(4), "prism {k}");
        }
    }

    #[test]
    fn disconnected_graph_has_zero() {
        let k4 = CubicGraph::complete4();
        let g = k4.disjoint_union(&k4).unwrap();
        let cc = cyclic_edge_connectivity(&g);
        assert_eq!(cc.value(), Some(0));
        assert!(!is_cyclically_k_connected(&g, 1));
        assert!(is_cyclically_k_connected(&g, 0));
    }

    #[test]
    fn witness_separates_two_cyclic_sides() {
        let g = prism(6);
        let cut = cyclic_edge_connectivity(&g).witness().cloned().unwrap();
        let mut a = vec![false; g.order()];
        for &v in &cut.side_a {
            a[v] = true;
        }
        let b: Vec<bool> = a.iter().map(|x| !x).collect();
        assert!(has_cycle_within(&g, &a));
        assert!(has_cycle_within(&g, &b));
        for &(u, v) in &cut.edges {
            assert_ne!(a[u], a[v]);
        }
    }

    #[test]
    fn bridge_is_a_cyclic_cut() {
        // Two K4-minus-an-edge blocks... joined through a bridge need degree
        // fixing; build the smallest cubic graph with a bridge (10 vertices).
        let mut edges = vec![];
        for (off, pend) in [(0usize, 4usize), (5, 9)] {
            // K4 with edge (off, off+1) subdivided by `pend`
            let (a, b, c, d) = (off, off + 1, off + 2, off + 3);
            edges.extend([(a, c), (a, d), (b, c), (b, d), (c, d), (a, pend), (b, pend)]);
        }
        edges.push((4, 9));
        let g = CubicGraph::from_edges(10, edges).unwrap();
        assert_eq!(cyclic_edge_connectivity(&g).value(), Some(1));
    }
}
