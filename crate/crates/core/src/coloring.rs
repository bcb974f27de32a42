//! Proper 3-edge-colourings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::CubicGraph;
use crate::tree::TiTree;

/// Colour (1, 2 or 3) of every edge, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    pub colors: Vec<u8>,
}

impl EdgeColoring {
    /// Every edge coloured 1..=3 and no two edges at a vertex share a colour.
    pub fn is_proper(&self, g: &CubicGraph) -> bool {
        self.colors.len() == g.size()
            && self.colors.iter().all(|c| (1..=3).contains(c))
            && (0..g.order()).all(|v| {
                let [a, b, c] = g.incident_edges(v).map(|e| self.colors[e]);
                a != b && b != c && a != c
            })
    }

    /// `(edge, colour)` pairs in edge order.
    pub fn assignment<'a>(&'a self, g: &'a CubicGraph) -> impl Iterator<Item = ((usize, usize), u8)> + 'a {
        g.edges().iter().copied().zip(self.colors.iter().copied())
    }
}

/// A proper 3-edge-colouring of `g`, or `None` after an exhaustive search
/// shows there is none.
pub fn three_edge_coloring(g: &CubicGraph) -> Option<EdgeColoring> {
    let m = g.size();
    let mut colors = vec![0u8; m];
    // used[v] is a bitmask of colours already on edges at v.
    let mut used = vec![0u8; g.order()];
    // The two edges at vertex 0 with the smallest ids are fixed to 1 and 2;
    // any colouring can be permuted into that form.
    let [e0, e1, _] = *g.incident_edges(0);
    for (e, c) in [(e0, 1u8), (e1, 2u8)] {
        let (u, v) = g.edge(e);
        colors[e] = c;
        used[u] |= 1 << c;
        used[v] |= 1 << c;
    }
    let mut remaining = m - 2;
    if extend(g, &mut colors, &mut used, &mut remaining) {
        let coloring = EdgeColoring { colors };
        debug_assert!(coloring.is_proper(g));
        Some(coloring)
    } else {
        None
    }
}

pub fn is_three_edge_colorable(g: &CubicGraph) -> bool {
    three_edge_coloring(g).is_some()
}

/// Colours the remaining edges, always branching on an uncoloured edge with
/// the fewest free colours (lowest id on ties).
fn extend(g: &CubicGraph, colors: &mut [u8], used: &mut [u8], remaining: &mut usize) -> bool {
    if *remaining == 0 {
        return true;
    }
    let mut pick = usize::MAX;
    let mut pick_free = 0u8;
    let mut pick_count = 4;
    for (e, &c) in colors.iter().enumerate() {
        if c != 0 {
            continue;
        }
        let (u, v) = g.edge(e);
        let free = !(used[u] | used[v]) & 0b1110;
        let count = free.count_ones();
        if count < pick_count {
            pick = e;
            pick_free = free;
            pick_count = count;
            if count <= 1 {
                break;
            }
        }
    }
    if pick_count == 0 {
        return false;
    }
    let (u, v) = g.edge(pick);
    *remaining -= 1;
    for c in 1..=3u8 {
        if pick_free & (1 << c) == 0 {
            continue;
        }
        colors[pick] = c;
        used[u] |= 1 << c;
        used[v] |= 1 << c;
        if extend(g, colors, used, remaining) {
            return true;
        }
        used[u] &= !(1 << c);
        used[v] &= !(1 << c);
    }
    colors[pick] = 0;
    *remaining += 1;
    false
}

/// End-edge colour counts `(s1, s2, s3)` of a proper colouring of a tree.
pub type EndEdgeCounts = (usize, usize, usize);

fn tree_children(t: &TiTree) -> Vec<Vec<usize>> {
    let mut children = vec![Vec::with_capacity(2); t.vertex_count()];
    // Tree edges sorted, so children come out in increasing label order.
    for &(a, b) in t.edges() {
        let (parent, child) = if t.parent(a) == Some(b) { (b, a) } else { (a, b) };
        children[parent].push(child);
    }
    children
}

/// Calls `visit` with the end-edge counts of every proper 3-edge-colouring
/// of `t`. A colouring is determined by the colour of the edge into each
/// non-centre vertex; the centre's three edges take a permutation of
/// {1,2,3} and every other edge one of the two colours its parent edge
/// leaves free.
pub fn for_each_tree_coloring<F>(t: &TiTree, mut visit: F)
where
    F: FnMut(EndEdgeCounts),
{
    let children = tree_children(t);
    // Order non-centre vertices so parents precede children (BFS).
    let mut order = Vec::with_capacity(t.vertex_count() - 1);
    let mut frontier = vec![t.center()];
    while let Some(v) = frontier.pop() {
        for &c in &children[v] {
            order.push(c);
            frontier.push(c);
        }
    }
    order.sort_by_key(|&v| (t.level(v), v));
    let mut color = vec![0u8; t.vertex_count()];
    let mut counts = [0usize; 4];
    assign(t, &order, 0, &mut color, &mut counts, &children, &mut visit);
}

fn assign<F>(
    t: &TiTree,
    order: &[usize],
    pos: usize,
    color: &mut [u8],
    counts: &mut [usize; 4],
    children: &[Vec<usize>],
    visit: &mut F,
) where
    F: FnMut(EndEdgeCounts),
{
    if pos == order.len() {
        visit((counts[1], counts[2], counts[3]));
        return;
    }
    let v = order[pos];
    let parent = t.parent(v).unwrap();
    for c in 1..=3u8 {
        // Distinct from the parent's own edge and from earlier siblings.
        if parent != t.center() && color[parent] == c {
            continue;
        }
        if children[parent]
            .iter()
            .take_while(|&&s| s != v)
            .any(|&s| color[s] == c)
        {
            continue;
        }
        color[v] = c;
        if t.is_leaf(v) {
            counts[c as usize] += 1;
        }
        assign(t, order, pos + 1, color, counts, children, visit);
        if t.is_leaf(v) {
            counts[c as usize] -= 1;
        }
    }
    color[v] = 0;
}

/// End-edge counts of every proper 3-edge-colouring of `t`, in a fixed
/// enumeration order.
pub fn color_tree_end_edge_counts(t: &TiTree) -> Vec<EndEdgeCounts> {
    let mut out = Vec::new();
    for_each_tree_coloring(t, |c| out.push(c));
    out
}

/// End-edge counts of a uniformly random proper 3-edge-colouring of `t`.
pub fn random_tree_coloring_counts<R: Rng + ?Sized>(t: &TiTree, rng: &mut R) -> EndEdgeCounts {
    let children = tree_children(t);
    let mut color = vec![0u8; t.vertex_count()];
    let mut counts = [0usize; 4];
    let mut perm = [1u8, 2, 3];
    for i in (1..3).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut stack = Vec::new();
    for (&child, &c) in children[t.center()].iter().zip(perm.iter()) {
        color[child] = c;
        stack.push(child);
    }
    while let Some(v) = stack.pop() {
        if t.is_leaf(v) {
            counts[color[v] as usize] += 1;
            continue;
        }
        let free: Vec<u8> = (1..=3u8).filter(|&c| c != color[v]).collect();
        let first = rng.gen_range(0..2);
        for (k, &child) in children[v].iter().enumerate() {
            color[child] = free[(first + k) % 2];
            stack.push(child);
        }
    }
    (counts[1], counts[2], counts[3])
}

/// Result of checking `s1 = s2 = s3` over colourings of `T_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub depth: usize,
    pub colorings: u64,
    pub violations: u64,
    /// First violating counts, if any.
    pub example: Option<EndEdgeCounts>,
    pub exhaustive: bool,
    pub seed: Option<u64>,
}

impl BalanceReport {
    fn new(depth: usize, exhaustive: bool, seed: Option<u64>) -> Self {
        Self {
            depth,
            colorings: 0,
            violations: 0,
            example: None,
            exhaustive,
            seed,
        }
    }

    fn record(&mut self, (s1, s2, s3): EndEdgeCounts) {
        self.colorings += 1;
        if s1 != s2 || s2 != s3 {
            self.violations += 1;
            self.example.get_or_insert((s1, s2, s3));
        }
    }
}

/// Every proper 3-edge-colouring of `t`.
pub fn check_balance_exhaustive(t: &TiTree) -> BalanceReport {
    let mut report = BalanceReport::new(t.depth(), true, None);
    for_each_tree_coloring(t, |c| report.record(c));
    report
}

/// `count` uniformly random proper 3-edge-colourings of `t`, drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn check_balance_sampled(t: &TiTree, count: u64, seed: u64) -> BalanceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BalanceReport::new(t.depth(), false, Some(seed));
    for _ in 0..count {
        report.record(random_tree_coloring_counts(t, &mut rng));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::build_ti;

    #[test]
    fn k4_and_k33_are_colorable() {
        for g in [CubicGraph::complete4(), CubicGraph::complete_bipartite33()] {
            let c = three_edge_coloring(&g).expect("class one");
            assert!(c.is_proper(&g));
        }
    }

    #[test]
    fn graph_with_bridge_is_not_colorable() {
        // By the parity lemma a cubic graph with a bridge has no 3-edge-colouring.
        let mut edges = vec![];
        for (off, pend) in [(0usize, 4usize), (5, 9)] {
            let (a, b, c, d) = (off, off + 1, off + 2, off + 3);
            edges.extend([(a, c), (a, d), (b, c), (b, d), (c, d), (a, pend), (b, pend)]);
        }
        edges.push((4, 9));
        let g = CubicGraph::from_edges(10, edges).unwrap();
        assert!(three_edge_coloring(&g).is_none());
    }

    #[test]
    fn tree_coloring_counts() {
        // 3! at the centre times 2 at every other internal vertex.
        for (i, total) in [(1usize, 6usize), (2, 6 * 8), (3, 6 * (1 << 9))] {
            let t = build_ti(i).unwrap();
            let counts = color_tree_end_edge_counts(&t);
            assert_eq!(counts.len(), total);
        }
    }

    #[test]
    fn balance_reports() {
        let t = build_ti(2).unwrap();
        let r = check_balance_exhaustive(&t);
        assert_eq!((r.colorings, r.violations), (48, 0));
        assert!(color_tree_end_edge_counts(&t).iter().all(|&c| c == (2, 2, 2)));
        let s = check_balance_sampled(&build_ti(4).unwrap(), 500, 7);
        assert_eq!((s.colorings, s.violations, s.seed), (500, 0, Some(7)));
        assert_eq!(s, check_balance_sampled(&build_ti(4).unwrap(), 500, 7));
    }

    #[test]
    fn claw_colorings_are_balanced() {
        let t = build_ti(1).unwrap();
        assert!(color_tree_end_edge_counts(&t).iter().all(|&c| c == (1, 1, 1)));
    }

    #[test]
    fn improper_colorings_are_detected() {
        let g = CubicGraph::complete4();
        let mut c = three_edge_coloring(&g).unwrap();
        c.colors[0] = c.colors[1];
        assert!(!c.is_proper(&g));
    }
}
