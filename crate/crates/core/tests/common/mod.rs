// Brute-force oracles and small test corpora shared by the integration tests.
// Nothing in here calls the algorithms under test except where noted
// (canonical keys are only used to drop duplicates from generated lists).
#![allow(dead_code)]

use std::collections::BTreeSet;

use histsnark::{canonical_form, CubicGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn adjacency(g: &CubicGraph) -> Vec<Vec<bool>> {
    let n = g.order();
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

// ---- girth --------------------------------------------------------------------

/// Shortest cycle by walking every simple path from every vertex.
pub fn girth_oracle(g: &CubicGraph) -> usize {
    fn walk(g: &CubicGraph, start: usize, v: usize, len: usize, on_path: &mut [bool], best: &mut usize) {
        if len + 1 >= *best {
            return;
        }
        for &w in g.neighbors(v) {
            if w == start && len >= 2 {
                *best = (*best).min(len + 1);
            } else if !on_path[w] && w > start {
                on_path[w] = true;
                walk(g, start, w, len + 1, on_path, best);
                on_path[w] = false;
            }
        }
    }
    let mut best = usize::MAX;
    let mut on_path = vec![false; g.order()];
    for s in 0..g.order() {
        on_path[s] = true;
        walk(g, s, s, 0, &mut on_path, &mut best);
        on_path[s] = false;
    }
    best
}

// ---- cyclic edge connectivity -------------------------------------------------

fn components_without(g: &CubicGraph, removed: &[bool]) -> Vec<(usize, usize)> {
    // (vertices, edges) per component.
    let n = g.order();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut stack = vec![s];
        let mut verts = 0;
        while let Some(v) = stack.pop() {
            verts += 1;
            for (k, &w) in g.neighbors(v).iter().enumerate() {
                let e = g.incident_edges(v)[k];
                if !removed[e] && comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        out.push((verts, 0));
    }
    for (e, &(u, _)) in g.edges().iter().enumerate() {
        if !removed[e] {
            out[comp[u]].1 += 1;
        }
    }
    out
}

/// Smallest edge set whose removal leaves two components that both contain
/// a cycle, by trying all subsets in order of size.
pub fn cyclic_connectivity_oracle(g: &CubicGraph) -> Option<usize> {
    let m = g.size();
    let mut removed = vec![false; m];
    fn subsets(start: usize, left: usize, g: &CubicGraph, removed: &mut Vec<bool>) -> bool {
        if left == 0 {
            let cyclic = components_without(g, removed).iter().filter(|&&(v, e)| e >= v).count();
            return cyclic >= 2;
        }
        for e in start..g.size() {
            removed[e] = true;
            if subsets(e + 1, left - 1, g, removed) {
                removed[e] = false;
                return true;
            }
            removed[e] = false;
        }
        false
    }
    (0..=m).find(|&k| subsets(0, k, g, &mut removed))
}

/// `true` iff removing `cut` separates `g` into pieces at least two of which
/// contain cycles.
pub fn is_cyclic_cut(g: &CubicGraph, cut: &[(usize, usize)]) -> bool {
    let mut removed = vec![false; g.size()];
    for &(u, v) in cut {
        removed[g.edge_id(u, v).expect("cut edge in graph")] = true;
    }
    components_without(g, &removed).iter().filter(|&&(v, e)| e >= v).count() >= 2
}

// ---- isomorphism and automorphisms --------------------------------------------

/// Number of bijections `a -> b` preserving adjacency, stopping at `limit`.
/// A plain backtracking over all permutations that prunes on adjacency to
/// vertices already mapped.
pub fn count_isomorphisms(a: &CubicGraph, b: &CubicGraph, limit: u64) -> u64 {
    if a.order() != b.order() {
        return 0;
    }
    let (aa, bb) = (adjacency(a), adjacency(b));
    let n = a.order();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(v: usize, aa: &[Vec<bool>], bb: &[Vec<bool>], map: &mut [usize], used: &mut [bool], count: &mut u64, limit: u64) {
        let n = aa.len();
        if v == n {
            *count += 1;
            return;
        }
        for w in 0..n {
            if used[w] {
                continue;
            }
            if (0..v).any(|u| aa[u][v] != bb[map[u]][w]) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            go(v + 1, aa, bb, map, used, count, limit);
            used[w] = false;
            if *count >= limit {
                return;
            }
        }
    }
    let mut count = 0;
    go(0, &aa, &bb, &mut map, &mut used, &mut count, limit);
    count
}

pub fn isomorphic_oracle(a: &CubicGraph, b: &CubicGraph) -> bool {
    count_isomorphisms(a, b, 1) > 0
}

pub fn aut_oracle(g: &CubicGraph) -> u64 {
    count_isomorphisms(g, g, u64::MAX)
}

// ---- 3-edge-colouring ---------------------------------------------------------

/// Runs through all `3^m` colour assignments until a proper one turns up.
pub fn colorable_oracle(g: &CubicGraph) -> bool {
    let m = g.size();
    let mut colors = vec![0u8; m];
    loop {
        let proper = (0..g.order()).all(|v| {
            let [a, b, c] = g.incident_edges(v).map(|e| colors[e]);
            a != b && b != c && a != c
        });
        if proper {
            return true;
        }
        let mut k = 0;
        loop {
            if k == m {
                return false;
            }
            colors[k] += 1;
            if colors[k] < 3 {
                break;
            }
            colors[k] = 0;
            k += 1;
        }
    }
}

// ---- corpora --------------------------------------------------------------------

/// Connected cubic graphs on `n` vertices, one per isomorphism class. Vertices
/// are generated in breadth-first discovery order: the lowest vertex with
/// missing edges is joined, in increasing order, to later vertices that
/// already exist or to the next new one.
pub fn connected_cubic_graphs(n: usize) -> Vec<CubicGraph> {
    fn go(
        n: usize,
        adj: &mut Vec<Vec<usize>>,
        next: usize,
        seen: &mut BTreeSet<Vec<(usize, usize)>>,
        out: &mut Vec<CubicGraph>,
    ) {
        let Some(v) = (0..next).find(|&v| adj[v].len() < 3) else {
            if next == n {
                let edges: Vec<(usize, usize)> = (0..n)
                    .flat_map(|u| adj[u].iter().filter(move |&&w| u < w).map(move |&w| (u, w)))
                    .collect();
                let g = CubicGraph::from_edges(n, edges).unwrap();
                if seen.insert(canonical_form(&g).edges) {
                    out.push(g);
                }
            }
            return;
        };
        let last = adj[v].iter().copied().filter(|&w| w > v).max().unwrap_or(v);
        let limit = if next < n { next + 1 } else { next };
        for w in last + 1..limit {
            if adj[w].len() >= 3 || adj[v].contains(&w) {
                continue;
            }
            let grow = w == next;
            adj[v].push(w);
            adj[w].push(v);
            go(n, adj, if grow { next + 1 } else { next }, seen, out);
            adj[v].pop();
            adj[w].pop();
        }
    }
    let mut adj = vec![Vec::with_capacity(3); n];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    go(n, &mut adj, 1, &mut seen, &mut out);
    out
}

/// A uniformly random simple cubic graph by the pairing model.
pub fn random_cubic_graph<R: Rng>(n: usize, rng: &mut R) -> CubicGraph {
    loop {
        let mut points: Vec<usize> = (0..3 * n).map(|p| p / 3).collect();
        points.shuffle(rng);
        let edges: Vec<(usize, usize)> = points.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
        if let Ok(g) = CubicGraph::from_edges(n, edges) {
            return g;
        }
    }
}

pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn heawood() -> CubicGraph {
    let mut edges: Vec<(usize, usize)> = (0..14).map(|i| (i, (i + 1) % 14)).collect();
    edges.extend((0..14).step_by(2).map(|i| (i, (i + 5) % 14)));
    CubicGraph::from_edges(14, edges).unwrap()
}

pub fn petersen() -> CubicGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    CubicGraph::from_edges(10, edges).unwrap()
}

/// Every cubic graph with at most 10 vertices, connected or not.
pub fn small_cubic_graphs() -> Vec<CubicGraph> {
    let mut out = Vec::new();
    for n in [4, 6, 8, 10] {
        out.extend(connected_cubic_graphs(n));
    }
    let k4 = CubicGraph::complete4();
    out.push(k4.disjoint_union(&k4).unwrap());
    for g in connected_cubic_graphs(6) {
        out.push(k4.disjoint_union(&g).unwrap());
    }
    out
}

/// Graphs on 12 and 14 vertices: Heawood plus seeded random ones.
pub fn medium_cubic_graphs() -> Vec<CubicGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut out = vec![heawood()];
    for n in [12, 14] {
        for _ in 0..20 {
            out.push(random_cubic_graph(n, &mut rng));
        }
    }
    out
}
