//! Canonical labelling and automorphism group order by
//! individualisation-refinement.
//!
//! The initial partition groups vertices by their BFS distance profile and is
//! then refined to an equitable partition (1-dimensional Weisfeiler-Leman).
//! The search tree individualises vertices of the first smallest
//! non-singleton cell. Leaves are compared through the relabelled adjacency
//! rows; the smallest one is canonical. Automorphisms found on the way prune
//! sibling branches, and the group order is the product of the orbit sizes
//! of the first path's individualised vertices in the successive pointwise
//! stabilisers.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::graph::{distances_from, CubicGraph};

/// Isomorphism-invariant representation of a cubic graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub n: usize,
    /// Edges of the canonically relabelled graph, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Order of the automorphism group.
    pub aut_order: u128,
    /// `labeling[v]` is the canonical label of input vertex `v`.
    pub labeling: Vec<usize>,
}

impl CanonicalForm {
    /// The part that identifies the isomorphism class.
    pub fn key(&self) -> CanonKey {
        CanonKey {
            n: self.n,
            edges: self.edges.clone(),
        }
    }

    pub fn graph(&self) -> CubicGraph {
        CubicGraph::from_edges(self.n, self.edges.iter().copied()).expect("canonical graph is cubic")
    }
}

/// Dedup key: the canonical edge list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonKey {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn canonical_form(g: &CubicGraph) -> CanonicalForm {
    let mut search = Search::new(g);
    let root = search.refine(initial_partition(g));
    search.explore(root, 0, true);
    let best = search.best.expect("search reaches at least one leaf");
    let labeling = best.labeling;
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (labeling[u], labeling[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    CanonicalForm {
        n: g.order(),
        edges,
        aut_order: search.aut_order,
        labeling,
    }
}

pub fn are_isomorphic(a: &CubicGraph, b: &CubicGraph) -> bool {
    a.order() == b.order() && canonical_form(a).edges == canonical_form(b).edges
}

pub fn automorphism_count(g: &CubicGraph) -> u128 {
    canonical_form(g).aut_order
}

/// Ordered partition of the vertex set.
type Partition = Vec<Vec<usize>>;

fn initial_partition(g: &CubicGraph) -> Partition {
    let n = g.order();
    let mut keyed: Vec<(Vec<usize>, usize)> = (0..n)
        .map(|v| {
            let dist = distances_from(g, v);
            let mut profile = vec![0usize; n + 1];
            for d in dist {
                profile[d.min(n)] += 1;
            }
            (profile, v)
        })
        .collect();
    keyed.sort();
    let mut cells: Partition = Vec::new();
    let mut last: Option<&Vec<usize>> = None;
    for (profile, v) in &keyed {
        if last != Some(profile) {
            cells.push(Vec::new());
            last = Some(profile);
        }
        cells.last_mut().unwrap().push(*v);
    }
    cells
}

struct Leaf {
    labeling: Vec<usize>,
    certificate: Vec<[usize; 3]>,
}

struct Search<'a> {
    g: &'a CubicGraph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    /// Automorphisms found so far, as vertex maps.
    generators: Vec<Vec<usize>>,
    /// Vertices individualised along the current path.
    path: Vec<usize>,
    aut_order: u128,
}

impl<'a> Search<'a> {
    fn new(g: &'a CubicGraph) -> Self {
        Self {
            g,
            first: None,
            best: None,
            generators: Vec::new(),
            path: Vec::new(),
            aut_order: 1,
        }
    }

    /// Refines to the coarsest equitable partition finer than `cells`.
    /// Splits are ordered by invariant keys only, never by vertex labels.
    fn refine(&self, mut cells: Partition) -> Partition {
        let n = self.g.order();
        let mut cell_of = vec![0usize; n];
        loop {
            for (i, cell) in cells.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = i;
                }
            }
            let mut next: Partition = Vec::with_capacity(cells.len());
            for cell in &cells {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<([usize; 3], usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut key = self.g.neighbors(v).map(|w| cell_of[w]);
                        key.sort_unstable();
                        (key, v)
                    })
                    .collect();
                keyed.sort_by(|a, b| a.0.cmp(&b.0));
                let mut start = next.len();
                next.push(Vec::new());
                for (i, (key, v)) in keyed.iter().enumerate() {
                    if i > 0 && *key != keyed[i - 1].0 {
                        next.push(Vec::new());
                        start += 1;
                    }
                    next[start].push(*v);
                }
            }
            if next.len() == cells.len() {
                return next;
            }
            cells = next;
        }
    }

    /// Returns `true` when an automorphism mapping this node's subtree onto
    /// the first path was found, telling the caller to back up.
    fn explore(&mut self, cells: Partition, level: usize, on_first_path: bool) -> bool {
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            return self.leaf(&cells);
        };
        let candidates = {
            let mut c = cells[target].clone();
            c.sort_unstable();
            c
        };
        let mut explored: Vec<usize> = Vec::new();
        let mut first_child = None;
        for &v in &candidates {
            let orbits = self.stabilizer_orbits();
            if explored.iter().any(|&w| orbits[w] == orbits[v]) {
                continue;
            }
            explored.push(v);
            let child_first = on_first_path && first_child.is_none();
            if first_child.is_none() {
                first_child = Some(v);
            }
            let mut child = cells.clone();
            let rest: Vec<usize> = child[target].iter().copied().filter(|&x| x != v).collect();
            child[target] = vec![v];
            child.insert(target + 1, rest);
            let child = self.refine(child);
            self.path.push(v);
            let back_up = self.explore(child, level + 1, child_first);
            self.path.pop();
            if back_up && !on_first_path {
                return true;
            }
        }
        if on_first_path {
            let orbits = self.stabilizer_orbits();
            let root = orbits[first_child.unwrap()];
            let size = candidates.iter().filter(|&&w| orbits[w] == root).count();
            self.aut_order *= size as u128;
        }
        false
    }

    fn leaf(&mut self, cells: &Partition) -> bool {
        let n = self.g.order();
        let mut labeling = vec![0usize; n];
        for (i, cell) in cells.iter().enumerate() {
            labeling[cell[0]] = i;
        }
        let mut certificate = vec![[0usize; 3]; n];
        for v in 0..n {
            let mut row = self.g.neighbors(v).map(|w| labeling[w]);
            row.sort_unstable();
            certificate[labeling[v]] = row;
        }
        let leaf = Leaf {
            labeling,
            certificate,
        };
        let Some(first) = &self.first else {
            self.best = Some(Leaf {
                labeling: leaf.labeling.clone(),
                certificate: leaf.certificate.clone(),
            });
            self.first = Some(leaf);
            return false;
        };
        if first.certificate == leaf.certificate {
            let gen = compose_inverse(&first.labeling, &leaf.labeling);
            self.generators.push(gen);
            return true;
        }
        let best = self.best.as_ref().unwrap();
        match leaf.certificate.cmp(&best.certificate) {
            Ordering::Less => self.best = Some(leaf),
            Ordering::Equal => {
                let gen = compose_inverse(&best.labeling, &leaf.labeling);
                self.generators.push(gen);
            }
            Ordering::Greater => {}
        }
        false
    }

    /// Orbit representative of every vertex under the group generated by
    /// the known automorphisms that fix the current path pointwise.
    fn stabilizer_orbits(&self) -> Vec<usize> {
        let n = self.g.order();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for gen in &self.generators {
            if self.path.iter().any(|&p| gen[p] != p) {
                continue;
            }
            for v in 0..n {
                let (a, b) = (find(&mut parent, v), find(&mut parent, gen[v]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }
}

/// The automorphism `v -> a^{-1}(b(v))` for two labellings producing the same
/// relabelled graph.
fn compose_inverse(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; a.len()];
    for (v, &label) in a.iter().enumerate() {
        inv[label] = v;
    }
    b.iter().map(|&label| inv[label]).collect()
}
