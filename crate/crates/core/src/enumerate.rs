//! Enumeration of 2-factors on the leaves of `T_i`.
//!
//! The generator works on orbits of leaf pairs: single pairs in the
//! unconstrained mode, orbits of the branch rotation `a -> a + l/3` in
//! rotation mode. It always completes the smallest leaf that still lacks
//! leaf edges, trying every set of incident orbits that brings it to degree
//! exactly two, so every 2-factor is produced once. Edges that would close a
//! cycle shorter than the girth floor are rejected as they are added.
//!
//! Work is split into units identified by the choice indices along a
//! shallow prefix of the search tree; units run in parallel and their
//! results merge associatively, so reports do not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::canonical_form;
use crate::codec::{build_on_tree, export_graph6, import_graph6, OuterCycleSpec};
use crate::coloring::is_three_edge_colorable;
use crate::connectivity::{cyclic_edge_connectivity, is_cyclically_k_connected};
use crate::graph::{girth, CubicGraph};
use crate::tree::{leaf_count, ti_hists, OcMultiset, TiTree, TreeError};

pub const DEFAULT_SHARD_DEPTH: usize = 3;
/// Largest leaf count searched exhaustively without `force`.
pub const UNCONSTRAINED_LEAF_LIMIT: usize = 12;
pub const ROTATION_LEAF_LIMIT: usize = 48;

const NONE: usize = usize::MAX;

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("{mode:?} search over {leaves} leaves exceeds the limit of {limit}; pass force to run it anyway")]
    TooLarge { mode: Mode, leaves: usize, limit: usize },
    #[error("girth floor must be at least 3, got {0}")]
    GirthFloor(usize),
    #[error("sampling is only available in unconstrained mode")]
    SampleRotation,
    #[error("no 2-factor on the leaves of T_{0} reaches girth 6; use exhaustive mode")]
    SampleDepth(usize),
    #[error("checkpoint {path} belongs to a different search")]
    CheckpointMismatch { path: PathBuf },
    #[error("failed to build worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint format: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unconstrained,
    Rotation,
}

/// What to enumerate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub depth: usize,
    pub mode: Mode,
    /// Every generated graph has at least this girth.
    pub girth_min: usize,
    /// Keep only 2-factors with exactly these cycle lengths.
    pub oc: Option<OcMultiset>,
    /// Keep only snarks.
    pub snark_filter: bool,
}

impl SearchSpace {
    pub fn snarks(depth: usize, mode: Mode) -> Self {
        Self {
            depth,
            mode,
            girth_min: 5,
            oc: None,
            snark_filter: true,
        }
    }

    pub fn leaf_count(&self) -> usize {
        leaf_count(self.depth)
    }

    pub fn check_limits(&self, force: bool) -> Result<(), EnumerateError> {
        if self.girth_min < 3 {
            return Err(EnumerateError::GirthFloor(self.girth_min));
        }
        TiTree::new(self.depth)?;
        let leaves = self.leaf_count();
        let limit = match self.mode {
            Mode::Unconstrained => UNCONSTRAINED_LEAF_LIMIT,
            Mode::Rotation => ROTATION_LEAF_LIMIT,
        };
        if leaves > limit && !force {
            return Err(EnumerateError::TooLarge {
                mode: self.mode,
                leaves,
                limit,
            });
        }
        Ok(())
    }
}

/// Counters of one search (or the sum over units).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    /// Orbit additions rejected by the girth floor.
    pub pruned: u64,
    /// Complete 2-factors visited.
    pub factors: u64,
    /// Labelled 2-factors they stand for.
    pub labeled: u64,
}

impl SearchStats {
    fn add(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.pruned += other.pruned;
        self.factors += other.factors;
        self.labeled += other.labeled;
    }
}

// ---- generator -----------------------------------------------------------------

/// Largest symmetry group (as a list of leaf permutations) used for pruning.
const SYMMETRY_LIMIT: u128 = 1 << 16;

/// Search tree over leaf 2-factors of one `T_i`.
///
/// Tree automorphisms that map the search space to itself prune the
/// search: at each node only one choice per orbit of the node's stabiliser
/// is explored, and the factors below it carry the orbit size as a weight,
/// so weighted counts equal labelled counts.
pub struct TwoFactorGenerator {
    tree: TiTree,
    mode: Mode,
    girth_min: usize,
    orbits: Vec<Vec<(usize, usize)>>,
    /// `orbit_of[a * l + b]` for allowed pairs.
    orbit_of: Vec<usize>,
    /// Per leaf: `(orbit, number of orbit edges at the leaf)`.
    incident: Vec<Vec<(usize, u8)>>,
    tree_adj: Vec<[usize; 3]>,
    /// Leaf permutations, identity first.
    symmetries: Vec<Vec<u16>>,
}

struct State {
    degree: Vec<u8>,
    leaf_adj: Vec<[usize; 2]>,
    chosen: Vec<bool>,
    edges: Vec<(usize, usize)>,
    mark: Vec<u32>,
    stamp: u32,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

/// One or two orbits added at a node, sorted, `NONE` padded.
type Choice = [usize; 2];

struct Walk<'a> {
    replay: &'a [usize],
    cut: Option<usize>,
    prefix: Vec<usize>,
    units: Vec<Vec<usize>>,
    stats: SearchStats,
    visit: &'a mut dyn FnMut(&[(usize, usize)], u64),
}

/// Automorphisms of the binary tree of height `h` below a branch root that
/// may swap children only at the top `levels` levels, as maps on the
/// `2^h` local leaf indices.
fn flip_maps(h: usize, levels: usize) -> Vec<Vec<usize>> {
    let nodes = (1usize << levels) - 1;
    (0..1usize << nodes)
        .map(|bits| {
            (0..1usize << h)
                .map(|j| {
                    let mut out = j;
                    for t in 0..levels {
                        let node = (1 << t) - 1 + (j >> (h - t));
                        if bits >> node & 1 == 1 {
                            out ^= 1 << (h - 1 - t);
                        }
                    }
                    out
                })
                .collect()
        })
        .collect()
}

/// Leaf permutations induced by automorphisms of `T_i` that preserve the
/// search space: all of them (when small enough) in unconstrained mode,
/// otherwise those acting identically on the three branches, which
/// normalise the branch rotation.
fn leaf_symmetries(tree: &TiTree, mode: Mode) -> Vec<Vec<u16>> {
    let s = tree.rotation_shift();
    let h = tree.depth() - 1;
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let flips_at = |levels: usize| 1u128 << ((1u32 << levels) - 1);
    let full = mode == Mode::Unconstrained && 6 * flips_at(h).pow(3) <= SYMMETRY_LIMIT;
    let mut out = Vec::new();
    if full {
        let flips = flip_maps(h, h);
        for p in PERMS {
            for f0 in &flips {
                for f1 in &flips {
                    for f2 in &flips {
                        let f = [f0, f1, f2];
                        out.push(
                            (0..3 * s)
                                .map(|a| (p[a / s] * s + f[a / s][a % s]) as u16)
                                .collect(),
                        );
                    }
                }
            }
        }
        return out;
    }
    let levels = (0..=h).rev().find(|&t| 6 * flips_at(t) <= SYMMETRY_LIMIT).unwrap_or(0);
    let flips = flip_maps(h, levels);
    for p in PERMS {
        for f in &flips {
            out.push((0..3 * s).map(|a| (p[a / s] * s + f[a % s]) as u16).collect());
        }
    }
    out
}

impl TwoFactorGenerator {
    pub fn new(depth: usize, mode: Mode, girth_min: usize) -> Result<Self, EnumerateError> {
        if girth_min < 3 {
            return Err(EnumerateError::GirthFloor(girth_min));
        }
        let tree = TiTree::new(depth)?;
        let l = tree.leaf_count();
        let shift = tree.rotation_shift();
        let allowed = |a: usize, b: usize| tree.leaf_distance(a, b) + 1 >= girth_min;
        let mut orbits: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut orbit_of = vec![NONE; l * l];
        for a in 0..l {
            for b in a + 1..l {
                if !allowed(a, b) || orbit_of[a * l + b] != NONE {
                    continue;
                }
                let orbit: Vec<(usize, usize)> = match mode {
                    Mode::Unconstrained => vec![(a, b)],
                    Mode::Rotation => {
                        let mut o: Vec<(usize, usize)> = (0..3)
                            .map(|k| {
                                let (x, y) = ((a + k * shift) % l, (b + k * shift) % l);
                                (x.min(y), x.max(y))
                            })
                            .collect();
                        o.sort_unstable();
                        o.dedup();
                        o
                    }
                };
                for &(x, y) in &orbit {
                    orbit_of[x * l + y] = orbits.len();
                    orbit_of[y * l + x] = orbits.len();
                }
                orbits.push(orbit);
            }
        }
        let mut incident = vec![Vec::new(); l];
        for (id, orbit) in orbits.iter().enumerate() {
            let mut count = BTreeMap::new();
            for &(a, b) in orbit {
                *count.entry(a).or_insert(0u8) += 1;
                *count.entry(b).or_insert(0u8) += 1;
            }
            for (v, c) in count {
                incident[v].push((id, c));
            }
        }
        let mut tree_adj = vec![[NONE; 3]; tree.vertex_count()];
        let mut fill = vec![0usize; tree.vertex_count()];
        for &(u, v) in tree.edges() {
            tree_adj[u][fill[u]] = v;
            fill[u] += 1;
            tree_adj[v][fill[v]] = u;
            fill[v] += 1;
        }
        let symmetries = leaf_symmetries(&tree, mode);
        Ok(Self {
            tree,
            mode,
            girth_min,
            orbits,
            orbit_of,
            incident,
            tree_adj,
            symmetries,
        })
    }

    /// Same search without symmetry pruning (every factor has weight 1).
    pub fn without_symmetry(mut self) -> Self {
        self.symmetries.truncate(1);
        self
    }

    pub fn tree(&self) -> &TiTree {
        &self.tree
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn symmetry_count(&self) -> usize {
        self.symmetries.len()
    }

    /// Visits one 2-factor (as sorted leaf pairs) per symmetry class met in
    /// the search, with the number of labelled factors it stands for.
    pub fn for_each<F: FnMut(&[(usize, usize)], u64)>(&self, mut visit: F) -> SearchStats {
        self.run_unit(&[], &mut visit)
    }

    /// Choice prefixes of the nodes at `depth` (or of shallower complete
    /// factors); together they partition the search.
    pub fn units(&self, depth: usize) -> Vec<Vec<usize>> {
        self.plan(depth).0
    }

    /// Units plus the statistics of the nodes above them.
    pub fn plan(&self, depth: usize) -> (Vec<Vec<usize>>, SearchStats) {
        let mut noop = |_: &[(usize, usize)], _: u64| {};
        let mut walk = Walk {
            replay: &[],
            cut: Some(depth),
            prefix: Vec::new(),
            units: Vec::new(),
            stats: SearchStats::default(),
            visit: &mut noop,
        };
        let mut st = self.state();
        let all: Vec<u32> = (0..self.symmetries.len() as u32).collect();
        self.dfs(&mut st, 0, &all, 1, &mut walk);
        (walk.units, walk.stats)
    }

    /// Replays `prefix` and explores everything below it.
    pub fn run_unit<F: FnMut(&[(usize, usize)], u64)>(&self, prefix: &[usize], visit: &mut F) -> SearchStats {
        let mut walk = Walk {
            replay: prefix,
            cut: None,
            prefix: Vec::new(),
            units: Vec::new(),
            stats: SearchStats::default(),
            visit,
        };
        let mut st = self.state();
        let all: Vec<u32> = (0..self.symmetries.len() as u32).collect();
        self.dfs(&mut st, 0, &all, 1, &mut walk);
        walk.stats
    }

    fn state(&self) -> State {
        let l = self.tree.leaf_count();
        State {
            degree: vec![0; l],
            leaf_adj: vec![[NONE; 2]; l],
            chosen: vec![false; self.orbits.len()],
            edges: Vec::with_capacity(l),
            mark: vec![0; self.tree.vertex_count()],
            stamp: 0,
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    fn map_orbit(&self, sigma: u32, orbit: usize) -> usize {
        let l = self.tree.leaf_count();
        let perm = &self.symmetries[sigma as usize];
        let (a, b) = self.orbits[orbit][0];
        self.orbit_of[perm[a] as usize * l + perm[b] as usize]
    }

    fn map_choice(&self, sigma: u32, choice: &Choice) -> Choice {
        let a = self.map_orbit(sigma, choice[0]);
        if choice[1] == NONE {
            return [a, NONE];
        }
        let b = self.map_orbit(sigma, choice[1]);
        [a.min(b), a.max(b)]
    }

    /// `fixing` holds the symmetries that map the current partial factor to
    /// itself; `weight` is the number of labelled nodes this node stands for.
    fn dfs(&self, st: &mut State, level: usize, fixing: &[u32], weight: u64, walk: &mut Walk<'_>) {
        let replaying = level < walk.replay.len();
        let Some(v) = st.degree.iter().position(|&d| d < 2) else {
            if walk.cut.is_some() {
                walk.units.push(walk.prefix.clone());
            } else {
                walk.stats.factors += 1;
                walk.stats.labeled += weight;
                let mut edges = st.edges.clone();
                edges.sort_unstable();
                (walk.visit)(&edges, weight);
            }
            return;
        };
        if walk.cut == Some(level) {
            walk.units.push(walk.prefix.clone());
            return;
        }
        if !replaying {
            walk.stats.nodes += 1;
        }
        let choices = self.choices(st, v);
        let symmetric = fixing.len() > 1;
        let fixing_v: Vec<u32> = if symmetric {
            fixing
                .iter()
                .copied()
                .filter(|&s| self.symmetries[s as usize][v] as usize == v)
                .collect()
        } else {
            Vec::new()
        };
        let mut images: Vec<Choice> = Vec::new();
        for (index, choice) in choices.iter().enumerate() {
            if replaying && walk.replay[level] != index {
                continue;
            }
            let mut orbit_size = 1;
            if fixing_v.len() > 1 {
                images.clear();
                images.extend(fixing_v.iter().map(|&s| self.map_choice(s, choice)));
                images.sort_unstable();
                images.dedup();
                let first = images
                    .iter()
                    .filter_map(|img| choices.iter().position(|c| c == img))
                    .min()
                    .expect("a choice is its own image");
                if first != index {
                    continue;
                }
                orbit_size = images.len() as u64;
            }
            let mut added = 0;
            let mut ok = true;
            for &orbit in choice.iter().filter(|&&o| o != NONE) {
                if self.apply(st, orbit) {
                    added += 1;
                } else {
                    ok = false;
                    break;
                }
            }
            if ok {
                let child: Vec<u32> = if symmetric {
                    fixing
                        .iter()
                        .copied()
                        .filter(|&s| self.map_choice(s, choice) == *choice)
                        .collect()
                } else {
                    Vec::new()
                };
                let child_fixing: &[u32] = if symmetric { &child } else { fixing };
                walk.prefix.push(index);
                self.dfs(st, level + 1, child_fixing, weight * orbit_size, walk);
                walk.prefix.pop();
            } else if !replaying {
                walk.stats.pruned += 1;
            }
            for &orbit in choice[..added].iter().rev() {
                self.undo(st, orbit);
            }
        }
    }

    fn choices(&self, st: &State, v: usize) -> Vec<Choice> {
        let deficit = 2 - st.degree[v];
        let fits = |o: usize| {
            !st.chosen[o]
                && self.orbits[o]
                    .iter()
                    .flat_map(|&(a, b)| [a, b])
                    .all(|x| st.degree[x] < 2)
        };
        let candidates: Vec<(usize, u8)> = self.incident[v]
            .iter()
            .copied()
            .filter(|&(o, c)| c <= deficit && fits(o))
            .collect();
        let mut out = Vec::new();
        for (i, &(o, c)) in candidates.iter().enumerate() {
            if c == deficit {
                out.push([o, NONE]);
            }
            if deficit == 2 && c == 1 {
                for &(p, d) in &candidates[i + 1..] {
                    if d == 1 {
                        out.push([o, p]);
                    }
                }
            }
        }
        out
    }

    /// Adds an orbit if degrees allow it and no new cycle is below the girth
    /// floor.
    fn apply(&self, st: &mut State, orbit: usize) -> bool {
        let edges = &self.orbits[orbit];
        let mut load = BTreeMap::new();
        for &(a, b) in edges {
            *load.entry(a).or_insert(0u8) += 1;
            *load.entry(b).or_insert(0u8) += 1;
        }
        if load.iter().any(|(&x, &c)| st.degree[x] + c > 2) {
            return false;
        }
        for (k, &(a, b)) in edges.iter().enumerate() {
            if self.within(st, a, b, self.girth_min - 2) {
                for _ in 0..k {
                    self.pop_edge(st);
                }
                return false;
            }
            self.push_edge(st, a, b);
        }
        st.chosen[orbit] = true;
        true
    }

    fn undo(&self, st: &mut State, orbit: usize) {
        for _ in 0..self.orbits[orbit].len() {
            self.pop_edge(st);
        }
        st.chosen[orbit] = false;
    }

    fn push_edge(&self, st: &mut State, a: usize, b: usize) {
        st.leaf_adj[a][st.degree[a] as usize] = b;
        st.degree[a] += 1;
        st.leaf_adj[b][st.degree[b] as usize] = a;
        st.degree[b] += 1;
        st.edges.push((a, b));
    }

    fn pop_edge(&self, st: &mut State) {
        let (a, b) = st.edges.pop().expect("edge to pop");
        st.degree[b] -= 1;
        st.leaf_adj[b][st.degree[b] as usize] = NONE;
        st.degree[a] -= 1;
        st.leaf_adj[a][st.degree[a] as usize] = NONE;
    }

    /// `true` iff `b` is within distance `limit` of `a` in the tree plus the
    /// current leaf edges.
    fn within(&self, st: &mut State, a: usize, b: usize, limit: usize) -> bool {
        st.stamp = st.stamp.wrapping_add(1);
        if st.stamp == 0 {
            st.mark.fill(0);
            st.stamp = 1;
        }
        let stamp = st.stamp;
        let l = self.tree.leaf_count();
        st.mark[a] = stamp;
        st.frontier.clear();
        st.frontier.push(a);
        for _ in 0..limit {
            st.next.clear();
            for i in 0..st.frontier.len() {
                let u = st.frontier[i];
                let leaf = if u < l { st.leaf_adj[u] } else { [NONE; 2] };
                for w in self.tree_adj[u].into_iter().chain(leaf) {
                    if w == NONE || st.mark[w] == stamp {
                        continue;
                    }
                    if w == b {
                        return true;
                    }
                    st.mark[w] = stamp;
                    st.next.push(w);
                }
            }
            std::mem::swap(&mut st.frontier, &mut st.next);
        }
        false
    }
}

/// Splits a leaf 2-factor into its cycles.
pub fn spec_from_leaf_edges(l: usize, edges: &[(usize, usize)]) -> OuterCycleSpec {
    let mut adj = vec![Vec::with_capacity(2); l];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; l];
    let mut cycles = Vec::new();
    for start in 0..l {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let (mut prev, mut cur) = (start, adj[start][0]);
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
            prev = cur;
            cur = next;
        }
        cycles.push(cycle);
    }
    OuterCycleSpec::new(cycles).canonical()
}

// ---- sharded execution ---------------------------------------------------------

/// Result of a set of work units; merging must be associative and
/// commutative.
pub trait Accumulator: Default + Send + Serialize + DeserializeOwned {
    fn merge(&mut self, other: Self);
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
    pub shard_depth: usize,
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many new units (the report is then incomplete).
    pub max_units: Option<usize>,
    pub force: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            jobs: None,
            shard_depth: DEFAULT_SHARD_DEPTH,
            checkpoint: None,
            max_units: None,
            force: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct UnitOutcome<A> {
    stats: SearchStats,
    result: A,
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint<A> {
    task: String,
    space: SearchSpace,
    shard_depth: usize,
    completed: BTreeMap<String, UnitOutcome<A>>,
}

/// Progress of a sharded run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitProgress {
    pub units: usize,
    pub completed: usize,
}

fn unit_id(prefix: &[usize]) -> String {
    if prefix.is_empty() {
        return "root".into();
    }
    prefix.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, EnumerateError> {
    match jobs {
        None => Ok(f()),
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| EnumerateError::Pool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every unit of `generator`, feeding complete factors to `visit`.
fn run_sharded<A, V>(
    task: &str,
    space: &SearchSpace,
    generator: &TwoFactorGenerator,
    options: &RunOptions,
    visit: V,
) -> Result<(A, SearchStats, UnitProgress), EnumerateError>
where
    A: Accumulator,
    V: Fn(&mut A, &[(usize, usize)], u64) + Sync,
{
    let (units, planning) = generator.plan(options.shard_depth);
    let mut completed: BTreeMap<String, UnitOutcome<A>> = BTreeMap::new();
    if let Some(path) = &options.checkpoint {
        if path.exists() {
            let ck: Checkpoint<A> = serde_json::from_slice(&fs::read(path)?)?;
            if ck.task != task || &ck.space != space || ck.shard_depth != options.shard_depth {
                return Err(EnumerateError::CheckpointMismatch { path: path.clone() });
            }
            completed = ck.completed;
        }
    }
    let mut todo: Vec<&Vec<usize>> = units
        .iter()
        .filter(|p| !completed.contains_key(&unit_id(p)))
        .collect();
    if let Some(max) = options.max_units {
        todo.truncate(max);
    }

    struct Shared<A> {
        completed: BTreeMap<String, UnitOutcome<A>>,
        last_write: Instant,
    }
    let shared = Mutex::new(Shared {
        completed,
        last_write: Instant::now(),
    });
    let save = |s: &Shared<A>| -> Result<(), EnumerateError> {
        if let Some(path) = &options.checkpoint {
            let ck = CheckpointRef {
                task,
                space,
                shard_depth: options.shard_depth,
                completed: &s.completed,
            };
            write_atomic(path, &serde_json::to_vec(&ck)?)?;
        }
        Ok(())
    };
    let errors: Mutex<Option<EnumerateError>> = Mutex::new(None);
    with_pool(options.jobs, || {
        todo.par_iter().for_each(|prefix| {
            let mut acc = A::default();
            let stats = generator.run_unit(prefix, &mut |edges, weight| visit(&mut acc, edges, weight));
            let mut s = shared.lock().unwrap();
            s.completed.insert(unit_id(prefix), UnitOutcome { stats, result: acc });
            if s.last_write.elapsed() > Duration::from_secs(5) {
                s.last_write = Instant::now();
                if let Err(e) = save(&s) {
                    errors.lock().unwrap().get_or_insert(e);
                }
            }
        })
    })?;
    let mut s = shared.into_inner().unwrap();
    if let Some(e) = errors.into_inner().unwrap() {
        return Err(e);
    }
    save(&s)?;

    let mut total = A::default();
    let mut stats = planning;
    let mut done = 0;
    for prefix in &units {
        if let Some(outcome) = s.completed.remove(&unit_id(prefix)) {
            stats.add(&outcome.stats);
            total.merge(outcome.result);
            done += 1;
        }
    }
    Ok((
        total,
        stats,
        UnitProgress {
            units: units.len(),
            completed: done,
        },
    ))
}

#[derive(Serialize)]
struct CheckpointRef<'a, A> {
    task: &'a str,
    space: &'a SearchSpace,
    shard_depth: usize,
    completed: &'a BTreeMap<String, UnitOutcome<A>>,
}

// ---- snark enumeration ---------------------------------------------------------

/// Everything collected about one isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    /// Smallest canonical outer-cycle text among the presentations found.
    pub representative: String,
    pub oc: OcMultiset,
    /// Labelled presentations found, per oc multiset.
    pub presentations: BTreeMap<String, u64>,
    pub labeled: u64,
    pub aut_order: u64,
}

impl ClassRecord {
    fn merge(&mut self, other: ClassRecord) {
        if other.representative < self.representative {
            self.representative = other.representative;
            self.oc = other.oc;
        }
        for (oc, count) in other.presentations {
            *self.presentations.entry(oc).or_insert(0) += count;
        }
        self.labeled += other.labeled;
    }
}

/// Classes keyed by the graph6 string of the canonical form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassMap(pub BTreeMap<String, ClassRecord>);

impl ClassMap {
    pub fn insert(&mut self, key: String, record: ClassRecord) {
        match self.0.get_mut(&key) {
            Some(existing) => existing.merge(record),
            None => {
                self.0.insert(key, record);
            }
        }
    }
}

impl Accumulator for ClassMap {
    fn merge(&mut self, other: Self) {
        for (key, record) in other.0 {
            self.insert(key, record);
        }
    }
}

/// Applies the filters of `space` to one 2-factor.
pub fn classify_factor(
    space: &SearchSpace,
    tree: &TiTree,
    edges: &[(usize, usize)],
    weight: u64,
) -> Option<(String, ClassRecord)> {
    let spec = spec_from_leaf_edges(tree.leaf_count(), edges);
    let oc = spec.oc();
    if space.oc.as_ref().is_some_and(|want| *want != oc) {
        return None;
    }
    let g = build_on_tree(tree, &spec).ok()?;
    if space.snark_filter && !is_snark_given_girth(&g, space.girth_min) {
        return None;
    }
    let cf = canonical_form(&g);
    let key = export_graph6(&cf.graph());
    let record = ClassRecord {
        representative: spec.cycles_text(),
        presentations: BTreeMap::from([(oc.to_string(), weight)]),
        oc,
        labeled: weight,
        aut_order: u64::try_from(cf.aut_order).unwrap_or(u64::MAX),
    };
    Some((key, record))
}

fn is_snark_given_girth(g: &CubicGraph, girth_floor: usize) -> bool {
    (girth_floor >= 5 || girth(g) >= 5) && !is_three_edge_colorable(g) && is_cyclically_k_connected(g, 4)
}

/// `true` iff `g` is a snark: girth at least 5, cyclically 4-edge-connected
/// and not 3-edge-colourable.
pub fn is_snark(g: &CubicGraph) -> bool {
    is_snark_given_girth(g, 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    /// graph6 of the canonical form.
    pub canonical: String,
    pub representative: String,
    pub oc: OcMultiset,
    pub presentations: BTreeMap<String, u64>,
    pub labeled: u64,
    pub aut_order: u64,
    pub n: usize,
    pub girth: usize,
    /// `None` when the graph has no cyclic edge cut.
    pub cyclic_connectivity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub space: SearchSpace,
    /// Isomorphism classes found.
    pub total: usize,
    /// Labelled 2-factors that passed the filters.
    pub labeled_total: u64,
    /// For each oc multiset, the number of classes with a presentation of
    /// that type.
    pub classes: BTreeMap<String, usize>,
    pub labeled_classes: BTreeMap<String, u64>,
    pub graphs: Vec<GraphRecord>,
    pub stats: SearchStats,
    pub units: UnitProgress,
    pub complete: bool,
    pub sample: Option<SampleInfo>,
}

impl EnumerationReport {
    fn from_classes(
        space: SearchSpace,
        classes: ClassMap,
        stats: SearchStats,
        units: UnitProgress,
        complete: bool,
        sample: Option<SampleInfo>,
    ) -> Self {
        let mut graphs: Vec<GraphRecord> = classes
            .0
            .into_iter()
            .map(|(canonical, r)| {
                let g = import_graph6(&canonical).expect("canonical keys are valid graph6");
                GraphRecord {
                    n: g.order(),
                    girth: girth(&g),
                    cyclic_connectivity: cyclic_edge_connectivity(&g).value(),
                    canonical,
                    representative: r.representative,
                    oc: r.oc,
                    presentations: r.presentations,
                    labeled: r.labeled,
                    aut_order: r.aut_order,
                }
            })
            .collect();
        graphs.sort_by(|a, b| (&a.oc, &a.representative).cmp(&(&b.oc, &b.representative)));
        let mut by_oc = BTreeMap::new();
        let mut labeled_by_oc = BTreeMap::new();
        for g in &graphs {
            for (oc, count) in &g.presentations {
                *by_oc.entry(oc.clone()).or_insert(0) += 1;
                *labeled_by_oc.entry(oc.clone()).or_insert(0) += count;
            }
        }
        Self {
            space,
            total: graphs.len(),
            labeled_total: graphs.iter().map(|g| g.labeled).sum(),
            classes: by_oc,
            labeled_classes: labeled_by_oc,
            graphs,
            stats,
            units,
            complete,
            sample,
        }
    }
}

/// Exhaustive enumeration of `space`, sharded over the worker pool.
pub fn enumerate_two_factors(space: &SearchSpace, options: &RunOptions) -> Result<EnumerationReport, EnumerateError> {
    space.check_limits(options.force)?;
    let generator = TwoFactorGenerator::new(space.depth, space.mode, space.girth_min)?;
    let tree = generator.tree().clone();
    let (classes, stats, units) = run_sharded("enumerate", space, &generator, options, |acc: &mut ClassMap, edges, weight| {
        if let Some((key, record)) = classify_factor(space, &tree, edges, weight) {
            acc.insert(key, record);
        }
    })?;
    let complete = units.completed == units.units;
    Ok(EnumerationReport::from_classes(
        space.clone(),
        classes,
        stats,
        units,
        complete,
        None,
    ))
}

/// Rotation snarks on `T_4`.
pub fn enumerate_rotation_t4(options: &RunOptions) -> Result<EnumerationReport, EnumerateError> {
    enumerate_two_factors(&SearchSpace::snarks(4, Mode::Rotation), options)
}

/// Random 2-factors instead of the full search (unconstrained mode only).
pub fn sample_two_factors(
    space: &SearchSpace,
    samples: u64,
    seed: u64,
    jobs: Option<usize>,
) -> Result<EnumerationReport, EnumerateError> {
    if space.mode != Mode::Unconstrained {
        return Err(EnumerateError::SampleRotation);
    }
    space.check_limits(true)?;
    let tree = TiTree::new(space.depth)?;
    let classes = with_pool(jobs, || {
        (0..samples)
            .into_par_iter()
            .fold(ClassMap::default, |mut acc, k| {
                let mut rng = sample_rng(seed, k);
                let cycles = random_two_factor(tree.leaf_count(), &mut rng);
                let spec = OuterCycleSpec::new(cycles);
                if let Ok(g) = build_on_tree(&tree, &spec) {
                    if girth(&g) >= space.girth_min {
                        if let Some((key, record)) = classify_factor(space, &tree, &spec.leaf_edges(), 1) {
                            acc.insert(key, record);
                        }
                    }
                }
                acc
            })
            .reduce(ClassMap::default, |mut a, b| {
                a.merge(b);
                a
            })
    })?;
    let stats = SearchStats {
        factors: samples,
        ..SearchStats::default()
    };
    Ok(EnumerationReport::from_classes(
        space.clone(),
        classes,
        stats,
        UnitProgress { units: 0, completed: 0 },
        false,
        Some(SampleInfo { samples, seed }),
    ))
}

/// Independent stream per sample index, so results do not depend on how
/// samples are distributed over workers.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniformly random 2-regular graph on `0..l` (`l >= 3`), as cycles.
///
/// A 2-factor with `c` cycles arises from `2^c` permutations whose cycles
/// all have length at least 3; accepting such a permutation with
/// probability `2^-(c-1)` makes every 2-factor equally likely.
pub fn random_two_factor<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Vec<Vec<usize>> {
    assert!(l >= 3, "a 2-factor needs at least 3 vertices");
    let mut perm: Vec<usize> = (0..l).collect();
    loop {
        for i in (1..l).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut seen = vec![false; l];
        let mut cycles = Vec::new();
        let mut short = false;
        for start in 0..l {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(v);
                v = perm[v];
            }
            if cycle.len() < 3 {
                short = true;
                break;
            }
            cycles.push(cycle);
        }
        if short {
            continue;
        }
        if (1..cycles.len()).all(|_| rng.gen::<bool>()) {
            return cycles;
        }
    }
}

// ---- oc classification ---------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistOcProfile {
    /// oc multisets over all `T_i` Hists.
    pub oc: BTreeSet<OcMultiset>,
    /// Number of `T_i` Hists (one per admissible centre).
    pub hists: usize,
}

/// oc multisets over the Hists of `g` that are isomorphic to `T_depth`.
pub fn hist_oc_profile(g: &CubicGraph, depth: usize) -> HistOcProfile {
    let hists = ti_hists(g, depth);
    HistOcProfile {
        oc: hists.iter().map(|h| h.oc.clone()).collect(),
        hists: hists.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OcClassEntry {
    pub representative: String,
    pub construction_oc: BTreeSet<OcMultiset>,
    pub hist_oc: HistOcProfile,
    /// Some `T_i` Hist has an oc not among the construction presentations.
    pub overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OcClassification {
    pub classes: BTreeMap<String, usize>,
    pub graphs: Vec<OcClassEntry>,
    pub overlaps: usize,
}

/// Groups enumerated graphs by the oc of their constructing Hists and
/// checks whether any of them has a `T_i` Hist of another type.
pub fn classify_by_oc(report: &EnumerationReport) -> OcClassification {
    let depth = report.space.depth;
    let tree = TiTree::new(depth).expect("report depth is valid");
    let graphs: Vec<OcClassEntry> = report
        .graphs
        .par_iter()
        .map(|rec| {
            let spec = crate::codec::parse_outer_cycles(&rec.representative).expect("representatives parse");
            let g = build_on_tree(&tree, &spec).expect("representatives build");
            let construction_oc: BTreeSet<OcMultiset> = rec
                .presentations
                .keys()
                .map(|s| s.parse().expect("oc keys parse"))
                .collect();
            let hist_oc = hist_oc_profile(&g, depth);
            let overlap = hist_oc.oc.iter().any(|oc| !construction_oc.contains(oc));
            OcClassEntry {
                representative: rec.representative.clone(),
                construction_oc,
                hist_oc,
                overlap,
            }
        })
        .collect();
    let mut classes = BTreeMap::new();
    for entry in &graphs {
        for oc in &entry.construction_oc {
            *classes.entry(oc.to_string()).or_insert(0) += 1;
        }
    }
    OcClassification {
        overlaps: graphs.iter().filter(|g| g.overlap).count(),
        classes,
        graphs,
    }
}

// ---- girth six colourability ---------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Theorem2Mode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem2Tally {
    /// Graphs of girth at least 6 examined.
    pub candidates: u64,
    pub not_cyclically_4_connected: u64,
    pub colorable: u64,
    /// Cyclically 4-edge-connected, girth at least 6 and not colourable.
    pub counterexamples: Vec<String>,
}

impl Theorem2Tally {
    fn record(&mut self, g: &CubicGraph, spec: &OuterCycleSpec, weight: u64) {
        self.candidates += weight;
        if !is_cyclically_k_connected(g, 4) {
            self.not_cyclically_4_connected += weight;
        } else if is_three_edge_colorable(g) {
            self.colorable += weight;
        } else {
            self.counterexamples.push(spec.cycles_text());
        }
    }
}

impl Accumulator for Theorem2Tally {
    fn merge(&mut self, other: Self) {
        self.candidates += other.candidates;
        self.not_cyclically_4_connected += other.not_cyclically_4_connected;
        self.colorable += other.colorable;
        self.counterexamples.extend(other.counterexamples);
        self.counterexamples.sort();
        self.counterexamples.dedup();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub depth: usize,
    pub mode: Theorem2Mode,
    pub girth_min: usize,
    pub tally: Theorem2Tally,
    /// Random 2-factors drawn to obtain the samples (sample mode).
    pub draws: Option<u64>,
    /// No graph met the hypotheses.
    pub vacuous: bool,
    pub complete: bool,
    pub stats: SearchStats,
}

/// Checks that every cyclically 4-edge-connected `T_i + 2-factor` graph of
/// girth at least 6 is 3-edge-colourable.
pub fn check_theorem2(depth: usize, mode: Theorem2Mode, options: &RunOptions) -> Result<Theorem2Report, EnumerateError> {
    let girth_min = 6;
    let space = SearchSpace {
        depth,
        mode: Mode::Unconstrained,
        girth_min,
        oc: None,
        snark_filter: false,
    };
    match mode {
        Theorem2Mode::Exhaustive => {
            space.check_limits(options.force)?;
            let generator = TwoFactorGenerator::new(depth, Mode::Unconstrained, girth_min)?;
            let tree = generator.tree().clone();
            let (tally, stats, units) =
                run_sharded("theorem2", &space, &generator, options, |acc: &mut Theorem2Tally, edges, weight| {
                    let spec = spec_from_leaf_edges(tree.leaf_count(), edges);
                    let g = build_on_tree(&tree, &spec).expect("generated factors build");
                    acc.record(&g, &spec, weight);
                })?;
            Ok(Theorem2Report {
                depth,
                mode,
                girth_min,
                vacuous: tally.candidates == tally.not_cyclically_4_connected,
                tally,
                draws: None,
                complete: units.completed == units.units,
                stats,
            })
        }
        Theorem2Mode::Sample { count, seed } => {
            if depth < 3 {
                return Err(EnumerateError::SampleDepth(depth));
            }
            let tree = TiTree::new(depth)?;
            let (tally, draws) = with_pool(options.jobs, || {
                (0..count)
                    .into_par_iter()
                    .fold(
                        || (Theorem2Tally::default(), 0u64),
                        |(mut acc, mut draws), k| {
                            let mut rng = sample_rng(seed, k);
                            let (spec, g, tries) = draw_girth_at_least(&tree, girth_min, &mut rng);
                            draws += tries;
                            acc.record(&g, &spec, 1);
                            (acc, draws)
                        },
                    )
                    .reduce(
                        || (Theorem2Tally::default(), 0),
                        |(mut a, da), (b, db)| {
                            a.merge(b);
                            (a, da + db)
                        },
                    )
            })?;
            Ok(Theorem2Report {
                depth,
                mode,
                girth_min,
                vacuous: tally.candidates == tally.not_cyclically_4_connected,
                tally,
                draws: Some(draws),
                complete: false,
                stats: SearchStats::default(),
            })
        }
    }
}

/// A uniformly random 2-factor on the leaves of `tree` among those giving
/// girth at least `girth_min`; returns the spec, the graph and the number of
/// permutations tried.
///
/// The permutation is built one successor at a time (closing the current
/// cycle is one of the options), which makes every permutation equally
/// likely, and it is abandoned as soon as a short cycle through the tree is
/// certain. Acceptance coins follow [`random_two_factor`]. Loops forever if
/// no such 2-factor exists.
pub fn draw_girth_at_least<R: Rng + ?Sized>(
    tree: &TiTree,
    girth_min: usize,
    rng: &mut R,
) -> (OuterCycleSpec, CubicGraph, u64) {
    let l = tree.leaf_count();
    let g = girth_min.max(3);
    // A leaf path of k edges from x to y closes a cycle of length
    // k + d(x, y) with the tree path.
    let dist: Vec<usize> = (0..l * l).map(|i| tree.leaf_distance(i / l, i % l)).collect();
    let short = |k: usize, x: usize, y: usize| k + dist[x * l + y] < g;
    let mut tries = 0;
    let mut unvisited: Vec<usize> = Vec::with_capacity(l);
    'draw: loop {
        tries += 1;
        unvisited.clear();
        unvisited.extend(0..l);
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        while let Some(start) = unvisited.pop() {
            let mut cycle = Vec::with_capacity(l);
            cycle.push(start);
            loop {
                let pick = rng.gen_range(0..=unvisited.len());
                if pick == unvisited.len() {
                    let len = cycle.len();
                    if len < g {
                        continue 'draw;
                    }
                    for i in 0..len {
                        for k in 1..g.min(len) {
                            if i + k >= len && short(k, cycle[i], cycle[(i + k) % len]) {
                                continue 'draw;
                            }
                        }
                    }
                    // the acceptance coin for every cycle after the first
                    if !cycles.is_empty() && !rng.gen::<bool>() {
                        continue 'draw;
                    }
                    break;
                }
                let next = unvisited.swap_remove(pick);
                for k in 1..g.min(cycle.len() + 1) {
                    if short(k, cycle[cycle.len() - k], next) {
                        continue 'draw;
                    }
                }
                cycle.push(next);
            }
            cycles.push(cycle);
        }
        let spec = OuterCycleSpec::new(cycles);
        let graph = build_on_tree(tree, &spec).expect("2-factor on leaves builds");
        if girth(&graph) >= girth_min {
            return (spec.canonical(), graph, tries);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_orbits_at_depth_four() {
        let gen = TwoFactorGenerator::new(4, Mode::Rotation, 3).unwrap();
        assert_eq!(gen.orbit_count(), 92);
        let gen = TwoFactorGenerator::new(2, Mode::Rotation, 3).unwrap();
        assert_eq!(gen.orbit_count(), 5);
    }

    #[test]
    fn unconstrained_counts_all_two_factors() {
        // Labelled 2-regular graphs on 6 vertices: 70.
        let gen = TwoFactorGenerator::new(2, Mode::Unconstrained, 3).unwrap();
        let stats = gen.for_each(|_, _| {});
        assert_eq!(stats.labeled, 70);
        let plain = TwoFactorGenerator::new(2, Mode::Unconstrained, 3).unwrap().without_symmetry();
        assert_eq!(plain.for_each(|_, _| {}).factors, 70);
    }

    #[test]
    fn units_partition_the_search() {
        let gen = TwoFactorGenerator::new(3, Mode::Unconstrained, 5).unwrap();
        let mut all = Vec::new();
        gen.for_each(|e, w| all.push((e.to_vec(), w)));
        for depth in 0..4 {
            let mut sharded = Vec::new();
            for unit in gen.units(depth) {
                gen.run_unit(&unit, &mut |e: &[(usize, usize)], w| sharded.push((e.to_vec(), w)));
            }
            assert_eq!(sharded, all, "shard depth {depth}");
        }
    }

    #[test]
    fn generated_graphs_respect_the_girth_floor() {
        let gen = TwoFactorGenerator::new(3, Mode::Unconstrained, 6).unwrap();
        let mut count = 0;
        gen.for_each(|edges, _| {
            let spec = spec_from_leaf_edges(12, edges);
            let g = build_on_tree(gen.tree(), &spec).unwrap();
            assert!(girth(&g) >= 6);
            count += 1;
        });
        assert!(count > 0);
    }

    #[test]
    fn random_two_factors_are_two_regular() {
        let mut rng = sample_rng(7, 0);
        for _ in 0..100 {
            let cycles = random_two_factor(12, &mut rng);
            assert!(cycles.iter().all(|c| c.len() >= 3));
            let mut labels: Vec<usize> = cycles.concat();
            labels.sort_unstable();
            assert_eq!(labels, (0..12).collect::<Vec<_>>());
        }
    }

    #[test]
    fn rotation_depth_two_finds_petersen() {
        let report = enumerate_two_factors(&SearchSpace::snarks(2, Mode::Rotation), &RunOptions::default()).unwrap();
        assert_eq!(report.total, 1);
        assert_eq!(report.graphs[0].aut_order, 120);
        assert!(report.complete);
    }

    #[test]
    fn size_limits() {
        let space = SearchSpace::snarks(4, Mode::Unconstrained);
        assert!(matches!(
            space.check_limits(false),
            Err(EnumerateError::TooLarge { leaves: 24, .. })
        ));
        assert!(space.check_limits(true).is_ok());
        assert!(SearchSpace::snarks(5, Mode::Rotation).check_limits(false).is_ok());
    }
}
