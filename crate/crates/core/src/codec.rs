//! Outer-cycle notation, graph assembly from `T_i` plus leaf cycles, and
//! graph6.
//!
//! A definition line looks like `H(12,12):=[0,21,22,...] [10,23,20,...]`:
//! an optional name followed by `:=` or `=`, then one bracket group per
//! outer cycle listing leaf labels in cyclic order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CubicGraph, GraphError};
use crate::tree::{depth_for_leaf_count, OcMultiset, TiTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("duplicate label {label} at position {position}")]
    DuplicateLabel { label: usize, position: usize },
    #[error("label {label} at position {position} is out of range for {leaf_count} leaves")]
    LabelOutOfRange {
        label: usize,
        position: usize,
        leaf_count: usize,
    },
    #[error("cycle starting at position {position} has length {length}; outer cycles need at least 3 labels")]
    ShortCycle { position: usize, length: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("T_{depth} has {expected} leaves but the cycles use {found} labels")]
    LeafCountMismatch {
        depth: usize,
        expected: usize,
        found: usize,
    },
    #[error("leaf labels do not form a partition of 0..{0}")]
    NotAPartition(usize),
    #[error("leaf pair {0}-{1} repeats an edge")]
    RepeatedPair(usize, usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A 2-factor on the leaves `0..l` of some `T_i`, as cyclic label sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OuterCycleSpec {
    pub name: Option<String>,
    pub cycles: Vec<Vec<usize>>,
}

impl OuterCycleSpec {
    pub fn new(cycles: Vec<Vec<usize>>) -> Self {
        Self { name: None, cycles }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn leaf_count(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum()
    }

    /// The depth `i` whose tree has this many leaves; `None` flags a
    /// depth-ambiguous (unusable) label count.
    pub fn depth(&self) -> Option<usize> {
        depth_for_leaf_count(self.leaf_count())
    }

    pub fn oc(&self) -> OcMultiset {
        OcMultiset::new(self.cycles.iter().map(Vec::len).collect())
    }

    /// Leaf-leaf edges as sorted `(min, max)` pairs.
    pub fn leaf_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .cycles
            .iter()
            .flat_map(|c| {
                (0..c.len()).map(move |i| {
                    let (a, b) = (c[i], c[(i + 1) % c.len()]);
                    (a.min(b), a.max(b))
                })
            })
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Each cycle starts at its smallest label and continues towards its
    /// smaller neighbour; cycles are sorted by first label.
    pub fn canonical(&self) -> OuterCycleSpec {
        let mut cycles: Vec<Vec<usize>> = self.cycles.iter().map(|c| canonical_cycle(c)).collect();
        cycles.sort();
        OuterCycleSpec {
            name: self.name.clone(),
            cycles,
        }
    }

    /// Appendix-style text, canonical form, without the name.
    pub fn cycles_text(&self) -> String {
        self.canonical()
            .cycles
            .iter()
            .map(|c| {
                let labels: Vec<String> = c.iter().map(usize::to_string).collect();
                format!("[{}]", labels.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn canonical_cycle(c: &[usize]) -> Vec<usize> {
    let len = c.len();
    let start = (0..len).min_by_key(|&i| c[i]).unwrap_or(0);
    let next = c[(start + 1) % len];
    let prev = c[(start + len - 1) % len];
    if next <= prev {
        (0..len).map(|k| c[(start + k) % len]).collect()
    } else {
        (0..len).map(|k| c[(start + len - k) % len]).collect()
    }
}

impl fmt::Display for OuterCycleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_outer_cycles(self))
    }
}

/// Parses one definition line.
pub fn parse_outer_cycles(text: &str) -> Result<OuterCycleSpec, ParseError> {
    let bytes = text.as_bytes();
    let syntax = |position: usize, message: &str| ParseError::Syntax {
        position,
        message: message.to_string(),
    };
    let Some(open) = text.find('[') else {
        return Err(syntax(text.len(), "expected '['"));
    };
    let prefix = text[..open].trim();
    let name = if prefix.is_empty() {
        None
    } else {
        let stripped = prefix
            .strip_suffix(":=")
            .or_else(|| prefix.strip_suffix('='))
            .ok_or_else(|| syntax(open, "name must be followed by ':=' or '='"))?;
        let name = stripped.trim();
        if name.is_empty() {
            return Err(syntax(0, "empty name before '='"));
        }
        Some(name.to_string())
    };

    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut positions: Vec<Vec<usize>> = Vec::new();
    let mut starts = Vec::new();
    let mut pos = open;
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos == bytes.len() {
            break;
        }
        if bytes[pos] != b'[' {
            return Err(syntax(pos, "expected '[' or end of input"));
        }
        starts.push(pos);
        pos += 1;
        let mut cycle = Vec::new();
        let mut at = Vec::new();
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let digits_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if digits_start == pos {
                return Err(syntax(pos, "expected a label"));
            }
            let label = text[digits_start..pos]
                .parse::<usize>()
                .map_err(|_| syntax(digits_start, "label too large"))?;
            cycle.push(label);
            at.push(digits_start);
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            match bytes.get(pos) {
                Some(b',') => pos += 1,
                Some(b']') => {
                    pos += 1;
                    break;
                }
                _ => return Err(syntax(pos, "expected ',' or ']'")),
            }
        }
        cycles.push(cycle);
        positions.push(at);
    }

    let leaf_count: usize = cycles.iter().map(Vec::len).sum();
    let mut seen = vec![false; leaf_count];
    for (cycle, at) in cycles.iter().zip(&positions) {
        for (&label, &position) in cycle.iter().zip(at) {
            if label >= leaf_count {
                // A repeated small label also pushes some label out of range;
                // report the duplicate when there is one.
                if let Some((dup, dup_pos)) = first_duplicate(&cycles, &positions) {
                    return Err(ParseError::DuplicateLabel {
                        label: dup,
                        position: dup_pos,
                    });
                }
                return Err(ParseError::LabelOutOfRange {
                    label,
                    position,
                    leaf_count,
                });
            }
            if seen[label] {
                return Err(ParseError::DuplicateLabel { label, position });
            }
            seen[label] = true;
        }
    }
    for (cycle, &position) in cycles.iter().zip(&starts) {
        if cycle.len() < 3 {
            return Err(ParseError::ShortCycle {
                position,
                length: cycle.len(),
            });
        }
    }
    Ok(OuterCycleSpec { name, cycles })
}

fn first_duplicate(cycles: &[Vec<usize>], positions: &[Vec<usize>]) -> Option<(usize, usize)> {
    let mut seen = BTreeSet::new();
    for (cycle, at) in cycles.iter().zip(positions) {
        for (&label, &position) in cycle.iter().zip(at) {
            if !seen.insert(label) {
                return Some((label, position));
            }
        }
    }
    None
}

/// Canonical text: `NAME:=` (when named) followed by the canonical cycles.
pub fn emit_outer_cycles(spec: &OuterCycleSpec) -> String {
    match &spec.name {
        Some(name) => format!("{name}:={}", spec.cycles_text()),
        None => spec.cycles_text(),
    }
}

/// `T_i` with its canonical labelling plus the leaf cycles of `spec`.
pub fn build_graph(depth: usize, spec: &OuterCycleSpec) -> Result<CubicGraph, BuildError> {
    let tree = TiTree::new(depth)?;
    build_on_tree(&tree, spec)
}

pub fn build_on_tree(tree: &TiTree, spec: &OuterCycleSpec) -> Result<CubicGraph, BuildError> {
    let found = spec.leaf_count();
    if found != tree.leaf_count() {
        return Err(BuildError::LeafCountMismatch {
            depth: tree.depth(),
            expected: tree.leaf_count(),
            found,
        });
    }
    let mut seen = vec![false; found];
    for &label in spec.cycles.iter().flatten() {
        if label >= found || seen[label] {
            return Err(BuildError::NotAPartition(found));
        }
        seen[label] = true;
    }
    let leaf_edges = spec.leaf_edges();
    for pair in leaf_edges.windows(2) {
        if pair[0] == pair[1] {
            return Err(BuildError::RepeatedPair(pair[0].0, pair[0].1));
        }
    }
    if let Some(&(a, b)) = leaf_edges.iter().find(|(a, b)| a == b) {
        return Err(BuildError::RepeatedPair(a, b));
    }
    let edges = tree.edges().iter().copied().chain(leaf_edges);
    Ok(CubicGraph::from_edges(tree.vertex_count(), edges)?)
}

/// `true` iff the leaf-leaf edge set is invariant under `a -> a + l/3 mod l`.
pub fn check_rotation_property(spec: &OuterCycleSpec) -> bool {
    let l = spec.leaf_count();
    if l == 0 || l % 3 != 0 {
        return false;
    }
    let shift = l / 3;
    let edges: BTreeSet<(usize, usize)> = spec.leaf_edges().into_iter().collect();
    edges.iter().all(|&(a, b)| {
        let (x, y) = ((a + shift) % l, (b + shift) % l);
        edges.contains(&(x.min(y), x.max(y)))
    })
}

// ---- graph6 ------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("invalid graph6 character {0:?}")]
    BadChar(char),
    #[error("graph6 string has wrong length for {0} vertices")]
    Length(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// graph6 encoding (`N(n)` followed by the upper triangle, column by column,
/// six bits per byte offset by 63).
pub fn export_graph6(g: &CubicGraph) -> String {
    let n = g.order();
    let mut out = String::new();
    if n <= 62 {
        out.push((n as u8 + 63) as char);
    } else {
        out.push('~');
        for shift in [12, 6, 0] {
            out.push((((n >> shift) & 0x3f) as u8 + 63) as char);
        }
    }
    let mut word = 0u8;
    let mut bits = 0;
    for j in 1..n {
        for i in 0..j {
            word = (word << 1) | u8::from(g.has_edge(i, j));
            bits += 1;
            if bits == 6 {
                out.push((word + 63) as char);
                word = 0;
                bits = 0;
            }
        }
    }
    if bits > 0 {
        out.push(((word << (6 - bits)) + 63) as char);
    }
    out
}

pub fn import_graph6(text: &str) -> Result<CubicGraph, Graph6Error> {
    let text = text.trim();
    let text = text.strip_prefix(">>graph6<<").unwrap_or(text);
    let bytes = text.as_bytes();
    for &b in bytes {
        if !(63..=126).contains(&b) {
            return Err(Graph6Error::BadChar(b as char));
        }
    }
    let (n, body) = match bytes {
        [] => return Err(Graph6Error::Empty),
        [126, 126, ..] => return Err(Graph6Error::Length(0)),
        [126, a, b, c, rest @ ..] => {
            let n = ((*a as usize - 63) << 12) | ((*b as usize - 63) << 6) | (*c as usize - 63);
            (n, rest)
        }
        [126, ..] => return Err(Graph6Error::Length(0)),
        [first, rest @ ..] => (*first as usize - 63, rest),
    };
    let total_bits = n * n.saturating_sub(1) / 2;
    if body.len() != total_bits.div_ceil(6) {
        return Err(Graph6Error::Length(n));
    }
    let bit = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Ok(CubicGraph::from_edges(n, edges)?)
}
