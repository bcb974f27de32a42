//! The known Hist-snarks in outer-cycle notation, with the properties each
//! one is expected to have. The definition lines are kept as printed; every
//! derived value is computed from them on demand.

use serde::Serialize;

use crate::canon::{are_isomorphic, automorphism_count};
use crate::codec::{build_graph, check_rotation_property, parse_outer_cycles, OuterCycleSpec};
use crate::coloring::is_three_edge_colorable;
use crate::connectivity::is_cyclically_k_connected;
use crate::graph::{girth, CubicGraph};
use crate::tree::{is_ti_hist, oc_of_hist, OcMultiset, TiTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Definition line as printed, including the printed name.
    pub line: &'static str,
    pub depth: usize,
    pub oc: &'static [usize],
    pub rotation: bool,
    pub aut_order: Option<u128>,
    pub figure: Option<u32>,
    /// Set when the printed name differs from `name`.
    pub note: Option<&'static str>,
    /// Another presentation of the same graph.
    pub isomorphic_to: Option<&'static str>,
}

const SIX_SIX_SIX: &str = "printed as (6,6,6) but the line has four 6-cycles";

pub const CATALOG: &[CatalogEntry] = &[
    entry("H0(24)", "H0(24):=[0,18,9,5,6,3,4,7,8,2,17,13,14,11,12,15,16,10,1,21,22,19,20,23]", 4, &[24], true, Some(3)),
    entry("H1(24)", "H1(24):=[0,19,20,23,17,21,22,18,8,3,4,7,1,5,6,2,16,11,12,15,9,13,14,10]", 4, &[24], true, Some(4)),
    entry("H(12,12)", "H(12,12):=[0,21,22,19,16,13,14,11,8,5,6,3] [10,23,20,17,18,7,4,1,2,15,12,9]", 4, &[12, 12], true, Some(6)),
    entry("H(18,6)", "H(18,6):=[0,18,17,22,20,19,16,10,9,14,12,11,8,2,1,6,4,3] [13,23,5,15,21,7]", 4, &[18, 6], true, Some(5)),
    entry("H0(8,8,8)", "H0(8,8,8):=[0,3,4,7,18,17,22,21] [1,2,15,12,11,8,5,6] [9,10,23,20,19,16,13,14]", 4, &[8, 8, 8], true, Some(7)),
    entry("H1(8,8,8)", "H1(8,8,8):=[0,23,21,17,22,20,19,10] [8,7,5,1,6,4,3,18] [16,15,13,9,14,12,11,2]", 4, &[8, 8, 8], true, Some(8)),
    entry("H2(8,8,8)", "H2(8,8,8):=[0,21,22,19,20,23,17,10] [8,5,6,3,4,7,1,18] [16,13,14,11,12,15,9,2]", 4, &[8, 8, 8], true, Some(9)),
    entry("H3(8,8,8)", "H3(8,8,8):=[0,23,19,20,22,18,21,9] [8,7,3,4,6,2,5,17] [16,15,11,12,14,10,13,1]", 4, &[8, 8, 8], true, Some(10)),
    entry("H4(8,8,8)", "H4(8,8,8):=[0,21,22,19,20,23,18,9] [8,5,6,3,4,7,2,17] [16,13,14,11,12,15,10,1]", 4, &[8, 8, 8], true, Some(11)),
    entry("H5(8,8,8)", "H5(8,8,8):=[0,21,22,19,20,23,10,17] [8,5,6,3,4,7,18,1] [16,13,14,11,12,15,2,9]", 4, &[8, 8, 8], true, Some(12)),
    entry("H6(8,8,8)", "H6(8,8,8):=[0,21,22,19,20,23,9,18] [8,5,6,3,4,7,17,2] [16,13,14,11,12,15,1,10]", 4, &[8, 8, 8], true, Some(13)),
    entry("H7(8,8,8)", "H7(8,8,8):=[0,20,19,22,21,18,9,23] [8,4,3,6,5,2,17,7] [16,12,11,14,13,10,1,15]", 4, &[8, 8, 8], true, Some(14)),
    CatalogEntry {
        note: Some(SIX_SIX_SIX),
        ..entry("H0(6,6,6,6)", "H0(6,6,6):=[1,20,19,6,21,18] [9,4,3,14,5,2] [17,12,11,22,13,10] [15,16,7,8,23,0]", 4, &[6, 6, 6, 6], true, Some(15))
    },
    CatalogEntry {
        note: Some(SIX_SIX_SIX),
        ..entry("H1(6,6,6,6)", "H1(6,6,6):=[0,23,13,2,22,12] [8,7,21,10,6,20] [16,15,5,18,14,4] [11,17,3,9,19,1]", 4, &[6, 6, 6, 6], true, Some(16))
    },
    CatalogEntry {
        note: Some(SIX_SIX_SIX),
        ..entry("H2(6,6,6,6)", "H2(6,6,6):=[1,20,19,0,23,18] [9,4,3,8,7,2] [17,12,11,16,15,10] [14,21,6,13,22,5]", 4, &[6, 6, 6, 6], true, Some(17))
    },
    entry("Loupekine1", "First Loupekine's snark = [0,3,4,7,8,11] [1,2,9,10,5,6]", 3, &[6, 6], true, Some(2)),
    entry("Loupekine2", "Second Loupekine's snark = [0,9,10,7,4,1,2,11,8,5,6,3]", 3, &[12], true, Some(2)),
    CatalogEntry {
        isomorphic_to: Some("[0,4,8,1,5,10] [2,6,9,3,7,11]"),
        ..entry("L3", "L_3:=[0,4,2,1,6,8,10,5,9,11,7,3]", 3, &[12], false, None)
    },
    entry("Petersen", "Petersen graph = [0,3,4,1,2,5]", 2, &[6], true, Some(1)),
    CatalogEntry {
        aut_order: Some(128),
        ..entry("Y", "Y:=[0,4,8,1,5,10] [2,6,12,3,7,14] [9,16,20,11,17,21] [13,18,22,15,19,23]", 4, &[6, 6, 6, 6], false, None)
    },
];

const fn entry(
    name: &'static str,
    line: &'static str,
    depth: usize,
    oc: &'static [usize],
    rotation: bool,
    figure: Option<u32>,
) -> CatalogEntry {
    CatalogEntry {
        name,
        line,
        depth,
        oc,
        rotation,
        aut_order: None,
        figure,
        note: None,
        isomorphic_to: None,
    }
}

/// Case-insensitive lookup that also ignores spaces and underscores, so
/// `l_3`, `L3` and `h0(6,6,6,6)` all resolve.
pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    let norm = |s: &str| {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .flat_map(char::to_lowercase)
            .collect::<String>()
    };
    let wanted = norm(name);
    CATALOG.iter().find(|e| norm(e.name) == wanted)
}

impl CatalogEntry {
    pub fn spec(&self) -> OuterCycleSpec {
        let mut spec = parse_outer_cycles(self.line).expect("catalog lines parse");
        spec.name = Some(self.name.to_string());
        spec
    }

    pub fn graph(&self) -> CubicGraph {
        build_graph(self.depth, &self.spec()).expect("catalog lines build")
    }

    pub fn expected_oc(&self) -> OcMultiset {
        OcMultiset::new(self.oc.to_vec())
    }

    /// Rebuilds the entry and compares every expected property. Returns the
    /// list of failures (empty on success).
    pub fn check(&self) -> CatalogCheck {
        check_line(self, self.line)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogCheck {
    pub name: String,
    pub n: Option<usize>,
    pub girth: Option<usize>,
    pub cyclically_4_connected: Option<bool>,
    pub colorable: Option<bool>,
    pub oc: Option<OcMultiset>,
    pub rotation: Option<bool>,
    pub aut_order: Option<u128>,
    pub failures: Vec<String>,
}

impl CatalogCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `line` against the expectations recorded for `entry`; used with a
/// different line for fault injection.
pub fn check_line(entry: &CatalogEntry, line: &str) -> CatalogCheck {
    let mut out = CatalogCheck {
        name: entry.name.to_string(),
        n: None,
        girth: None,
        cyclically_4_connected: None,
        colorable: None,
        oc: None,
        rotation: None,
        aut_order: None,
        failures: Vec::new(),
    };
    let spec = match parse_outer_cycles(line) {
        Ok(spec) => spec,
        Err(e) => {
            out.failures.push(format!("parse: {e}"));
            return out;
        }
    };
    if spec.depth() != Some(entry.depth) {
        out.failures
            .push(format!("depth: expected {}, label count gives {:?}", entry.depth, spec.depth()));
        return out;
    }
    let g = match build_graph(entry.depth, &spec) {
        Ok(g) => g,
        Err(e) => {
            out.failures.push(format!("build: {e}"));
            return out;
        }
    };
    let tree = TiTree::new(entry.depth).expect("catalog depth is valid");
    let tree_edges = tree.edges().to_vec();
    if !is_ti_hist(&g, &tree_edges, entry.depth) {
        out.failures.push("construction tree is not a T_i Hist".into());
    }
    let girth = girth(&g);
    let c4 = is_cyclically_k_connected(&g, 4);
    let colorable = is_three_edge_colorable(&g);
    let oc = oc_of_hist(&g, &tree_edges).ok();
    let rotation = check_rotation_property(&spec);
    out.n = Some(g.order());
    out.girth = Some(girth);
    out.cyclically_4_connected = Some(c4);
    out.colorable = Some(colorable);
    out.rotation = Some(rotation);
    if girth < 5 {
        out.failures.push(format!("girth {girth} < 5"));
    }
    if !c4 {
        out.failures.push("not cyclically 4-edge-connected".into());
    }
    if colorable {
        out.failures.push("3-edge-colourable".into());
    }
    if oc.as_ref() != Some(&entry.expected_oc()) {
        out.failures.push(format!(
            "oc: expected {}, found {}",
            entry.expected_oc(),
            oc.as_ref().map_or("none".to_string(), |o| o.to_string())
        ));
    }
    out.oc = oc;
    if rotation != entry.rotation {
        out.failures
            .push(format!("rotation: expected {}, found {rotation}", entry.rotation));
    }
    if entry.rotation && entry.depth == 4 || entry.aut_order.is_some() {
        let aut = automorphism_count(&g);
        out.aut_order = Some(aut);
        if let Some(expected) = entry.aut_order {
            if aut != expected {
                out.failures.push(format!("aut order: expected {expected}, found {aut}"));
            }
        }
        if entry.rotation && aut % 3 != 0 {
            out.failures.push(format!("aut order {aut} not divisible by 3"));
        }
    }
    if let Some(other) = entry.isomorphic_to {
        let iso = parse_outer_cycles(other)
            .ok()
            .and_then(|s| build_graph(entry.depth, &s).ok())
            .is_some_and(|h| are_isomorphic(&g, &h));
        if !iso {
            out.failures.push(format!("not isomorphic to {other}"));
        }
    }
    out
}
