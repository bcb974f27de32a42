//! Hist-snark toolkit: cubic graphs assembled from the canonical 1,3-trees
//! `T_i` plus a 2-factor on their leaves, with the checks needed to certify
//! snarks (girth, cyclic edge connectivity, 3-edge-colourability), Hist
//! search, canonical forms and exhaustive or rotation-invariant enumeration.

pub mod canon;
pub mod catalog;
pub mod codec;
pub mod coloring;
pub mod enumerate;
pub mod connectivity;
pub mod graph;
pub mod tree;

pub use canon::{are_isomorphic, automorphism_count, canonical_form, CanonKey, CanonicalForm};
pub use codec::{
    build_graph, check_rotation_property, emit_outer_cycles, export_graph6, import_graph6, parse_outer_cycles,
    BuildError, OuterCycleSpec, ParseError,
};
pub use coloring::{check_balance_exhaustive, check_balance_sampled, is_three_edge_colorable, BalanceReport, three_edge_coloring, EdgeColoring};
pub use connectivity::{cyclic_edge_connectivity, is_cyclically_k_connected, CyclicConnectivity, EdgeCut};
pub use graph::{girth, is_connected, CubicGraph, GraphError};
pub use tree::{build_ti, find_hists, ti_hists, HistSearchOptions, HistWitness, OcMultiset, TiTree};
