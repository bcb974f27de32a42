// Graph inputs: outer-cycle text (built on T_i) or graph6.

use std::path::Path;

use histsnark::catalog::{self, CatalogEntry};
use histsnark::{build_ti, import_graph6, parse_outer_cycles, CubicGraph, OuterCycleSpec, TiTree};

use crate::exit::{Fail, ResultExt, PARSE, PRECONDITION};

pub enum Source {
    /// Built from a 2-factor on the leaves of `tree`, with the canonical
    /// labelling.
    Tree { spec: OuterCycleSpec, tree: TiTree },
    Graph6,
}

pub struct Input {
    pub name: Option<String>,
    pub graph: CubicGraph,
    pub source: Source,
    pub entry: Option<&'static CatalogEntry>,
}

pub fn from_catalog(name: &str) -> Result<Input, Fail> {
    let entry = catalog::lookup(name).ok_or_else(|| Fail::new(PRECONDITION, format!("no catalog entry named {name:?}")))?;
    let mut input = from_text(entry.line, None)?;
    input.name = Some(entry.name.to_string());
    input.entry = Some(entry);
    Ok(input)
}

pub fn from_path(path: &Path, depth: Option<usize>) -> Result<Input, Fail> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).code(PRECONDITION)?
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Fail::new(PRECONDITION, format!("reading {}: {e}", path.display())))?
    };
    from_text(&text, depth)
}

/// Outer-cycle text when the input has a bracket, graph6 otherwise.
pub fn from_text(text: &str, depth: Option<usize>) -> Result<Input, Fail> {
    let body: String = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");
    if body.contains('[') {
        let spec = parse_outer_cycles(&body).code(PARSE)?;
        let inferred = spec.depth().ok_or_else(|| {
            Fail::new(
                PRECONDITION,
                format!("{} labels is not the leaf count of any T_i", spec.leaf_count()),
            )
        })?;
        if let Some(d) = depth.filter(|&d| d != inferred) {
            return Err(Fail::new(
                PRECONDITION,
                format!("input has the {} leaves of T_{inferred}, not of T_{d}", spec.leaf_count()),
            ));
        }
        let tree = build_ti(inferred).code(PRECONDITION)?;
        let graph = histsnark::codec::build_on_tree(&tree, &spec).code(PRECONDITION)?;
        Ok(Input {
            name: spec.name.clone(),
            graph,
            source: Source::Tree { spec, tree },
            entry: None,
        })
    } else {
        let graph = import_graph6(&body).code(PARSE)?;
        Ok(Input {
            name: None,
            graph,
            source: Source::Graph6,
            entry: None,
        })
    }
}
