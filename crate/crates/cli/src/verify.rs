use std::collections::BTreeSet;

use histsnark::catalog::check_line;
use histsnark::tree::{is_ti_hist, vertex_count, MAX_DEPTH, MIN_DEPTH};
use histsnark::{
    canonical_form, check_rotation_property, cyclic_edge_connectivity, export_graph6, find_hists, girth,
    is_cyclically_k_connected, three_edge_coloring, ti_hists, HistSearchOptions,
};
use serde_json::{json, Value};

use crate::exit::{Fail, INTERNAL};
use crate::input::{Input, Source};

pub struct Verified {
    pub report: Value,
    /// Catalog expectations that did not hold.
    pub mismatches: Vec<String>,
}

pub fn verify(input: &Input, hist_options: HistSearchOptions) -> Result<Verified, Fail> {
    let g = &input.graph;
    let n = g.order();
    let mut inconsistent = Vec::new();

    let cc = cyclic_edge_connectivity(g);
    if let Some(cut) = cc.witness() {
        if Some(cut.size()) != cc.value() {
            inconsistent.push(format!("cut witness has {} edges, value {:?}", cut.size(), cc.value()));
        }
    }
    let coloring = three_edge_coloring(g);
    if coloring.as_ref().is_some_and(|c| !c.is_proper(g)) {
        inconsistent.push("colouring certificate is not proper".into());
    }
    let g_girth = girth(g);
    let c4 = is_cyclically_k_connected(g, 4);
    let snark = g_girth >= 5 && c4 && coloring.is_none();

    let search = find_hists(g, hist_options);
    let all_oc: BTreeSet<String> = search.hists.iter().map(|h| h.oc.to_string()).collect();
    // Exact, unlike the bounded search above.
    let ti_depth = (MIN_DEPTH..=MAX_DEPTH).find(|&d| vertex_count(d) == n);
    let ti = ti_depth.map(|d| ti_hists(g, d)).unwrap_or_default();
    let ti_oc: BTreeSet<String> = ti.iter().map(|h| h.oc.to_string()).collect();

    let (construction, rotation) = match &input.source {
        Source::Tree { spec, tree } => {
            if !is_ti_hist(g, tree.edges(), tree.depth()) {
                inconsistent.push("built graph does not contain its tree".into());
            }
            let c = json!({
                "depth": tree.depth(),
                "oc": spec.oc().to_string(),
                "outer_cycles": spec.canonical().cycles_text(),
            });
            (c, Value::Bool(check_rotation_property(spec)))
        }
        Source::Graph6 => (Value::Null, Value::Null),
    };
    let mut oc = ti_oc.clone();
    if let Some(c) = construction.get("oc").and_then(Value::as_str) {
        oc.insert(c.to_string());
    }

    let cf = canonical_form(g);
    let report = json!({
        "name": input.name,
        "n": n,
        "girth": g_girth,
        "cyclic_connectivity": cc.value(),
        "cyclic_cut": cc.witness().map(|c| &c.edges),
        "cyclically_4_connected": c4,
        "colorable": coloring.is_some(),
        "coloring": coloring.as_ref().map(|c| c.assignment(g).map(|((u, v), k)| [u, v, k as usize]).collect::<Vec<_>>()),
        "snark": snark,
        "construction": construction,
        "hists": {
            "found": search.hists.len(),
            "truncated": search.truncated,
            "nodes": search.nodes,
            "ti_depth": ti_depth,
            "ti": ti.len(),
            "oc": all_oc,
            "ti_oc": ti_oc,
        },
        "hist_present": !search.hists.is_empty() || !ti.is_empty(),
        "oc": oc,
        "rotation": rotation,
        "aut_order": u64::try_from(cf.aut_order).unwrap_or(u64::MAX),
        "canonical_graph6": export_graph6(&cf.graph()),
    });

    if !inconsistent.is_empty() {
        return Err(Fail::new(INTERNAL, inconsistent.join("; ")));
    }

    let mut mismatches = Vec::new();
    let mut report = report;
    if let Some(entry) = input.entry {
        let check = check_line(entry, entry.line);
        mismatches = check.failures.clone();
        report["expected"] = json!({
            "depth": entry.depth,
            "oc": entry.expected_oc().to_string(),
            "rotation": entry.rotation,
            "aut_order": entry.aut_order.map(|a| a as u64),
            "figure": entry.figure,
            "passed": check.passed(),
            "failures": check.failures,
        });
    }
    Ok(Verified { report, mismatches })
}
