// Runs every acceptance criterion and prints one line per criterion.
// Built with `harness = false` so the lines show up in plain `cargo test`.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::*;
use histsnark::catalog::{self, CatalogCheck, CATALOG};
use histsnark::coloring::{check_balance_exhaustive, check_balance_sampled};
use histsnark::enumerate::{
    check_theorem2, enumerate_two_factors, EnumerationReport, Mode, RunOptions, SearchSpace, Theorem2Mode,
};
use histsnark::{
    are_isomorphic, automorphism_count, build_graph, build_ti, cyclic_edge_connectivity, emit_outer_cycles,
    export_graph6, girth, import_graph6, is_three_edge_colorable, parse_outer_cycles, CubicGraph,
};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn jobs(n: usize) -> RunOptions {
    RunOptions {
        jobs: Some(n),
        ..RunOptions::default()
    }
}

fn enumerate(depth: usize, mode: Mode, workers: usize) -> Result<EnumerationReport, String> {
    enumerate_two_factors(&SearchSpace::snarks(depth, mode), &jobs(workers)).map_err(|e| e.to_string())
}

fn report_graph(report: &EnumerationReport, k: usize) -> CubicGraph {
    let spec = parse_outer_cycles(&report.graphs[k].representative).unwrap();
    build_graph(report.space.depth, &spec).unwrap()
}

/// Pairs every enumerated graph with exactly one of `names`, and every name
/// with exactly one graph.
fn match_catalog(report: &EnumerationReport, names: &[&str]) -> Result<BTreeMap<String, String>, String> {
    let targets: Vec<CubicGraph> = names.iter().map(|n| catalog::lookup(n).unwrap().graph()).collect();
    let mut used = vec![0; names.len()];
    let mut out = BTreeMap::new();
    for k in 0..report.graphs.len() {
        let g = report_graph(report, k);
        let hits: Vec<usize> = (0..names.len()).filter(|&t| are_isomorphic(&g, &targets[t])).collect();
        ensure(hits.len() == 1, || {
            format!("{} matches {} catalog graphs", report.graphs[k].representative, hits.len())
        })?;
        used[hits[0]] += 1;
        out.insert(report.graphs[k].representative.clone(), names[hits[0]].to_string());
    }
    ensure(used.iter().all(|&u| u == 1), || format!("catalog graphs matched {used:?} times"))?;
    Ok(out)
}

fn catalog_checks() -> Vec<CatalogCheck> {
    CATALOG.par_iter().map(|e| e.check()).collect()
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap().install(f)
}

struct Runs {
    catalog: Option<Vec<CatalogCheck>>,
    depth3: Option<EnumerationReport>,
    rotation: BTreeMap<usize, EnumerationReport>,
}

fn criterion_1(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let checks = in_pool(1, catalog_checks);
    let elapsed = start.elapsed();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{}: {}", c.name, c.failures.join("; ")))
        .collect();
    ensure(checks.len() == 20, || format!("{} entries", checks.len()))?;
    ensure(failed.is_empty(), || failed.join(" | "))?;
    for c in &checks {
        let e = catalog::lookup(&c.name).unwrap();
        let snark = c.girth >= Some(5) && c.cyclically_4_connected == Some(true) && c.colorable == Some(false);
        ensure(snark, || format!("{} is not a snark", c.name))?;
        ensure(c.oc.as_ref() == Some(&e.expected_oc()), || format!("{} oc {:?}", c.name, c.oc))?;
    }
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.1?}"))?;
    runs.catalog = Some(checks);
    Ok(format!("20 entries verified as snarks with their oc in {elapsed:.1?}"))
}

fn criterion_2(runs: &mut Runs) -> Outcome {
    let report = enumerate(3, Mode::Unconstrained, 1)?;
    ensure(report.complete, || "incomplete".into())?;
    ensure(report.total == 3, || format!("{} graphs", report.total))?;
    let matched = match_catalog(&report, &["Loupekine1", "Loupekine2", "L3"])?;
    runs.depth3 = Some(report);
    Ok(format!("3 classes: {}", matched.values().cloned().collect::<Vec<_>>().join(", ")))
}

fn criterion_3(runs: &mut Runs) -> Outcome {
    let two = enumerate(2, Mode::Rotation, 1)?;
    ensure(two.total == 1, || format!("depth 2: {} graphs", two.total))?;
    match_catalog(&two, &["Petersen"])?;
    let three = enumerate(3, Mode::Rotation, 1)?;
    ensure(three.total == 2, || format!("depth 3: {} graphs", three.total))?;
    match_catalog(&three, &["Loupekine1", "Loupekine2"])?;

    let four = enumerate(4, Mode::Rotation, 1)?;
    ensure(four.complete, || "incomplete".into())?;
    ensure(four.total == 15, || format!("{} graphs", four.total))?;
    let want: BTreeMap<String, usize> = [("{24}", 2), ("{12,12}", 1), ("{18,6}", 1), ("{8,8,8}", 8), ("{6,6,6,6}", 3)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    ensure(four.classes == want, || format!("classes {:?}", four.classes))?;
    let h_names: Vec<&str> = CATALOG
        .iter()
        .filter(|e| e.name.starts_with('H'))
        .map(|e| e.name)
        .collect();
    ensure(h_names.len() == 15, || format!("{} H entries", h_names.len()))?;
    match_catalog(&four, &h_names)?;
    let msg = format!(
        "depth 2: Petersen, depth 3: both Loupekines, depth 4: 15 classes {:?} ({} labelled)",
        four.classes, four.labeled_total
    );
    runs.rotation.extend([(2, two), (3, three), (4, four)]);
    Ok(msg)
}

fn criterion_4(runs: &mut Runs) -> Outcome {
    let y = catalog::lookup("Y").unwrap().graph();
    let aut = automorphism_count(&y);
    ensure(aut == 128, || format!("|Aut(Y)| = {aut}"))?;
    let four = runs.rotation.get(&4).ok_or("needs the depth-4 rotation run")?;
    let members: Vec<u64> = four
        .graphs
        .iter()
        .filter(|g| g.presentations.contains_key("{6,6,6,6}"))
        .map(|g| g.aut_order)
        .collect();
    ensure(!members.is_empty(), || "no {6,6,6,6} members".into())?;
    ensure(members.iter().all(|&a| a <= 128), || format!("aut orders {members:?}"))?;
    Ok(format!("|Aut(Y)| = 128; enumerated {{6,6,6,6}} members have {members:?}"))
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    for depth in 1..=3 {
        let r = check_theorem2(depth, Theorem2Mode::Exhaustive, &RunOptions::default()).map_err(|e| e.to_string())?;
        ensure(r.complete, || format!("depth {depth} incomplete"))?;
        ensure(r.tally.counterexamples.is_empty(), || {
            format!("depth {depth}: {:?}", r.tally.counterexamples)
        })?;
        parts.push(format!(
            "T_{depth}: {} girth-6 graphs, {} cyclically 4-connected",
            r.tally.candidates,
            r.tally.candidates - r.tally.not_cyclically_4_connected
        ));
    }
    let mode = Theorem2Mode::Sample {
        count: 100_000,
        seed: 2024,
    };
    let r = check_theorem2(4, mode, &RunOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.tally.candidates == 100_000, || format!("{} samples", r.tally.candidates))?;
    ensure(r.tally.counterexamples.is_empty(), || format!("T_4: {:?}", r.tally.counterexamples))?;
    parts.push(format!(
        "T_4: 100000 samples (seed 2024), {} cyclically 4-connected",
        r.tally.candidates - r.tally.not_cyclically_4_connected
    ));
    Ok(format!("no counterexamples; {}", parts.join("; ")))
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    for depth in 1..=3 {
        let r = check_balance_exhaustive(&build_ti(depth).unwrap());
        ensure(r.violations == 0, || format!("T_{depth}: {:?}", r.example))?;
        parts.push(format!("T_{depth}: {}", r.colorings));
    }
    let r = check_balance_sampled(&build_ti(4).unwrap(), 100_000, 6);
    ensure(r.colorings == 100_000 && r.violations == 0, || format!("T_4: {:?}", r.example))?;
    parts.push("T_4: 100000 sampled".into());
    Ok(format!("balanced colourings, {}", parts.join(", ")))
}

fn criterion_7() -> Outcome {
    let small = small_cubic_graphs();
    let medium = medium_cubic_graphs();
    for g in small.iter().chain(&medium) {
        ensure(girth(g) == girth_oracle(g), || format!("girth {:?}", g.edges()))?;
        ensure(cyclic_edge_connectivity(g).value() == cyclic_connectivity_oracle(g), || {
            format!("cyclic connectivity {:?}", g.edges())
        })?;
    }
    for (i, a) in small.iter().enumerate() {
        ensure(automorphism_count(a) as u64 == aut_oracle(a), || format!("aut {:?}", a.edges()))?;
        ensure(is_three_edge_colorable(a) == colorable_oracle(a), || format!("colouring {:?}", a.edges()))?;
        for b in &small[i..] {
            ensure(are_isomorphic(a, b) == isomorphic_oracle(a, b), || "isomorphism".into())?;
        }
    }
    Ok(format!(
        "{} graphs with n <= 10 on all five oracles, {} more with n <= 14 on girth and cyclic connectivity",
        small.len(),
        medium.len()
    ))
}

fn criterion_8() -> Outcome {
    for e in CATALOG {
        let spec = parse_outer_cycles(e.line).map_err(|err| format!("{}: {err}", e.name))?;
        let again = parse_outer_cycles(&emit_outer_cycles(&spec)).map_err(|err| err.to_string())?;
        ensure(again.canonical() == spec.canonical(), || format!("{} text", e.name))?;
        let g = e.graph();
        let h = import_graph6(&export_graph6(&g)).map_err(|err| err.to_string())?;
        ensure(are_isomorphic(&g, &h), || format!("{} graph6", e.name))?;
    }
    Ok("20 lines round-trip as text and graph6".into())
}

fn criterion_9(runs: &Runs) -> Outcome {
    let json = |v: &dyn erased::Json| v.json();
    let catalog = runs.catalog.as_ref().ok_or("needs criterion 1")?;
    let again = in_pool(2, catalog_checks);
    ensure(json(catalog) == json(&again), || "catalog reports differ".into())?;
    let depth3 = runs.depth3.as_ref().ok_or("needs criterion 2")?;
    ensure(json(depth3) == json(&enumerate(3, Mode::Unconstrained, 2)?), || "depth-3 reports differ".into())?;
    for (&depth, report) in &runs.rotation {
        ensure(json(report) == json(&enumerate(depth, Mode::Rotation, 2)?), || {
            format!("rotation depth {depth} reports differ")
        })?;
    }
    Ok("reports of criteria 1-3 identical with 1 and 2 workers".into())
}

mod erased {
    pub trait Json {
        fn json(&self) -> String;
    }
    impl<T: serde::Serialize> Json for T {
        fn json(&self) -> String {
            serde_json::to_string(self).unwrap()
        }
    }
}

fn main() {
    let mut runs = Runs {
        catalog: None,
        depth3: None,
        rotation: BTreeMap::new(),
    };
    let mut failures = 0;
    let mut report = |n: usize, title: &str, f: &mut dyn FnMut(&mut Runs) -> Outcome| {
        let start = Instant::now();
        let outcome = f(&mut runs);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} [{title}]: PASS ({detail}; {secs:.1}s)"),
            Err(detail) => {
                failures += 1;
                println!("criterion {n} [{title}]: FAIL ({detail}; {secs:.1}s)");
            }
        }
    };
    report(1, "catalog verification", &mut criterion_1);
    report(2, "depth-3 enumeration", &mut criterion_2);
    report(3, "rotation enumeration", &mut criterion_3);
    report(4, "automorphism bound", &mut criterion_4);
    report(5, "girth-6 colourability", &mut |_| criterion_5());
    report(6, "tree colouring balance", &mut |_| criterion_6());
    report(7, "oracle equivalence", &mut |_| criterion_7());
    report(8, "codec round-trip", &mut |_| criterion_8());
    report(9, "determinism", &mut |r| criterion_9(r));
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
