use std::collections::BTreeMap;
use std::path::PathBuf;

use histsnark::enumerate::{
    draw_girth_at_least, enumerate_two_factors, random_two_factor, sample_two_factors, EnumerateError, Mode,
    RunOptions, SearchSpace,
};
use histsnark::{build_ti, girth};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("histsnark-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let _ = std::fs::remove_file(&path);
    path
}

#[test]
fn checkpoint_resume_matches_fresh_run() {
    let space = SearchSpace::snarks(3, Mode::Unconstrained);
    let fresh = enumerate_two_factors(&space, &RunOptions::default()).unwrap();
    assert!(fresh.complete);

    let path = scratch("resume.json");
    let partial = RunOptions {
        checkpoint: Some(path.clone()),
        max_units: Some(5),
        ..RunOptions::default()
    };
    let first = enumerate_two_factors(&space, &partial).unwrap();
    assert!(!first.complete);
    assert_eq!(first.units.completed, 5);
    assert!(path.exists());

    let resumed = enumerate_two_factors(
        &space,
        &RunOptions {
            checkpoint: Some(path.clone()),
            ..RunOptions::default()
        },
    )
    .unwrap();
    assert!(resumed.complete);
    assert_eq!(serde_json::to_string(&resumed).unwrap(), serde_json::to_string(&fresh).unwrap());

    // A checkpoint written for another search is refused.
    let other = SearchSpace::snarks(3, Mode::Rotation);
    let err = enumerate_two_factors(
        &other,
        &RunOptions {
            checkpoint: Some(path),
            ..RunOptions::default()
        },
    )
    .unwrap_err();
    assert!(matches!(err, EnumerateError::CheckpointMismatch { .. }), "{err}");
}

#[test]
fn reports_do_not_depend_on_workers_or_shards() {
    let space = SearchSpace::snarks(3, Mode::Unconstrained);
    let mut seen = Vec::new();
    for (jobs, shard_depth) in [(1, 0), (1, 3), (2, 2), (3, 4)] {
        let report = enumerate_two_factors(
            &space,
            &RunOptions {
                jobs: Some(jobs),
                shard_depth,
                ..RunOptions::default()
            },
        )
        .unwrap();
        let mut json = serde_json::to_value(&report).unwrap();
        // Unit bookkeeping legitimately depends on the shard depth.
        json.as_object_mut().unwrap().remove("units");
        json.as_object_mut().unwrap().remove("stats");
        seen.push(json);
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]));

    let a = sample_two_factors(&space, 300, 9, Some(1)).unwrap();
    let b = sample_two_factors(&space, 300, 9, Some(3)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn oc_filter_restricts_classes() {
    let mut space = SearchSpace::snarks(3, Mode::Unconstrained);
    space.oc = Some("{6,6}".parse().unwrap());
    let report = enumerate_two_factors(&space, &RunOptions::default()).unwrap();
    assert!(report.graphs.iter().all(|g| g.oc.to_string() == "{6,6}"));
    assert!(report.total >= 1);
}

fn chi_square_ok(counts: &BTreeMap<Vec<(usize, usize)>, u64>, classes: usize, draws: u64) -> bool {
    // 69 degrees of freedom; the 0.999 quantile is about 111.
    let expected = draws as f64 / classes as f64;
    let stat: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum::<f64>()
        + (classes - counts.len()) as f64 * expected;
    counts.len() == classes && stat < 111.0
}

#[test]
fn random_two_factors_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 70_000;
    let mut counts = BTreeMap::new();
    for _ in 0..draws {
        let spec = histsnark::OuterCycleSpec::new(random_two_factor(6, &mut rng));
        *counts.entry(spec.leaf_edges()).or_insert(0u64) += 1;
    }
    assert!(chi_square_ok(&counts, 70, draws));

    // Conditioned on girth >= 3 over T_2 every 2-factor qualifies.
    let tree = build_ti(2).unwrap();
    let mut counts = BTreeMap::new();
    for _ in 0..draws {
        let (spec, g, _) = draw_girth_at_least(&tree, 3, &mut rng);
        assert!(girth(&g) >= 3);
        *counts.entry(spec.leaf_edges()).or_insert(0u64) += 1;
    }
    assert!(chi_square_ok(&counts, 70, draws));
}

#[test]
fn girth_conditioned_draws_meet_the_floor() {
    let tree = build_ti(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let (_, g, tries) = draw_girth_at_least(&tree, 6, &mut rng);
        assert!(girth(&g) >= 6);
        assert!(tries >= 1);
    }
}
