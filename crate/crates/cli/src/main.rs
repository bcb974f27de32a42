mod config;
mod draw;
mod exit;
mod input;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use histsnark::catalog::{check_line, lookup, CATALOG};
use histsnark::coloring::{check_balance_exhaustive, check_balance_sampled};
use histsnark::enumerate::{
    check_theorem2, classify_by_oc, enumerate_two_factors, sample_two_factors, EnumerateError, Mode, RunOptions,
    SearchSpace, Theorem2Mode,
};
use histsnark::{build_ti, HistSearchOptions, OcMultiset};
use rayon::prelude::*;
use serde_json::{json, Value};

use config::Config;
use exit::{Fail, ResultExt, ASSERTION, INTERNAL, PARSE, PRECONDITION};

#[derive(Parser)]
#[command(name = "histsnark", version, about = "Build, verify and enumerate Hist-snarks")]
struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true, env = "HISTSNARK_JOBS")]
    jobs: Option<usize>,
    /// key=value file with hist_limit, hist_budget, shard_depth, jobs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report (or SVG) here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Outer-cycle text or graph6 file ("-" for stdin).
    #[arg(required_unless_present = "catalog", conflicts_with = "catalog")]
    input: Option<PathBuf>,
    /// Use a catalog entry instead of a file.
    #[arg(long)]
    catalog: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check girth, cyclic connectivity, colourability, Hists, rotation and
    /// automorphisms of one graph.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        /// Stop the Hist search after this many Hists.
        #[arg(long)]
        hist_limit: Option<usize>,
        /// Stop the Hist search after this many nodes.
        #[arg(long)]
        hist_budget: Option<u64>,
    },
    /// Enumerate T_i + 2-factor snarks.
    Enumerate {
        #[arg(long)]
        depth: usize,
        /// Only 2-factors invariant under the shift by l/3.
        #[arg(long)]
        rotation: bool,
        /// Keep only this oc multiset, e.g. {12,12}.
        #[arg(long)]
        oc: Option<OcMultiset>,
        #[arg(long, default_value_t = 5)]
        girth_min: usize,
        /// List every graph with the girth floor, not only snarks.
        #[arg(long)]
        all: bool,
        /// Draw this many random 2-factors instead of searching.
        #[arg(long, requires = "seed")]
        sample: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Resumable progress file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        shard_depth: Option<usize>,
        /// Stop after this many work units.
        #[arg(long)]
        max_units: Option<usize>,
        /// Allow spaces above the size limits.
        #[arg(long)]
        force: bool,
        /// Also list every T_i Hist of each graph and report their oc.
        #[arg(long)]
        classify_oc: bool,
    },
    /// The built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Radial SVG drawing of a graph with a known T_i Hist.
    Draw {
        #[command(flatten)]
        graph: GraphArgs,
        /// Expected depth of the tree.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Colourability of girth-6, cyclically 4-edge-connected T_i + 2-factor graphs.
    Theorem2 {
        #[arg(long)]
        depth: usize,
        #[arg(long, requires = "seed")]
        sample: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// End-edge colour counts of proper 3-edge-colourings of T_i.
    Observation1 {
        #[arg(long)]
        depth: usize,
        /// Random colourings instead of all of them.
        #[arg(long, requires = "seed")]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Rebuild every entry and check its expected properties.
    CheckAll {
        /// Replace the line of an entry, NAME=LINE (fault injection).
        #[arg(long, value_name = "NAME=LINE")]
        inject: Vec<String>,
    },
}

/// What a command produced: a JSON report or a document written as is.
enum Output {
    Json { report: Value, code: u8 },
    Raw(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli).and_then(|out| {
        let (text, code) = match out {
            Output::Json { mut report, code } => {
                report["metadata"] = json!({
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": command_name(&cli.command),
                    "jobs": rayon_threads(&cli),
                    "wall_time_s": start.elapsed().as_secs_f64(),
                });
                (serde_json::to_string_pretty(&report).code(INTERNAL)? + "\n", code)
            }
            Output::Raw(text) => (text, 0),
        };
        emit(cli.output.as_ref(), &text)?;
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(fail) => {
            eprintln!("error: {:#}", fail.error);
            ExitCode::from(fail.code)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify { .. } => "verify",
        Command::Enumerate { .. } => "enumerate",
        Command::Catalog { .. } => "catalog",
        Command::Draw { .. } => "draw",
        Command::Theorem2 { .. } => "theorem2",
        Command::Observation1 { .. } => "observation1",
    }
}

fn rayon_threads(cli: &Cli) -> usize {
    load_config(cli)
        .ok()
        .and_then(|c| cli.jobs.or(c.jobs))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => std::fs::write(p, text).code(INTERNAL),
        None => std::io::stdout().lock().write_all(text.as_bytes()).code(INTERNAL),
    }
}

fn load_config(cli: &Cli) -> Result<Config, Fail> {
    match &cli.config {
        Some(p) => Config::load(p).code(PARSE),
        None => Ok(Config::default()),
    }
}

fn load_graph(args: &GraphArgs, depth: Option<usize>) -> Result<input::Input, Fail> {
    match (&args.catalog, &args.input) {
        (Some(name), _) => {
            let input = input::from_catalog(name)?;
            if let Some(d) = depth.filter(|&d| d != input.entry.map_or(d, |e| e.depth)) {
                return Err(Fail::new(PRECONDITION, format!("{name} is built on T_{}, not T_{d}", input.entry.unwrap().depth)));
            }
            Ok(input)
        }
        (None, Some(path)) => input::from_path(path, depth),
        (None, None) => Err(Fail::new(PRECONDITION, "no input given")),
    }
}

fn enumerate_code(e: EnumerateError) -> Fail {
    let code = match e {
        EnumerateError::TooLarge { .. }
        | EnumerateError::GirthFloor(_)
        | EnumerateError::SampleRotation
        | EnumerateError::SampleDepth(_)
        | EnumerateError::CheckpointMismatch { .. }
        | EnumerateError::Tree(_) => PRECONDITION,
        EnumerateError::Json(_) => PARSE,
        _ => INTERNAL,
    };
    Fail { code, error: e.into() }
}

fn run(cli: &Cli) -> Result<Output, Fail> {
    let cfg = load_config(cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(rayon_threads(cli))
        .build_global()
        .code(INTERNAL)?;
    // The global pool is sized above.
    let jobs = None;
    let hist_options = |limit: Option<usize>, budget: Option<u64>| HistSearchOptions {
        limit: Some(limit.unwrap_or(cfg.hist_limit)),
        budget: Some(budget.unwrap_or(cfg.hist_budget)),
    };
    match &cli.command {
        Command::Verify {
            graph,
            hist_limit,
            hist_budget,
        } => {
            let input = load_graph(graph, None)?;
            let options = hist_options(*hist_limit, *hist_budget);
            let verified = verify::verify(&input, options)?;
            if !verified.mismatches.is_empty() {
                eprintln!("catalog mismatch: {}", verified.mismatches.join("; "));
            }
            let code = if verified.mismatches.is_empty() { 0 } else { ASSERTION };
            Ok(Output::Json {
                report: verified.report,
                code,
            })
        }
        Command::Enumerate {
            depth,
            rotation,
            oc,
            girth_min,
            all,
            sample,
            seed,
            checkpoint,
            shard_depth,
            max_units,
            force,
            classify_oc,
        } => {
            let space = SearchSpace {
                depth: *depth,
                mode: if *rotation { Mode::Rotation } else { Mode::Unconstrained },
                girth_min: *girth_min,
                oc: oc.clone(),
                snark_filter: !*all,
            };
            let report = match sample {
                Some(n) => sample_two_factors(&space, *n, seed.expect("clap requires seed"), jobs),
                None => {
                    let options = RunOptions {
                        jobs,
                        shard_depth: shard_depth.unwrap_or(cfg.shard_depth),
                        checkpoint: checkpoint.clone(),
                        max_units: *max_units,
                        force: *force,
                    };
                    enumerate_two_factors(&space, &options)
                }
            }
            .map_err(enumerate_code)?;
            let mut value = serde_json::to_value(&report).code(INTERNAL)?;
            if *classify_oc {
                value["oc_classification"] = serde_json::to_value(classify_by_oc(&report)).code(INTERNAL)?;
            }
            Ok(Output::Json { report: value, code: 0 })
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => Ok(Output::Json {
                report: json!({ "count": CATALOG.len(), "entries": CATALOG }),
                code: 0,
            }),
            CatalogAction::CheckAll { inject } => {
                let mut lines: Vec<&str> = CATALOG.iter().map(|e| e.line).collect();
                for spec in inject {
                    let (name, line) = spec
                        .split_once('=')
                        .ok_or_else(|| Fail::new(PARSE, format!("--inject wants NAME=LINE, got {spec:?}")))?;
                    let entry = lookup(name).ok_or_else(|| Fail::new(PRECONDITION, format!("no catalog entry {name:?}")))?;
                    let k = CATALOG.iter().position(|e| e.name == entry.name).unwrap();
                    lines[k] = line;
                }
                let checks: Vec<_> = CATALOG.par_iter().zip(&lines).map(|(e, line)| check_line(e, line)).collect();
                let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
                Ok(Output::Json {
                    code: if failed.is_empty() { 0 } else { ASSERTION },
                    report: json!({
                        "entries": checks,
                        "passed": checks.len() - failed.len(),
                        "failed": failed,
                    }),
                })
            }
        },
        Command::Draw { graph, depth } => {
            let input = load_graph(graph, *depth)?;
            let layout = draw::layout(&input, *depth)?;
            let title = input.name.clone().unwrap_or_else(|| format!("T_{} Hist drawing", layout.depth));
            Ok(Output::Raw(draw::render(&layout, &title)))
        }
        Command::Theorem2 {
            depth,
            sample,
            seed,
            checkpoint,
            force,
        } => {
            let mode = match sample {
                Some(count) => Theorem2Mode::Sample {
                    count: *count,
                    seed: seed.expect("clap requires seed"),
                },
                None => Theorem2Mode::Exhaustive,
            };
            let options = RunOptions {
                jobs,
                shard_depth: cfg.shard_depth,
                checkpoint: checkpoint.clone(),
                max_units: None,
                force: *force,
            };
            let report = check_theorem2(*depth, mode, &options).map_err(enumerate_code)?;
            let code = if report.tally.counterexamples.is_empty() { 0 } else { ASSERTION };
            Ok(Output::Json {
                report: serde_json::to_value(report).code(INTERNAL)?,
                code,
            })
        }
        Command::Observation1 { depth, samples, seed } => {
            let tree = build_ti(*depth).code(PRECONDITION)?;
            let report = match samples {
                Some(n) => check_balance_sampled(&tree, *n, seed.expect("clap requires seed")),
                None if *depth <= 4 => check_balance_exhaustive(&tree),
                None => {
                    return Err(Fail::new(
                        PRECONDITION,
                        format!("T_{depth} has too many colourings to list; pass --samples and --seed"),
                    ))
                }
            };
            let code = if report.violations == 0 { 0 } else { ASSERTION };
            Ok(Output::Json {
                report: serde_json::to_value(report).code(INTERNAL)?,
                code,
            })
        }
    }
}
