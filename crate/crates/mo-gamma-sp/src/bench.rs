//! Benchmark sweeps: generate instance families, run the solvers across
//! gamma and population-uncertainty grids, and collect one CSV row of
//! counters and timings per cell.
//!
//! A sweep is described by a TOML file:
//!
//! ```toml
//! [[entry]]
//! name = "population"
//! family = "population-style"   # random | population-style | oi | correlated | three-objective
//! layers = 3
//! layer_width = 3
//! extra_edges = 4
//! objectives = 2                # used by the random family
//! gamma_sweep = [1, 2, 3, 4, 5] # applied to every objective
//! x_sweep = [5, 10, 50, 100]
//! seeds = [1, 2, 3]
//! algos = ["dsa", "lsa"]        # dsa | dsa-oi | lsa | oracle
//! ```
//!
//! Broken entries or failing cells are reported and skipped; the rest of the
//! sweep still runs. Rows are sorted before writing so the output is
//! deterministic apart from the `micros` column.

use std::io::Write;
use std::time::Instant;

use serde::Deserialize;
use thiserror::Error;

use crate::bottleneck::solve_lsa;
use crate::dsa::{solve_general_with, solve_oi_with, DsaOptions};
use crate::gen::{generate, Family, GenSpec};
use crate::io::SolveStats;
use crate::model::Instance;
use crate::oracle::{oracle_front, EnumerationBudget};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("failed to read bench spec: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default)]
    pub entry: Vec<BenchEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchEntry {
    pub name: String,
    pub family: String,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_layer_width")]
    pub layer_width: usize,
    #[serde(default = "default_extra_edges")]
    pub extra_edges: usize,
    #[serde(default = "default_objectives")]
    pub objectives: usize,
    pub gamma_sweep: Vec<usize>,
    pub x_sweep: Vec<u32>,
    pub seeds: Vec<u64>,
    pub algos: Vec<String>,
}

fn default_layers() -> usize {
    3
}
fn default_layer_width() -> usize {
    3
}
fn default_extra_edges() -> usize {
    3
}
fn default_objectives() -> usize {
    2
}

pub fn parse_bench_spec(text: &str) -> Result<BenchSpec, BenchError> {
    Ok(toml::from_str(text)?)
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub entry: String,
    pub instance: String,
    pub family: String,
    pub seed: u64,
    pub x: u32,
    pub gamma: usize,
    pub algo: String,
    pub front_size: usize,
    pub stats: SolveStats,
    pub micros: u128,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub rows: Vec<BenchRow>,
    /// One message per skipped entry or cell.
    pub failures: Vec<String>,
}

struct Cell {
    entry: String,
    family: Family,
    seed: u64,
    x: u32,
    gamma: usize,
    algo: String,
    spec: GenSpec,
}

/// Expands the spec into cells and runs them, sequentially or across a
/// rayon pool.
pub fn run_bench(spec: &BenchSpec, parallel: bool, budget: &EnumerationBudget) -> BenchOutcome {
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for entry in &spec.entry {
        let family: Family = match entry.family.parse() {
            Ok(f) => f,
            Err(e) => {
                failures.push(format!("entry {}: {e}", entry.name));
                continue;
            }
        };
        let k = family.fixed_objectives().unwrap_or(entry.objectives);
        for &seed in &entry.seeds {
            for &x in &entry.x_sweep {
                for &gamma in &entry.gamma_sweep {
                    for algo in &entry.algos {
                        cells.push(Cell {
                            entry: entry.name.clone(),
                            family,
                            seed,
                            x,
                            gamma,
                            algo: algo.clone(),
                            spec: GenSpec {
                                seed,
                                layers: entry.layers,
                                layer_width: entry.layer_width,
                                extra_edges: entry.extra_edges,
                                objectives: entry.objectives,
                                gamma: vec![gamma; k],
                                population_uncertainty: x,
                                family,
                            },
                        });
                    }
                }
            }
        }
    }

    let outcomes: Vec<Result<BenchRow, String>> = if parallel {
        use rayon::prelude::*;
        cells.par_iter().map(|c| run_cell(c, budget)).collect()
    } else {
        cells.iter().map(|c| run_cell(c, budget)).collect()
    };

    let mut rows = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(message) => failures.push(message),
        }
    }
    rows.sort_by(|a, b| {
        (&a.entry, a.seed, a.x, a.gamma, &a.algo).cmp(&(&b.entry, b.seed, b.x, b.gamma, &b.algo))
    });
    BenchOutcome { rows, failures }
}

fn run_cell(cell: &Cell, budget: &EnumerationBudget) -> Result<BenchRow, String> {
    let describe = |e: &dyn std::fmt::Display| {
        format!(
            "entry {} seed {} x {} gamma {} algo {}: {e}",
            cell.entry, cell.seed, cell.x, cell.gamma, cell.algo
        )
    };
    let instance = generate(&cell.spec).map_err(|e| describe(&e))?;
    let started = Instant::now();
    let (front_size, stats) = run_algo(&cell.algo, &instance, budget).map_err(|e| describe(&e))?;
    Ok(BenchRow {
        entry: cell.entry.clone(),
        instance: cell.spec.id(),
        family: cell.family.as_str().to_string(),
        seed: cell.seed,
        x: cell.x,
        gamma: cell.gamma,
        algo: cell.algo.clone(),
        front_size,
        stats,
        micros: started.elapsed().as_micros(),
    })
}

fn run_algo(
    algo: &str,
    instance: &Instance,
    budget: &EnumerationBudget,
) -> Result<(usize, SolveStats), String> {
    match algo {
        "dsa" => {
            let report = solve_general_with(instance, &DsaOptions::default());
            Ok((
                report.front.len(),
                SolveStats {
                    subproblems_considered: Some(report.subproblems_considered),
                    subproblems_solved: Some(report.subproblems_solved),
                    ..SolveStats::default()
                },
            ))
        }
        "dsa-oi" => {
            let report = solve_oi_with(instance, &DsaOptions::default())
                .map_err(|e| e.to_string())?;
            Ok((
                report.front.len(),
                SolveStats {
                    subproblems_considered: Some(report.subproblems_considered),
                    subproblems_solved: Some(report.subproblems_solved),
                    ..SolveStats::default()
                },
            ))
        }
        "lsa" => {
            let report = solve_lsa(instance);
            Ok((
                report.front.len(),
                SolveStats {
                    labels_created: Some(report.labels_created),
                    labels_permanent: Some(report.labels_permanent),
                    ..SolveStats::default()
                },
            ))
        }
        "oracle" => {
            let front = oracle_front(instance, budget).map_err(|e| e.to_string())?;
            Ok((front.len(), SolveStats::default()))
        }
        other => Err(format!("unknown algorithm {other:?}")),
    }
}

pub fn write_bench_csv<W: Write>(writer: W, outcome: &BenchOutcome) -> Result<(), BenchError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record([
        "entry",
        "instance",
        "family",
        "seed",
        "x",
        "gamma",
        "algo",
        "front_size",
        "subproblems_considered",
        "subproblems_solved",
        "labels_created",
        "labels_permanent",
        "micros",
    ])?;
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &outcome.rows {
        csv_writer.write_record([
            row.entry.clone(),
            row.instance.clone(),
            row.family.clone(),
            row.seed.to_string(),
            row.x.to_string(),
            row.gamma.to_string(),
            row.algo.clone(),
            row.front_size.to_string(),
            opt(row.stats.subproblems_considered),
            opt(row.stats.subproblems_solved),
            opt(row.stats.labels_created),
            opt(row.stats.labels_permanent),
            row.micros.to_string(),
        ])?;
    }
    csv_writer.flush()?;
    Ok(())
}
