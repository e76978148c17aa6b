//! Command-line front end: solve instances, compare fronts, run benchmark
//! sweeps and generate instance files.
//!
//! Exit codes: 0 success, 1 runtime error (including `dsa-oi` on an
//! instance without objective-independent order), 2 bad command line,
//! 10 instance parse error, 11 infeasible query (empty front),
//! 12 enumeration budget exceeded.
//!
//! The oracle's enumeration caps can be overridden with the environment
//! variables `MOGSP_MAX_PATHS` and `MOGSP_MAX_NODES`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mo_gamma_sp::bench::{parse_bench_spec, run_bench, write_bench_csv};
use mo_gamma_sp::bottleneck::solve_lsa;
use mo_gamma_sp::dsa::{solve_general_with, solve_oi_with, DsaOptions, DsaReport};
use mo_gamma_sp::gen::{generate, Family as GenFamily, GenSpec};
use mo_gamma_sp::io::{
    compare_values, parse_instance, read_result_values, serialize_instance, write_result_csv,
    ResultRecord, SolveStats,
};
use mo_gamma_sp::model::{Front, Instance};
use mo_gamma_sp::oracle::{oracle_front, EnumerationBudget, OracleError};

const EXIT_RUNTIME: u8 = 1;
const EXIT_PARSE: u8 = 10;
const EXIT_INFEASIBLE: u8 = 11;
const EXIT_BUDGET: u8 = 12;

#[derive(Parser)]
#[command(
    name = "mogsp",
    about = "Robust multi-objective shortest paths under gamma uncertainty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write the front as CSV.
    Solve(SolveArgs),
    /// Compare two result files by their objective-vector value sets.
    Compare { a: PathBuf, b: PathBuf },
    /// Run a benchmark sweep described by a TOML spec.
    Bench(BenchArgs),
    /// Generate a seeded instance file.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Disable the solution-checking enhancement (DSA only).
    #[arg(long)]
    no_solution_checking: bool,
    /// Ignore detected order classes and run the general nested loops.
    #[arg(long)]
    force_general: bool,
    /// Solve DSA grid points concurrently (disables solution checking).
    #[arg(long)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Dsa,
    DsaOi,
    Lsa,
    Oracle,
}

impl Algo {
    fn name(&self) -> &'static str {
        match self {
            Algo::Dsa => "dsa",
            Algo::DsaOi => "dsa-oi",
            Algo::Lsa => "lsa",
            Algo::Oracle => "oracle",
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Fan independent cells across a thread pool.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    layers: usize,
    #[arg(long, default_value_t = 3)]
    layer_width: usize,
    #[arg(long, default_value_t = 3)]
    extra_edges: usize,
    /// Objective count (random family only).
    #[arg(long, default_value_t = 2)]
    objectives: usize,
    /// Comma-separated gamma values, one per objective.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<usize>,
    /// Population uncertainty x in percent.
    #[arg(long, default_value_t = 10)]
    population_uncertainty: u32,
    #[arg(long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve(args) => cmd_solve(args),
        Command::Compare { a, b } => cmd_compare(a, b),
        Command::Bench(args) => cmd_bench(args),
        Command::Generate(args) => cmd_generate(args),
    }
}

fn budget_from_env() -> EnumerationBudget {
    let mut budget = EnumerationBudget::default();
    if let Some(v) = env_usize("MOGSP_MAX_PATHS") {
        budget.max_paths = v;
    }
    if let Some(v) = env_usize("MOGSP_MAX_NODES") {
        budget.max_nodes = v;
    }
    budget
}

fn env_usize(name: &str) -> Option<usize> {
    std::env::var(name).ok()?.parse().ok()
}

fn fail(message: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.input) {
        Ok(text) => text,
        Err(e) => return fail(format!("{}: {e}", args.input.display()), EXIT_RUNTIME),
    };
    let instance = match parse_instance(&text) {
        Ok(instance) => instance,
        Err(e) => return fail(format!("{}: {e}", args.input.display()), EXIT_PARSE),
    };

    let options = DsaOptions {
        solution_checking: !args.no_solution_checking,
        force_general: args.force_general,
        parallel: args.parallel,
        ..DsaOptions::default()
    };
    let started = Instant::now();
    let (front, stats, note): (Front, SolveStats, String) = match args.algo {
        Algo::Dsa => {
            let report = solve_general_with(&instance, &options);
            dsa_outcome(report)
        }
        Algo::DsaOi => match solve_oi_with(&instance, &options) {
            Ok(report) => dsa_outcome(report),
            Err(e) => return fail(e, EXIT_RUNTIME),
        },
        Algo::Lsa => {
            let report = solve_lsa(&instance);
            let stats = SolveStats {
                labels_created: Some(report.labels_created),
                labels_permanent: Some(report.labels_permanent),
                ..SolveStats::default()
            };
            (report.front, stats, String::new())
        }
        Algo::Oracle => match oracle_front(&instance, &budget_from_env()) {
            Ok(front) => (front, SolveStats::default(), String::new()),
            Err(e @ OracleError::TooManyPaths { .. })
            | Err(e @ OracleError::TooManyNodes { .. }) => return fail(e, EXIT_BUDGET),
            Err(e) => return fail(e, EXIT_RUNTIME),
        },
    };
    let micros = started.elapsed().as_micros();

    assert!(
        front.check_invariants(),
        "internal error: solver produced an invalid front"
    );
    let stem = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| args.input.display().to_string());
    let record = ResultRecord {
        instance: stem,
        algo: args.algo.name().to_string(),
        gamma: instance.gamma().to_vec(),
        front: front
            .entries()
            .iter()
            .map(|(path, cost)| {
                (cost.clone(), path.nodes(instance.graph(), instance.source()))
            })
            .collect(),
        stats,
        micros,
    };
    let file = match fs::File::create(&args.output) {
        Ok(file) => file,
        Err(e) => return fail(format!("{}: {e}", args.output.display()), EXIT_RUNTIME),
    };
    if let Err(e) = write_result_csv(file, &record) {
        return fail(e, EXIT_RUNTIME);
    }

    println!(
        "{} on {}: {} front entr{} in {micros} us{note}",
        record.algo,
        record.instance,
        record.front.len(),
        if record.front.len() == 1 { "y" } else { "ies" },
    );
    for (idx, (cost, nodes)) in record.front.iter().enumerate() {
        let path = nodes
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("-");
        println!("  [{idx}] z = {cost}  path = {path}");
    }
    if record.front.is_empty() {
        println!("  no source-target path exists");
        return ExitCode::from(EXIT_INFEASIBLE);
    }
    ExitCode::SUCCESS
}

fn dsa_outcome(report: DsaReport) -> (Front, SolveStats, String) {
    let stats = SolveStats {
        subproblems_considered: Some(report.subproblems_considered),
        subproblems_solved: Some(report.subproblems_solved),
        ..SolveStats::default()
    };
    let note = format!(
        " (variant {}, {}/{} subproblems solved)",
        report.variant.as_str(),
        report.subproblems_solved,
        report.subproblems_considered
    );
    (report.front, stats, note)
}

fn cmd_compare(a: PathBuf, b: PathBuf) -> ExitCode {
    let read = |path: &PathBuf| -> Result<_, String> {
        let file = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        read_result_values(file).map_err(|e| format!("{}: {e}", path.display()))
    };
    let values_a = match read(&a) {
        Ok(v) => v,
        Err(e) => return fail(e, EXIT_PARSE),
    };
    let values_b = match read(&b) {
        Ok(v) => v,
        Err(e) => return fail(e, EXIT_PARSE),
    };
    let (only_a, only_b) = compare_values(&values_a, &values_b);
    if only_a.is_empty() && only_b.is_empty() {
        println!("fronts are value-identical ({} values)", values_a.len());
        ExitCode::SUCCESS
    } else {
        for v in &only_a {
            println!("only in {}: {v}", a.display());
        }
        for v in &only_b {
            println!("only in {}: {v}", b.display());
        }
        ExitCode::from(EXIT_RUNTIME)
    }
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.spec) {
        Ok(text) => text,
        Err(e) => return fail(format!("{}: {e}", args.spec.display()), EXIT_RUNTIME),
    };
    let spec = match parse_bench_spec(&text) {
        Ok(spec) => spec,
        Err(e) => return fail(e, EXIT_PARSE),
    };
    let outcome = run_bench(&spec, args.parallel, &budget_from_env());
    for failure in &outcome.failures {
        eprintln!("skipped: {failure}");
    }
    let file = match fs::File::create(&args.output) {
        Ok(file) => file,
        Err(e) => return fail(format!("{}: {e}", args.output.display()), EXIT_RUNTIME),
    };
    if let Err(e) = write_bench_csv(file, &outcome) {
        return fail(e, EXIT_RUNTIME);
    }
    println!(
        "wrote {} rows to {} ({} cells skipped)",
        outcome.rows.len(),
        args.output.display(),
        outcome.failures.len()
    );
    ExitCode::SUCCESS
}

fn cmd_generate(args: GenerateArgs) -> ExitCode {
    let family: GenFamily = match args.family.parse() {
        Ok(f) => f,
        Err(e) => return fail(e, EXIT_RUNTIME),
    };
    let k = family.fixed_objectives().unwrap_or(args.objectives);
    let gamma = if args.gamma.is_empty() {
        vec![1; k]
    } else {
        args.gamma.clone()
    };
    let spec = GenSpec {
        seed: args.seed,
        layers: args.layers,
        layer_width: args.layer_width,
        extra_edges: args.extra_edges,
        objectives: args.objectives,
        gamma,
        population_uncertainty: args.population_uncertainty,
        family,
    };
    let instance: Instance = match generate(&spec) {
        Ok(instance) => instance,
        Err(e) => return fail(e, EXIT_RUNTIME),
    };
    if let Err(e) = fs::write(&args.output, serialize_instance(&instance)) {
        return fail(format!("{}: {e}", args.output.display()), EXIT_RUNTIME);
    }
    println!(
        "wrote {} ({} nodes, {} edges, k = {})",
        args.output.display(),
        instance.graph().node_count(),
        instance.graph().edge_count(),
        instance.objectives()
    );
    ExitCode::SUCCESS
}
