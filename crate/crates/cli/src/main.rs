use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use stabreg_cli::commands::{self, to_json, CmdResult, Failure, EXIT_INTERNAL, EXIT_PRECONDITION, EXIT_THEOREM};
use stabreg_cli::oracle::{self, clause_index, SuiteConfig, CLAUSES};
use stabreg_cli::spec::{decompose_options, parse_epsilons, resolve_caps, Config, ModeFlag, TaskSpec};
use stabreg_cli::sweep::{self, SweepDefaults};
use stabreg_core::Caps;

const DEFAULT_EPSILON: &str = "1/4";

#[derive(Parser)]
#[command(name = "stabreg", version, about = "Exact stable arithmetic regularity for finite groups")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file with the same keys as these flags, plus `caps`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Error parameter `p/q`; repeat for several.
    #[arg(long = "epsilon", global = true)]
    epsilon: Vec<String>,
    #[arg(long, global = true)]
    k: Option<u64>,
    #[arg(long, value_enum, global = true)]
    mode: Option<ModeFlag>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Check every report with the independent verifier.
    #[arg(long, global = true)]
    verify: bool,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Report file for single commands, output directory for sweeps.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Stability index, VC dimensions and stabilizer profile of a subset.
    Analyze { group: String, subset: String },
    /// Decomposition into a subgroup and dense cosets.
    Decompose { group: String, subset: String },
    /// Decomposition with a normal subgroup.
    DecomposeNormal { group: String, subset: String },
    /// Decomposition together with a formula defining its subgroup.
    Dnf {
        group: String,
        subset: String,
        /// Define the subgroup of the normal decomposition instead.
        #[arg(long)]
        normal: bool,
    },
    /// Decomposition of a set with small tripling in a represented group.
    Tripling { group: String, subset: String },
    /// Brute-force theorem checks over every subset of every catalog group.
    OracleSuite(SuiteArgs),
    /// Runs a task list, writing `sweep.csv` and `sweep.json`.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 8)]
    max_order: usize,
    #[arg(long, default_value_t = 10)]
    fact_order: usize,
    #[arg(long, default_value_t = 16)]
    exhaustive_order: usize,
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[arg(long, default_value_t = 4)]
    k_max: usize,
    /// Test mode: report this clause as failing.
    #[arg(long)]
    inject_fault: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON array of tasks.
    #[arg(long)]
    tasks: Option<PathBuf>,
    /// Single task group, used with `--subset`.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    subset: Option<String>,
    /// Add wall-clock milliseconds to each row.
    #[arg(long)]
    timing: bool,
}

/// Flags merged over the config file.
struct Settings {
    /// `None` when neither flags nor config give one.
    epsilons: Option<Vec<String>>,
    k: Option<u64>,
    mode: ModeFlag,
    seed: u64,
    verify: bool,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    caps: Caps,
}

fn settings(common: &Common) -> CmdResult<Settings> {
    let cfg = match &common.config {
        Some(p) => Config::load(&p.to_string_lossy())?,
        None => Config::default(),
    };
    let epsilons = if common.epsilon.is_empty() { cfg.epsilon.clone() } else { Some(common.epsilon.clone()) };
    Ok(Settings {
        epsilons,
        k: common.k.or(cfg.k),
        mode: common.mode.or(cfg.mode).unwrap_or(ModeFlag::Exact),
        seed: common.seed.or(cfg.seed).unwrap_or(0),
        verify: common.verify || cfg.verify.unwrap_or(false),
        jobs: common.jobs.or(cfg.jobs),
        out: common.out.clone().or(cfg.out.map(PathBuf::from)),
        caps: resolve_caps(cfg.caps.as_ref())?,
    })
}

fn default_epsilons() -> Vec<String> {
    vec![DEFAULT_EPSILON.to_string()]
}

fn emit<T: Serialize>(s: &Settings, value: &T) -> CmdResult<()> {
    let text = to_json(value);
    if let Some(path) = &s.out {
        std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::new(EXIT_PRECONDITION, format!("{}: {e}", path.display())))?;
    }
    println!("{text}");
    Ok(())
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::new(EXIT_INTERNAL, format!("writing output: {e}"))
}

#[derive(Serialize)]
struct SuiteSummary<'a> {
    all_passed: bool,
    groups: usize,
    subsets: usize,
    totals: &'a std::collections::BTreeMap<&'static str, oracle::ClauseTotals>,
    counterexamples: &'a [oracle::Counterexample],
}

fn run_suite(s: &Settings, args: &SuiteArgs) -> CmdResult<()> {
    let inject_fault = match &args.inject_fault {
        Some(name) => Some(clause_index(name).ok_or_else(|| {
            Failure::new(EXIT_PRECONDITION, format!("unknown clause {name:?}; expected one of {}", CLAUSES.join(", ")))
        })?),
        None => None,
    };
    let mut cfg = SuiteConfig {
        max_order: args.max_order,
        fact_order: args.fact_order,
        exhaustive_order: args.exhaustive_order,
        samples: args.samples,
        k_max: args.k_max,
        seed: s.seed,
        inject_fault,
        caps: s.caps.clone(),
        ..SuiteConfig::default()
    };
    if let Some(list) = &s.epsilons {
        cfg.epsilons = parse_epsilons(list)?;
    }
    let result = oracle::run_suite(&cfg)?;
    let dir = s.out.clone().unwrap_or_else(|| PathBuf::from("."));
    oracle::write_outputs(&dir, &cfg, &result).map_err(io_failure)?;
    println!(
        "{}",
        to_json(&SuiteSummary {
            all_passed: result.all_passed(),
            groups: result.groups.len(),
            subsets: result.rows.len(),
            totals: &result.totals,
            counterexamples: &result.counterexamples,
        })
    );
    if result.all_passed() {
        Ok(())
    } else {
        let clauses: Vec<&str> = result.counterexamples.iter().map(|c| c.clause).collect();
        Err(Failure::new(EXIT_THEOREM, format!("failing clauses: {}", clauses.join(", "))))
    }
}

fn run_sweep(s: &Settings, args: &SweepArgs) -> CmdResult<()> {
    let mut tasks = match &args.tasks {
        Some(p) => sweep::load_tasks(p)?,
        None => Vec::new(),
    };
    match (&args.group, &args.subset) {
        (Some(group), Some(subset)) => tasks.push(TaskSpec {
            group: group.clone(),
            subset: subset.clone(),
            epsilons: Vec::new(),
            mode: None,
            k: None,
            seed: s.seed,
        }),
        (None, None) => {}
        _ => return Err(Failure::new(EXIT_PRECONDITION, "--group and --subset go together")),
    }
    if tasks.is_empty() {
        return Err(Failure::new(EXIT_PRECONDITION, "no tasks: give --tasks or --group with --subset"));
    }
    let defaults = SweepDefaults {
        epsilons: s.epsilons.clone().unwrap_or_else(default_epsilons),
        mode: s.mode,
        k: s.k,
        caps: s.caps.clone(),
        timing: args.timing,
    };
    let result = sweep::run_sweep(&tasks, &defaults);
    let dir = s.out.clone().unwrap_or_else(|| PathBuf::from("."));
    sweep::write_outputs(&dir, &result).map_err(io_failure)?;
    println!("{}", to_json(&result));
    match result.rows.iter().find(|r| r.status != 0) {
        Some(r) => Err(Failure::new(r.status, format!("{} of {} rows failed", result.failures, result.rows.len()))),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> CmdResult<()> {
    let s = settings(&cli.common)?;
    if let Some(jobs) = s.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::new(EXIT_INTERNAL, e.to_string()))?;
    }
    let eps = || parse_epsilons(&s.epsilons.clone().unwrap_or_else(default_epsilons)).map_err(Failure::from);
    let opts = || decompose_options(s.mode, s.k, &s.caps).map_err(Failure::from);
    match &cli.command {
        Command::Analyze { group, subset } => emit(&s, &commands::analyze(group, subset, &s.caps)?),
        Command::Decompose { group, subset } => {
            emit(&s, &commands::decompose_cmd(group, subset, &eps()?, &opts()?, s.verify, false)?)
        }
        Command::DecomposeNormal { group, subset } => {
            emit(&s, &commands::decompose_cmd(group, subset, &eps()?, &opts()?, s.verify, true)?)
        }
        Command::Dnf { group, subset, normal } => {
            emit(&s, &commands::dnf_cmd(group, subset, &eps()?, &opts()?, s.seed, s.verify, *normal)?)
        }
        Command::Tripling { group, subset } => {
            let topts = commands::tripling_options(s.mode, s.k, &s.caps)?;
            emit(&s, &commands::tripling_cmd(group, subset, &eps()?, &topts, s.verify)?)
        }
        Command::OracleSuite(args) => run_suite(&s, args),
        Command::Sweep(args) => run_sweep(&s, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PRECONDITION as u8) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
