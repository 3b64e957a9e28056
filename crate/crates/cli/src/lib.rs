//! Command-line front end for `l0screen`.
//!
//! Subcommands: `gen` writes a synthetic dataset, `screen` runs relaxation,
//! rounding and the screening rules, `solve` runs an exact solver, `bench`
//! sweeps a parameter grid, and `validate` checks any output against its
//! schema. Exit codes: 0 on success, 1 on runtime or data errors, 2 on usage
//! errors.

pub mod bench;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use l0screen::datagen::{self, SyntheticSpec};
use l0screen::screening::{apply_fixes, screen, ReducedProblem};
use l0screen::{
    branch_and_bound, brute_force, heuristics, relax, BnBConfig, BranchRule, HeuristicConfig, Instance, ProblemSpec,
    SolverConfig,
};
use serde::{Deserialize, Serialize};

use report::{InstanceInfo, ProblemInfo, RunReport, SchemaKind, ScreenSummary, SolveSummary, Timings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] l0screen::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "l0screen", version, about = "Safe screening for sparse least squares")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset (A.csv, y.csv, meta.json).
    Gen(GenArgs),
    /// Relax, round and screen; prints a JSON run report.
    Screen(ScreenArgs),
    /// Solve exactly; prints a JSON run report.
    Solve(SolveArgs),
    /// Compare solving with and without screening over a grid; prints CSV.
    Bench(BenchArgs),
    /// Check a report, bench CSV or meta.json against its schema.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long = "k-true")]
    pub k_true: usize,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 6.0)]
    pub snr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Reg,
    Card,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub variant: Variant,
    #[arg(long)]
    pub gamma: f64,
    /// Sparsity penalty (regularized variant only).
    #[arg(long)]
    pub mu: Option<f64>,
    /// Cardinality bound (cardinality variant only).
    #[arg(long)]
    pub k: Option<usize>,
    /// Model matrix, headerless CSV, one row per line.
    #[arg(long)]
    pub a: PathBuf,
    /// Response, headerless CSV, one value per line.
    #[arg(long)]
    pub y: PathBuf,
    /// Relative duality-gap tolerance for the relaxation.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

impl ProblemArgs {
    fn spec(&self) -> Result<ProblemSpec, CliError> {
        let usage = |e: l0screen::Error| CliError::Usage(e.to_string());
        match (self.variant, self.mu, self.k) {
            (Variant::Reg, Some(mu), None) => ProblemSpec::reg(self.gamma, mu).map_err(usage),
            (Variant::Card, None, Some(k)) => ProblemSpec::card(self.gamma, k).map_err(usage),
            (Variant::Reg, _, _) => Err(CliError::Usage("--variant reg requires --mu and no --k".into())),
            (Variant::Card, _, _) => Err(CliError::Usage("--variant card requires --k and no --mu".into())),
        }
    }

    fn solver(&self) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig {
            tol: self.tol,
            ..SolverConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    fn load(&self) -> Result<(Instance, ProblemSpec), CliError> {
        let spec = self.spec()?;
        let inst = datagen::load_csv(&self.a, &self.y)?;
        spec.validate_for(&inst)?;
        Ok((inst, spec))
    }

    fn info(&self, inst: &Instance, spec: &ProblemSpec) -> (InstanceInfo, ProblemInfo) {
        let (variant, mu, k) = match *spec {
            ProblemSpec::Reg { mu, .. } => ("reg", Some(mu), None),
            ProblemSpec::Card { k, .. } => ("card", None, Some(k)),
        };
        (
            InstanceInfo {
                m: inst.m(),
                n: inst.n(),
                a_path: self.a.display().to_string(),
                y_path: self.y.display().to_string(),
            },
            ProblemInfo {
                variant: variant.into(),
                gamma: spec.gamma(),
                mu,
                k,
            },
        )
    }
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Upper bound to screen with instead of the rounding heuristic's objective.
    #[arg(long = "zeta-bar")]
    pub zeta_bar: Option<f64>,
    /// Local-search rounds after rounding.
    #[arg(long = "swap-rounds", default_value_t = 0)]
    pub swap_rounds: usize,
    /// Write the reduced instance (A.csv, y.csv, reduction.json) here.
    #[arg(long = "reduced-out")]
    pub reduced_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Bnb,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    LargestDelta,
    MostFractional,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = Method::Bnb)]
    pub method: Method,
    /// Root screening for branch-and-bound (ignored by brute force).
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    pub screen: OnOff,
    /// Also screen at every node.
    #[arg(long = "per-node-screen")]
    pub per_node_screen: bool,
    #[arg(long, value_enum, default_value_t = BranchArg::LargestDelta)]
    pub branch: BranchArg,
    /// Seconds.
    #[arg(long = "time-limit", default_value_t = 600.0)]
    pub time_limit: f64,
    #[arg(long = "node-limit", default_value_t = 10_000_000)]
    pub node_limit: usize,
    #[arg(long = "swap-rounds", default_value_t = 0)]
    pub swap_rounds: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Synthetic,
    Files,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Synthetic)]
    pub suite: SuiteArg,
    /// `key=v1,v2;...` over n, m, k, gamma_exp, rho, snr.
    #[arg(long, default_value = "")]
    pub grid: String,
    /// Number of synthetic instances per grid cell.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// First instance seed; cells use seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seconds per solve.
    #[arg(long = "time-limit", default_value_t = 600.0)]
    pub time_limit: f64,
    /// Dataset directories containing A.csv and y.csv (files suite).
    #[arg(long = "files")]
    pub files: Vec<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub kind: SchemaKind,
    pub path: PathBuf,
}

/// Contents of `reduction.json` written next to a reduced instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionFile {
    pub original_n: usize,
    /// Columns of the reduced `A.csv`: the free variables, then those fixed to one.
    pub columns: Vec<usize>,
    pub reduced: ReducedProblem,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn base_report(command: &str, args: &[String], problem: &ProblemArgs, inst: &Instance, spec: &ProblemSpec) -> RunReport {
    let (instance, problem) = problem.info(inst, spec);
    RunReport {
        command: command.into(),
        args: args.to_vec(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: None,
        instance,
        problem,
        timings_ms: Timings::default(),
        screen: None,
        solve: None,
    }
}

pub fn cmd_gen(a: &GenArgs) -> Result<String, CliError> {
    let spec = SyntheticSpec {
        n: a.n,
        m: a.m,
        k_true: a.k_true,
        rho: a.rho,
        snr: a.snr,
        seed: a.seed,
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let data = datagen::generate(&spec)?;
    datagen::write_dataset(&a.out, &spec, &data)?;
    Ok(format!("wrote A.csv, y.csv, meta.json to {}", a.out.display()))
}

fn write_reduced(dir: &Path, inst: &Instance, reduced: ReducedProblem) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    if let Some((sub, _)) = reduced.instance(inst)? {
        datagen::write_csv(&sub, dir.join("A.csv"), dir.join("y.csv"))?;
    }
    let file = ReductionFile {
        original_n: inst.n(),
        columns: reduced.index_map.iter().chain(&reduced.forced).copied().collect(),
        reduced,
    };
    std::fs::write(dir.join("reduction.json"), serde_json::to_string_pretty(&file).expect("plain data") + "\n")?;
    Ok(())
}

pub fn cmd_screen(a: &ScreenArgs, args: &[String]) -> Result<RunReport, CliError> {
    let (inst, spec) = a.problem.load()?;
    let cfg = a.problem.solver()?;
    let mut report = base_report("screen", args, &a.problem, &inst, &spec);

    let t = Instant::now();
    let sol = relax::solve_relaxation(&inst, &spec, &cfg)?;
    report.timings_ms.relax = ms(t);

    let t = Instant::now();
    let zeta_bar = match a.zeta_bar {
        Some(z) => z,
        None => {
            let inc = heuristics::round(&inst, &spec, &sol)?;
            heuristics::local_search_swap(&inst, &spec, &inc, a.swap_rounds)?.objective
        }
    };
    report.timings_ms.heuristic = ms(t);

    let t = Instant::now();
    let rep = screen(&inst, &spec, &sol, zeta_bar)?;
    report.timings_ms.screen = ms(t);

    if let Some(dir) = &a.reduced_out {
        write_reduced(dir, &inst, apply_fixes(&rep, &inst, &spec)?)?;
    }
    report.screen = Some(ScreenSummary {
        n_zero: rep.n_zero,
        n_one: rep.n_one,
        n_free: rep.n_free,
        lower_bound: rep.lower_bound,
        zeta_bar: rep.upper_bound,
        fixes: rep.fixes,
    });
    Ok(report)
}

pub fn cmd_solve(a: &SolveArgs, args: &[String]) -> Result<RunReport, CliError> {
    let (inst, spec) = a.problem.load()?;
    let solver = a.problem.solver()?;
    if !(a.time_limit >= 0.0) {
        return Err(CliError::Usage("--time-limit must be non-negative".into()));
    }
    let mut report = base_report("solve", args, &a.problem, &inst, &spec);
    let t = Instant::now();
    let summary = match a.method {
        Method::Brute => {
            let bf = brute_force(&inst, &spec)?;
            SolveSummary {
                method: "brute".into(),
                screen: false,
                objective: bf.best.objective,
                support: bf.best.support.clone(),
                x: bf.best.x.iter().copied().collect(),
                nodes: 0,
                wall_time_s: t.elapsed().as_secs_f64(),
                optimal: true,
                root_fixed: 0,
                root_lower_bound: None,
            }
        }
        Method::Bnb => {
            let cfg = BnBConfig {
                time_limit_s: a.time_limit,
                node_limit: a.node_limit,
                screen_at_root: a.screen == OnOff::On,
                screen_per_node: a.per_node_screen,
                branch_rule: match a.branch {
                    BranchArg::LargestDelta => BranchRule::LargestDelta,
                    BranchArg::MostFractional => BranchRule::MostFractionalZ,
                },
                solver,
                heuristic: HeuristicConfig {
                    swap_rounds: a.swap_rounds,
                },
            };
            let stats = branch_and_bound(&inst, &spec, &cfg, None)?;
            if let Some(rep) = &stats.root_screen {
                report.screen = Some(ScreenSummary {
                    n_zero: rep.n_zero,
                    n_one: rep.n_one,
                    n_free: rep.n_free,
                    lower_bound: rep.lower_bound,
                    zeta_bar: rep.upper_bound,
                    fixes: rep.fixes.clone(),
                });
            }
            SolveSummary {
                method: "bnb".into(),
                screen: cfg.screen_at_root,
                objective: stats.best.objective,
                support: stats.best.support.clone(),
                x: stats.best.x.iter().copied().collect(),
                nodes: stats.nodes_explored,
                wall_time_s: stats.wall_time_s,
                optimal: stats.optimal,
                root_fixed: stats.root_fixed,
                root_lower_bound: stats.root_lower_bound.is_finite().then_some(stats.root_lower_bound),
            }
        }
    };
    report.timings_ms.solve = ms(t);
    report.solve = Some(summary);
    Ok(report)
}

pub fn cmd_bench(a: &BenchArgs) -> Result<Vec<report::BenchRow>, CliError> {
    let grid: bench::Grid = a.grid.parse()?;
    if !(a.time_limit >= 0.0) {
        return Err(CliError::Usage("--time-limit must be non-negative".into()));
    }
    let suite = match a.suite {
        SuiteArg::Synthetic => bench::Suite::Synthetic {
            seeds: (0..a.seeds).map(|s| a.seed + s).collect(),
        },
        SuiteArg::Files if a.files.is_empty() => {
            return Err(CliError::Usage("--suite files needs at least one --files DIR".into()))
        }
        SuiteArg::Files => bench::Suite::Files { dirs: a.files.clone() },
    };
    let run = || bench::run(&suite, &grid, a.time_limit);
    match a.jobs {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Runs a parsed command, writing its output to `out`.
pub fn run(cli: &Cli, args: &[String], out: &mut dyn std::io::Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(a) => writeln!(out, "{}", cmd_gen(a)?)?,
        Command::Screen(a) => writeln!(out, "{}", cmd_screen(a, args)?.to_json())?,
        Command::Solve(a) => writeln!(out, "{}", cmd_solve(a, args)?.to_json())?,
        Command::Bench(a) => report::write_bench(out, &cmd_bench(a)?)?,
        Command::Validate(a) => writeln!(out, "{}", report::validate_file(a.kind, &a.path)?)?,
    }
    Ok(())
}
