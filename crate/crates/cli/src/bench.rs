//! Benchmark harness: branch-and-bound with and without root screening over
//! a parameter grid, one CSV row per (instance, method).

use std::path::PathBuf;
use std::str::FromStr;

use l0screen::datagen::{gamma_zero, generate, load_csv, SyntheticSpec};
use l0screen::{branch_and_bound, BnBConfig, Instance, ProblemSpec};
use rayon::prelude::*;

use crate::report::BenchRow;
use crate::CliError;

/// Values swept by the bench. Parsed from `key=v1,v2;key=v3`, with keys
/// `n`, `m`, `k`, `gamma_exp`, `rho`, `snr`; missing keys keep their defaults
/// (the synthetic design with n = 1000, m = 500).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub k: Vec<usize>,
    pub gamma_exp: Vec<i32>,
    pub rho: Vec<f64>,
    pub snr: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            n: vec![1000],
            m: vec![500],
            k: vec![10, 30, 50],
            gamma_exp: vec![-1, 0, 2, 4],
            rho: vec![0.2, 0.5, 0.7],
            snr: vec![0.05, 1.0, 6.0],
        }
    }
}

fn parse_list<T: FromStr>(key: &str, values: &str) -> Result<Vec<T>, CliError> {
    let parsed: Vec<T> = values
        .split(',')
        .map(|v| v.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("grid key {key}: cannot parse {values:?}")))?;
    if parsed.is_empty() {
        return Err(CliError::Usage(format!("grid key {key} has no values")));
    }
    Ok(parsed)
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut grid = Grid::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("grid entry {part:?} is not key=values")))?;
            let key = key.trim();
            match key {
                "n" => grid.n = parse_list(key, values)?,
                "m" => grid.m = parse_list(key, values)?,
                "k" => grid.k = parse_list(key, values)?,
                "gamma_exp" => grid.gamma_exp = parse_list(key, values)?,
                "rho" => grid.rho = parse_list(key, values)?,
                "snr" => grid.snr = parse_list(key, values)?,
                other => return Err(CliError::Usage(format!("unknown grid key {other:?}"))),
            }
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone)]
pub enum Suite {
    Synthetic { seeds: Vec<u64> },
    Files { dirs: Vec<PathBuf> },
}

/// Methods compared on every instance, in output order.
pub const METHODS: [(&str, bool); 2] = [("bnb", false), ("bnb+screen", true)];

struct Job {
    instance_id: String,
    source: Source,
    k: usize,
    gamma_exp: i32,
    rho: Option<f64>,
    snr: Option<f64>,
}

#[derive(Clone)]
enum Source {
    Synthetic(SyntheticSpec),
    File(PathBuf),
}

fn jobs(suite: &Suite, grid: &Grid) -> Vec<Job> {
    let mut out = Vec::new();
    match suite {
        Suite::Synthetic { seeds } => {
            for &n in &grid.n {
                for &m in &grid.m {
                    for &k in &grid.k {
                        for &rho in &grid.rho {
                            for &snr in &grid.snr {
                                for &seed in seeds {
                                    for &gamma_exp in &grid.gamma_exp {
                                        let spec = SyntheticSpec { n, m, k_true: k, rho, snr, seed };
                                        out.push(Job {
                                            instance_id: format!(
                                                "syn-n{n}-m{m}-k{k}-rho{rho}-snr{snr}-seed{seed}-g{gamma_exp}"
                                            ),
                                            source: Source::Synthetic(spec),
                                            k,
                                            gamma_exp,
                                            rho: Some(rho),
                                            snr: Some(snr),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Suite::Files { dirs } => {
            for dir in dirs {
                let name = dir.file_name().map_or_else(|| dir.display().to_string(), |s| s.to_string_lossy().into_owned());
                for &k in &grid.k {
                    for &gamma_exp in &grid.gamma_exp {
                        out.push(Job {
                            instance_id: format!("file-{name}-k{k}-g{gamma_exp}"),
                            source: Source::File(dir.clone()),
                            k,
                            gamma_exp,
                            rho: None,
                            snr: None,
                        });
                    }
                }
            }
        }
    }
    out
}

fn load(source: &Source) -> l0screen::Result<Instance> {
    match source {
        Source::Synthetic(spec) => Ok(generate(spec)?.instance),
        Source::File(dir) => load_csv(dir.join("A.csv"), dir.join("y.csv")),
    }
}

fn run_job(job: &Job, time_limit_s: f64) -> Vec<BenchRow> {
    let row = |method: &str| BenchRow {
        instance_id: job.instance_id.clone(),
        method: method.to_string(),
        k: job.k,
        gamma_exp: job.gamma_exp,
        rho: job.rho,
        snr: job.snr,
        fixed_count: 0,
        fixed_pct: 0.0,
        nodes: 0,
        time_s: 0.0,
        optimal: false,
        status: "ok".to_string(),
    };
    let setup = load(&job.source).and_then(|inst| {
        let gamma = gamma_zero(&inst, job.k)? * 2f64.powi(job.gamma_exp);
        let spec = ProblemSpec::card(gamma, job.k)?;
        spec.validate_for(&inst)?;
        Ok((inst, spec))
    });
    let (inst, spec) = match setup {
        Ok(v) => v,
        Err(e) => {
            return METHODS
                .iter()
                .map(|(name, _)| BenchRow {
                    status: format!("error: {e}"),
                    ..row(name)
                })
                .collect()
        }
    };
    METHODS
        .iter()
        .map(|&(name, screen)| {
            let cfg = BnBConfig {
                time_limit_s,
                screen_at_root: screen,
                ..BnBConfig::default()
            };
            match branch_and_bound(&inst, &spec, &cfg, None) {
                Ok(stats) => BenchRow {
                    fixed_count: stats.root_fixed,
                    fixed_pct: 100.0 * stats.root_fixed as f64 / inst.n() as f64,
                    nodes: stats.nodes_explored,
                    time_s: stats.wall_time_s,
                    optimal: stats.optimal,
                    ..row(name)
                },
                Err(e) => BenchRow {
                    status: format!("error: {e}"),
                    ..row(name)
                },
            }
        })
        .collect()
}

/// Runs every job of the grid on the rayon pool; rows come back sorted by
/// `instance_id`, then method, whatever the completion order.
pub fn run(suite: &Suite, grid: &Grid, time_limit_s: f64) -> Vec<BenchRow> {
    let jobs = jobs(suite, grid);
    let mut rows: Vec<BenchRow> = jobs.par_iter().flat_map_iter(|job| run_job(job, time_limit_s)).collect();
    rows.sort_by(|a, b| a.instance_id.cmp(&b.instance_id).then_with(|| a.method.cmp(&b.method)));
    rows
}
