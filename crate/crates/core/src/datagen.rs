//! Synthetic instances and CSV ingestion.
//!
//! Generation is fully determined by the seed. The stream is ChaCha20
//! ([`rand_chacha::ChaCha20Rng::seed_from_u64`]) and Gaussian draws use the
//! ziggurat sampler of [`rand_distr::StandardNormal`]. Draw order: the rows of
//! `A` one after the other (each row left to right), then the noise vector.
//!
//! The generator makes three interpretive choices:
//! * rows are AR(1) with `Σ_ij = ρ^|i−j|`;
//! * `β` has `k_true` unit entries at indices `⌊j·n/k_true⌋`;
//! * noise is drawn i.i.d. standard normal, centred and rescaled so that its
//!   variance over the `m` rows is exactly `Var(Aβ)/snr` (variances divide
//!   by `m`).

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::problem::Instance;

/// Name recorded in dataset metadata for the generator described above.
pub const GENERATOR_NAME: &str = "chacha20-seed_from_u64/ziggurat-normal/ar1-v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub m: usize,
    pub k_true: usize,
    pub rho: f64,
    pub snr: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(invalid("n and m must be positive"));
        }
        if self.k_true == 0 || self.k_true > self.n {
            return Err(invalid(format!("k_true = {} must lie in [1, n = {}]", self.k_true, self.n)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(invalid(format!("rho = {} must lie in [0, 1)", self.rho)));
        }
        if !(self.snr.is_finite() && self.snr > 0.0) {
            return Err(invalid(format!("snr = {} must be positive and finite", self.snr)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub instance: Instance,
    pub true_support: Vec<usize>,
    pub beta: DVector<f64>,
}

fn variance(v: &DVector<f64>) -> f64 {
    let mean = v.mean();
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64
}

/// Equally spaced support `⌊j·n/k⌋`, `j = 0..k`.
pub fn true_support(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|j| j * n / k).collect()
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let SyntheticSpec { n, m, k_true, rho, snr, seed } = *spec;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut normal = move || -> f64 { StandardNormal.sample(&mut rng) };
    let innovation = (1.0 - rho * rho).sqrt();

    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        let mut prev: f64 = normal();
        a[(i, 0)] = prev;
        for j in 1..n {
            prev = rho * prev + innovation * normal();
            a[(i, j)] = prev;
        }
    }

    let support = true_support(n, k_true);
    let mut beta = DVector::zeros(n);
    for &j in &support {
        beta[j] = 1.0;
    }
    let signal = &a * &beta;

    let w = DVector::from_iterator(m, (0..m).map(|_| normal()));
    let sigma = (variance(&signal) / snr).sqrt();
    let w_sd = variance(&w).sqrt();
    let noise = if w_sd > 0.0 {
        w.add_scalar(-w.mean()) * (sigma / w_sd)
    } else {
        DVector::zeros(m)
    };

    Ok(SyntheticData {
        instance: Instance::new(a, signal + noise)?,
        true_support: support,
        beta,
    })
}

/// `γ₀ = n / (m·k·max_i ‖a_i‖²)` with `a_i` the rows of `A`.
pub fn gamma_zero(inst: &Instance, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let max_row = inst
        .a()
        .row_iter()
        .map(|r| r.norm_squared())
        .fold(0.0, f64::max);
    if max_row == 0.0 {
        return Err(Error::DivisionByZero("every row of A is zero".into()));
    }
    Ok(inst.n() as f64 / (inst.m() as f64 * k as f64 * max_row))
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => parse_error(path, 0, format!("{other:?}")),
        })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = reader
            .read_record(&mut record)
            .map_err(|e| parse_error(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        if !more {
            break;
        }
        let line = record.position().map_or(rows.len() as u64 + 1, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_error(path, line, format!("column {}: {cell:?} is not a finite number", col + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_error(
                    path,
                    line,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(path, 1, "file contains no rows"));
    }
    Ok(rows)
}

/// Reads `A` (one row per line) and `y` (one value per line), both headerless.
pub fn load_csv(path_a: impl AsRef<Path>, path_y: impl AsRef<Path>) -> Result<Instance> {
    let (path_a, path_y) = (path_a.as_ref(), path_y.as_ref());
    let rows = read_rows(path_a)?;
    let y_rows = read_rows(path_y)?;
    if y_rows[0].len() != 1 {
        return Err(parse_error(path_y, 1, format!("expected 1 column, found {}", y_rows[0].len())));
    }
    if y_rows.len() != rows.len() {
        let line = rows.len().min(y_rows.len()) as u64 + 1;
        let path = if y_rows.len() < rows.len() { path_y } else { path_a };
        return Err(parse_error(
            path,
            line,
            format!("A has {} rows but y has {} values", rows.len(), y_rows.len()),
        ));
    }
    let y: Vec<f64> = y_rows.into_iter().map(|r| r[0]).collect();
    Instance::from_rows(&rows, &y)
}

fn write_matrix<'a>(path: &Path, rows: impl Iterator<Item = Vec<f64>> + 'a) -> Result<()> {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes `A` and `y` in the format read by [`load_csv`]; values round-trip exactly.
pub fn write_csv(inst: &Instance, path_a: impl AsRef<Path>, path_y: impl AsRef<Path>) -> Result<()> {
    write_matrix(path_a.as_ref(), inst.a().row_iter().map(|r| r.iter().copied().collect()))?;
    write_matrix(path_y.as_ref(), inst.y().iter().map(|&v| vec![v]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n: usize,
    pub m: usize,
    pub k_true: usize,
    pub rho: f64,
    pub snr: f64,
    pub seed: u64,
    pub generator_name: String,
    pub true_support: Vec<usize>,
}

impl DatasetMeta {
    pub fn new(spec: &SyntheticSpec, true_support: Vec<usize>) -> Self {
        Self {
            n: spec.n,
            m: spec.m,
            k_true: spec.k_true,
            rho: spec.rho,
            snr: spec.snr,
            seed: spec.seed,
            generator_name: GENERATOR_NAME.to_string(),
            true_support,
        }
    }
}

/// Paths of the three files that make up a dataset directory.
pub fn dataset_paths(dir: impl AsRef<Path>) -> (PathBuf, PathBuf, PathBuf) {
    let dir = dir.as_ref();
    (dir.join("A.csv"), dir.join("y.csv"), dir.join("meta.json"))
}

/// Writes `A.csv`, `y.csv` and `meta.json` into `dir`, creating it if needed.
pub fn write_dataset(dir: impl AsRef<Path>, spec: &SyntheticSpec, data: &SyntheticData) -> Result<()> {
    fs::create_dir_all(dir.as_ref())?;
    let (a, y, meta) = dataset_paths(dir);
    write_csv(&data.instance, a, y)?;
    let meta_json = serde_json::to_string_pretty(&DatasetMeta::new(spec, data.true_support.clone()))?;
    fs::write(meta, meta_json + "\n")?;
    Ok(())
}

pub fn read_dataset(dir: impl AsRef<Path>) -> Result<(Instance, DatasetMeta)> {
    let (a, y, meta) = dataset_paths(dir);
    let inst = load_csv(a, y)?;
    let meta: DatasetMeta = serde_json::from_str(&fs::read_to_string(meta)?)?;
    if meta.n != inst.n() || meta.m != inst.m() {
        return Err(invalid(format!(
            "meta.json declares {}x{} but the data is {}x{}",
            meta.m,
            meta.n,
            inst.m(),
            inst.n()
        )));
    }
    Ok((inst, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ridge_restricted_solve;

    fn spec(n: usize, m: usize, k: usize, rho: f64, snr: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec { n, m, k_true: k, rho, snr, seed }
    }

    fn correlation(a: &DMatrix<f64>, i: usize, j: usize) -> f64 {
        let (ci, cj) = (a.column(i).into_owned(), a.column(j).into_owned());
        let (mi, mj) = (ci.mean(), cj.mean());
        let cov: f64 = ci.iter().zip(cj.iter()).map(|(x, y)| (x - mi) * (y - mj)).sum();
        let vi: f64 = ci.iter().map(|x| (x - mi).powi(2)).sum();
        let vj: f64 = cj.iter().map(|x| (x - mj).powi(2)).sum();
        cov / (vi * vj).sqrt()
    }

    #[test]
    fn independent_columns_when_rho_is_zero() {
        let m = 2000;
        let data = generate(&spec(10, m, 2, 0.0, 6.0, 1)).unwrap();
        let bound = 4.0 / (m as f64).sqrt();
        for j in 0..9 {
            assert!(correlation(data.instance.a(), j, j + 1).abs() < bound);
        }
    }

    #[test]
    fn noiseless_recovery() {
        let data = generate(&spec(20, 100, 4, 0.5, 1e12, 9)).unwrap();
        assert_eq!(data.true_support, vec![0, 5, 10, 15]);
        // gamma huge: ridge fit is plain least squares on the support
        let fit = ridge_restricted_solve(&data.instance, 1e12, &data.true_support).unwrap();
        for (j, &b) in data.beta.iter().enumerate() {
            assert!((fit.x[j] - b).abs() < 1e-3, "coef {j} = {}", fit.x[j]);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let s = spec(7, 5, 2, 0.3, 2.0, 42);
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let other = generate(&SyntheticSpec { seed: 43, ..s }).unwrap();
        assert_ne!(generate(&s).unwrap().instance, other.instance);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate(&spec(4, 3, 5, 0.2, 6.0, 7)).is_err());
        assert!(generate(&spec(4, 3, 0, 0.2, 6.0, 7)).is_err());
        assert!(generate(&spec(4, 3, 1, 1.0, 6.0, 7)).is_err());
        assert!(generate(&spec(4, 3, 1, 0.2, 0.0, 7)).is_err());
        assert!(generate(&spec(0, 3, 1, 0.2, 1.0, 7)).is_err());
    }

    #[test]
    fn empirical_covariance_is_ar1() {
        let rho = 0.6;
        let m = 100_000;
        let data = generate(&spec(6, m, 1, rho, 6.0, 5)).unwrap();
        let a = data.instance.a();
        for lag in 0..=3 {
            for i in 0..6 - lag {
                let cov = a.column(i).dot(&a.column(i + lag)) / m as f64;
                assert!((cov - rho.powi(lag as i32)).abs() < 0.02, "lag {lag}: {cov}");
            }
        }
    }

    #[test]
    fn realized_snr_matches() {
        for (seed, snr) in [(1, 6.0), (2, 1.0), (3, 0.05)] {
            let data = generate(&spec(50, 500, 5, 0.5, snr, seed)).unwrap();
            let signal = data.instance.a() * &data.beta;
            let noise = data.instance.y() - &signal;
            let realized = variance(&signal) / variance(&noise);
            assert!((realized / snr - 1.0).abs() < 0.1, "{realized} vs {snr}");
        }
    }

    #[test]
    fn gamma_zero_examples() {
        let mut a = DMatrix::zeros(500, 1000);
        a[(0, 0)] = 1.0;
        let inst = Instance::new(a, DVector::zeros(500)).unwrap();
        assert!((gamma_zero(&inst, 10).unwrap() - 0.2).abs() < 1e-15);

        let one = Instance::from_rows(&[vec![2.0]], &[1.0]).unwrap();
        assert_eq!(gamma_zero(&one, 1).unwrap(), 0.25);

        let data = generate(&spec(8, 6, 2, 0.1, 3.0, 4)).unwrap();
        let g = gamma_zero(&data.instance, 3).unwrap();
        let scaled = Instance::new(data.instance.a() * 3.0, data.instance.y().clone()).unwrap();
        assert!((gamma_zero(&scaled, 3).unwrap() - g / 9.0).abs() < 1e-15 * g);

        let zero = Instance::new(DMatrix::zeros(2, 2), DVector::zeros(2)).unwrap();
        assert!(matches!(gamma_zero(&zero, 1), Err(Error::DivisionByZero(_))));
        assert!(gamma_zero(&one, 0).is_err());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let data = generate(&spec(9, 7, 3, 0.4, 2.5, 77)).unwrap();
        let (a, y, _) = dataset_paths(dir.path());
        write_csv(&data.instance, &a, &y).unwrap();
        assert_eq!(load_csv(&a, &y).unwrap(), data.instance);
    }

    #[test]
    fn tiny_from_files() {
        let dir = tempfile::tempdir().unwrap();
        let (a, y, _) = dataset_paths(dir.path());
        fs::write(&a, "1,0\n0,1\n").unwrap();
        fs::write(&y, "3\n0.1\n").unwrap();
        let inst = load_csv(&a, &y).unwrap();
        assert_eq!(inst, Instance::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[3.0, 0.1]).unwrap());
    }

    fn parse_line(err: Error) -> u64 {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_files_report_lines() {
        let dir = tempfile::tempdir().unwrap();
        let (a, y, _) = dataset_paths(dir.path());
        fs::write(&y, "3\n0.1\n").unwrap();

        fs::write(&a, "c1,c2\n1,0\n0,1\n").unwrap();
        assert_eq!(parse_line(load_csv(&a, &y).unwrap_err()), 1);

        fs::write(&a, "1,0\n0\n").unwrap();
        assert_eq!(parse_line(load_csv(&a, &y).unwrap_err()), 2);

        fs::write(&a, "1,0\n0,x\n").unwrap();
        assert_eq!(parse_line(load_csv(&a, &y).unwrap_err()), 2);

        fs::write(&a, "1,0\n0,1\n1,1\n").unwrap();
        assert_eq!(parse_line(load_csv(&a, &y).unwrap_err()), 3);

        assert!(matches!(load_csv(dir.path().join("missing.csv"), &y), Err(Error::Io(_))));
    }

    #[test]
    fn dataset_directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(4, 3, 1, 0.2, 6.0, 7);
        let data = generate(&s).unwrap();
        write_dataset(dir.path(), &s, &data).unwrap();
        let (inst, meta) = read_dataset(dir.path()).unwrap();
        assert_eq!(inst, data.instance);
        assert_eq!(meta, DatasetMeta::new(&s, vec![0]));
        assert_eq!(meta.generator_name, GENERATOR_NAME);
    }
}
