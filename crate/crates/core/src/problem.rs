//! Problem data, objective evaluation and support-restricted ridge solves.
//!
//! Both problem variants share the same data `(A, y)` and ridge weight `1/γ`:
//!
//! * regularized: `‖y − Ax‖² + (1/γ)‖x‖² + μ‖x‖₀`
//! * cardinality constrained: `‖y − Ax‖² + (1/γ)‖x‖²` subject to `‖x‖₀ ≤ k`
//!
//! Everything here is a pure function of immutable inputs.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Model matrix `A` (m × n) and response `y` (length m).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    a: DMatrix<f64>,
    y: DVector<f64>,
}

impl Instance {
    pub fn new(a: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(invalid(format!(
                "model matrix must be non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.nrows() != y.len() {
            return Err(invalid(format!(
                "response has length {} but model matrix has {} rows",
                y.len(),
                a.nrows()
            )));
        }
        if a.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("all entries of A and y must be finite"));
        }
        Ok(Self { a, y })
    }

    /// Builds an instance from row-major data.
    pub fn from_rows(rows: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(invalid(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Self::new(a, DVector::from_column_slice(y))
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// Number of rows (observations).
    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    /// Number of columns (features).
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// `A x`.
    pub fn predict(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x
    }

    /// `A' v`, one inner product per column.
    pub fn correlations(&self, v: &DVector<f64>) -> DVector<f64> {
        self.a.tr_mul(v)
    }

    /// Instance restricted to the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() {
            return Err(invalid("cannot build an instance with no columns"));
        }
        if let Some(&c) = cols.iter().find(|&&c| c >= self.n()) {
            return Err(invalid(format!("column {c} out of range for n = {}", self.n())));
        }
        Ok(Self {
            a: self.a.select_columns(cols),
            y: self.y.clone(),
        })
    }

    pub(crate) fn check_len(&self, x: &DVector<f64>, what: &str) -> Result<()> {
        if x.len() != self.n() {
            return Err(invalid(format!(
                "{what} has length {}, expected n = {}",
                x.len(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// Which of the two problem families is being solved, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemSpec {
    /// `ℓ0`-regularized: penalty `μ` per selected feature.
    Reg { gamma: f64, mu: f64 },
    /// Cardinality constrained: at most `k` selected features.
    Card { gamma: f64, k: usize },
}

impl ProblemSpec {
    pub fn reg(gamma: f64, mu: f64) -> Result<Self> {
        let spec = ProblemSpec::Reg { gamma, mu };
        spec.validate()?;
        Ok(spec)
    }

    pub fn card(gamma: f64, k: usize) -> Result<Self> {
        let spec = ProblemSpec::Card { gamma, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            ProblemSpec::Reg { gamma, .. } | ProblemSpec::Card { gamma, .. } => gamma,
        }
    }

    pub fn is_card(&self) -> bool {
        matches!(self, ProblemSpec::Card { .. })
    }

    fn validate(&self) -> Result<()> {
        let gamma = self.gamma();
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("gamma must be positive and finite, got {gamma}")));
        }
        match *self {
            ProblemSpec::Reg { mu, .. } if !(mu > 0.0 && mu.is_finite()) => {
                Err(invalid(format!("mu must be positive and finite, got {mu}")))
            }
            ProblemSpec::Card { k: 0, .. } => Err(invalid("cardinality k must be at least 1")),
            _ => Ok(()),
        }
    }

    /// Checks the parameters against the instance dimensions.
    pub fn validate_for(&self, inst: &Instance) -> Result<()> {
        self.validate()?;
        if let ProblemSpec::Card { k, .. } = *self {
            if k > inst.n() {
                return Err(invalid(format!("cardinality k = {k} exceeds n = {}", inst.n())));
            }
        }
        Ok(())
    }

    /// Objective of the mixed-integer problem at `(support, x)`.
    pub fn objective(&self, inst: &Instance, support: &[usize], x: &DVector<f64>) -> Result<f64> {
        match *self {
            ProblemSpec::Reg { gamma, mu } => objective_reg(inst, gamma, mu, support, x),
            ProblemSpec::Card { gamma, k } => objective_card(inst, gamma, k, support, x),
        }
    }
}

/// Per-variable indicator state: undecided, excluded (`z = 0`) or included (`z = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixState {
    #[default]
    Free,
    Zero,
    One,
}

/// A feasible solution: the upper bound `ζ̄` used by screening.
#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    /// Selected columns, sorted ascending.
    pub support: Vec<usize>,
    /// Coefficients, length n, zero off the support.
    pub x: DVector<f64>,
    pub objective: f64,
}

impl Incumbent {
    /// The all-zero solution, feasible for both variants.
    pub fn empty(inst: &Instance) -> Self {
        Self {
            support: Vec::new(),
            x: DVector::zeros(inst.n()),
            objective: inst.y().norm_squared(),
        }
    }

    /// Fits ridge coefficients on `support` and evaluates the objective of `spec`.
    pub fn from_support(inst: &Instance, spec: &ProblemSpec, support: &[usize]) -> Result<Self> {
        let mut support = support.to_vec();
        support.sort_unstable();
        support.dedup();
        let fit = ridge_restricted_solve(inst, spec.gamma(), &support)?;
        let objective = spec.objective(inst, &support, &fit.x)?;
        Ok(Self {
            support,
            x: fit.x,
            objective,
        })
    }
}

fn check_support(inst: &Instance, support: &[usize], x: &DVector<f64>) -> Result<()> {
    inst.check_len(x, "coefficient vector")?;
    let mut on = vec![false; inst.n()];
    for &i in support {
        if i >= inst.n() {
            return Err(invalid(format!("support index {i} out of range for n = {}", inst.n())));
        }
        if on[i] {
            return Err(invalid(format!("support index {i} repeated")));
        }
        on[i] = true;
    }
    if let Some(i) = (0..inst.n()).find(|&i| !on[i] && x[i] != 0.0) {
        return Err(invalid(format!("x[{i}] = {} is nonzero off the support", x[i])));
    }
    Ok(())
}

fn ridge_loss(inst: &Instance, gamma: f64, x: &DVector<f64>) -> f64 {
    let r = inst.y() - inst.predict(x);
    r.norm_squared() + x.norm_squared() / gamma
}

/// `‖y − Ax‖² + (1/γ)Σ_{i∈S} x_i² + μ|S|`.
pub fn objective_reg(
    inst: &Instance,
    gamma: f64,
    mu: f64,
    support: &[usize],
    x: &DVector<f64>,
) -> Result<f64> {
    check_support(inst, support, x)?;
    Ok(ridge_loss(inst, gamma, x) + mu * support.len() as f64)
}

/// `‖y − Ax‖² + (1/γ)Σ_{i∈S} x_i²`, requiring `|S| ≤ k`.
pub fn objective_card(
    inst: &Instance,
    gamma: f64,
    k: usize,
    support: &[usize],
    x: &DVector<f64>,
) -> Result<f64> {
    check_support(inst, support, x)?;
    if support.len() > k {
        return Err(Error::ConstraintViolation {
            size: support.len(),
            k,
        });
    }
    Ok(ridge_loss(inst, gamma, x))
}

/// Result of a support-restricted ridge fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeFit {
    /// Full-length coefficients, zero off the support.
    pub x: DVector<f64>,
    /// `‖y − Ax‖² + (1/γ)‖x‖²` at the fit (no `μ` term).
    pub value: f64,
}

/// Minimizes `‖y − A_S x_S‖² + (1/γ)‖x_S‖²` over coefficients supported on `S`.
///
/// Solves the SPD system `(A_S'A_S + I/γ) x_S = A_S'y` by Cholesky. An empty
/// support returns `x = 0`.
pub fn ridge_restricted_solve(inst: &Instance, gamma: f64, support: &[usize]) -> Result<RidgeFit> {
    if !(gamma > 0.0) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    let n = inst.n();
    if let Some(&i) = support.iter().find(|&&i| i >= n) {
        return Err(invalid(format!("support index {i} out of range for n = {n}")));
    }
    let mut x = DVector::zeros(n);
    if !support.is_empty() {
        let a_s = inst.a().select_columns(support);
        let mut gram = a_s.tr_mul(&a_s);
        for d in 0..support.len() {
            gram[(d, d)] += 1.0 / gamma;
        }
        let rhs = a_s.tr_mul(inst.y());
        let xs = solve_spd(gram, rhs);
        for (d, &i) in support.iter().enumerate() {
            x[i] = xs[d];
        }
    }
    let value = ridge_loss(inst, gamma, &x);
    Ok(RidgeFit { x, value })
}

/// Solves an SPD system, falling back to LU if Cholesky loses positivity to rounding.
pub(crate) fn solve_spd(mat: DMatrix<f64>, rhs: DVector<f64>) -> DVector<f64> {
    match mat.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => mat
            .lu()
            .solve(&rhs)
            .unwrap_or_else(|| DVector::zeros(rhs.len())),
    }
}

/// Residual `ε = y − Ax*` and squared correlations `δ_i = (A_i'ε)²`.
pub fn delta_vector(inst: &Instance, x_star: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
    inst.check_len(x_star, "x_star")?;
    let eps = inst.y() - inst.predict(x_star);
    let delta = deltas_from_residual(inst, &eps);
    Ok((eps, delta))
}

pub(crate) fn deltas_from_residual(inst: &Instance, eps: &DVector<f64>) -> DVector<f64> {
    inst.correlations(eps).map(|c| c * c)
}

/// Precomputed `A'A`, `A'y` and `y'y` for repeated small ridge solves.
#[derive(Debug, Clone)]
pub(crate) struct GramCache {
    gram: DMatrix<f64>,
    aty: DVector<f64>,
    yy: f64,
}

impl GramCache {
    pub(crate) fn new(inst: &Instance) -> Self {
        Self {
            gram: inst.a().tr_mul(inst.a()),
            aty: inst.correlations(inst.y()),
            yy: inst.y().norm_squared(),
        }
    }

    /// Ridge value on `support` via `y'y − b_S'x_S` (no μ term).
    pub(crate) fn ridge_value(&self, gamma: f64, support: &[usize]) -> f64 {
        if support.is_empty() {
            return self.yy;
        }
        let s = support.len();
        let mut g = DMatrix::from_fn(s, s, |r, c| self.gram[(support[r], support[c])]);
        for d in 0..s {
            g[(d, d)] += 1.0 / gamma;
        }
        let b = DVector::from_fn(s, |r, _| self.aty[support[r]]);
        let xs = solve_spd(g, b.clone());
        self.yy - b.dot(&xs)
    }
}
