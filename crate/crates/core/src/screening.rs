//! Safe screening rules.
//!
//! Given a certified lower bound `L` on the perspective relaxation (with the
//! residual `ε̄` that certifies it) and an upper bound `ζ̄` from any feasible
//! solution, each variable gets a lower bound on the relaxation with its
//! indicator forced to the opposite value. When that bound exceeds `ζ̄`, no
//! optimal solution can take the opposite value and the variable is fixed.
//!
//! With `δ_i = (A_i'ε̄)²`:
//!
//! * regularized: `Zero` if `L + μ − γδ_i > ζ̄`, `One` if `L − μ + γδ_i > ζ̄`
//! * cardinality: `Zero` if `δ_i ≤ δ_[k+1]` and `L − γ(δ_i − δ_[k]) > ζ̄`,
//!   `One` if `δ_i ≥ δ_[k]` and `L + γ(δ_i − δ_[k+1]) > ζ̄`
//!
//! where `δ_[j]` is the `j`-th largest entry. The rules cost one pass over the
//! variables plus a linear-time selection once `δ` is known.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::problem::{deltas_from_residual, FixState, Instance, ProblemSpec};
use crate::relax::Certificate;
use crate::select::kth_largest_pair;

/// Subtracted from the left side of every rule so that rounding can only make
/// screening more conservative.
pub const SCREEN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenReport {
    pub fixes: Vec<FixState>,
    pub n_zero: usize,
    pub n_one: usize,
    pub n_free: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `δ_[k]` among free variables (cardinality variant only).
    pub delta_k: Option<f64>,
    /// `δ_[k+1]` among free variables; `-inf` when the budget covers all of them.
    pub delta_k1: Option<f64>,
}

impl ScreenReport {
    fn new(fixes: Vec<FixState>, lower: f64, upper: f64, dk: Option<(f64, f64)>) -> Self {
        let count = |s| fixes.iter().filter(|&&f| f == s).count();
        Self {
            n_zero: count(FixState::Zero),
            n_one: count(FixState::One),
            n_free: count(FixState::Free),
            fixes,
            lower_bound: lower,
            upper_bound: upper,
            delta_k: dk.map(|d| d.0),
            delta_k1: dk.map(|d| d.1),
        }
    }

    /// Number of variables fixed either way.
    pub fn n_fixed(&self) -> usize {
        self.n_zero + self.n_one
    }
}

fn check_bounds(lower: f64, upper: f64) -> Result<()> {
    if lower.is_nan() || upper.is_nan() {
        return Err(invalid("screening bounds must not be NaN"));
    }
    if upper < lower - 1e-9 * (1.0 + upper.abs()) {
        return Err(Error::InconsistentBounds { lower, upper });
    }
    Ok(())
}

/// Regularized rule over precomputed `δ`; `O(n)`.
pub fn reg_rules(delta: &[f64], gamma: f64, mu: f64, lower: f64, upper: f64) -> Vec<FixState> {
    delta.iter().map(|&d| reg_rule(d, gamma, mu, lower, upper)).collect()
}

fn reg_rule(delta: f64, gamma: f64, mu: f64, lower: f64, upper: f64) -> FixState {
    let slack = mu - gamma * delta;
    if lower + slack - SCREEN_SLACK > upper {
        FixState::Zero
    } else if lower - slack - SCREEN_SLACK > upper {
        FixState::One
    } else {
        FixState::Free
    }
}

/// Cardinality rule over precomputed `δ`; `O(n)` including the selection.
///
/// Returns the fixes with `(δ_[k], δ_[k+1])`. When `k = n` the second value
/// is `-inf`, the `Zero` rule is vacuous, and the `One` rule compares against
/// zero (the value a missing `(k+1)`-st entry contributes to the dual).
pub fn card_rules(delta: &[f64], gamma: f64, k: usize, lower: f64, upper: f64) -> Result<(Vec<FixState>, f64, f64)> {
    let (dk, dk1) = kth_largest_pair(delta, k)?;
    let fixes = delta
        .iter()
        .map(|&d| card_rule(d, gamma, dk, dk1, lower, upper))
        .collect();
    Ok((fixes, dk, dk1))
}

fn card_rule(delta: f64, gamma: f64, dk: f64, dk1: f64, lower: f64, upper: f64) -> FixState {
    let slack_budget = dk1 == f64::NEG_INFINITY;
    if !slack_budget && delta <= dk1 && lower - gamma * (delta - dk) - SCREEN_SLACK > upper {
        return FixState::Zero;
    }
    let next = if slack_budget { 0.0 } else { dk1 };
    if delta >= dk && lower + gamma * (delta - next) - SCREEN_SLACK > upper {
        return FixState::One;
    }
    FixState::Free
}

/// Screens the regularized problem.
pub fn screen_reg(
    inst: &Instance,
    gamma: f64,
    mu: f64,
    cert: &impl Certificate,
    zeta_bar: f64,
) -> Result<ScreenReport> {
    let spec = ProblemSpec::reg(gamma, mu)?;
    screen(inst, &spec, cert, zeta_bar)
}

/// Screens the cardinality-constrained problem.
pub fn screen_card(
    inst: &Instance,
    gamma: f64,
    k: usize,
    cert: &impl Certificate,
    zeta_bar: f64,
) -> Result<ScreenReport> {
    let spec = ProblemSpec::card(gamma, k)?;
    screen(inst, &spec, cert, zeta_bar)
}

pub fn screen(inst: &Instance, spec: &ProblemSpec, cert: &impl Certificate, zeta_bar: f64) -> Result<ScreenReport> {
    spec.validate_for(inst)?;
    screen_restricted(inst, spec, &vec![FixState::Free; inst.n()], cert, zeta_bar)
}

/// Screens the free variables of a problem that already has some fixes.
///
/// `cert` must certify the relaxation restricted by `fixes`. Existing fixes
/// are kept. In the cardinality variant the budget is `k` minus the variables
/// already fixed to one, and order statistics are taken over free variables.
pub fn screen_restricted(
    inst: &Instance,
    spec: &ProblemSpec,
    fixes: &[FixState],
    cert: &impl Certificate,
    zeta_bar: f64,
) -> Result<ScreenReport> {
    if fixes.len() != inst.n() {
        return Err(invalid(format!(
            "fix vector has length {}, expected n = {}",
            fixes.len(),
            inst.n()
        )));
    }
    let eps: &DVector<f64> = cert.epsilon_bar();
    if eps.len() != inst.m() {
        return Err(invalid(format!(
            "certificate residual has length {}, expected m = {}",
            eps.len(),
            inst.m()
        )));
    }
    let lower = cert.lower_bound();
    check_bounds(lower, zeta_bar)?;
    let delta = deltas_from_residual(inst, eps);
    let free: Vec<usize> = (0..inst.n()).filter(|&i| fixes[i] == FixState::Free).collect();
    let mut out = fixes.to_vec();

    let order_stats = match *spec {
        ProblemSpec::Reg { gamma, mu } => {
            for &i in &free {
                out[i] = reg_rule(delta[i], gamma, mu, lower, zeta_bar);
            }
            None
        }
        ProblemSpec::Card { gamma, k } => {
            let ones = fixes.iter().filter(|&&f| f == FixState::One).count();
            let budget = k.checked_sub(ones).ok_or_else(|| {
                Error::Infeasible(format!("{ones} variables fixed to one exceed k = {k}"))
            })?;
            if free.is_empty() {
                None
            } else if budget == 0 {
                for &i in &free {
                    out[i] = FixState::Zero;
                }
                None
            } else {
                let free_delta: Vec<f64> = free.iter().map(|&i| delta[i]).collect();
                let budget = budget.min(free.len());
                let (rules, dk, dk1) = card_rules(&free_delta, gamma, budget, lower, zeta_bar)?;
                for (&i, f) in free.iter().zip(rules) {
                    out[i] = f;
                }
                Some((dk, dk1))
            }
        }
    };
    let report = ScreenReport::new(out, lower, zeta_bar, order_stats);
    if let ProblemSpec::Card { k, .. } = *spec {
        if report.n_one > k {
            return Err(Error::Infeasible(format!(
                "screening fixed {} variables to one with k = {k}",
                report.n_one
            )));
        }
    }
    Ok(report)
}

/// A problem with screened variables removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedProblem {
    /// Original index of each remaining free variable, in reduced order.
    pub index_map: Vec<usize>,
    /// Original indices of variables fixed to one.
    pub forced: Vec<usize>,
    /// Cardinality budget left for the free variables.
    pub budget: Option<usize>,
    /// `μ` times the number of forced variables (regularized variant).
    pub constant: f64,
}

impl ReducedProblem {
    /// Number of free variables left.
    pub fn n(&self) -> usize {
        self.index_map.len()
    }

    /// Reduced index of an original variable, if it is still free.
    pub fn to_reduced(&self, original: usize) -> Option<usize> {
        self.index_map.iter().position(|&o| o == original)
    }

    /// Data for solving the reduced problem: free columns first (in
    /// `index_map` order), then forced columns, with matching fixes.
    /// `None` when every variable was fixed to zero.
    pub fn instance(&self, inst: &Instance) -> Result<Option<(Instance, Vec<FixState>)>> {
        let cols: Vec<usize> = self.index_map.iter().chain(&self.forced).copied().collect();
        if cols.is_empty() {
            return Ok(None);
        }
        let sub = inst.select_columns(&cols)?;
        let mut fixes = vec![FixState::Free; self.index_map.len()];
        fixes.extend(std::iter::repeat_n(FixState::One, self.forced.len()));
        Ok(Some((sub, fixes)))
    }

    /// Maps coefficients of the reduced instance (free then forced) back to length `n`.
    pub fn lift(&self, n: usize, reduced: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(n);
        for (j, &i) in self.index_map.iter().chain(&self.forced).enumerate() {
            x[i] = reduced[j];
        }
        x
    }
}

/// Removes `Zero` variables and records `One` variables as forced in.
pub fn apply_fixes(report: &ScreenReport, inst: &Instance, spec: &ProblemSpec) -> Result<ReducedProblem> {
    if report.fixes.len() != inst.n() {
        return Err(invalid(format!(
            "report covers {} variables, instance has {}",
            report.fixes.len(),
            inst.n()
        )));
    }
    let mut index_map = Vec::new();
    let mut forced = Vec::new();
    for (i, f) in report.fixes.iter().enumerate() {
        match f {
            FixState::Free => index_map.push(i),
            FixState::One => forced.push(i),
            FixState::Zero => {}
        }
    }
    let (budget, constant) = match *spec {
        ProblemSpec::Reg { mu, .. } => (None, mu * forced.len() as f64),
        ProblemSpec::Card { k, .. } => {
            let left = k.checked_sub(forced.len()).ok_or_else(|| {
                Error::Infeasible(format!("{} variables fixed to one exceed k = {k}", forced.len()))
            })?;
            (Some(left), 0.0)
        }
    };
    Ok(ReducedProblem {
        index_map,
        forced,
        budget,
        constant,
    })
}
