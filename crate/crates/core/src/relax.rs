//! Perspective relaxations and their certified dual bounds.
//!
//! The regularized relaxation
//!
//! ```text
//! min_{x, z ∈ [0,1]ⁿ}  ‖y − Ax‖² + (1/γ) Σ x_i²/z_i + μ Σ z_i
//! ```
//!
//! is solved in `x` alone after eliminating `z` into the reverse Huber
//! penalty, using accelerated proximal gradient with function-value restart.
//! The cardinality relaxation (`Σ z_i ≤ k`, no `μ`) is solved by bisection
//! on the multiplier of the budget constraint, reusing the regularized
//! solver with `μ = λ`.
//!
//! Lower bounds come from the Fenchel dual evaluated at `p = 2γA'ε̄`. For any
//! residual candidate `ε̄`,
//!
//! ```text
//! reg:   2ε̄'y − ‖ε̄‖² + Σ_i min{0, μ − γ(A_i'ε̄)²}
//! card:  2ε̄'y − ‖ε̄‖² − γ · (sum of the k largest (A_i'ε̄)²)
//! ```
//!
//! never exceeds the relaxation optimum, and is exact at the optimal
//! residual. Screening consumes these bounds rather than primal values, so an
//! inexact solve can only weaken the fixings it enables.
//!
//! Every solver here also accepts per-variable fixes: `Zero` columns are
//! dropped, `One` columns pay the plain ridge term (plus `μ`, or one slot of
//! the budget), and `Free` columns keep the relaxed treatment. This is the node
//! relaxation used by branch-and-bound.

use std::time::Instant;

use nalgebra::DVector;

use crate::berhu::{ridge_prox, BerhuPenalty};
use crate::error::{invalid, Error, Result};
use crate::problem::{ridge_restricted_solve, FixState, Instance, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Target relative primal–dual gap `(P − D)/(1 + |P|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Lipschitz constant of the gradient of `‖y − Ax‖²`; estimated by power
    /// iteration when absent.
    pub lipschitz: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50_000,
            lipschitz: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid(format!("solver tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(invalid("solver max_iter must be positive"));
        }
        if let Some(l) = self.lipschitz {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid(format!("lipschitz constant must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

/// A residual candidate together with the dual value it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub epsilon_bar: DVector<f64>,
    pub lower_bound: f64,
}

/// Anything that carries a residual `ε̄` and its certified lower bound.
pub trait Certificate {
    fn epsilon_bar(&self) -> &DVector<f64>;
    fn lower_bound(&self) -> f64;
}

impl Certificate for DualCertificate {
    fn epsilon_bar(&self) -> &DVector<f64> {
        &self.epsilon_bar
    }
    fn lower_bound(&self) -> f64 {
        self.lower_bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxSolution {
    pub x: DVector<f64>,
    /// Relaxed indicators in `[0, 1]`.
    pub z: DVector<f64>,
    /// `y − Ax`.
    pub epsilon: DVector<f64>,
    /// Primal objective of the relaxation at `(x, z)`.
    pub objective: f64,
    /// Dual value certified by `epsilon`; always a valid lower bound.
    pub lower_bound: f64,
    /// Budget multiplier for the cardinality variant.
    pub lambda: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl RelaxSolution {
    pub fn gap(&self) -> f64 {
        self.objective - self.lower_bound
    }

    pub fn relative_gap(&self) -> f64 {
        self.gap() / (1.0 + self.objective.abs())
    }

    pub fn certificate(&self) -> DualCertificate {
        DualCertificate {
            epsilon_bar: self.epsilon.clone(),
            lower_bound: self.lower_bound,
        }
    }
}

impl Certificate for RelaxSolution {
    fn epsilon_bar(&self) -> &DVector<f64> {
        &self.epsilon
    }
    fn lower_bound(&self) -> f64 {
        self.lower_bound
    }
}

/// `p = 2γA'ε̄`, the dual point matching residual `ε̄`.
pub fn dual_from_primal(gamma: f64, inst: &Instance, epsilon_bar: &DVector<f64>) -> Result<DVector<f64>> {
    check_residual(inst, epsilon_bar)?;
    Ok(inst.correlations(epsilon_bar) * (2.0 * gamma))
}

/// Dual bound for the regularized relaxation at an arbitrary residual.
pub fn certified_lower_bound_reg(inst: &Instance, gamma: f64, mu: f64, epsilon_bar: &DVector<f64>) -> Result<f64> {
    certified_lower_bound(inst, &ProblemSpec::Reg { gamma, mu }, &all_free(inst), epsilon_bar)
}

/// Dual bound for the cardinality relaxation at an arbitrary residual.
pub fn certified_lower_bound_card(inst: &Instance, gamma: f64, k: usize, epsilon_bar: &DVector<f64>) -> Result<f64> {
    certified_lower_bound(inst, &ProblemSpec::Card { gamma, k }, &all_free(inst), epsilon_bar)
}

/// Dual bound of the relaxation restricted by `fixes`, at an arbitrary residual.
pub fn certified_lower_bound(
    inst: &Instance,
    spec: &ProblemSpec,
    fixes: &[FixState],
    epsilon_bar: &DVector<f64>,
) -> Result<f64> {
    check_residual(inst, epsilon_bar)?;
    check_fixes(inst, fixes)?;
    let corr = inst.correlations(epsilon_bar);
    let dual = match *spec {
        ProblemSpec::Reg { gamma, mu } => dual_reg(inst, gamma, mu, fixes, epsilon_bar, &corr),
        ProblemSpec::Card { gamma, k } => {
            let budget = card_budget(fixes, k)?;
            dual_card(inst, gamma, budget, fixes, epsilon_bar, &corr)
        }
    };
    Ok(dual)
}

/// Solves the regularized perspective relaxation.
pub fn solve_cr(inst: &Instance, gamma: f64, mu: f64, cfg: &SolverConfig) -> Result<RelaxSolution> {
    let spec = ProblemSpec::reg(gamma, mu)?;
    solve_restricted(inst, &spec, &all_free(inst), cfg, None)
}

/// Solves the cardinality-constrained perspective relaxation.
pub fn solve_cc(inst: &Instance, gamma: f64, k: usize, cfg: &SolverConfig) -> Result<RelaxSolution> {
    let spec = ProblemSpec::card(gamma, k)?;
    spec.validate_for(inst)?;
    solve_restricted(inst, &spec, &all_free(inst), cfg, None)
}

/// Solves the relaxation of either variant with no fixes.
pub fn solve_relaxation(inst: &Instance, spec: &ProblemSpec, cfg: &SolverConfig) -> Result<RelaxSolution> {
    spec.validate_for(inst)?;
    solve_restricted(inst, spec, &all_free(inst), cfg, None)
}

/// Solves the relaxation under per-variable fixes, optionally warm-started.
///
/// Returns [`Error::Infeasible`] for a cardinality problem with more than `k`
/// variables fixed to one.
pub fn solve_restricted(
    inst: &Instance,
    spec: &ProblemSpec,
    fixes: &[FixState],
    cfg: &SolverConfig,
    warm: Option<&DVector<f64>>,
) -> Result<RelaxSolution> {
    solve_restricted_until(inst, spec, fixes, cfg, warm, None)
}

pub(crate) fn solve_restricted_until(
    inst: &Instance,
    spec: &ProblemSpec,
    fixes: &[FixState],
    cfg: &SolverConfig,
    warm: Option<&DVector<f64>>,
    deadline: Option<Instant>,
) -> Result<RelaxSolution> {
    cfg.validate()?;
    check_fixes(inst, fixes)?;
    if let Some(w) = warm {
        inst.check_len(w, "warm start")?;
    }
    let gamma = spec.gamma();
    let lipschitz = cfg.lipschitz.unwrap_or_else(|| lipschitz_constant(inst));
    let mut ctx = Ctx {
        inst,
        gamma,
        fixes,
        lipschitz,
        deadline,
    };
    let x0 = match warm {
        Some(w) => w.clone(),
        None => DVector::zeros(inst.n()),
    };
    match *spec {
        ProblemSpec::Reg { mu, .. } => {
            if !(mu > 0.0) {
                return Err(invalid(format!("mu must be positive, got {mu}")));
            }
            Ok(ctx.solve_reg(mu, x0, cfg))
        }
        ProblemSpec::Card { k, .. } => {
            let budget = card_budget(fixes, k)?;
            Ok(ctx.solve_card(budget, x0, cfg))
        }
    }
}

/// `2 σ_max(A)²` estimated by power iteration on `A'A`, padded by 1%.
pub fn lipschitz_constant(inst: &Instance) -> f64 {
    let n = inst.n();
    // deterministic start that is unlikely to be orthogonal to the top eigenvector
    let mut v = DVector::from_fn(n, |i, _| 1.0 + ((i * 7919) % 101) as f64 / 101.0);
    v /= v.norm();
    let mut eig = 0.0;
    for _ in 0..100 {
        let w = inst.correlations(&inst.predict(&v));
        let next = w.norm();
        if next == 0.0 {
            eig = 0.0;
            break;
        }
        v = w / next;
        let done = (next - eig).abs() <= 1e-10 * next;
        eig = next;
        if done {
            break;
        }
    }
    (2.0 * eig * 1.01).max(1e-12)
}

fn all_free(inst: &Instance) -> Vec<FixState> {
    vec![FixState::Free; inst.n()]
}

fn check_residual(inst: &Instance, eps: &DVector<f64>) -> Result<()> {
    if eps.len() != inst.m() {
        return Err(invalid(format!(
            "residual has length {}, expected m = {}",
            eps.len(),
            inst.m()
        )));
    }
    Ok(())
}

fn check_fixes(inst: &Instance, fixes: &[FixState]) -> Result<()> {
    if fixes.len() != inst.n() {
        return Err(invalid(format!(
            "fix vector has length {}, expected n = {}",
            fixes.len(),
            inst.n()
        )));
    }
    Ok(())
}

/// Budget left for free variables after the forced ones.
fn card_budget(fixes: &[FixState], k: usize) -> Result<usize> {
    let ones = fixes.iter().filter(|&&f| f == FixState::One).count();
    k.checked_sub(ones).ok_or_else(|| {
        Error::Infeasible(format!("{ones} variables fixed to one exceed the budget k = {k}"))
    })
}

fn dual_common(inst: &Instance, eps: &DVector<f64>) -> f64 {
    2.0 * eps.dot(inst.y()) - eps.norm_squared()
}

fn dual_reg(
    inst: &Instance,
    gamma: f64,
    mu: f64,
    fixes: &[FixState],
    eps: &DVector<f64>,
    corr: &DVector<f64>,
) -> f64 {
    let mut total = dual_common(inst, eps);
    for (i, f) in fixes.iter().enumerate() {
        let slack = mu - gamma * corr[i] * corr[i];
        match f {
            FixState::Free => total += slack.min(0.0),
            FixState::One => total += slack,
            FixState::Zero => {}
        }
    }
    total
}

fn dual_card(
    inst: &Instance,
    gamma: f64,
    budget: usize,
    fixes: &[FixState],
    eps: &DVector<f64>,
    corr: &DVector<f64>,
) -> f64 {
    let mut total = dual_common(inst, eps);
    let mut free = Vec::new();
    for (i, f) in fixes.iter().enumerate() {
        let d = corr[i] * corr[i];
        match f {
            FixState::Free => free.push(d),
            FixState::One => total -= gamma * d,
            FixState::Zero => {}
        }
    }
    total - gamma * sum_largest(&mut free, budget)
}

fn sum_largest(values: &mut [f64], k: usize) -> f64 {
    if k >= values.len() {
        return values.iter().sum();
    }
    if k == 0 {
        return 0.0;
    }
    values.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    values[..k].iter().sum()
}

/// `min Σ a_i²/z_i` over `z ∈ [0,1]ⁿ`, `Σ z ≤ k` (with `0/0 = 0`).
///
/// The minimizer is `z_i = min(1, a_i/θ)`; returns the value and `θ`
/// (`θ = 0` when at most `k` entries are nonzero).
fn water_fill(abs: &mut [f64], k: usize) -> (f64, f64) {
    abs.sort_unstable_by(|a, b| b.total_cmp(a));
    let nnz = abs.iter().take_while(|&&a| a > 0.0).count();
    if nnz <= k {
        return (abs.iter().map(|a| a * a).sum(), 0.0);
    }
    if k == 0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut tail: f64 = abs.iter().sum();
    let mut head_sq = 0.0;
    let mut fallback = None;
    for r in 0..k {
        let theta = tail / (k - r) as f64;
        let upper_ok = r == 0 || abs[r - 1] >= theta;
        if upper_ok && theta >= abs[r] {
            return (head_sq + theta * tail, theta);
        }
        if upper_ok {
            fallback = Some((head_sq + theta * tail, theta));
        }
        head_sq += abs[r] * abs[r];
        tail -= abs[r];
    }
    // rounding can defeat the interval test; the last consistent candidate is
    // then the right piece
    fallback.unwrap_or((head_sq, abs[k - 1]))
}

struct Ctx<'a> {
    inst: &'a Instance,
    gamma: f64,
    fixes: &'a [FixState],
    lipschitz: f64,
    deadline: Option<Instant>,
}

/// One converged (or abandoned) run of the proximal gradient method.
struct Inner {
    x: DVector<f64>,
    eps: DVector<f64>,
    corr: DVector<f64>,
    primal: f64,
    dual: f64,
    iterations: usize,
    converged: bool,
}

const GAP_CHECK_EVERY: usize = 10;

impl Ctx<'_> {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn penalty_reg(&self, pen: &BerhuPenalty, x: &DVector<f64>) -> f64 {
        let mut total = 0.0;
        for (i, f) in self.fixes.iter().enumerate() {
            match f {
                FixState::Free => total += pen.value(x[i]),
                FixState::One => total += x[i] * x[i] / self.gamma + pen.mu(),
                FixState::Zero => {}
            }
        }
        total
    }

    fn prox_into(&self, pen: &BerhuPenalty, t: f64, v: &DVector<f64>, out: &mut DVector<f64>) {
        for (i, f) in self.fixes.iter().enumerate() {
            out[i] = match f {
                FixState::Free => pen.prox(t, v[i]),
                FixState::One => ridge_prox(self.gamma, t, v[i]),
                FixState::Zero => 0.0,
            };
        }
    }

    /// Exact solve when no variable is free: ridge on the forced columns.
    fn solve_fixed(&self) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let forced: Vec<usize> = (0..self.inst.n())
            .filter(|&i| self.fixes[i] == FixState::One)
            .collect();
        let x = ridge_restricted_solve(self.inst, self.gamma, &forced)
            .map(|f| f.x)
            .unwrap_or_else(|_| DVector::zeros(self.inst.n()));
        let eps = self.inst.y() - self.inst.predict(&x);
        let corr = self.inst.correlations(&eps);
        (x, eps, corr)
    }

    /// Accelerated proximal gradient on `‖y − Ax‖² + Σ B_μ(x_i)` under the fixes.
    fn fista(&mut self, mu: f64, x0: DVector<f64>, tol: f64, max_iter: usize) -> Inner {
        let inst = self.inst;
        let pen = BerhuPenalty::new(mu, self.gamma).expect("validated penalty parameters");
        let y = inst.y();

        if !self.fixes.contains(&FixState::Free) {
            let (x, eps, corr) = self.solve_fixed();
            let primal = eps.norm_squared() + self.penalty_reg(&pen, &x);
            let dual = dual_reg(inst, self.gamma, mu, self.fixes, &eps, &corr);
            return Inner {
                x,
                eps,
                corr,
                primal,
                dual: dual.min(primal),
                iterations: 0,
                converged: true,
            };
        }

        let mut x = x0;
        for (i, f) in self.fixes.iter().enumerate() {
            if *f == FixState::Zero {
                x[i] = 0.0;
            }
        }
        let mut ax = inst.predict(&x);
        let objective = |ax: &DVector<f64>, x: &DVector<f64>, ctx: &Ctx| {
            (ax - y).norm_squared() + ctx.penalty_reg(&pen, x)
        };
        let mut fx = objective(&ax, &x, self);
        let mut w = x.clone();
        let mut aw = ax.clone();
        let mut theta = 1.0f64;
        let mut plain = true;
        let mut step = 1.0 / self.lipschitz;
        let mut x_new = DVector::zeros(inst.n());

        let mut eps = y - &ax;
        let mut corr = inst.correlations(&eps);
        let mut dual = dual_reg(inst, self.gamma, mu, self.fixes, &eps, &corr);
        let mut converged = fx - dual <= tol * (1.0 + fx.abs());
        let mut iterations = 0;

        while !converged && iterations < max_iter {
            iterations += 1;
            let grad = inst.correlations(&(&aw - y)) * 2.0;
            let v = &w - &grad * step;
            self.prox_into(&pen, step, &v, &mut x_new);
            let ax_new = inst.predict(&x_new);
            let f_new = objective(&ax_new, &x_new, self);

            let mut accepted = true;
            if f_new > fx {
                if !plain {
                    // momentum overshot: drop it and retry from x
                    w.copy_from(&x);
                    aw.copy_from(&ax);
                    theta = 1.0;
                    plain = true;
                    accepted = false;
                } else if f_new > fx + 1e-12 * (1.0 + fx.abs()) {
                    // a plain step went uphill, so the step is too long
                    self.lipschitz *= 2.0;
                    step = 1.0 / self.lipschitz;
                    accepted = false;
                }
            }

            if accepted {
                let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
                let beta = (theta - 1.0) / theta_next;
                w = &x_new + (&x_new - &x) * beta;
                aw = &ax_new + (&ax_new - &ax) * beta;
                plain = beta == 0.0;
                theta = theta_next;
                x.copy_from(&x_new);
                ax = ax_new;
                fx = f_new;
            }

            if iterations % GAP_CHECK_EVERY == 0 || iterations == max_iter {
                eps = y - &ax;
                corr = inst.correlations(&eps);
                dual = dual_reg(inst, self.gamma, mu, self.fixes, &eps, &corr);
                converged = fx - dual <= tol * (1.0 + fx.abs());
                if self.expired() {
                    break;
                }
            }
        }
        eps = y - &ax;
        corr = inst.correlations(&eps);
        dual = dual_reg(inst, self.gamma, mu, self.fixes, &eps, &corr);
        Inner {
            primal: fx,
            converged: fx - dual <= tol * (1.0 + fx.abs()),
            x,
            eps,
            corr,
            dual,
            iterations,
        }
    }

    fn solve_reg(&mut self, mu: f64, x0: DVector<f64>, cfg: &SolverConfig) -> RelaxSolution {
        let inner = self.fista(mu, x0, cfg.tol, cfg.max_iter);
        let pen = BerhuPenalty::new(mu, self.gamma).expect("validated penalty parameters");
        let z = DVector::from_fn(self.inst.n(), |i, _| match self.fixes[i] {
            FixState::Free => pen.indicator(inner.x[i]),
            FixState::One => 1.0,
            FixState::Zero => 0.0,
        });
        RelaxSolution {
            x: inner.x,
            z,
            epsilon: inner.eps,
            objective: inner.primal,
            lower_bound: inner.dual,
            lambda: None,
            converged: inner.converged,
            iterations: inner.iterations,
        }
    }

    /// Primal value of the cardinality relaxation at `x`, with the optimal
    /// `z` for that `x`; returns `(value, θ)`.
    fn primal_card(&self, budget: usize, x: &DVector<f64>, eps: &DVector<f64>) -> (f64, f64) {
        let mut forced = 0.0;
        let mut free_abs = Vec::new();
        for (i, f) in self.fixes.iter().enumerate() {
            match f {
                FixState::Free => free_abs.push(x[i].abs()),
                FixState::One => forced += x[i] * x[i],
                FixState::Zero => {}
            }
        }
        let (persp, theta) = water_fill(&mut free_abs, budget);
        (eps.norm_squared() + (forced + persp) / self.gamma, theta)
    }

    fn card_solution(&self, budget: usize, inner: Inner, total_iters: usize, tol: f64) -> RelaxSolution {
        let (objective, theta) = self.primal_card(budget, &inner.x, &inner.eps);
        let lower = dual_card(self.inst, self.gamma, budget, self.fixes, &inner.eps, &inner.corr);
        let z = DVector::from_fn(self.inst.n(), |i, _| match self.fixes[i] {
            FixState::Free if inner.x[i] == 0.0 => 0.0,
            FixState::Free if theta == 0.0 => 1.0,
            FixState::Free => (inner.x[i].abs() / theta).min(1.0),
            FixState::One => 1.0,
            FixState::Zero => 0.0,
        });
        RelaxSolution {
            x: inner.x,
            z,
            epsilon: inner.eps,
            objective,
            lower_bound: lower,
            lambda: Some(theta * theta / self.gamma),
            converged: objective - lower <= tol * (1.0 + objective.abs()),
            iterations: total_iters,
        }
    }

    fn solve_card(&mut self, budget: usize, x0: DVector<f64>, cfg: &SolverConfig) -> RelaxSolution {
        let inner_tol = 0.1 * cfg.tol;
        let n_free = self.fixes.iter().filter(|&&f| f == FixState::Free).count();

        if budget == 0 && n_free > 0 {
            // no slot left: every free variable is effectively excluded
            let fixes: Vec<FixState> = self
                .fixes
                .iter()
                .map(|&f| if f == FixState::Free { FixState::Zero } else { f })
                .collect();
            let mut ctx = Ctx { fixes: &fixes, ..*self };
            let inner = ctx.fista(0.0, x0, inner_tol, cfg.max_iter);
            let iters = inner.iterations;
            return self.card_solution(budget, inner, iters, cfg.tol);
        }
        if budget >= n_free {
            // slack budget: λ = 0 and the relaxation is a plain ridge problem
            let inner = self.fista(0.0, x0, inner_tol, cfg.max_iter);
            let iters = inner.iterations;
            return self.card_solution(budget, inner, iters, cfg.tol);
        }

        let mut hi = self.lambda_upper();
        let mut lo = 0.0f64;
        let mut warm = x0;
        let mut best: Option<RelaxSolution> = None;
        let mut total_iters = 0;
        for _ in 0..200 {
            let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
            let inner = self.fista(mid, warm.clone(), inner_tol, cfg.max_iter);
            total_iters += inner.iterations;
            warm.copy_from(&inner.x);
            let knot = (self.gamma * mid).sqrt();
            let count: f64 = self
                .fixes
                .iter()
                .zip(inner.x.iter())
                .filter(|(f, _)| **f == FixState::Free)
                .map(|(_, &xi)| (xi.abs() / knot).min(1.0))
                .sum();
            let sol = self.card_solution(budget, inner, total_iters, cfg.tol);
            let better = best.as_ref().is_none_or(|b| sol.gap() < b.gap());
            let done = sol.converged;
            if better {
                best = Some(sol);
            }
            if done || self.expired() {
                break;
            }
            if count > budget as f64 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-10 * (1.0 + mid) {
                break;
            }
        }
        let mut best = best.expect("bisection runs at least once");
        best.iterations = total_iters;
        best
    }

    /// A multiplier at which every free coefficient is zero at the optimum:
    /// `γ · max_free (A_i'ε_f)² + 1`, with `ε_f` the residual of the forced-only fit.
    fn lambda_upper(&self) -> f64 {
        let (_, _, corr) = self.solve_fixed();
        let max_sq = self
            .fixes
            .iter()
            .zip(corr.iter())
            .filter(|(f, _)| **f == FixState::Free)
            .map(|(_, c)| c * c)
            .fold(0.0, f64::max);
        self.gamma * max_sq + 1.0
    }
}
