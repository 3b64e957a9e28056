//! Feasible solutions (upper bounds) from relaxation certificates.

use std::cmp::Ordering;

use nalgebra::DVector;

use crate::error::Result;
use crate::problem::{deltas_from_residual, FixState, GramCache, Incumbent, Instance, ProblemSpec};
use crate::relax::Certificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HeuristicConfig {
    /// Rounds of single-swap local search after rounding; 0 disables it.
    pub swap_rounds: usize,
}

/// Keeps the `k` largest `δ` (ties to the lower index) and refits by ridge.
pub fn round_card(inst: &Instance, gamma: f64, k: usize, relax: &impl Certificate) -> Result<Incumbent> {
    let spec = ProblemSpec::card(gamma, k)?;
    spec.validate_for(inst)?;
    round_restricted(inst, &spec, &vec![FixState::Free; inst.n()], relax)
}

/// Keeps every variable whose dual slack `μ − γδ_i` is not positive.
pub fn round_reg(inst: &Instance, gamma: f64, mu: f64, relax: &impl Certificate) -> Result<Incumbent> {
    let spec = ProblemSpec::reg(gamma, mu)?;
    round_restricted(inst, &spec, &vec![FixState::Free; inst.n()], relax)
}

pub fn round(inst: &Instance, spec: &ProblemSpec, relax: &impl Certificate) -> Result<Incumbent> {
    spec.validate_for(inst)?;
    round_restricted(inst, spec, &vec![FixState::Free; inst.n()], relax)
}

/// Rounding that honours fixes: forced variables are always kept, excluded
/// ones never, and the free ones are chosen as in [`round_card`] /
/// [`round_reg`] with the remaining budget.
pub fn round_restricted(
    inst: &Instance,
    spec: &ProblemSpec,
    fixes: &[FixState],
    relax: &impl Certificate,
) -> Result<Incumbent> {
    let delta = deltas_from_residual(inst, relax.epsilon_bar());
    let mut support: Vec<usize> = (0..inst.n()).filter(|&i| fixes[i] == FixState::One).collect();
    let free = (0..inst.n()).filter(|&i| fixes[i] == FixState::Free);
    match *spec {
        ProblemSpec::Reg { gamma, mu } => {
            support.extend(free.filter(|&i| gamma * delta[i] >= mu));
        }
        ProblemSpec::Card { k, .. } => {
            let budget = k.saturating_sub(support.len());
            let mut free: Vec<usize> = free.collect();
            free.sort_by(|&a, &b| by_delta_desc(&delta, a, b));
            support.extend(free.into_iter().take(budget));
        }
    }
    Incumbent::from_support(inst, spec, &support)
}

fn by_delta_desc(delta: &DVector<f64>, a: usize, b: usize) -> Ordering {
    delta[b].total_cmp(&delta[a]).then(a.cmp(&b))
}

/// Greedy local search from a feasible incumbent.
///
/// Each round evaluates every single move (swap one selected for one
/// unselected variable, or add one while the budget allows, for the
/// cardinality variant; add or drop one variable for the regularized variant)
/// and takes the best strictly improving one. Stops early at a local optimum.
pub fn local_search_swap(inst: &Instance, spec: &ProblemSpec, incumbent: &Incumbent, rounds: usize) -> Result<Incumbent> {
    let mut current = incumbent.clone();
    if rounds == 0 {
        return Ok(current);
    }
    let cache = GramCache::new(inst);
    let gamma = spec.gamma();
    let value = |s: &[usize]| -> f64 {
        let base = cache.ridge_value(gamma, s);
        match *spec {
            ProblemSpec::Reg { mu, .. } => base + mu * s.len() as f64,
            ProblemSpec::Card { .. } => base,
        }
    };
    for _ in 0..rounds {
        let inside = &current.support;
        let mut selected = vec![false; inst.n()];
        for &i in inside {
            selected[i] = true;
        }
        let outside: Vec<usize> = (0..inst.n()).filter(|&i| !selected[i]).collect();
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        match *spec {
            ProblemSpec::Card { k, .. } => {
                for (pos, _) in inside.iter().enumerate() {
                    for &i in &outside {
                        let mut s = inside.clone();
                        s[pos] = i;
                        candidates.push(s);
                    }
                }
                if inside.len() < k {
                    for &i in &outside {
                        let mut s = inside.clone();
                        s.push(i);
                        candidates.push(s);
                    }
                }
            }
            ProblemSpec::Reg { .. } => {
                for &i in &outside {
                    let mut s = inside.clone();
                    s.push(i);
                    candidates.push(s);
                }
                for pos in 0..inside.len() {
                    let mut s = inside.clone();
                    s.remove(pos);
                    candidates.push(s);
                }
            }
        }
        let best = candidates
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                (value(&s), s)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let Some((v, s)) = best else { break };
        if v >= current.objective - 1e-12 * (1.0 + current.objective.abs()) {
            break;
        }
        let next = Incumbent::from_support(inst, spec, &s)?;
        if next.objective >= current.objective {
            break;
        }
        current = next;
    }
    Ok(current)
}
