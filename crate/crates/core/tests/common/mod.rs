#![allow(dead_code)]

use l0screen::{FixState, Instance, ProblemSpec};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Gaussian `A` scaled by `1/√m` and a response mixing a sparse signal with noise.
pub fn random_instance(rng: &mut impl Rng, m: usize, n: usize) -> Instance {
    let scale = 1.0 / (m as f64).sqrt();
    let a = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
    let beta = DVector::from_fn(n, |_, _| {
        if rng.random_bool(0.3) {
            rng.sample::<f64, _>(StandardNormal) * 2.0
        } else {
            0.0
        }
    });
    let noise = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal) * 0.5);
    Instance::new(a.clone(), &a * beta + noise).unwrap()
}

/// Reg with log-uniform `γ ∈ [0.01, 100]`, `μ ∈ [0.01, 10]`, or Card with `k` uniform in `1..=n`.
pub fn random_spec(rng: &mut impl Rng, n: usize, card: bool) -> ProblemSpec {
    let gamma = log_uniform(rng, 0.01, 100.0);
    if card {
        ProblemSpec::card(gamma, rng.random_range(1..=n)).unwrap()
    } else {
        ProblemSpec::reg(gamma, log_uniform(rng, 0.01, 10.0)).unwrap()
    }
}

/// First fix that contradicts some optimal support, if any.
pub fn violation(fixes: &[FixState], optimal: &[Vec<usize>]) -> Option<String> {
    for (i, f) in fixes.iter().enumerate() {
        for s in optimal {
            let inside = s.contains(&i);
            match f {
                FixState::Zero if inside => return Some(format!("x{i} fixed to 0 but optimal support {s:?} uses it")),
                FixState::One if !inside => return Some(format!("x{i} fixed to 1 but optimal support {s:?} omits it")),
                _ => {}
            }
        }
    }
    None
}
