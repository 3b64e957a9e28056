mod common;

use common::random_instance;
use l0screen::problem::{delta_vector, objective_card, objective_reg, ridge_restricted_solve};
use l0screen::Instance;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn embed(n: usize, support: &[usize], coef: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(n);
    for (&i, &c) in support.iter().zip(coef) {
        x[i] = c;
    }
    x
}

/// Normal equations `(A_S'A_S + I/γ) b = A_S'y` by Cramer's rule on at most 3 columns.
fn cramer(inst: &Instance, gamma: f64, support: &[usize]) -> Vec<f64> {
    let a = inst.a();
    let k = support.len();
    let mut g = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for (r, &i) in support.iter().enumerate() {
        rhs[r] = a.column(i).dot(inst.y());
        for (c, &j) in support.iter().enumerate() {
            g[r][c] = a.column(i).dot(&a.column(j)) + if r == c { 1.0 / gamma } else { 0.0 };
        }
    }
    let det = |m: &Vec<Vec<f64>>| match k {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    };
    let d = det(&g);
    (0..k)
        .map(|c| {
            let mut m = g.clone();
            for r in 0..k {
                m[r][c] = rhs[r];
            }
            det(&m) / d
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ridge_fit_is_optimal_on_its_support(seed in any::<u64>(), mask in 1u8..8, gamma in 0.05f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 3, 3);
        let support: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
        let fit = ridge_restricted_solve(&inst, gamma, &support).unwrap();
        let oracle = cramer(&inst, gamma, &support);
        for (&i, &b) in support.iter().zip(&oracle) {
            prop_assert!((fit.x[i] - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
        let best = objective_reg(&inst, gamma, 0.0, &support, &fit.x).unwrap();
        prop_assert!((best - fit.value).abs() <= 1e-9 * (1.0 + best.abs()));
        // dense perturbation grid around the fit
        for step in [1e-3, 1e-1, 1.0] {
            for dir in 0..27usize {
                let delta: Vec<f64> = (0..3).map(|d| ((dir / 3usize.pow(d)) % 3) as f64 - 1.0).collect();
                let mut x = fit.x.clone();
                for &i in &support {
                    x[i] += step * delta[i];
                }
                let other = objective_reg(&inst, gamma, 0.0, &support, &x).unwrap();
                prop_assert!(best <= other + 1e-9 * (1.0 + other.abs()));
            }
        }
    }

    #[test]
    fn card_objective_is_reg_without_penalty(seed in any::<u64>(), mask in 0u16..64, gamma in 0.01f64..100.0, mu in 0.01f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 5, 6);
        let support: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
        let coef: Vec<f64> = support.iter().map(|_| rng.random_range(-3.0..3.0)).collect();
        let x = embed(6, &support, &coef);
        let reg = objective_reg(&inst, gamma, mu, &support, &x).unwrap();
        let card = objective_card(&inst, gamma, 6, &support, &x).unwrap();
        prop_assert!((card - (reg - mu * support.len() as f64)).abs() <= 1e-9 * (1.0 + reg.abs()));
    }

    #[test]
    fn deltas_ignore_row_order(seed in any::<u64>(), m in 1usize..12, n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, m, n);
        let x = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let a = DMatrix::from_fn(m, n, |r, c| inst.a()[(perm[r], c)]);
        let y = DVector::from_fn(m, |r, _| inst.y()[perm[r]]);
        let shuffled = Instance::new(a, y).unwrap();
        let (_, d1) = delta_vector(&inst, &x).unwrap();
        let (_, d2) = delta_vector(&shuffled, &x).unwrap();
        for i in 0..n {
            prop_assert!((d1[i] - d2[i]).abs() <= 1e-12 * (1.0 + d1[i].abs()));
        }
    }
}
