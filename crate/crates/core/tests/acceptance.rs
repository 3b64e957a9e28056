//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p l0screen --test acceptance`.

mod common;

use std::time::Instant;

use common::{log_uniform, random_instance, random_spec, violation};
use l0screen::datagen::{gamma_zero, generate, SyntheticSpec};
use l0screen::relax::{certified_lower_bound, solve_cc, solve_cr};
use l0screen::screening::{card_rules, reg_rules, screen};
use l0screen::{branch_and_bound, brute_force, heuristics, relax, BerhuPenalty, BnBConfig, FixState, ProblemSpec, SolverConfig};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// No fix contradicts any optimal support, with ζ̄ at the optimum and at the rounding value.
fn safety() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = SolverConfig::default();
    let trials = 1000;
    let mut fixed = 0usize;
    for t in 0..trials {
        let n = rng.random_range(1..=12);
        let m = rng.random_range(1..=30);
        let inst = random_instance(&mut rng, m, n);
        let spec = random_spec(&mut rng, n, t % 2 == 1);
        let bf = brute_force(&inst, &spec).map_err(|e| e.to_string())?;
        let sol = relax::solve_relaxation(&inst, &spec, &cfg).map_err(|e| e.to_string())?;
        let heuristic = heuristics::round(&inst, &spec, &sol).map_err(|e| e.to_string())?.objective;
        for (label, zeta) in [("exact", bf.best.objective), ("heuristic", heuristic)] {
            let rep = screen(&inst, &spec, &sol, zeta).map_err(|e| format!("trial {t}: {e}"))?;
            if let Some(v) = violation(&rep.fixes, &bf.optimal_supports) {
                return Err(format!("trial {t} ({label} ζ̄, {spec:?}): {v}"));
            }
            fixed += rep.n_fixed();
        }
    }
    Ok(format!("{trials} instances x 2 upper bounds, 0 violations, {fixed} fixes checked"))
}

/// Relaxation gaps close to 1e-8 and random residuals never certify above the primal value.
fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    let instances = 24;
    for t in 0..instances {
        let n = rng.random_range(5..=200);
        let m = rng.random_range(5..=100);
        let inst = random_instance(&mut rng, m, n);
        let gamma = log_uniform(&mut rng, 0.1, 10.0);
        let (spec, sol) = if t % 2 == 0 {
            let mu = log_uniform(&mut rng, 0.01, 1.0);
            (ProblemSpec::reg(gamma, mu).unwrap(), solve_cr(&inst, gamma, mu, &cfg))
        } else {
            let k = rng.random_range(1..=n);
            (ProblemSpec::card(gamma, k).unwrap(), solve_cc(&inst, gamma, k, &cfg))
        };
        let sol = sol.map_err(|e| e.to_string())?;
        worst = worst.max(sol.relative_gap());
        if !(sol.relative_gap() <= 1e-8) || sol.gap() < -1e-9 * (1.0 + sol.objective.abs()) {
            return Err(format!("instance {t} ({spec:?}, {m}x{n}): relative gap {:.3e}", sol.relative_gap()));
        }
        let free = vec![FixState::Free; n];
        for _ in 0..20 {
            let scale = log_uniform(&mut rng, 0.01, 10.0);
            let eps = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
            let bound = certified_lower_bound(&inst, &spec, &free, &eps).map_err(|e| e.to_string())?;
            if bound > sol.objective + 1e-9 * (1.0 + sol.objective.abs()) {
                return Err(format!("instance {t}: random residual certifies {bound} > primal {}", sol.objective));
            }
        }
    }
    Ok(format!("{instances} instances, worst relative gap {worst:.2e}, 480 random residuals below primal"))
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form prox against 1-D golden-section minimization of `t·B(x) + ½(x − v)²`.
fn prox_oracle() -> Outcome {
    let logspace = |lo: f64, hi: f64, i: usize| 10f64.powf(lo + (hi - lo) * i as f64 / 9.0);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for i in 0..10 {
        for j in 0..10 {
            for l in 0..10 {
                let (mu, gamma, t) = (logspace(-2.0, 0.0, i), logspace(-1.0, 1.0, j), logspace(-2.0, 0.0, l));
                let pen = BerhuPenalty::new(mu, gamma).map_err(|e| e.to_string())?;
                // spans all three pieces: zero, soft-threshold, scaled
                let reach = pen.knot() + 2.0 * t * (mu / gamma).sqrt();
                for c in 0..10 {
                    let v = reach * (-1.5 + 3.0 * c as f64 / 9.0);
                    let f = |x: f64| t * pen.value(x) + 0.5 * (x - v).powi(2);
                    let oracle = golden_section(f, -v.abs() - 1.0, v.abs() + 1.0);
                    let err = (pen.prox(t, v) - oracle).abs();
                    worst = worst.max(err);
                    points += 1;
                    if err > 1e-6 {
                        return Err(format!("mu={mu} gamma={gamma} t={t} v={v}: prox {} vs {oracle}", pen.prox(t, v)));
                    }
                }
            }
        }
    }
    Ok(format!("{points} grid points, max |error| {worst:.2e}"))
}

/// Branch-and-bound objective equals brute force.
fn bnb_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = BnBConfig::default();
    let mut nodes = 0;
    for t in 0..100 {
        let n = rng.random_range(1..=12);
        let m = rng.random_range(1..=30);
        let inst = random_instance(&mut rng, m, n);
        let spec = random_spec(&mut rng, n, t % 2 == 1);
        let bf = brute_force(&inst, &spec).map_err(|e| e.to_string())?;
        let stats = branch_and_bound(&inst, &spec, &cfg, None).map_err(|e| e.to_string())?;
        nodes += stats.nodes_explored;
        let rel = (stats.best.objective - bf.best.objective).abs() / bf.best.objective.abs().max(1e-300);
        if !stats.optimal || rel > 1e-6 {
            return Err(format!(
                "instance {t} ({spec:?}): bnb {} (optimal={}) vs brute {}",
                stats.best.objective, stats.optimal, bf.best.objective
            ));
        }
    }
    Ok(format!("100 instances (50 per variant) agree, {nodes} nodes in total"))
}

fn fixed_at_root(spec: SyntheticSpec, gamma_exp: i32) -> Result<usize, String> {
    let data = generate(&spec).map_err(|e| e.to_string())?;
    let inst = &data.instance;
    let gamma = gamma_zero(inst, spec.k_true).map_err(|e| e.to_string())? * 2f64.powi(gamma_exp);
    let problem = ProblemSpec::card(gamma, spec.k_true).map_err(|e| e.to_string())?;
    let sol = relax::solve_relaxation(inst, &problem, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let inc = heuristics::round(inst, &problem, &sol).map_err(|e| e.to_string())?;
    Ok(screen(inst, &problem, &sol, inc.objective).map_err(|e| e.to_string())?.n_fixed())
}

/// Variables fixed at n = 1000, m = 500, γ = γ₀.
fn full_scale() -> Outcome {
    let mut total = 0;
    let mut count = 0;
    let mut cells = Vec::new();
    for k in [10, 30, 50] {
        for snr in [1.0, 6.0] {
            let mut cell = 0;
            for seed in 0..5 {
                let spec = SyntheticSpec { n: 1000, m: 500, k_true: k, rho: 0.5, snr, seed };
                cell += fixed_at_root(spec, 0)?;
                count += 1;
            }
            total += cell;
            cells.push(format!("k={k},snr={snr}:{:.0}", cell as f64 / 5.0));
        }
    }
    let avg = total as f64 / count as f64;
    check(avg >= 800.0, format!("average fixed {avg:.1} of 1000 (need >= 800); {}", cells.join(" ")))
}

/// Fewer variables fixed at γ = 16γ₀, SNR 0.05 than at γ = γ₀, SNR 6.
fn gamma_trend() -> Outcome {
    let pct = |snr: f64, gamma_exp: i32| -> Result<f64, String> {
        let mut sum = 0;
        for seed in 0..5 {
            let spec = SyntheticSpec { n: 1000, m: 500, k_true: 10, rho: 0.5, snr, seed: 100 + seed };
            sum += fixed_at_root(spec, gamma_exp)?;
        }
        Ok(100.0 * sum as f64 / 5000.0)
    };
    let (hard, easy) = (pct(0.05, 4)?, pct(6.0, 0)?);
    check(hard < easy, format!("fixed_pct {hard:.1}% at 16γ₀/SNR 0.05 vs {easy:.1}% at γ₀/SNR 6"))
}

/// Root screening shrinks the branch-and-bound tree.
fn speedup() -> Outcome {
    let mut ratios = Vec::new();
    let (mut on_total, mut off_total) = (0, 0);
    for seed in 0..20 {
        let data = generate(&SyntheticSpec { n: 60, m: 50, k_true: 15, rho: 0.5, snr: 6.0, seed }).map_err(|e| e.to_string())?;
        let inst = &data.instance;
        let spec = ProblemSpec::card(gamma_zero(inst, 15).map_err(|e| e.to_string())?, 15).map_err(|e| e.to_string())?;
        let run = |screen_at_root: bool| {
            let cfg = BnBConfig { screen_at_root, time_limit_s: 120.0, ..BnBConfig::default() };
            branch_and_bound(inst, &spec, &cfg, None).map_err(|e| e.to_string())
        };
        let (on, off) = (run(true)?, run(false)?);
        if !(on.optimal && off.optimal) {
            return Err(format!("seed {seed}: search hit its limit"));
        }
        if on.nodes_explored > off.nodes_explored {
            return Err(format!("seed {seed}: {} nodes with screening > {} without", on.nodes_explored, off.nodes_explored));
        }
        on_total += on.nodes_explored;
        off_total += off.nodes_explored;
        ratios.push(on.nodes_explored as f64 / off.nodes_explored as f64);
    }
    ratios.sort_by(f64::total_cmp);
    let median = 0.5 * (ratios[9] + ratios[10]);
    check(
        median <= 0.2,
        format!("median node ratio {median:.3} (need <= 0.2), never greater; {on_total} vs {off_total} nodes in total"),
    )
}

fn time_rules(n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let delta: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let (lower, upper) = (10.0, 10.5);
    let reps = 2_000_000 / n;
    let mut samples: Vec<f64> = (0..9)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..reps {
                std::hint::black_box(card_rules(std::hint::black_box(&delta), 2.0, n / 10, lower, upper).unwrap());
                std::hint::black_box(reg_rules(std::hint::black_box(&delta), 2.0, 1.0, lower, upper));
            }
            start.elapsed().as_secs_f64() / reps as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[4]
}

/// Rule application plus selection scales linearly.
fn linear_cost() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    time_rules(10_000, &mut rng);
    let small = time_rules(10_000, &mut rng);
    let large = time_rules(100_000, &mut rng);
    let ratio = large / small;
    check(
        ratio <= 15.0,
        format!("{:.1} us at n=1e4, {:.1} us at n=1e5, ratio {ratio:.2} (need <= 15)", small * 1e6, large * 1e6),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("safety of screening against brute force", safety),
        ("relaxation duality gap and certified bounds", duality),
        ("berhu prox against golden section", prox_oracle),
        ("branch-and-bound against brute force", bnb_oracle),
        ("screening effectiveness at n=1000", full_scale),
        ("fewer fixes at large gamma and low SNR", gamma_trend),
        ("root screening shrinks the search tree", speedup),
        ("linear-time screening rules", linear_cost),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}: {name} [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}: {name} [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
