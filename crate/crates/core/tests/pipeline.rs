use l0screen::datagen::{gamma_zero, generate, SyntheticSpec};
use l0screen::exact::branch_and_bound_from;
use l0screen::screening::{apply_fixes, screen};
use l0screen::{branch_and_bound, heuristics, relax, BnBConfig, ProblemSpec, SolverConfig};

fn specs(gamma: f64) -> Vec<ProblemSpec> {
    vec![
        ProblemSpec::card(gamma, 4).unwrap(),
        ProblemSpec::card(gamma, 6).unwrap(),
        ProblemSpec::reg(gamma, 1.0).unwrap(),
        ProblemSpec::reg(gamma, 4.0).unwrap(),
    ]
}

#[test]
fn reduced_solve_lifts_to_the_full_optimum() {
    let mut fixed_total = 0;
    for seed in 0..4 {
        let data = generate(&SyntheticSpec { n: 40, m: 30, k_true: 4, rho: 0.5, snr: 6.0, seed }).unwrap();
        let inst = &data.instance;
        let gamma = 2.0 * gamma_zero(inst, 4).unwrap();
        for spec in specs(gamma) {
            let full = branch_and_bound(inst, &spec, &BnBConfig::default(), None).unwrap();
            assert!(full.optimal);

            let sol = relax::solve_relaxation(inst, &spec, &SolverConfig::default()).unwrap();
            let inc = heuristics::round(inst, &spec, &sol).unwrap();
            let report = screen(inst, &spec, &sol, inc.objective).unwrap();
            fixed_total += report.n_fixed();
            let reduced = apply_fixes(&report, inst, &spec).unwrap();
            let objective = match reduced.instance(inst).unwrap() {
                None => inst.y().norm_squared(),
                Some((sub, fixes)) => {
                    let stats = branch_and_bound_from(&sub, &spec, &BnBConfig::default(), &fixes, None).unwrap();
                    assert!(stats.optimal);
                    let x = reduced.lift(inst.n(), &stats.best.x);
                    let support: Vec<usize> = (0..inst.n()).filter(|&i| x[i] != 0.0).collect();
                    let lifted = spec.objective(inst, &support, &x).unwrap();
                    assert!((lifted - stats.best.objective).abs() <= 1e-9 * (1.0 + lifted));
                    lifted
                }
            };
            let tol = 1e-7 * (1.0 + full.best.objective);
            assert!(
                (objective - full.best.objective).abs() <= tol,
                "seed {seed} {spec:?}: reduced {objective} vs full {}",
                full.best.objective
            );
        }
    }
    assert!(fixed_total > 0, "screening fixed nothing; the test would be vacuous");
}
