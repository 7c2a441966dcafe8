use tubal::lab::{gaussian_bound, rand_low_tubal, rel_error, FactorScale};
use tubal::solve::LinearStrategy;
use tubal::{
    make_bernoulli_mask, make_gaussian_map, solve_completion, solve_gaussian, tnn, tubal_rank, AdmmConfig,
    Dims,
};

#[test]
fn gaussian_recovery_at_the_measurement_bound() {
    let d = Dims::new(10, 10, 5).unwrap();
    let x0 = rand_low_tubal(d, 2, 17, FactorScale::Unit).unwrap();
    let m = gaussian_bound(10, 10, 5, 2) as usize;
    assert_eq!(m, 541);
    let map = make_gaussian_map(m, d, 17).unwrap();
    let cfg = AdmmConfig {
        record_history: true,
        ..AdmmConfig::default()
    };
    let sol = solve_gaussian(&map, &map.apply(&x0).unwrap(), &cfg).unwrap();
    assert!(rel_error(&sol.x, &x0) <= 1e-6);
    assert_eq!(tubal_rank(&sol.x, 1e-3).unwrap(), 2);
    assert!(tnn(&sol.x) <= tnn(&x0) * (1.0 + 1e-6));

    let r = &sol.report;
    assert!(r.converged && r.residuals.all_below(cfg.eps));
    assert_eq!(r.history.len(), r.iterations);
    for (k, rec) in r.history.iter().enumerate() {
        assert_eq!(rec.mu, cfg.mu_at(k));
        assert_eq!(rec.mu, (cfg.mu0 * cfg.rho.powi(k as i32)).min(cfg.mu_max));
    }
    assert!((r.objective - tnn(&sol.x)).abs() <= 1e-12 * r.objective);
}

#[test]
fn tiny_gaussian_instance() {
    let d = Dims::new(4, 4, 2).unwrap();
    let m = gaussian_bound(4, 4, 2, 1) as usize;
    assert_eq!(m, 43);
    for seed in 0..3 {
        let x0 = rand_low_tubal(d, 1, seed, FactorScale::Unit).unwrap();
        let map = make_gaussian_map(m, d, seed).unwrap();
        let sol = solve_gaussian(&map, &map.apply(&x0).unwrap(), &AdmmConfig::default()).unwrap();
        assert!(rel_error(&sol.x, &x0) <= 1e-5, "seed {seed}");
    }
}

#[test]
fn linear_strategies_give_the_same_iterates() {
    let d = Dims::new(5, 5, 3).unwrap();
    let x0 = rand_low_tubal(d, 1, 4, FactorScale::Unit).unwrap();
    let map = make_gaussian_map(60, d, 4).unwrap();
    let y = map.apply(&x0).unwrap();
    let run = |linear| {
        let cfg = AdmmConfig {
            linear,
            ..AdmmConfig::default()
        };
        solve_gaussian(&map, &y, &cfg).unwrap()
    };
    let a = run(LinearStrategy::Direct);
    let b = run(LinearStrategy::Woodbury);
    assert!(a.x.max_abs_diff(&b.x) <= 1e-8);
    assert!(rel_error(&a.x, &x0) <= 1e-6);
}

#[test]
fn completion_with_every_entry_observed() {
    let d = Dims::new(8, 7, 4).unwrap();
    let x0 = rand_low_tubal(d, 2, 8, FactorScale::InvN).unwrap();
    let mask = make_bernoulli_mask(d, 1.0, 8).unwrap();
    let sol = solve_completion(&mask, &x0, &AdmmConfig::default()).unwrap();
    assert!(rel_error(&sol.x, &x0) <= 1e-6);
}

#[test]
fn completion_of_a_moderate_instance() {
    let d = Dims::new(20, 20, 20).unwrap();
    let x0 = rand_low_tubal(d, 2, 12, FactorScale::InvN).unwrap();
    let mask = make_bernoulli_mask(d, 0.6, 12).unwrap();
    let sol = solve_completion(&mask, &mask.proj_omega(&x0).unwrap(), &AdmmConfig::default()).unwrap();
    assert!(rel_error(&sol.x, &x0) <= 1e-5);
    assert_eq!(tubal_rank(&sol.x, 1e-3).unwrap(), 2);
    assert!(tnn(&sol.x) <= tnn(&x0) * (1.0 + 1e-6));
    // Observed entries are reproduced.
    let resid = &mask.proj_omega(&sol.x).unwrap() - &mask.proj_omega(&x0).unwrap();
    assert!(resid.max_abs() <= 1e-7);
}

#[test]
fn iteration_cap_returns_last_iterate() {
    let d = Dims::new(6, 6, 3).unwrap();
    let x0 = rand_low_tubal(d, 2, 3, FactorScale::Unit).unwrap();
    let map = make_gaussian_map(80, d, 3).unwrap();
    let cfg = AdmmConfig {
        max_iter: 5,
        ..AdmmConfig::default()
    };
    match solve_gaussian(&map, &map.apply(&x0).unwrap(), &cfg) {
        Err(tubal::Error::NotConverged(sol)) => {
            assert_eq!(sol.report.iterations, 5);
            assert!(!sol.report.converged);
            assert_eq!(sol.x.dims(), d);
        }
        other => panic!("expected NotConverged, got {other:?}"),
    }
}
