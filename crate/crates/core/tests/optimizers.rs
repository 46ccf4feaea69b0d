use gmig_core::optim::{
    evaluate_population, ga_converged, ga_init, jgg_step, local_search, rex_child, rex_crossover, run_ga,
    sample_f_ini, GaConfig, LsConfig, LsMethod, Termination,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spd_quadratic(seed: u64, n: usize) -> (DMatrix<f64>, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let a = &m * m.transpose() + DMatrix::identity(n, n);
    let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    (a, b)
}

#[test]
fn newton_solves_parabola_in_one_step() {
    let f = |x: &[f64]| (x[0] - 3.0).powi(2);
    // A single iteration; the finite-difference Hessian leaves ~1e-8 of slack.
    let one = local_search(&f, &[0.0], &LsConfig::new(LsMethod::Newton, 1)).unwrap();
    assert_eq!(one.iterations, 1);
    assert!((one.theta[0] - 3.0).abs() < 1e-6, "{}", one.theta[0]);
    let full = local_search(&f, &[0.0], &LsConfig::gmig(LsMethod::Newton)).unwrap();
    assert_eq!(full.termination, Termination::Converged);
    assert!((full.theta[0] - 3.0).abs() < 1e-9);
}

#[test]
fn bfgs_on_spd_quadratic() {
    let (a, b) = spd_quadratic(3, 5);
    let f = |x: &[f64]| {
        let v = DVector::from_column_slice(x);
        0.5 * v.dot(&(&a * &v)) - b.dot(&v)
    };
    let mut cfg = LsConfig::new(LsMethod::Bfgs, 10);
    cfg.gtol = 1e-8;
    let res = local_search(&f, &[0.0; 5], &cfg).unwrap();
    let x = DVector::from_column_slice(&res.theta);
    let grad = &a * &x - &b;
    assert!(res.iterations <= 10);
    assert!(grad.norm() < 1e-8, "|g| = {:e}", grad.norm());
    let exact = a.clone().cholesky().unwrap().solve(&b);
    assert!((x - exact).norm() < 1e-7);
}

#[test]
fn nelder_mead_on_sphere() {
    let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
    let res = local_search(&f, &[1.0, 1.0], &LsConfig::new(LsMethod::NelderMead, 200)).unwrap();
    assert!(res.iterations <= 200);
    assert!(res.theta.iter().all(|v| v.abs() < 1e-4), "{:?}", res.theta);
}

#[test]
fn powell_on_separable_quadratic() {
    let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 2.0).powi(2) + 0.5 * (x[2] - 0.25).powi(2);
    let mut cfg = LsConfig::gmig(LsMethod::Powell);
    cfg.xtol = 1e-10;
    cfg.ftol = 1e-14;
    let res = local_search(&f, &[0.0; 3], &cfg).unwrap();
    for (x, t) in res.theta.iter().zip([1.0, -2.0, 0.25]) {
        assert!((x - t).abs() < 1e-6, "{:?}", res.theta);
    }
}

#[test]
fn budget_exhaustion_returns_best_so_far() {
    let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    for m in LsMethod::ALL {
        let res = local_search(&f, &[-1.2, 1.0], &LsConfig::new(m, 1)).unwrap();
        assert_eq!(res.iterations, 1);
        assert!(res.f <= f(&[-1.2, 1.0]));
    }
}

#[test]
fn f_ini_support_and_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let draws: Vec<f64> = (0..2_000_000).map(|_| sample_f_ini(&mut rng)).collect();
    assert!(draws.iter().all(|&v| (0.0..=1.001).contains(&v)));
    // Beta(0.99, 0.99) is only mildly U-shaped: about 3% more mass in a
    // width-0.018 bin near either edge than in the central one, some 6σ at
    // this size. The bins stay clear of the edges, where the uniform
    // admixture moves mass around.
    let count = |lo: f64, hi: f64| draws.iter().filter(|&&v| (lo..hi).contains(&v)).count();
    let (left, mid, right) = (count(0.002, 0.02), count(0.4915, 0.5095), count(0.982, 1.0));
    assert!(left > mid && right > mid, "{left} {mid} {right}");
}

#[test]
fn ga_init_population_and_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bounds = vec![(-2.0, 4.0); 5];
    let init = ga_init(&GaConfig::default(), &bounds, &[None; 5], &mut rng).unwrap();
    assert_eq!(init.len(), 50);
    for theta in &init {
        for &v in theta {
            assert!((-2.0..=4.0 + 0.001 * 6.0).contains(&v));
        }
    }
}

#[test]
fn rex_zero_weights_give_parent_mean() {
    let p1 = [1.0, -2.0, 0.5];
    let p2 = [3.0, 4.0, -0.5];
    assert_eq!(rex_child(&[&p1, &p2], &[0.0, 0.0]), vec![2.0, 1.0, 0.0]);
}

#[test]
fn rex_children_center_on_parent_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let p1 = [1.0, -2.0];
    let p2 = [3.0, 4.0];
    let config = GaConfig {
        n_children: 10_000,
        ..Default::default()
    };
    let kids = rex_crossover(&[&p1, &p2], &config, &mut rng);
    let mean = [2.0, 1.0];
    let sd = config.xi_std();
    for k in 0..2 {
        // Child deviation is ξ₁d + ξ₂(−d) with d = half the parent gap.
        let d = (p1[k] - p2[k]) / 2.0;
        let child_sd = (2.0f64).sqrt() * sd * d.abs();
        let m = kids.iter().map(|c| c[k]).sum::<f64>() / kids.len() as f64;
        let se = child_sd / (kids.len() as f64).sqrt();
        assert!((m - mean[k]).abs() < 3.0 * se, "coordinate {k}: {m}");
    }
}

#[test]
fn collapsed_population_is_converged() {
    let f = |x: &[f64]| x[0];
    let pop = evaluate_population(vec![vec![0.7, -0.1]; 20], &f, 5);
    let config = GaConfig::default();
    assert!(ga_converged(&pop, &[(-1.0, 1.0); 2], &config));
    let spread = evaluate_population((0..20).map(|i| vec![-1.0 + i as f64 * 0.1, 0.0]).collect(), &f, 5);
    assert!(!ga_converged(&spread, &[(-1.0, 1.0); 2], &config));
    let capped = evaluate_population(spread.individuals.iter().map(|i| i.theta.clone()).collect(), &f, 300);
    assert!(ga_converged(&capped, &[(-1.0, 1.0); 2], &config));
}

#[test]
fn seeded_runs_are_identical() {
    let f = |x: &[f64]| x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>();
    let bounds = vec![(-1.0, 1.0); 3];
    let config = GaConfig {
        max_generations: 40,
        ..Default::default()
    };
    let a = run_ga(&config, &bounds, &[None; 3], &f, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = run_ga(&config, &bounds, &[None; 3], &f, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn jgg_parent_choice_survives_affine_maps() {
    // Same seed, objective composed with the inverse map: identical draws and ranks.
    let f = |x: &[f64]| x.iter().map(|v| (v - 0.2).powi(2)).sum::<f64>() + (3.0 * x[0]).sin();
    let (scale, shift) = (2.5, -1.0);
    let g = |y: &[f64]| f(&y.iter().map(|v| (v - shift) / scale).collect::<Vec<_>>());
    let bounds = vec![(-1.0, 1.0); 2];
    let config = GaConfig::default();
    let init = ga_init(&config, &bounds, &[None; 2], &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let mapped: Vec<Vec<f64>> = init.iter().map(|t| t.iter().map(|v| scale * v + shift).collect()).collect();
    let mut a = evaluate_population(init, &f, 0);
    let mut b = evaluate_population(mapped, &g, 0);
    let mut ra = ChaCha8Rng::seed_from_u64(8);
    let mut rb = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let oa = jgg_step(&mut a, &config, &f, &mut ra);
        let ob = jgg_step(&mut b, &config, &g, &mut rb);
        assert_eq!(oa.parents, ob.parents);
        assert_eq!(oa.survivors, ob.survivors);
    }
}
