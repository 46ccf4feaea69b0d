use gmig_core::optim::{
    evaluate_population, ga_converged, jgg_step, local_search, rex_child, GaConfig, Individual, LsConfig, LsMethod,
    Population,
};
use gmig_core::pauli::{apply_exponential, dense_matrix, expectation, inner_product_sq, PauliSum, PauliWord, StateVector};
use gmig_core::report::fmt_num;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NQ: usize = 3;

fn word() -> impl Strategy<Value = PauliWord> {
    proptest::collection::vec(0u8..4, NQ).prop_map(|axes| {
        let label: String = axes.iter().map(|a| ['I', 'X', 'Y', 'Z'][*a as usize]).collect();
        label.parse().unwrap()
    })
}

fn state() -> impl Strategy<Value = StateVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << NQ)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| {
            let amps = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            StateVector::from_amplitudes(amps).unwrap().normalized().unwrap()
        })
}

fn sum() -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec((-2.0f64..2.0, word()), 1..6).prop_map(|terms| PauliSum::from_terms(NQ, terms).unwrap())
}

proptest! {
    #[test]
    fn exponential_preserves_norm(psi in state(), w in word(), a in -10.0f64..10.0, c in -2.0f64..2.0) {
        let out = apply_exponential(&psi, a, c, &w).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponentials_of_one_word_compose(psi in state(), w in word(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let two = apply_exponential(&apply_exponential(&psi, a, 1.0, &w).unwrap(), b, 1.0, &w).unwrap();
        let one = apply_exponential(&psi, a + b, 1.0, &w).unwrap();
        for (x, y) in two.amplitudes().iter().zip(one.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn expectation_matches_dense_matrix(psi in state(), h in sum()) {
        let m = dense_matrix(&h).unwrap();
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let dense = (v.adjoint() * &m * &v)[(0, 0)];
        let fast = expectation(&psi, &h).unwrap();
        prop_assert!((dense.re - fast).abs() < 1e-10 && dense.im.abs() < 1e-10);
    }

    #[test]
    fn overlap_is_symmetric(a in state(), b in state()) {
        let ab = inner_product_sq(&a, &b).unwrap();
        let ba = inner_product_sq(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-14);
        prop_assert!((-1e-14..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn shrinking_a_converged_population_keeps_it_converged(
        thetas in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 2), 20),
        c in 0.0f64..1.0,
        threshold in 1e-6f64..1.0,
    ) {
        let bounds = [(-1.0, 1.0); 2];
        let config = GaConfig { convergence_threshold: threshold, max_generations: usize::MAX, ..Default::default() };
        let pop = population(&thetas);
        let mean: Vec<f64> = (0..2).map(|k| thetas.iter().map(|t| t[k]).sum::<f64>() / 20.0).collect();
        let shrunk: Vec<Vec<f64>> = thetas.iter().map(|t| (0..2).map(|k| mean[k] + c * (t[k] - mean[k])).collect()).collect();
        if ga_converged(&pop, &bounds, &config) {
            prop_assert!(ga_converged(&population(&shrunk), &bounds, &config));
        }
    }

    #[test]
    fn rex_commutes_with_affine_maps(
        p1 in proptest::collection::vec(-5.0f64..5.0, 3),
        p2 in proptest::collection::vec(-5.0f64..5.0, 3),
        xi in proptest::collection::vec(-2.0f64..2.0, 2),
        scale in 0.1f64..4.0,
        shift in -3.0f64..3.0,
    ) {
        let map = |v: &[f64]| v.iter().map(|x| scale * x + shift).collect::<Vec<_>>();
        let child = rex_child(&[&p1, &p2], &xi);
        let mapped = rex_child(&[&map(&p1), &map(&p2)], &xi);
        for (a, b) in map(&child).iter().zip(&mapped) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn jgg_keeps_size_and_untouched_members(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let config = GaConfig::default();
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>();
        let thetas: Vec<Vec<f64>> = (0..config.population_size(n))
            .map(|i| (0..n).map(|k| ((i * 7 + k * 3) % 11) as f64 / 11.0).collect())
            .collect();
        let mut pop = evaluate_population(thetas, &f, 0);
        let before = pop.clone();
        let out = jgg_step(&mut pop, &config, &f, &mut rng);
        prop_assert_eq!(pop.len(), before.len());
        for i in 0..pop.len() {
            if !out.parents.contains(&i) {
                prop_assert_eq!(&pop.individuals[i], &before.individuals[i]);
            }
        }
        let min_before = before.best().unwrap().fitness;
        prop_assert!(pop.best().unwrap().fitness <= min_before.max(out.family_best));
    }

    #[test]
    fn local_search_never_worsens(
        x0 in proptest::collection::vec(-2.0f64..2.0, 3),
        method in prop_oneof![Just(LsMethod::Powell), Just(LsMethod::Bfgs), Just(LsMethod::NelderMead), Just(LsMethod::Newton)],
    ) {
        // Rugged surface with many local minima.
        let f = |x: &[f64]| x.iter().map(|v| v * v + 0.5 * (5.0 * v).sin()).sum::<f64>();
        let res = local_search(&f, &x0, &LsConfig::new(method, 50)).unwrap();
        prop_assert!(res.f <= f(&x0));
        prop_assert_eq!(res.f, res.trajectory.iter().copied().fold(f64::INFINITY, f64::min));
        prop_assert!((f(&res.theta) - res.f).abs() < 1e-12);
    }

    #[test]
    fn csv_numbers_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

fn population(thetas: &[Vec<f64>]) -> Population {
    Population {
        individuals: thetas
            .iter()
            .map(|t| Individual {
                theta: t.clone(),
                fitness: 0.0,
                generation: 0,
            })
            .collect(),
        generation: 0,
    }
}
