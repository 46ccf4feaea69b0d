use std::f64::consts::PI;

use gmig_core::ansatz::{build_h2_ansatz, prepare_state};
use gmig_core::chem::{H2Problem, StateLabel};
use gmig_core::objective::{evaluate_state, trial_energy, VqdContext};
use gmig_core::optim::{local_search, LsConfig, LsMethod};
use gmig_core::pauli::{inner_product_sq, PauliSum, StateVector};
use gmig_core::report::{run_bond_length, ScanConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bloch(t: f64, phi: f64) -> StateVector {
    StateVector::from_amplitudes(vec![
        Complex64::new((t / 2.0).cos(), 0.0),
        Complex64::from_polar((t / 2.0).sin(), phi),
    ])
    .unwrap()
}

#[test]
fn deflated_two_level_minimum_is_upper_level() {
    // diag(0, 1) = ½I − ½Z with |0⟩ already found.
    let h = PauliSum::from_labels([(0.5, "I"), (-0.5, "Z")]).unwrap();
    let mut ctx = VqdContext::new(vec![]);
    ctx.push(StateVector::basis(1, 0), 0.0);
    let f = |x: &[f64]| evaluate_state(&bloch(x[0], x[1]), &h, &ctx).unwrap().f;
    // Analytic: F(t) = sin²(t/2) + 5cos²(t/2), minimum 1 at t = π.
    for &t in &[0.0, 0.7, PI / 2.0, 2.0, PI] {
        let expect = (t / 2.0).sin().powi(2) + 5.0 * (t / 2.0).cos().powi(2);
        assert!((f(&[t, 0.3]) - expect).abs() < 1e-14);
    }
    let res = local_search(&f, &[0.4, 1.0], &LsConfig::ordinary(LsMethod::Bfgs)).unwrap();
    assert!((res.f - 1.0).abs() < 1e-8, "{}", res.f);
}

#[test]
fn trial_energy_is_variational() {
    let p = H2Problem::new(0.9).unwrap();
    let spec = build_h2_ansatz(&p.hamiltonian).unwrap();
    let hf = p.reference_state();
    let ground = p.targets().unwrap()[0].energy;
    let e0 = trial_energy(&spec, &[0.0; 5], &p.hamiltonian.pauli_sum, &hf).unwrap();
    assert!((e0 - p.rhf.energy).abs() < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let theta: Vec<f64> = (0..5).map(|_| rng.random_range(-6.0..6.0)).collect();
        let e = trial_energy(&spec, &theta, &p.hamiltonian.pauli_sum, &hf).unwrap();
        assert!(e >= ground - 1e-12);
    }
}

#[test]
fn every_target_level_is_reachable() {
    // Maximize fidelity to each exact level from a few random starts.
    for r in [0.5, 1.5] {
        let p = H2Problem::new(r).unwrap();
        let spec = build_h2_ansatz(&p.hamiltonian).unwrap();
        let hf = p.reference_state();
        for level in p.targets().unwrap() {
            let f = |x: &[f64]| 1.0 - inner_product_sq(&prepare_state(&spec, x, &hf).unwrap(), &level.vector).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let best = (0..10)
                .map(|_| {
                    let x0: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
                    local_search(&f, &x0, &LsConfig::new(LsMethod::Bfgs, 300)).unwrap().f
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "r = {r}, E = {}: infidelity {best}", level.energy);
        }
    }
}

#[test]
fn ground_run_reaches_exact_energy() {
    let config = ScanConfig {
        states: vec![StateLabel::Ground],
        ..Default::default()
    };
    let mut records = Vec::new();
    run_bond_length(0.7414, &config, &mut |r| {
        records.push(r);
        Ok(())
    })
    .unwrap();
    let rec = &records[0];
    assert!(rec.is_ok());
    assert!(rec.log_error.unwrap() <= -6.0, "{:?}", rec.log_error);
    assert_eq!(rec.candidates.len(), 10);
    let ev = rec.evaluation.unwrap();
    assert!(ev.constraint < 1e-6 && ev.deflation == 0.0);
}

#[test]
fn excited_run_states_are_nearly_orthogonal() {
    let config = ScanConfig::default();
    let mut records = Vec::new();
    run_bond_length(1.0, &config, &mut |r| {
        records.push(r);
        Ok(())
    })
    .unwrap();
    assert_eq!(records.len(), 4);
    for (i, rec) in records.iter().enumerate() {
        assert_eq!(rec.state.index(), i, "VQD order");
        assert_eq!(rec.overlaps.len(), i);
        if rec.log_error.unwrap() < -6.0 {
            assert!(rec.overlaps.iter().all(|&o| o < 1e-4), "{:?}", rec.overlaps);
        }
    }
}
