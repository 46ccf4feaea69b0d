//! Per-state evaluation function `F_i(θ) = E(θ) + E_const(θ) + E_def(θ)`.
//!
//! `E_const` penalizes squared deviations of observables from targets and
//! `E_def` is the deflation term `Σ_j β_j |⟨ψ(θ)|ψ_j⟩|²` against states found
//! earlier in the VQD sequence. Overlaps are exact inner products, the
//! infinite-shot value of a SWAP test.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::ansatz::{prepare_state, AnsatzSpec};
use crate::chem::number_operator;
use crate::error::Result;
use crate::pauli::{expectation, inner_product_sq, PauliSum, StateVector};

pub const DEFAULT_DEFLATION_WEIGHT: f64 = 5.0;
pub const DEFAULT_CONSTRAINT_WEIGHT: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub observable: PauliSum,
    pub target: f64,
    pub weight: f64,
}

impl Constraint {
    /// `μ (⟨N̂⟩ − n)²` with the default weight.
    pub fn particle_number(num_qubits: usize, n_electrons: usize) -> Self {
        Self {
            name: "particle_number".into(),
            observable: number_operator(num_qubits),
            target: n_electrons as f64,
            weight: DEFAULT_CONSTRAINT_WEIGHT,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoundState {
    pub state: StateVector,
    pub energy: f64,
    pub weight: f64,
}

/// States already found plus the constraint set. Read-only while a state is
/// being optimized and extended between states.
#[derive(Clone, Debug, PartialEq)]
pub struct VqdContext {
    pub found_states: Vec<FoundState>,
    pub constraints: Vec<Constraint>,
    pub default_weight: f64,
}

impl VqdContext {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        Self {
            found_states: Vec::new(),
            constraints,
            default_weight: DEFAULT_DEFLATION_WEIGHT,
        }
    }

    /// Context with the default particle-number constraint.
    pub fn with_particle_number(num_qubits: usize, n_electrons: usize) -> Self {
        Self::new(vec![Constraint::particle_number(num_qubits, n_electrons)])
    }

    pub fn with_deflation_weight(mut self, beta: f64) -> Self {
        self.default_weight = beta;
        self
    }

    pub fn push(&mut self, state: StateVector, energy: f64) {
        self.found_states.push(FoundState {
            state,
            energy,
            weight: self.default_weight,
        });
    }

    pub fn len(&self) -> usize {
        self.found_states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.found_states.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub f: f64,
    pub energy: f64,
    pub constraint: f64,
    pub deflation: f64,
}

impl Evaluation {
    fn from_components(energy: f64, constraint: f64, deflation: f64) -> Self {
        Self {
            f: energy + constraint + deflation,
            energy,
            constraint,
            deflation,
        }
    }
}

pub fn trial_energy(
    spec: &AnsatzSpec,
    theta: &[f64],
    h: &PauliSum,
    reference: &StateVector,
) -> Result<f64> {
    expectation(&prepare_state(spec, theta, reference)?, h)
}

pub fn constraint_penalty(state: &StateVector, context: &VqdContext) -> Result<f64> {
    context.constraints.iter().try_fold(0.0, |acc, c| {
        let v = expectation(state, &c.observable)?;
        Ok(acc + c.weight * (v - c.target).powi(2))
    })
}

pub fn deflation_penalty(state: &StateVector, context: &VqdContext) -> Result<f64> {
    context.found_states.iter().try_fold(0.0, |acc, s| {
        Ok(acc + s.weight * inner_product_sq(state, &s.state)?)
    })
}

/// Components of `F` for an already prepared state.
pub fn evaluate_state(state: &StateVector, h: &PauliSum, context: &VqdContext) -> Result<Evaluation> {
    Ok(Evaluation::from_components(
        expectation(state, h)?,
        constraint_penalty(state, context)?,
        deflation_penalty(state, context)?,
    ))
}

pub fn evaluate(
    spec: &AnsatzSpec,
    theta: &[f64],
    h: &PauliSum,
    reference: &StateVector,
    context: &VqdContext,
) -> Result<Evaluation> {
    evaluate_state(&prepare_state(spec, theta, reference)?, h, context)
}

/// Evaluation function bound to one ansatz, Hamiltonian and frozen context,
/// with a shared evaluation counter.
#[derive(Debug)]
pub struct Objective<'a> {
    pub spec: &'a AnsatzSpec,
    pub hamiltonian: &'a PauliSum,
    pub reference: &'a StateVector,
    pub context: &'a VqdContext,
    evals: AtomicU64,
}

impl<'a> Objective<'a> {
    pub fn new(
        spec: &'a AnsatzSpec,
        hamiltonian: &'a PauliSum,
        reference: &'a StateVector,
        context: &'a VqdContext,
    ) -> Self {
        Self {
            spec,
            hamiltonian,
            reference,
            context,
            evals: AtomicU64::new(0),
        }
    }

    pub fn evaluate(&self, theta: &[f64]) -> Result<Evaluation> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        evaluate(self.spec, theta, self.hamiltonian, self.reference, self.context)
    }

    /// `F(θ)`, with any evaluation error mapped to NaN for the optimizers.
    pub fn value(&self, theta: &[f64]) -> f64 {
        self.evaluate(theta).map_or(f64::NAN, |e| e.f)
    }

    pub fn state(&self, theta: &[f64]) -> Result<StateVector> {
        prepare_state(self.spec, theta, self.reference)
    }

    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::build_h2_ansatz;
    use crate::chem::H2Problem;

    #[test]
    fn constraint_examples() {
        let hf = StateVector::basis(4, 0b0011);
        let ctx = VqdContext::with_particle_number(4, 2);
        assert!(constraint_penalty(&hf, &ctx).unwrap().abs() < 1e-15);
        let vacuum = StateVector::basis(4, 0);
        assert!((constraint_penalty(&vacuum, &ctx).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(constraint_penalty(&vacuum, &VqdContext::new(vec![])).unwrap(), 0.0);
    }

    #[test]
    fn deflation_examples() {
        let a = StateVector::basis(4, 0b0011);
        let b = StateVector::basis(4, 0b1100);
        let mut ctx = VqdContext::new(vec![]);
        assert_eq!(deflation_penalty(&a, &ctx).unwrap(), 0.0);
        ctx.push(a.clone(), -1.0);
        assert!((deflation_penalty(&a, &ctx).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(deflation_penalty(&b, &ctx).unwrap(), 0.0);
    }

    #[test]
    fn hf_point_evaluation() {
        let p = H2Problem::new(0.7414).unwrap();
        let spec = build_h2_ansatz(&p.hamiltonian).unwrap();
        let hf = p.reference_state();
        let ctx = VqdContext::with_particle_number(4, 2);
        let obj = Objective::new(&spec, &p.hamiltonian.pauli_sum, &hf, &ctx);
        let e = obj.evaluate(&[0.0; 5]).unwrap();
        assert!((e.f - p.rhf.energy).abs() < 1e-10);
        assert_eq!(e.deflation, 0.0);
        assert!(e.constraint.abs() < 1e-15);
        assert_eq!(obj.eval_count(), 1);
    }

    #[test]
    fn stored_state_costs_beta() {
        let p = H2Problem::new(0.7414).unwrap();
        let spec = build_h2_ansatz(&p.hamiltonian).unwrap();
        let hf = p.reference_state();
        let theta = [0.1, 0.2, 0.0, 0.0, 0.11];
        let mut ctx = VqdContext::with_particle_number(4, 2);
        let s = prepare_state(&spec, &theta, &hf).unwrap();
        let e0 = expectation(&s, &p.hamiltonian.pauli_sum).unwrap();
        ctx.push(s, e0);
        let e = evaluate(&spec, &theta, &p.hamiltonian.pauli_sum, &hf, &ctx).unwrap();
        assert!((e.f - (e0 + 5.0)).abs() < 1e-12);
        assert_eq!(e.f, e.energy + e.constraint + e.deflation);
    }
}
