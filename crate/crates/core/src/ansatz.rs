//! Parameterized unitary `U(θ) = ∏_l ∏_k exp(−i θ_l c_k^l P_k^l)`: a
//! trotterized Hamiltonian-evolution block followed by a UCCSD cluster block,
//! repeated `depth` times.

use std::f64::consts::TAU;
use std::ops::{Deref, DerefMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chem::{jw_product, spin_orbital, QubitHamiltonian};
use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliWord, StateVector};

pub const DEFAULT_DEPTH: usize = 2;
pub const DEFAULT_BOUND: f64 = TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Hamiltonian,
    Cluster,
}

/// How many variational scalars the Hamiltonian block carries per repetition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianGranularity {
    /// One scalar scales the whole non-identity Hamiltonian.
    #[default]
    PerRepetition,
    /// One scalar per group of mutually commuting words.
    PerCommutingGroup,
}

/// Which block acts first within a repetition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockOrder {
    #[default]
    HamiltonianFirst,
    ClusterFirst,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnsatzOptions {
    pub depth: usize,
    pub granularity: HamiltonianGranularity,
    pub order: BlockOrder,
    /// Symmetric default bound `[-b, b]` for every parameter.
    pub bound: f64,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        Self {
            depth: DEFAULT_DEPTH,
            granularity: HamiltonianGranularity::default(),
            order: BlockOrder::default(),
            bound: DEFAULT_BOUND,
        }
    }
}

/// One variational parameter: its generator and the repetitions it acts in.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub label: String,
    pub pauli: PauliSum,
    /// `None` when the parameter is shared by every repetition.
    pub repetition: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamBlock {
    pub kind: BlockKind,
    pub generators: Vec<Generator>,
    pub bounds: Vec<(f64, f64)>,
}

impl ParamBlock {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Real parameter vector `θ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }
}

impl Deref for ParameterVector {
    type Target = Vec<f64>;

    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

impl DerefMut for ParameterVector {
    fn deref_mut(&mut self) -> &mut Vec<f64> {
        &mut self.0
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Factor {
    param: usize,
    coeff: f64,
    word: PauliWord,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzSpec {
    pub depth: usize,
    pub qubit_count: usize,
    pub order: BlockOrder,
    pub blocks: Vec<ParamBlock>,
    /// Flattened application order, first factor acts first.
    schedule: Vec<Factor>,
}

impl AnsatzSpec {
    pub fn new(
        qubit_count: usize,
        depth: usize,
        order: BlockOrder,
        blocks: Vec<ParamBlock>,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Input("ansatz depth must be at least 1".into()));
        }
        for block in &blocks {
            if block.bounds.len() != block.generators.len() {
                return Err(Error::Input("one bound pair per parameter required".into()));
            }
            for &(lo, hi) in &block.bounds {
                if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                    return Err(Error::Bounds(format!("[{lo}, {hi}]")));
                }
            }
            for g in &block.generators {
                if g.pauli.num_qubits() != qubit_count {
                    return Err(Error::Dimension {
                        expected: qubit_count,
                        found: g.pauli.num_qubits(),
                    });
                }
                if matches!(g.repetition, Some(r) if r >= depth) {
                    return Err(Error::Input(format!("{} targets a missing repetition", g.label)));
                }
            }
        }
        let mut spec = Self {
            depth,
            qubit_count,
            order,
            blocks,
            schedule: Vec::new(),
        };
        spec.schedule = spec.build_schedule();
        Ok(spec)
    }

    fn build_schedule(&self) -> Vec<Factor> {
        let offsets = self.block_offsets();
        let kinds = match self.order {
            BlockOrder::HamiltonianFirst => [BlockKind::Hamiltonian, BlockKind::Cluster],
            BlockOrder::ClusterFirst => [BlockKind::Cluster, BlockKind::Hamiltonian],
        };
        let mut schedule = Vec::new();
        for rep in 0..self.depth {
            for kind in kinds {
                for (b, block) in self.blocks.iter().enumerate().filter(|(_, b)| b.kind == kind) {
                    for (l, g) in block.generators.iter().enumerate() {
                        if g.repetition.is_some_and(|r| r != rep) {
                            continue;
                        }
                        schedule.extend(g.pauli.terms().iter().map(|&(coeff, word)| Factor {
                            param: offsets[b] + l,
                            coeff,
                            word,
                        }));
                    }
                }
            }
        }
        schedule
    }

    pub fn num_parameters(&self) -> usize {
        self.blocks.iter().map(ParamBlock::len).sum()
    }

    /// Index of each block's first parameter.
    pub fn block_offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let start = *acc;
                *acc += b.len();
                Some(start)
            })
            .collect()
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.blocks.iter().flat_map(|b| b.bounds.iter().copied()).collect()
    }

    /// Parameter indices belonging to blocks of `kind`.
    pub fn indices_of(&self, kind: BlockKind) -> Vec<usize> {
        let offsets = self.block_offsets();
        self.blocks
            .iter()
            .zip(offsets)
            .filter(|(b, _)| b.kind == kind)
            .flat_map(|(b, o)| o..o + b.len())
            .collect()
    }

    pub fn parameter_labels(&self) -> Vec<String> {
        self.blocks
            .iter()
            .flat_map(|b| b.generators.iter().map(|g| g.label.clone()))
            .collect()
    }

    /// Number of Pauli exponentials applied per state preparation.
    pub fn factor_count(&self) -> usize {
        self.schedule.len()
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct ParamExport {
            label: String,
            repetition: Option<usize>,
            bounds: (f64, f64),
            terms: Vec<(f64, String)>,
        }
        #[derive(Serialize)]
        struct BlockExport {
            kind: BlockKind,
            parameters: Vec<ParamExport>,
        }
        #[derive(Serialize)]
        struct Export {
            depth: usize,
            qubit_count: usize,
            order: BlockOrder,
            num_parameters: usize,
            blocks: Vec<BlockExport>,
        }
        let export = Export {
            depth: self.depth,
            qubit_count: self.qubit_count,
            order: self.order,
            num_parameters: self.num_parameters(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockExport {
                    kind: b.kind,
                    parameters: b
                        .generators
                        .iter()
                        .zip(&b.bounds)
                        .map(|(g, &bounds)| ParamExport {
                            label: g.label.clone(),
                            repetition: g.repetition,
                            bounds,
                            terms: g.pauli.to_labels(),
                        })
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&export)?)
    }
}

/// Hermitian generator `G = i(T − T†)`, so that `exp(−iθG) = exp(θ(T − T†))`.
pub fn excitation_generator(num_qubits: usize, creators: &[usize], annihilators: &[usize]) -> Result<PauliSum> {
    let ops: Vec<(usize, bool)> = creators
        .iter()
        .map(|&j| (j, true))
        .chain(annihilators.iter().map(|&j| (j, false)))
        .collect();
    let t = jw_product(num_qubits, &ops);
    let mut g = t.clone();
    g.add_assign(&{
        let mut adj = t.adjoint();
        adj.scale(Complex64::new(-1.0, 0.0));
        adj
    });
    g.scale(Complex64::new(0.0, 1.0));
    g.into_real(1e-14)
}

/// Spin-preserving UCCSD generators for two electrons in the lowest spatial
/// orbital of a two-orbital, four-spin-orbital register.
pub fn uccsd_generators(num_qubits: usize) -> Result<Vec<Generator>> {
    if num_qubits != 4 {
        return Err(Error::UnsupportedSystem(format!(
            "UCCSD pool is defined for 4 spin orbitals, got {num_qubits}"
        )));
    }
    let (o_a, o_b) = (spin_orbital(0, 0), spin_orbital(0, 1));
    let (v_a, v_b) = (spin_orbital(1, 0), spin_orbital(1, 1));
    let gen = |label: &str, c: &[usize], a: &[usize]| -> Result<Generator> {
        Ok(Generator {
            label: label.into(),
            pauli: excitation_generator(num_qubits, c, a)?,
            repetition: None,
        })
    };
    Ok(vec![
        gen("t_single_alpha", &[v_a], &[o_a])?,
        gen("t_single_beta", &[v_b], &[o_b])?,
        gen("t_double", &[v_a, v_b], &[o_b, o_a])?,
    ])
}

/// Greedy partition of a sum into groups of mutually commuting words, in
/// canonical word order.
pub fn commuting_groups(sum: &PauliSum) -> Vec<PauliSum> {
    let mut groups: Vec<Vec<(f64, PauliWord)>> = Vec::new();
    for &(c, w) in sum.terms() {
        match groups
            .iter_mut()
            .find(|g| g.iter().all(|(_, other)| other.commutes_with(&w)))
        {
            Some(g) => g.push((c, w)),
            None => groups.push(vec![(c, w)]),
        }
    }
    groups
        .into_iter()
        .map(|g| PauliSum::from_terms(sum.num_qubits(), g).expect("same register"))
        .collect()
}

pub fn build_h2_ansatz(h: &QubitHamiltonian) -> Result<AnsatzSpec> {
    build_h2_ansatz_with(h, &AnsatzOptions::default())
}

/// Hamiltonian block (evolution under the non-identity Hamiltonian, one
/// parameter per repetition by default) followed by the UCCSD cluster block
/// whose three amplitudes are shared across repetitions.
pub fn build_h2_ansatz_with(h: &QubitHamiltonian, options: &AnsatzOptions) -> Result<AnsatzSpec> {
    if h.qubit_count != 4 {
        return Err(Error::UnsupportedSystem(format!(
            "H2 ansatz needs a 4-qubit Hamiltonian, got {}",
            h.qubit_count
        )));
    }
    if !(options.bound.is_finite() && options.bound > 0.0) {
        return Err(Error::Bounds(format!("bound {}", options.bound)));
    }
    let evolution = h.pauli_sum.without_identity();
    let pieces = match options.granularity {
        HamiltonianGranularity::PerRepetition => vec![evolution],
        HamiltonianGranularity::PerCommutingGroup => commuting_groups(&evolution),
    };
    let mut ham_generators = Vec::new();
    for rep in 0..options.depth {
        for (k, piece) in pieces.iter().enumerate() {
            let label = if pieces.len() == 1 {
                format!("h_rep{rep}")
            } else {
                format!("h_rep{rep}_group{k}")
            };
            ham_generators.push(Generator {
                label,
                pauli: piece.clone(),
                repetition: Some(rep),
            });
        }
    }
    let cluster = uccsd_generators(4)?;
    let bound = (-options.bound, options.bound);
    let blocks = vec![
        ParamBlock {
            kind: BlockKind::Hamiltonian,
            bounds: vec![bound; ham_generators.len()],
            generators: ham_generators,
        },
        ParamBlock {
            kind: BlockKind::Cluster,
            bounds: vec![bound; cluster.len()],
            generators: cluster,
        },
    ];
    AnsatzSpec::new(4, options.depth, options.order, blocks)
}

/// `U(θ)|reference⟩`.
pub fn prepare_state(spec: &AnsatzSpec, theta: &[f64], reference: &StateVector) -> Result<StateVector> {
    if theta.len() != spec.num_parameters() {
        return Err(Error::Dimension {
            expected: spec.num_parameters(),
            found: theta.len(),
        });
    }
    if reference.num_qubits() != spec.qubit_count {
        return Err(Error::Dimension {
            expected: spec.qubit_count,
            found: reference.num_qubits(),
        });
    }
    let mut state = reference.clone();
    for f in &spec.schedule {
        state.apply_exponential_mut(theta[f.param], f.coeff, &f.word)?;
    }
    Ok(state)
}
