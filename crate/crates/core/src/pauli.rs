//! Exact statevector kernel: Pauli words, weighted Pauli sums, statevectors.
//!
//! Qubit `q` is bit `q` of a basis-state index (qubit 0 is the least
//! significant bit). In the string form of a word, character `q` is the axis
//! acting on qubit `q`, so `"XZII"` is X on qubit 0 and Z on qubit 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register for which [`dense_matrix`] will materialize a matrix.
pub const MAX_DENSE_QUBITS: usize = 16;

/// Largest register a [`PauliWord`] can address.
pub const MAX_QUBITS: usize = 63;

/// Imaginary residue tolerated by [`expectation`] before it is treated as a bug.
pub const IMAG_TOLERANCE: f64 = 1e-10;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A phase-free tensor product of single-qubit Paulis, stored as X/Z bit masks.
///
/// Y on a qubit sets both its X and Z bit. As an operator the word acts as
/// `i^{#Y} X^x Z^z`, which is exactly the tensor product of the listed axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    x: u64,
    z: u64,
    num_qubits: usize,
}

impl PauliWord {
    pub fn identity(num_qubits: usize) -> Self {
        assert!(num_qubits <= MAX_QUBITS, "register too large");
        Self { x: 0, z: 0, num_qubits }
    }

    pub fn from_axes(axes: &[Pauli]) -> Self {
        let mut word = Self::identity(axes.len());
        for (q, &p) in axes.iter().enumerate() {
            word.set(q, p);
        }
        word
    }

    /// Word with `p` on qubit `qubit` and identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut word = Self::identity(num_qubits);
        word.set(qubit, p);
        word
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let bit = 1u64 << qubit;
        let (x, z) = p.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn axis(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << qubit;
        Pauli::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn axes(&self) -> Vec<Pauli> {
        (0..self.num_qubits).map(|q| self.axis(q)).collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Number of non-identity axes.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Operator product `self · other`, returned as `(i^k, word)`.
    pub fn mul(&self, other: &PauliWord) -> (Complex64, PauliWord) {
        assert_eq!(self.num_qubits, other.num_qubits, "word length mismatch");
        // Write each word as i^{y} X^x Z^z. Moving Z^{z1} past X^{x2} costs (-1)^{|z1 & x2|}.
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y_in = self.y_count() + other.y_count();
        let y_out = (x & z).count_ones();
        let swap = (self.z & other.x).count_ones();
        // i^{y_in} (-1)^{swap} X^x Z^z = i^{y_in + 2 swap - y_out} · word
        let k = (y_in + 2 * swap + 4 * 64 - y_out) % 4;
        (
            I_POW[k as usize],
            PauliWord {
                x,
                z,
                num_qubits: self.num_qubits,
            },
        )
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Phase `p` and target index `t` such that `P|b⟩ = p|t⟩`.
    #[inline]
    fn action(&self, basis: usize, y_phase: Complex64) -> (Complex64, usize) {
        let sign = ((basis as u64) & self.z).count_ones() & 1;
        let phase = if sign == 1 { -y_phase } else { y_phase };
        (phase, basis ^ self.x as usize)
    }

    fn y_phase(&self) -> Complex64 {
        I_POW[(self.y_count() % 4) as usize]
    }
}

impl Ord for PauliWord {
    /// Lexicographic on the string form with `I < X < Y < Z`, qubit 0 first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.num_qubits.cmp(&other.num_qubits).then_with(|| {
            (0..self.num_qubits)
                .map(|q| self.axis(q).cmp(&other.axis(q)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits {
            write!(f, "{}", self.axis(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("invalid Pauli axis {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if axes.len() > MAX_QUBITS {
            return Err(Error::Capacity(format!("{} qubits", axes.len())));
        }
        Ok(PauliWord::from_axes(&axes))
    }
}

/// Real-weighted sum of distinct Pauli words, kept in canonical word order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<(f64, PauliWord)>,
}

impl PauliSum {
    pub fn zero(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            terms: Vec::new(),
        }
    }

    /// Builds a sum, merging repeated words. Terms are sorted lexicographically.
    pub fn from_terms(
        num_qubits: usize,
        terms: impl IntoIterator<Item = (f64, PauliWord)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<PauliWord, f64> = BTreeMap::new();
        for (c, w) in terms {
            if w.num_qubits() != num_qubits {
                return Err(Error::Dimension {
                    expected: num_qubits,
                    found: w.num_qubits(),
                });
            }
            if !c.is_finite() {
                return Err(Error::NumericInput(format!("coefficient {c} on {w}")));
            }
            *merged.entry(w).or_insert(0.0) += c;
        }
        Ok(Self {
            num_qubits,
            terms: merged.into_iter().map(|(w, c)| (c, w)).collect(),
        })
    }

    /// Parses `(coefficient, "XZIY")` pairs.
    pub fn from_labels<'a>(terms: impl IntoIterator<Item = (f64, &'a str)>) -> Result<Self> {
        let parsed = terms
            .into_iter()
            .map(|(c, s)| Ok((c, s.parse::<PauliWord>()?)))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed
            .first()
            .map(|(_, w)| w.num_qubits())
            .ok_or_else(|| Error::Input("empty Pauli sum".into()))?;
        Self::from_terms(n, parsed)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliWord)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops terms whose coefficient magnitude is at most `tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|(c, _)| c.abs() > tol);
        self
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, w)| w.is_identity())
            .map_or(0.0, |(c, _)| *c)
    }

    /// The sum with its identity term removed.
    pub fn without_identity(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(_, w)| !w.is_identity())
                .copied()
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self.terms.iter().map(|&(c, w)| (c * factor, w)).collect(),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<Self> {
        Self::from_terms(
            self.num_qubits,
            self.terms.iter().chain(other.terms.iter()).copied(),
        )
    }

    /// `(coefficient, label)` pairs for serialization.
    pub fn to_labels(&self) -> Vec<(f64, String)> {
        self.terms.iter().map(|(c, w)| (*c, w.to_string())).collect()
    }
}

/// Complex-weighted Pauli sum used while building operators from fermionic
/// products. Converted to a real [`PauliSum`] once the algebra is done.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexPauliSum {
    num_qubits: usize,
    terms: BTreeMap<PauliWord, Complex64>,
}

impl ComplexPauliSum {
    pub fn zero(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_word(coeff: Complex64, word: PauliWord) -> Self {
        let mut s = Self::zero(word.num_qubits());
        s.add_term(coeff, word);
        s
    }

    pub fn add_term(&mut self, coeff: Complex64, word: PauliWord) {
        *self.terms.entry(word).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn add_assign(&mut self, other: &ComplexPauliSum) {
        for (w, c) in &other.terms {
            self.add_term(*c, *w);
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
    }

    pub fn mul(&self, other: &ComplexPauliSum) -> ComplexPauliSum {
        let mut out = ComplexPauliSum::zero(self.num_qubits);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (phase, w) = wa.mul(wb);
                out.add_term(ca * cb * phase, w);
            }
        }
        out
    }

    /// Hermitian adjoint (words are Hermitian, so only coefficients conjugate).
    pub fn adjoint(&self) -> ComplexPauliSum {
        ComplexPauliSum {
            num_qubits: self.num_qubits,
            terms: self.terms.iter().map(|(w, c)| (*w, c.conj())).collect(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.terms.iter()
    }

    /// Real part as a [`PauliSum`], after checking every imaginary part is
    /// below `tol`; coefficients at or below `tol` in magnitude are dropped.
    pub fn into_real(self, tol: f64) -> Result<PauliSum> {
        if let Some((w, c)) = self.terms.iter().find(|(_, c)| c.im.abs() > tol) {
            return Err(Error::Consistency(format!(
                "coefficient of {w} has imaginary part {}",
                c.im
            )));
        }
        Ok(PauliSum::from_terms(
            self.num_qubits,
            self.terms.into_iter().map(|(w, c)| (c.re, w)),
        )?
        .pruned(tol))
    }
}

/// Complex amplitude vector over `2^Q` computational basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits <= MAX_QUBITS);
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Input(format!("length {dim} is not a power of two")));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NumericInput("non-finite amplitude".into()));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NumericInput("cannot normalize a zero vector".into()));
        }
        for a in &mut self.amplitudes {
            *a /= n;
        }
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_word(&self, word: &PauliWord) -> Result<()> {
        if word.num_qubits() != self.num_qubits {
            return Err(Error::Dimension {
                expected: self.num_qubits,
                found: word.num_qubits(),
            });
        }
        Ok(())
    }

    /// In-place `exp(-i a P)` with `a = angle · coeff`.
    pub fn apply_exponential_mut(&mut self, angle: f64, coeff: f64, word: &PauliWord) -> Result<()> {
        if !angle.is_finite() || !coeff.is_finite() {
            return Err(Error::NumericInput(format!("angle {angle}, coefficient {coeff}")));
        }
        self.check_word(word)?;
        let a = angle * coeff;
        if a == 0.0 {
            return Ok(());
        }
        let (s, c) = a.sin_cos();
        if word.is_identity() {
            let phase = Complex64::new(c, -s);
            self.amplitudes.iter_mut().for_each(|amp| *amp *= phase);
            return Ok(());
        }
        let minus_i_sin = Complex64::new(0.0, -s);
        let y_phase = word.y_phase();
        let flip = word.x_mask() as usize;
        if flip == 0 {
            // Diagonal word: each amplitude picks up e^{∓ia}.
            for (b, amp) in self.amplitudes.iter_mut().enumerate() {
                let (p, _) = word.action(b, y_phase);
                *amp *= c + minus_i_sin * p;
            }
            return Ok(());
        }
        // Pair each basis index with its partner under the X mask and update both.
        let high = 1usize << (63 - (flip as u64).leading_zeros());
        for b in 0..self.amplitudes.len() {
            if b & high != 0 {
                continue;
            }
            let partner = b ^ flip;
            let (p_b, _) = word.action(b, y_phase); // P|b⟩ = p_b |partner⟩
            let (p_partner, _) = word.action(partner, y_phase);
            let amp_b = self.amplitudes[b];
            let amp_partner = self.amplitudes[partner];
            self.amplitudes[b] = c * amp_b + minus_i_sin * p_partner * amp_partner;
            self.amplitudes[partner] = c * amp_partner + minus_i_sin * p_b * amp_b;
        }
        Ok(())
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

/// `P|ψ⟩`.
pub fn apply_pauli_word(state: &StateVector, word: &PauliWord) -> Result<StateVector> {
    state.check_word(word)?;
    let y_phase = word.y_phase();
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    for (b, amp) in state.amplitudes.iter().enumerate() {
        let (p, t) = word.action(b, y_phase);
        out[t] = p * amp;
    }
    Ok(StateVector {
        num_qubits: state.num_qubits,
        amplitudes: out,
    })
}

/// `exp(-i · angle · coeff · P)|ψ⟩ = cos(a)|ψ⟩ − i sin(a) P|ψ⟩`.
pub fn apply_exponential(
    state: &StateVector,
    angle: f64,
    coeff: f64,
    word: &PauliWord,
) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_exponential_mut(angle, coeff, word)?;
    Ok(out)
}

/// `⟨ψ|P|ψ⟩` for a single word (complex in general, real for Hermitian P).
fn word_expectation(state: &StateVector, word: &PauliWord) -> Complex64 {
    let y_phase = word.y_phase();
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(b, amp)| {
            let (p, t) = word.action(b, y_phase);
            state.amplitudes[t].conj() * p * amp
        })
        .sum()
}

/// `⟨ψ|O|ψ⟩` for a real-weighted Pauli sum.
pub fn expectation(state: &StateVector, observable: &PauliSum) -> Result<f64> {
    check_dim(state.num_qubits(), observable.num_qubits())?;
    let total: Complex64 = observable
        .terms()
        .iter()
        .map(|(c, w)| {
            if w.is_identity() {
                Complex64::new(c * state.norm().powi(2), 0.0)
            } else {
                word_expectation(state, w) * *c
            }
        })
        .sum();
    if total.im.abs() > IMAG_TOLERANCE {
        return Err(Error::Consistency(format!(
            "expectation has imaginary part {:e}",
            total.im
        )));
    }
    Ok(total.re)
}

/// `|⟨a|b⟩|²`, the infinite-shot SWAP-test value.
pub fn inner_product_sq(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Dense `2^Q × 2^Q` matrix of a Pauli sum.
pub fn dense_matrix(observable: &PauliSum) -> Result<DMatrix<Complex64>> {
    let n = observable.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!(
            "{n} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}"
        )));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (c, w) in observable.terms() {
        let y_phase = w.y_phase();
        for col in 0..dim {
            let (p, row) = w.action(col, y_phase);
            m[(row, col)] += p * *c;
        }
    }
    Ok(m)
}
