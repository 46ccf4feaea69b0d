//! H₂ / STO-3G electronic structure: s-type Gaussian integrals, restricted
//! Hartree–Fock, the Jordan–Wigner qubit Hamiltonian and its exact spectrum.
//!
//! Spin orbitals are interleaved: spatial orbital `p` with spin `σ` (0 = α,
//! 1 = β) sits on qubit `2p + σ`. Energies are Hartree, lengths bohr unless
//! a field says Å.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{self, ComplexPauliSum, PauliSum, PauliWord, StateVector};

pub const ANGSTROM_TO_BOHR: f64 = 1.8897259886;

/// STO-3G hydrogen 1s exponents (ζ = 1.24) and contraction coefficients.
pub const STO3G_H_EXPONENTS: [f64; 3] = [3.42525091, 0.62391373, 0.16885540];
pub const STO3G_H_COEFFICIENTS: [f64; 3] = [0.15432897, 0.53532814, 0.44463454];

pub const SCF_MAX_CYCLES: usize = 200;
pub const SCF_ENERGY_TOL: f64 = 1e-10;

/// Tolerance under which a sector label is snapped to its exact value.
pub const LABEL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    pub charge: f64,
    /// Cartesian position in Å.
    pub position: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub atoms: Vec<Atom>,
}

impl Geometry {
    /// H₂ along the z axis with bond length `r` in Å.
    pub fn h2(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::SingularGeometry(format!("bond length {r} Å")));
        }
        let h = |z: f64| Atom {
            symbol: "H".into(),
            charge: 1.0,
            position: [0.0, 0.0, z],
        };
        Ok(Self {
            atoms: vec![h(0.0), h(r)],
        })
    }

    /// Distance between the first two atoms, in Å.
    pub fn bond_length(&self) -> Option<f64> {
        let [a, b] = self.atoms.get(..2)? else {
            return None;
        };
        Some(distance(&a.position, &b.position))
    }

    fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::Input("geometry has no atoms".into()));
        }
        for a in &self.atoms {
            if a.symbol != "H" {
                return Err(Error::UnsupportedSystem(format!(
                    "element {} (only H has an embedded STO-3G shell)",
                    a.symbol
                )));
            }
        }
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[i + 1..] {
                if distance(&a.position, &b.position) < 1e-8 {
                    return Err(Error::SingularGeometry("coincident nuclei".into()));
                }
            }
        }
        Ok(())
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    dist_sq(a, b).sqrt()
}

fn dist_sq(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

/// Contracted s-type Gaussian. Coefficients include primitive normalization
/// and are scaled so the contracted function has unit self-overlap.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisShell {
    /// Center in bohr.
    pub center: [f64; 3],
    pub primitives: Vec<(f64, f64)>,
}

impl BasisShell {
    pub fn sto3g_hydrogen(center_bohr: [f64; 3]) -> Self {
        let primitives = STO3G_H_EXPONENTS
            .iter()
            .zip(STO3G_H_COEFFICIENTS)
            .map(|(&a, d)| (a, d * (2.0 * a / PI).powf(0.75)))
            .collect();
        let mut shell = Self {
            center: center_bohr,
            primitives,
        };
        let norm = overlap(&shell, &shell).sqrt();
        for p in &mut shell.primitives {
            p.1 /= norm;
        }
        shell
    }

    /// Value of the basis function at `point` (bohr).
    pub fn value(&self, point: &[f64; 3]) -> f64 {
        let r2 = dist_sq(&self.center, point);
        self.primitives.iter().map(|(a, c)| c * (-a * r2).exp()).sum()
    }
}

/// Boys function F₀(t) = ∫₀¹ exp(−t u²) du.
pub fn boys_f0(t: f64) -> f64 {
    if t < 1e-8 {
        1.0 - t / 3.0 + t * t / 10.0
    } else {
        0.5 * (PI / t).sqrt() * libm::erf(t.sqrt())
    }
}

fn gaussian_product_center(a: f64, pa: &[f64; 3], b: f64, pb: &[f64; 3]) -> [f64; 3] {
    let p = a + b;
    [0, 1, 2].map(|k| (a * pa[k] + b * pb[k]) / p)
}

fn overlap(sa: &BasisShell, sb: &BasisShell) -> f64 {
    let r2 = dist_sq(&sa.center, &sb.center);
    let mut s = 0.0;
    for &(a, ca) in &sa.primitives {
        for &(b, cb) in &sb.primitives {
            let p = a + b;
            s += ca * cb * (PI / p).powf(1.5) * (-a * b / p * r2).exp();
        }
    }
    s
}

fn kinetic(sa: &BasisShell, sb: &BasisShell) -> f64 {
    let r2 = dist_sq(&sa.center, &sb.center);
    let mut t = 0.0;
    for &(a, ca) in &sa.primitives {
        for &(b, cb) in &sb.primitives {
            let p = a + b;
            let mu = a * b / p;
            t += ca * cb * mu * (3.0 - 2.0 * mu * r2) * (PI / p).powf(1.5) * (-mu * r2).exp();
        }
    }
    t
}

fn nuclear_attraction(sa: &BasisShell, sb: &BasisShell, charge: f64, at: &[f64; 3]) -> f64 {
    let r2 = dist_sq(&sa.center, &sb.center);
    let mut v = 0.0;
    for &(a, ca) in &sa.primitives {
        for &(b, cb) in &sb.primitives {
            let p = a + b;
            let pc = gaussian_product_center(a, &sa.center, b, &sb.center);
            v -= ca * cb * 2.0 * PI / p * charge
                * (-a * b / p * r2).exp()
                * boys_f0(p * dist_sq(&pc, at));
        }
    }
    v
}

fn repulsion(sa: &BasisShell, sb: &BasisShell, sc: &BasisShell, sd: &BasisShell) -> f64 {
    let rab = dist_sq(&sa.center, &sb.center);
    let rcd = dist_sq(&sc.center, &sd.center);
    let mut g = 0.0;
    for &(a, ca) in &sa.primitives {
        for &(b, cb) in &sb.primitives {
            let p = a + b;
            let pc = gaussian_product_center(a, &sa.center, b, &sb.center);
            let kab = (-a * b / p * rab).exp();
            for &(c, cc) in &sc.primitives {
                for &(d, cd) in &sd.primitives {
                    let q = c + d;
                    let qc = gaussian_product_center(c, &sc.center, d, &sd.center);
                    let kcd = (-c * d / q * rcd).exp();
                    let t = p * q / (p + q) * dist_sq(&pc, &qc);
                    g += ca * cb * cc * cd * 2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt())
                        * kab
                        * kcd
                        * boys_f0(t);
                }
            }
        }
    }
    g
}

/// Two-electron integrals `(pq|rs)` in chemists' notation, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct EriTensor {
    n: usize,
    data: Vec<f64>,
}

impl EriTensor {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n.pow(4)],
        }
    }

    #[inline]
    fn index(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[self.index(p, q, r, s)]
    }

    fn set_symmetric(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.index(a, b, c, d);
            self.data[i] = v;
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Four-index transformation with coefficient matrix `c` (AO rows, MO columns).
    pub fn transform(&self, c: &DMatrix<f64>) -> EriTensor {
        let n = self.n;
        let m = c.ncols();
        // One index at a time: O(n^5).
        let mut cur = self.data.clone();
        let mut dims = [n, n, n, n];
        for axis in 0..4 {
            let mut next_dims = dims;
            next_dims[axis] = m;
            let mut next = vec![0.0; next_dims.iter().product()];
            let stride = |d: &[usize; 4], i: [usize; 4]| ((i[0] * d[1] + i[1]) * d[2] + i[2]) * d[3] + i[3];
            for i0 in 0..next_dims[0] {
                for i1 in 0..next_dims[1] {
                    for i2 in 0..next_dims[2] {
                        for i3 in 0..next_dims[3] {
                            let out = [i0, i1, i2, i3];
                            let mut acc = 0.0;
                            for k in 0..n {
                                let mut src = out;
                                src[axis] = k;
                                acc += c[(k, out[axis])] * cur[stride(&dims, src)];
                            }
                            next[stride(&next_dims, out)] = acc;
                        }
                    }
                }
            }
            cur = next;
            dims = next_dims;
        }
        EriTensor { n: m, data: cur }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub nuclear: DMatrix<f64>,
    pub eri: EriTensor,
    pub nuclear_repulsion: f64,
    pub n_electrons: usize,
    pub shells: Vec<BasisShell>,
}

impl MolecularIntegrals {
    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        &self.kinetic + &self.nuclear
    }

    pub fn n_basis(&self) -> usize {
        self.overlap.nrows()
    }
}

/// Overlap, kinetic, nuclear-attraction and repulsion integrals for a
/// geometry of hydrogen atoms in STO-3G.
pub fn sto3g_integrals(geom: &Geometry) -> Result<MolecularIntegrals> {
    geom.validate()?;
    let centers: Vec<[f64; 3]> = geom
        .atoms
        .iter()
        .map(|a| a.position.map(|x| x * ANGSTROM_TO_BOHR))
        .collect();
    let shells: Vec<BasisShell> = centers.iter().map(|&c| BasisShell::sto3g_hydrogen(c)).collect();
    let n = shells.len();

    let overlap_m = DMatrix::from_fn(n, n, |i, j| overlap(&shells[i], &shells[j]));
    let kinetic_m = DMatrix::from_fn(n, n, |i, j| kinetic(&shells[i], &shells[j]));
    let nuclear_m = DMatrix::from_fn(n, n, |i, j| {
        geom.atoms
            .iter()
            .zip(&centers)
            .map(|(atom, c)| nuclear_attraction(&shells[i], &shells[j], atom.charge, c))
            .sum()
    });

    let mut eri = EriTensor::zeros(n);
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * (p + 1) / 2 + q >= r * (r + 1) / 2 + s {
                        let v = repulsion(&shells[p], &shells[q], &shells[r], &shells[s]);
                        eri.set_symmetric(p, q, r, s, v);
                    }
                }
            }
        }
    }

    let mut nuclear_repulsion = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let zi = geom.atoms[i].charge;
            let zj = geom.atoms[j].charge;
            nuclear_repulsion += zi * zj / distance(&centers[i], &centers[j]);
        }
    }
    let n_electrons = geom.atoms.iter().map(|a| a.charge).sum::<f64>().round() as usize;

    Ok(MolecularIntegrals {
        overlap: overlap_m,
        kinetic: kinetic_m,
        nuclear: nuclear_m,
        eri,
        nuclear_repulsion,
        n_electrons,
        shells,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhfResult {
    pub orbital_energies: DVector<f64>,
    /// AO × MO coefficients, columns sorted by orbital energy.
    pub coefficients: DMatrix<f64>,
    pub energy: f64,
    pub cycles: usize,
}

/// Solves `F C = S C ε` through symmetric orthogonalization. Each column's
/// sign is fixed so its first non-negligible entry is positive.
fn roothaan(fock: &DMatrix<f64>, x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let fp = x.transpose() * fock * x;
    let eig = SymmetricEigen::new(fp);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = order.len();
    let energies = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut c = x * DMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    for mut col in c.column_iter_mut() {
        if let Some(&first) = col.iter().find(|v| v.abs() > 1e-10) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
    (energies, c)
}

/// Closed-shell self-consistent field from a core-Hamiltonian guess.
pub fn rhf(ints: &MolecularIntegrals) -> Result<RhfResult> {
    let n = ints.n_basis();
    if !ints.n_electrons.is_multiple_of(2) || ints.n_electrons / 2 > n || ints.n_electrons == 0 {
        return Err(Error::UnsupportedSystem(format!(
            "{} electrons in {n} orbitals is not a closed shell",
            ints.n_electrons
        )));
    }
    let n_occ = ints.n_electrons / 2;
    let s_eig = SymmetricEigen::new(ints.overlap.clone());
    if s_eig.eigenvalues.iter().any(|&v| v < 1e-12) {
        return Err(Error::SingularGeometry("overlap matrix is singular".into()));
    }
    let x = &s_eig.eigenvectors
        * DMatrix::from_diagonal(&s_eig.eigenvalues.map(|v| 1.0 / v.sqrt()))
        * s_eig.eigenvectors.transpose();
    let h = ints.core_hamiltonian();

    let density = |c: &DMatrix<f64>| {
        DMatrix::from_fn(n, n, |m, v| {
            (0..n_occ).map(|k| 2.0 * c[(m, k)] * c[(v, k)]).sum()
        })
    };
    let fock = |p: &DMatrix<f64>| {
        DMatrix::from_fn(n, n, |m, v| {
            let mut g = 0.0;
            for l in 0..n {
                for s in 0..n {
                    g += p[(l, s)] * (ints.eri.get(m, v, l, s) - 0.5 * ints.eri.get(m, l, v, s));
                }
            }
            h[(m, v)] + g
        })
    };
    let energy = |p: &DMatrix<f64>, f: &DMatrix<f64>| {
        0.5 * p.component_mul(&(&h + f)).sum() + ints.nuclear_repulsion
    };

    let (_, c) = roothaan(&h, &x);
    let mut p = density(&c);
    let mut e_old = f64::INFINITY;
    for cycle in 1..=SCF_MAX_CYCLES {
        let f = fock(&p);
        let e = energy(&p, &f);
        let (eps, c) = roothaan(&f, &x);
        let p_new = density(&c);
        let dp = (&p_new - &p).abs().max();
        p = p_new;
        if (e - e_old).abs() < SCF_ENERGY_TOL && dp < 1e-8 {
            let f = fock(&p);
            return Ok(RhfResult {
                orbital_energies: eps,
                coefficients: c,
                energy: energy(&p, &f),
                cycles: cycle,
            });
        }
        e_old = e;
    }
    Err(Error::Convergence(format!(
        "SCF not converged in {SCF_MAX_CYCLES} cycles"
    )))
}

/// Spin orbital index (qubit) of spatial orbital `p` with spin `spin`.
pub fn spin_orbital(p: usize, spin: usize) -> usize {
    2 * p + spin
}

/// Jordan–Wigner image of `a†_j` (create) or `a_j`.
pub fn jw_ladder(num_qubits: usize, j: usize, create: bool) -> ComplexPauliSum {
    let mut zs = PauliWord::identity(num_qubits);
    for k in 0..j {
        zs.set(k, pauli::Pauli::Z);
    }
    let mut wx = zs;
    wx.set(j, pauli::Pauli::X);
    let mut wy = zs;
    wy.set(j, pauli::Pauli::Y);
    let sign = if create { -0.5 } else { 0.5 };
    let mut out = ComplexPauliSum::from_word(Complex64::new(0.5, 0.0), wx);
    out.add_term(Complex64::new(0.0, sign), wy);
    out
}

/// Product of ladder operators `(index, create)` in left-to-right order.
pub fn jw_product(num_qubits: usize, ops: &[(usize, bool)]) -> ComplexPauliSum {
    let mut acc = ComplexPauliSum::from_word(Complex64::new(1.0, 0.0), PauliWord::identity(num_qubits));
    for &(j, create) in ops {
        acc = acc.mul(&jw_ladder(num_qubits, j, create));
    }
    acc
}

const PAULI_PRUNE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct QubitHamiltonian {
    pub pauli_sum: PauliSum,
    pub qubit_count: usize,
    /// Bond length in Å when built from a diatomic geometry.
    pub bond_length: Option<f64>,
    pub basis: String,
    /// Electron count of the neutral molecule.
    pub n_electrons: usize,
}

#[derive(Serialize)]
struct HamiltonianExport<'a> {
    basis: &'a str,
    bond_length: Option<f64>,
    qubit_count: usize,
    terms: Vec<(f64, String)>,
}

impl QubitHamiltonian {
    /// JSON of the form `{"terms": [[coefficient, "XZXI"], ...], ...}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&HamiltonianExport {
            basis: &self.basis,
            bond_length: self.bond_length,
            qubit_count: self.qubit_count,
            terms: self.pauli_sum.to_labels(),
        })?)
    }
}

/// Second-quantized Hamiltonian in the MO basis mapped through Jordan–Wigner.
/// Nuclear repulsion lands in the identity coefficient.
pub fn qubit_hamiltonian(
    ints: &MolecularIntegrals,
    mo: &DMatrix<f64>,
    bond_length: Option<f64>,
) -> Result<QubitHamiltonian> {
    let n_orb = mo.ncols();
    let nq = 2 * n_orb;
    let h_mo = mo.transpose() * ints.core_hamiltonian() * mo;
    let eri_mo = ints.eri.transform(mo);

    let mut op = ComplexPauliSum::from_word(
        Complex64::new(ints.nuclear_repulsion, 0.0),
        PauliWord::identity(nq),
    );
    for p in 0..n_orb {
        for q in 0..n_orb {
            let hpq = h_mo[(p, q)];
            if hpq.abs() < PAULI_PRUNE {
                continue;
            }
            for spin in 0..2 {
                let mut t = jw_product(nq, &[(spin_orbital(p, spin), true), (spin_orbital(q, spin), false)]);
                t.scale(Complex64::new(hpq, 0.0));
                op.add_assign(&t);
            }
        }
    }
    for p in 0..n_orb {
        for q in 0..n_orb {
            for r in 0..n_orb {
                for s in 0..n_orb {
                    let g = eri_mo.get(p, q, r, s);
                    if g.abs() < PAULI_PRUNE {
                        continue;
                    }
                    for sa in 0..2 {
                        for sb in 0..2 {
                            let (ps, qs) = (spin_orbital(p, sa), spin_orbital(q, sa));
                            let (rs, ss) = (spin_orbital(r, sb), spin_orbital(s, sb));
                            if ps == rs || qs == ss {
                                continue;
                            }
                            let mut t = jw_product(nq, &[(ps, true), (rs, true), (ss, false), (qs, false)]);
                            t.scale(Complex64::new(0.5 * g, 0.0));
                            op.add_assign(&t);
                        }
                    }
                }
            }
        }
    }
    Ok(QubitHamiltonian {
        pauli_sum: op.into_real(PAULI_PRUNE)?,
        qubit_count: nq,
        bond_length,
        basis: "STO-3G".into(),
        n_electrons: ints.n_electrons,
    })
}

/// Total particle number `N̂ = Σ_j (I − Z_j)/2`.
pub fn number_operator(num_qubits: usize) -> PauliSum {
    let terms = std::iter::once((num_qubits as f64 / 2.0, PauliWord::identity(num_qubits))).chain(
        (0..num_qubits).map(|q| (-0.5, PauliWord::single(num_qubits, q, pauli::Pauli::Z))),
    );
    PauliSum::from_terms(num_qubits, terms).expect("well-formed")
}

/// `Ŝ_z = ½ Σ_p (n_{pα} − n_{pβ})`.
pub fn sz_operator(num_qubits: usize) -> PauliSum {
    let terms = (0..num_qubits).map(|q| {
        let sign = if q % 2 == 0 { -0.25 } else { 0.25 };
        (sign, PauliWord::single(num_qubits, q, pauli::Pauli::Z))
    });
    PauliSum::from_terms(num_qubits, terms).expect("well-formed")
}

/// `Ŝ² = Ŝ₋Ŝ₊ + Ŝ_z² + Ŝ_z`.
pub fn s_squared_operator(num_qubits: usize) -> PauliSum {
    let n_orb = num_qubits / 2;
    let mut s_plus = ComplexPauliSum::zero(num_qubits);
    for p in 0..n_orb {
        s_plus.add_assign(&jw_product(
            num_qubits,
            &[(spin_orbital(p, 0), true), (spin_orbital(p, 1), false)],
        ));
    }
    let s_minus = s_plus.adjoint();
    let mut sz = ComplexPauliSum::zero(num_qubits);
    for (c, w) in sz_operator(num_qubits).terms() {
        sz.add_term(Complex64::new(*c, 0.0), *w);
    }
    let mut total = s_minus.mul(&s_plus);
    total.add_assign(&sz.mul(&sz));
    total.add_assign(&sz);
    total.into_real(PAULI_PRUNE).expect("S² is Hermitian")
}

/// Bits of the basis index that hold α spin orbitals.
fn alpha_mask(num_qubits: usize) -> usize {
    (0..num_qubits).step_by(2).map(|q| 1usize << q).sum()
}

/// Particle number and twice S_z of a computational basis state.
pub fn determinant_sector(num_qubits: usize, index: usize) -> (u32, i32) {
    let a = (index & alpha_mask(num_qubits)).count_ones() as i32;
    let n = index.count_ones();
    (n, 2 * a - n as i32)
}

/// Hartree–Fock determinant with the lowest `n_electrons` spin orbitals filled.
pub fn hartree_fock_state(num_qubits: usize, n_electrons: usize) -> StateVector {
    StateVector::basis(num_qubits, (1usize << n_electrons) - 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub vector: StateVector,
    pub n_electrons: f64,
    pub s_z: f64,
    pub s_squared: f64,
}

impl Level {
    pub fn n_label(&self) -> Option<u32> {
        snap(self.n_electrons, 1.0).map(|v| v as u32)
    }

    /// `S_z` rounded to the nearest half-integer.
    pub fn sz_label(&self) -> Option<f64> {
        snap(self.s_z, 0.5)
    }

    /// Total spin `S` from `⟨Ŝ²⟩ = S(S+1)`, rounded to the nearest half-integer.
    pub fn spin_label(&self) -> Option<f64> {
        let s = (-1.0 + (1.0 + 4.0 * self.s_squared.max(0.0)).sqrt()) / 2.0;
        let snapped = (s * 2.0).round() / 2.0;
        ((snapped * (snapped + 1.0) - self.s_squared).abs() < LABEL_TOL).then_some(snapped)
    }
}

fn snap(v: f64, unit: f64) -> Option<f64> {
    let r = (v / unit).round() * unit;
    ((r - v).abs() < LABEL_TOL).then_some(r)
}

/// The four two-electron, `S_z = 0` levels tracked through a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateLabel {
    Ground,
    Triplet,
    Singlet,
    Doubly,
}

impl StateLabel {
    pub const ALL: [StateLabel; 4] = [
        StateLabel::Ground,
        StateLabel::Triplet,
        StateLabel::Singlet,
        StateLabel::Doubly,
    ];

    /// Position in VQD order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StateLabel::Ground => "ground",
            StateLabel::Triplet => "triplet",
            StateLabel::Singlet => "singlet",
            StateLabel::Doubly => "doubly",
        }
    }

    /// Expected total spin of the level.
    pub fn spin(self) -> f64 {
        match self {
            StateLabel::Triplet => 1.0,
            _ => 0.0,
        }
    }
}

impl std::str::FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground" => Ok(StateLabel::Ground),
            "triplet" => Ok(StateLabel::Triplet),
            "singlet" => Ok(StateLabel::Singlet),
            "doubly" => Ok(StateLabel::Doubly),
            other => Err(Error::Parse(format!("unknown state label {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FciSpectrum {
    /// All levels of the register, ascending in energy.
    pub levels: Vec<Level>,
    num_qubits: usize,
}

impl FciSpectrum {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// Levels with the given particle number and `2·S_z`, ascending.
    pub fn sector(&self, n_electrons: u32, twice_sz: i32) -> Vec<&Level> {
        self.levels
            .iter()
            .filter(|l| {
                l.n_label() == Some(n_electrons)
                    && l.sz_label().map(|s| (2.0 * s).round() as i32) == Some(twice_sz)
            })
            .collect()
    }

    /// Ground, triplet, singlet and doubly excited levels: the four
    /// two-electron `S_z = 0` eigenstates in ascending order, with the spin
    /// of each checked against its label.
    pub fn targets(&self, n_electrons: u32) -> Result<[Level; 4]> {
        let sector = self.sector(n_electrons, 0);
        if sector.len() != 4 {
            return Err(Error::UnsupportedSystem(format!(
                "expected 4 levels in the N={n_electrons}, S_z=0 sector, found {}",
                sector.len()
            )));
        }
        for (label, level) in StateLabel::ALL.iter().zip(&sector) {
            match level.spin_label() {
                Some(s) if s == label.spin() => {}
                other => {
                    return Err(Error::Consistency(format!(
                        "{} level at {:.10} Hartree has spin label {other:?}, expected {}",
                        label.as_str(),
                        level.energy,
                        label.spin()
                    )))
                }
            }
        }
        Ok([0, 1, 2, 3].map(|i| sector[i].clone()))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }
}

/// Exact diagonalization. The dense matrix is split into particle-number /
/// `S_z` blocks first (both commute with the Hamiltonian), so every
/// eigenvector carries definite `N` and `S_z` even inside degenerate multiplets.
pub fn fci_spectrum(h: &QubitHamiltonian) -> Result<FciSpectrum> {
    let nq = h.qubit_count;
    let dense = pauli::dense_matrix(&h.pauli_sum)?;
    let dim = 1usize << nq;
    let number = number_operator(nq);
    let sz = sz_operator(nq);
    let s2 = s_squared_operator(nq);

    let mut sectors: std::collections::BTreeMap<(u32, i32), Vec<usize>> = Default::default();
    for idx in 0..dim {
        sectors.entry(determinant_sector(nq, idx)).or_default().push(idx);
    }

    let mut levels = Vec::with_capacity(dim);
    for indices in sectors.values() {
        let k = indices.len();
        let block = DMatrix::from_fn(k, k, |a, b| dense[(indices[a], indices[b])]);
        let herm_err = (&block - block.adjoint()).norm();
        if herm_err > 1e-10 {
            return Err(Error::Consistency(format!("Hamiltonian block not Hermitian ({herm_err:e})")));
        }
        let eig = SymmetricEigen::new(block);
        for col in 0..k {
            let v = eig.eigenvectors.column(col);
            // Fix the global phase: largest-magnitude component real and positive.
            let pivot = (0..k)
                .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
                .unwrap_or(0);
            let phase = v[pivot].conj() / v[pivot].norm();
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            for (a, &idx) in indices.iter().enumerate() {
                amps[idx] = v[a] * phase;
            }
            let vector = StateVector::from_amplitudes(amps)?.normalized()?;
            levels.push(Level {
                energy: eig.eigenvalues[col],
                n_electrons: pauli::expectation(&vector, &number)?,
                s_z: pauli::expectation(&vector, &sz)?,
                s_squared: pauli::expectation(&vector, &s2)?,
                vector,
            });
        }
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(FciSpectrum { levels, num_qubits: nq })
}

/// Everything derived from one H₂ geometry.
#[derive(Clone, Debug)]
pub struct H2Problem {
    pub bond_length: f64,
    pub integrals: MolecularIntegrals,
    pub rhf: RhfResult,
    pub hamiltonian: QubitHamiltonian,
    pub spectrum: FciSpectrum,
}

impl H2Problem {
    pub fn new(bond_length: f64) -> Result<Self> {
        let geom = Geometry::h2(bond_length)?;
        Self::from_geometry(&geom)
    }

    pub fn from_geometry(geom: &Geometry) -> Result<Self> {
        let integrals = sto3g_integrals(geom)?;
        let rhf = rhf(&integrals)?;
        let bond_length = geom.bond_length().unwrap_or(0.0);
        let hamiltonian = qubit_hamiltonian(&integrals, &rhf.coefficients, Some(bond_length))?;
        let spectrum = fci_spectrum(&hamiltonian)?;
        Ok(Self {
            bond_length,
            integrals,
            rhf,
            hamiltonian,
            spectrum,
        })
    }

    pub fn reference_state(&self) -> StateVector {
        hartree_fock_state(self.hamiltonian.qubit_count, self.integrals.n_electrons)
    }

    pub fn targets(&self) -> Result<[Level; 4]> {
        self.spectrum.targets(self.integrals.n_electrons as u32)
    }
}
