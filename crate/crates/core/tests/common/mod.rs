//! Test-only reference implementations that avoid the qubit machinery.

#![allow(dead_code)]

use gmig_core::chem::{sto3g_integrals, Geometry, MolecularIntegrals, ANGSTROM_TO_BOHR, STO3G_H_COEFFICIENTS, STO3G_H_EXPONENTS};
use nalgebra::{DMatrix, SymmetricEigen};

/// MO integrals over the symmetry orbitals σg = (φ₁+φ₂)/√(2(1+S)) and
/// σu = (φ₁−φ₂)/√(2(1−S)).
pub struct SymmetryOrbitals {
    pub h: [[f64; 2]; 2],
    /// `(pq|rs)` in chemists' notation.
    pub eri: [[[[f64; 2]; 2]; 2]; 2],
    pub e_nuc: f64,
}

pub fn symmetry_orbitals(ints: &MolecularIntegrals) -> SymmetryOrbitals {
    let s = ints.overlap[(0, 1)];
    let g = 1.0 / (2.0 * (1.0 + s)).sqrt();
    let u = 1.0 / (2.0 * (1.0 - s)).sqrt();
    let c = [[g, u], [g, -u]]; // c[ao][mo]
    let hcore = &ints.kinetic + &ints.nuclear;
    let mut h = [[0.0; 2]; 2];
    for p in 0..2 {
        for q in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    h[p][q] += c[a][p] * c[b][q] * hcore[(a, b)];
                }
            }
        }
    }
    let mut eri = [[[[0.0; 2]; 2]; 2]; 2];
    for p in 0..2 {
        for q in 0..2 {
            for r in 0..2 {
                for t in 0..2 {
                    let mut acc = 0.0;
                    for a in 0..2 {
                        for b in 0..2 {
                            for cc in 0..2 {
                                for d in 0..2 {
                                    acc += c[a][p] * c[b][q] * c[cc][r] * c[d][t] * ints.eri.get(a, b, cc, d);
                                }
                            }
                        }
                    }
                    eri[p][q][r][t] = acc;
                }
            }
        }
    }
    SymmetryOrbitals {
        h,
        eri,
        e_nuc: ints.nuclear_repulsion,
    }
}

/// Closed-shell σg² energy.
pub fn sigma_g_energy(mo: &SymmetryOrbitals) -> f64 {
    2.0 * mo.h[0][0] + mo.eri[0][0][0][0] + mo.e_nuc
}

/// Eigenvalues of the Hamiltonian over all six two-electron determinants,
/// from the Slater–Condon rules for two electrons.
pub fn determinant_ci(mo: &SymmetryOrbitals) -> Vec<f64> {
    // Spin orbitals (spatial, spin).
    let so: Vec<(usize, usize)> = (0..2).flat_map(|p| (0..2).map(move |s| (p, s))).collect();
    let h1 = |a: usize, b: usize| {
        if so[a].1 == so[b].1 {
            mo.h[so[a].0][so[b].0]
        } else {
            0.0
        }
    };
    // ⟨ab|cd⟩ = (ac|bd) with spin selection.
    let g = |a: usize, b: usize, c: usize, d: usize| {
        if so[a].1 == so[c].1 && so[b].1 == so[d].1 {
            mo.eri[so[a].0][so[c].0][so[b].0][so[d].0]
        } else {
            0.0
        }
    };
    let dets: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
    assert_eq!(dets.len(), 6);
    let delta = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    let m = DMatrix::from_fn(6, 6, |i, j| {
        let (a, b) = dets[i];
        let (c, d) = dets[j];
        let one = delta(b, d) * h1(a, c) + delta(a, c) * h1(b, d) - delta(b, c) * h1(a, d) - delta(a, d) * h1(b, c);
        let two = g(a, b, c, d) - g(a, b, d, c);
        one + two + if i == j { mo.e_nuc } else { 0.0 }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn ci_at(r: f64) -> Vec<f64> {
    let ints = sto3g_integrals(&Geometry::h2(r).unwrap()).unwrap();
    determinant_ci(&symmetry_orbitals(&ints))
}

/// Overlap of the two contracted 1s functions at separation `r_bohr`, by
/// trapezoidal quadrature of each separable primitive pair.
pub fn overlap_by_quadrature(r_bohr: f64, h: f64) -> f64 {
    let norm = |a: f64| (2.0 * a / std::f64::consts::PI).powf(0.75);
    let axis = |a: f64, b: f64, shift: f64| {
        let lo = -12.0;
        let hi = 12.0 + shift;
        let n = ((hi - lo) / h).ceil() as usize;
        let step = (hi - lo) / n as f64;
        let f = |x: f64| (-a * x * x - b * (x - shift).powi(2)).exp();
        let mut acc = 0.5 * (f(lo) + f(hi));
        for k in 1..n {
            acc += f(lo + k as f64 * step);
        }
        acc * step
    };
    let mut total = 0.0;
    for (&a, &ca) in STO3G_H_EXPONENTS.iter().zip(&STO3G_H_COEFFICIENTS) {
        for (&b, &cb) in STO3G_H_EXPONENTS.iter().zip(&STO3G_H_COEFFICIENTS) {
            total += ca * cb * norm(a) * norm(b) * axis(a, b, 0.0).powi(2) * axis(a, b, r_bohr);
        }
    }
    total
}

pub fn bohr_to_angstrom(r: f64) -> f64 {
    r / ANGSTROM_TO_BOHR
}
