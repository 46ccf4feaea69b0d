mod common;

use common::*;
use gmig_core::chem::{rhf, sto3g_integrals, Atom, Geometry, H2Problem, StateLabel};

#[test]
fn overlap_matches_grid_quadrature() {
    let r_bohr = 1.4;
    let ints = sto3g_integrals(&Geometry::h2(bohr_to_angstrom(r_bohr)).unwrap()).unwrap();
    let s = overlap_by_quadrature(r_bohr, 0.08);
    assert!((ints.overlap[(0, 1)] - s).abs() < 1e-8, "{} vs {s}", ints.overlap[(0, 1)]);
    // Commonly tabulated value for this basis and distance.
    assert!((s - 0.6593).abs() < 1e-4);
}

#[test]
fn rhf_matches_symmetry_orbital_energy() {
    for r in [0.3, 0.7414, 1.2, 2.5] {
        let ints = sto3g_integrals(&Geometry::h2(r).unwrap()).unwrap();
        let e = rhf(&ints).unwrap().energy;
        let oracle = sigma_g_energy(&symmetry_orbitals(&ints));
        assert!((e - oracle).abs() < 1e-10, "r = {r}: {e} vs {oracle}");
    }
}

#[test]
fn hf_energy_at_equilibrium() {
    let p = H2Problem::new(0.7414).unwrap();
    // Standard STO-3G value at this geometry.
    assert!((p.rhf.energy - -1.1167).abs() < 1e-4, "{}", p.rhf.energy);
}

#[test]
fn fci_spectrum_matches_determinant_ci() {
    for r in [0.1, 0.5, 0.7414, 1.3, 2.5] {
        let p = H2Problem::new(r).unwrap();
        let ci = ci_at(r);
        let mut sector: Vec<f64> = [-2, 0, 2]
            .iter()
            .flat_map(|&sz| p.spectrum.sector(2, sz).into_iter().map(|l| l.energy))
            .collect();
        sector.sort_by(f64::total_cmp);
        assert_eq!(sector.len(), 6);
        for (a, b) in sector.iter().zip(&ci) {
            assert!((a - b).abs() < 1e-10, "r = {r}: {a} vs {b}");
        }
    }
}

#[test]
fn targets_are_the_distinct_two_electron_levels() {
    let p = H2Problem::new(0.7414).unwrap();
    let t = p.targets().unwrap();
    let ci = ci_at(0.7414);
    // Ground, triplet (threefold), open-shell singlet, doubly excited.
    assert!((t[0].energy - ci[0]).abs() < 1e-10);
    assert!((t[1].energy - ci[1]).abs() < 1e-10 && (ci[1] - ci[3]).abs() < 1e-10);
    assert!((t[2].energy - ci[4]).abs() < 1e-10);
    assert!((t[3].energy - ci[5]).abs() < 1e-10);
    assert!((t[0].energy - -1.13728).abs() < 1e-5);
    assert_eq!(t[StateLabel::Triplet.index()].spin_label(), Some(1.0));
    assert_eq!(t[StateLabel::Singlet.index()].spin_label(), Some(0.0));
}

#[test]
fn dissociation_limit_is_two_atoms() {
    let atom = Geometry {
        atoms: vec![Atom {
            symbol: "H".into(),
            charge: 1.0,
            position: [0.0; 3],
        }],
    };
    let ints = sto3g_integrals(&atom).unwrap();
    let e_atom = ints.kinetic[(0, 0)] + ints.nuclear[(0, 0)];
    assert!((e_atom - -0.466582).abs() < 1e-6, "{e_atom}");
    let ground = H2Problem::new(2.5).unwrap().targets().unwrap()[0].energy;
    assert!((ground - 2.0 * e_atom).abs() < 0.02);
}
