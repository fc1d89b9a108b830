mod common;

use common::*;
use qjacobi::fci::{dense_matrix_fermion, dense_matrix_pauli, enumerate_determinants, problem_ground_state, DeterminantBasis};
use qjacobi::fcidump::{parse_fcidump, write_fcidump};
use qjacobi::jw::jordan_wigner;
use qjacobi::{build_hamiltonian, Error, FermionKey, FermionOperator};

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn frozen_hartree_fock_energies() {
    for (name, hf) in [(H2, H2_HF), (H4, H4_HF), (N2, N2_HF)] {
        let p = load(name);
        assert!((p.hf_energy() - hf).abs() < 1e-9, "{name}: {} vs {hf}", p.hf_energy());
    }
}

#[test]
fn frozen_fci_energies() {
    for (name, fci) in [(H2, H2_FCI), (H4, H4_FCI), (N2, N2_FCI)] {
        let g = problem_ground_state(&load(name), true).unwrap();
        assert!((g.energy - fci).abs() < 1e-9, "{name}: {} vs {fci}", g.energy);
    }
}

#[test]
fn hf_energy_is_the_dense_diagonal_element() {
    for name in [H2, H4] {
        let p = load(name);
        let h = pauli_dense(&jordan_wigner(&p.hamiltonian), p.n_qubits);
        let d = p.hf_determinant.bits() as usize;
        assert!((h[(d, d)].re - p.hf_energy()).abs() < 1e-12, "{name}");
    }
}

#[test]
fn sector_ground_state_matches_kronecker_oracle() {
    let p = load(H2);
    assert!((dense_sector_ground(&p) - H2_FCI).abs() < 1e-10);
    let p = load(H4);
    let h = pauli_dense(&jordan_wigner(&p.hamiltonian), p.n_qubits);
    let e = eigenvalues(&sector(&h, p.n_qubits, p.n_electrons as u32))[0];
    let g = problem_ground_state(&p, false).unwrap();
    assert!((e - g.energy).abs() < 1e-10);
    assert!((e - H4_FCI).abs() < 1e-9);
}

#[test]
fn jordan_wigner_preserves_the_sector_spectrum() {
    for name in [H2, H4] {
        let p = load(name);
        let basis = enumerate_determinants(p.n_qubits, p.n_electrons, None).unwrap();
        let f = dense_matrix_fermion(&p.hamiltonian, &basis).spectrum().unwrap();
        let q = dense_matrix_pauli(&jordan_wigner(&p.hamiltonian), &basis).spectrum().unwrap();
        assert_eq!(f.len(), q.len());
        for (a, b) in f.iter().zip(&q) {
            assert!((a - b).abs() < 1e-10, "{name}");
        }
    }
}

#[test]
fn full_space_matrix_matches_kronecker_oracle() {
    let p = load(H2);
    let sparse = dense_matrix_fermion(&p.hamiltonian, &DeterminantBasis::full(4).unwrap());
    assert!(max_abs_diff(&sparse.matrix, &fermion_dense(&p.hamiltonian, 4)) < 1e-12);
}

#[test]
fn hamiltonians_are_hermitian_and_conserve_particles_and_spin() {
    for name in [H2, H4, N2] {
        let p = load(name);
        assert!(p.hamiltonian.hermiticity_error() < 1e-12, "{name}");
        let number = FermionOperator::number_operator(p.n_qubits);
        let mut sz = FermionOperator::new();
        for q in 0..p.n_qubits {
            sz.add_term(FermionKey::new(&[q], &[q]), if q % 2 == 0 { 0.5 } else { -0.5 });
        }
        for gauge in [number, sz] {
            let mut comm = p.hamiltonian.commutator(&gauge);
            comm.prune(1e-12);
            assert!(comm.is_zero(), "{name}");
        }
    }
}

#[test]
fn reference_is_aufbau_with_zero_spin() {
    let p = load(N2);
    assert_eq!(p.n_qubits, 12);
    assert_eq!(p.n_electrons, 6);
    assert_eq!(p.hf_determinant.bits(), 0b111111);
    assert_eq!(p.ms2(), 0);
}

#[test]
fn determinant_enumeration_counts() {
    assert_eq!(enumerate_determinants(12, 6, None).unwrap().len() as u64, binomial(12, 6));
    assert_eq!(enumerate_determinants(12, 6, Some(0)).unwrap().len() as u64, binomial(6, 3).pow(2));
    assert_eq!(enumerate_determinants(8, 4, Some(2)).unwrap().len() as u64, binomial(4, 3) * binomial(4, 1));
    let b = enumerate_determinants(64, 1, None).unwrap();
    assert_eq!(b.len(), 64);
    for (i, d) in b.determinants().iter().enumerate() {
        assert_eq!(b.index_of(*d), Some(i));
    }
}

#[test]
fn fcidump_round_trip_reproduces_the_hamiltonian() {
    for name in [H2, H4, N2] {
        let text = std::fs::read_to_string(fixture_path(name)).unwrap();
        let data = parse_fcidump(&text).unwrap();
        let again = parse_fcidump(&write_fcidump(&data)).unwrap();
        assert_eq!(again.n_spatial, data.n_spatial);
        assert_eq!(again.n_electrons, data.n_electrons);
        let (a, b) = (build_hamiltonian(&data).unwrap(), build_hamiltonian(&again).unwrap());
        let diff = a.hamiltonian.add_scaled(&b.hamiltonian, -1.0);
        assert!(diff.iter().all(|(_, c)| c.abs() < 1e-15) && diff.constant().abs() < 1e-15, "{name}");
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(matches!(parse_fcidump("not an fcidump"), Err(Error::Parse { .. })));
    let text = std::fs::read_to_string(fixture_path(H2)).unwrap();
    let truncated_header = text.replacen("NORB", "NXRB", 1);
    assert!(parse_fcidump(&truncated_header).is_err());
    // a permutation partner with a different value breaks the 8-fold symmetry
    let asym = format!("{}\n 0.25 2 1 1 1\n 0.35 1 2 1 1\n", text.trim_end());
    let data = parse_fcidump(&asym).unwrap();
    assert!(data.symmetry_violation > 0.05);
    assert!(matches!(build_hamiltonian(&data), Err(Error::AsymmetricIntegrals { .. })));
}
