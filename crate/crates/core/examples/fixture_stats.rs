//! Prints term counts and reference energies for FCIDUMP files.
//!
//! `cargo run --release --example fixture_stats -- data/fcidump/*.FCIDUMP`

use qjacobi::fci::{enumerate_determinants, problem_ground_state};
use qjacobi::fcidump::parse_fcidump;
use qjacobi::jw::jordan_wigner;
use qjacobi::build_hamiltonian;

fn main() {
    for path in std::env::args().skip(1) {
        let text = std::fs::read_to_string(&path).expect("readable file");
        let problem = build_hamiltonian(&parse_fcidump(&text).expect("valid FCIDUMP")).expect("symmetric integrals");
        let pauli = jordan_wigner(&problem.hamiltonian);
        let dim = enumerate_determinants(problem.n_qubits, problem.n_electrons, Some(problem.ms2()))
            .expect("basis")
            .len();
        let fci = if dim <= 2000 {
            format!("{:.12}", problem_ground_state(&problem, true).expect("ground state").energy)
        } else {
            "-".to_string()
        };
        println!(
            "{path}: qubits={} electrons={} fermion_terms={} pauli_terms={} e_hf={:.12} e_fci={fci}",
            problem.n_qubits,
            problem.n_electrons,
            problem.hamiltonian.len(),
            pauli.non_identity_len(),
            problem.hf_energy(),
        );
    }
}
