//! Dense reference implementations built from Kronecker products, kept
//! independent of the sparse bitmask algebra under test.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qjacobi::fcidump::parse_fcidump;
use qjacobi::{build_hamiltonian, FermionOperator, MolecularProblem, PauliKey, PauliOperator};

pub type CMat = DMatrix<Complex64>;

pub const H2: &str = "h2_0.7414";
pub const H4: &str = "h4_linear_1.5";
pub const N2: &str = "n2_1.0977_6e6o";

// Frozen reference energies (Hartree) from an independent PySCF STO-6G calculation.
pub const H2_HF: f64 = -1.125292577718;
pub const H2_FCI: f64 = -1.145921737318;
pub const H4_HF: f64 = -1.844788489074;
pub const H4_FCI: f64 = -2.012674126631;
pub const N2_HF: f64 = -108.541828650188;
pub const N2_FCI: f64 = -108.669001732723;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/fcidump")
        .join(format!("{name}.FCIDUMP"))
}

pub fn load(name: &str) -> MolecularProblem {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    build_hamiltonian(&parse_fcidump(&text).expect("fixture parses")).expect("fixture builds")
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mat2(entries: [[Complex64; 2]; 2]) -> CMat {
    DMatrix::from_fn(2, 2, |i, j| entries[i][j])
}

pub fn identity2() -> CMat {
    CMat::identity(2, 2)
}

pub fn pauli_x() -> CMat {
    mat2([[c(0.0), c(1.0)], [c(1.0), c(0.0)]])
}

pub fn pauli_y() -> CMat {
    let i = Complex64::i();
    mat2([[c(0.0), -i], [i, c(0.0)]])
}

pub fn pauli_z() -> CMat {
    mat2([[c(1.0), c(0.0)], [c(0.0), c(-1.0)]])
}

/// `|0⟩⟨1|`: removes an occupied mode.
pub fn lowering() -> CMat {
    mat2([[c(0.0), c(1.0)], [c(0.0), c(0.0)]])
}

/// Tensor product with qubit 0 as the least significant index bit.
pub fn kron_qubits(factors: &[CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for f in factors.iter().rev() {
        out = out.kronecker(f);
    }
    out
}

/// Jordan–Wigner ladder operator built as `Z ⊗ … ⊗ Z ⊗ σ ⊗ I ⊗ … ⊗ I`.
pub fn ladder(n: usize, mode: usize, dagger: bool) -> CMat {
    let factors: Vec<CMat> = (0..n)
        .map(|q| match q.cmp(&mode) {
            std::cmp::Ordering::Less => pauli_z(),
            std::cmp::Ordering::Equal => lowering(),
            std::cmp::Ordering::Greater => identity2(),
        })
        .collect();
    let a = kron_qubits(&factors);
    if dagger {
        a.adjoint()
    } else {
        a
    }
}

/// Product `a†_{p1} … a†_{pn} a_{qn} … a_{q1}` with both lists ascending.
pub fn fermion_key_dense(n: usize, cre: u64, ann: u64) -> CMat {
    let dim = 1 << n;
    let mut m = CMat::identity(dim, dim);
    for p in 0..n {
        if cre >> p & 1 == 1 {
            m *= ladder(n, p, true);
        }
    }
    for q in (0..n).rev() {
        if ann >> q & 1 == 1 {
            m *= ladder(n, q, false);
        }
    }
    m
}

pub fn fermion_dense(op: &FermionOperator, n: usize) -> CMat {
    let dim = 1 << n;
    let mut m = CMat::identity(dim, dim) * c(op.constant());
    for (k, &v) in op.iter() {
        if k.is_identity() {
            continue;
        }
        m += fermion_key_dense(n, k.cre, k.ann) * c(v);
    }
    m
}

pub fn pauli_key_dense(n: usize, key: PauliKey) -> CMat {
    let factors: Vec<CMat> = (0..n)
        .map(|q| match (key.x >> q & 1, key.z >> q & 1) {
            (0, 0) => identity2(),
            (1, 0) => pauli_x(),
            (1, 1) => pauli_y(),
            _ => pauli_z(),
        })
        .collect();
    kron_qubits(&factors)
}

pub fn pauli_dense(op: &PauliOperator, n: usize) -> CMat {
    let dim = 1 << n;
    let mut m = CMat::zeros(dim, dim);
    for (k, v) in op.iter() {
        m += pauli_key_dense(n, *k) * *v;
    }
    m
}

/// `e^{−X} M e^{X}` through the dense matrix exponential.
pub fn conjugate_dense(m: &CMat, x: &CMat) -> CMat {
    let u = x.clone().exp();
    let u_inv = (-x.clone()).exp();
    u_inv * m * u
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn basis_vector(n: usize, bits: u64) -> nalgebra::DVector<Complex64> {
    let mut v = nalgebra::DVector::zeros(1 << n);
    v[bits as usize] = c(1.0);
    v
}

/// Hermitian eigenvalues, ascending.
pub fn eigenvalues(m: &CMat) -> Vec<f64> {
    let mut e: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Restriction of a dense operator to the computational basis states with
/// `n_e` set bits.
pub fn sector(m: &CMat, n: usize, n_e: u32) -> CMat {
    let idx: Vec<usize> = (0..1usize << n).filter(|i| i.count_ones() == n_e).collect();
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Dense ground-state energy of a problem in its particle-number sector.
pub fn dense_sector_ground(problem: &MolecularProblem) -> f64 {
    let n = problem.n_qubits;
    let h = fermion_dense(&problem.hamiltonian, n);
    eigenvalues(&sector(&h, n, problem.n_electrons as u32))[0]
}

/// `e^{iθμ̂}` for one circuit step.
pub fn step_unitary(n: usize, generator: &qjacobi::Generator, theta: f64) -> CMat {
    match generator {
        qjacobi::Generator::Pauli(p) => (pauli_key_dense(n, p.key()) * Complex64::new(0.0, theta)).exp(),
        qjacobi::Generator::Fermion(g) => {
            let e = fermion_key_dense(n, g.excitation().cre, g.excitation().ann) * c(g.sign());
            ((&e - e.adjoint()) * c(theta)).exp()
        }
    }
}

/// `Û = u_1 u_2 … u_k`; the prepared state is `Û|Φ0⟩`.
pub fn circuit_unitary(n: usize, circuit: &qjacobi::Circuit) -> CMat {
    let mut u = CMat::identity(1 << n, 1 << n);
    for s in circuit.steps() {
        u *= step_unitary(n, &s.generator, s.angle);
    }
    u
}

/// Dense matrix of either tracked representation.
pub fn approx_dense(h: &qjacobi::jacobi::ApproxHamiltonian, n: usize) -> CMat {
    match h {
        qjacobi::jacobi::ApproxHamiltonian::Fermion(f) if n <= 4 => fermion_dense(f, n),
        qjacobi::jacobi::ApproxHamiltonian::Fermion(f) => pauli_dense(&qjacobi::jw::jordan_wigner(f), n),
        qjacobi::jacobi::ApproxHamiltonian::Pauli(p) => pauli_dense(p, n),
    }
}
