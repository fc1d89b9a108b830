//! Brute-force reference: determinant enumeration, dense matrices and
//! exact diagonalization.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::fermion::FermionOperator;
use crate::hamiltonian::MolecularProblem;
use crate::pauli::PauliOperator;
use crate::statevector::{Determinant, Statevector, MAX_QUBITS};
use crate::{Error, Result};

/// Hermiticity tolerance accepted by [`ground_state`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Ordered determinant list (ascending bit pattern) with reverse index.
#[derive(Clone, Debug)]
pub struct DeterminantBasis {
    n_qubits: usize,
    dets: Vec<Determinant>,
    index: HashMap<u64, usize>,
}

impl DeterminantBasis {
    fn from_dets(n_qubits: usize, dets: Vec<Determinant>) -> Self {
        let index = dets.iter().enumerate().map(|(i, d)| (d.bits(), i)).collect();
        DeterminantBasis {
            n_qubits,
            dets,
            index,
        }
    }

    /// All `2^n` basis states.
    pub fn full(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits, MAX_QUBITS));
        }
        let dets = (0..1u64 << n_qubits).map(Determinant::new).collect();
        Ok(Self::from_dets(n_qubits, dets))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn determinants(&self) -> &[Determinant] {
        &self.dets
    }

    pub fn index_of(&self, d: Determinant) -> Option<usize> {
        self.index.get(&d.bits()).copied()
    }
}

/// Fixed-popcount determinants in ascending order; `ms2` (= 2·S_z, alpha on
/// even qubits) further restricts the alpha/beta split.
pub fn enumerate_determinants(n_qubits: usize, n_electrons: usize, ms2: Option<i64>) -> Result<DeterminantBasis> {
    if n_qubits > 64 {
        return Err(Error::TooManyQubits(n_qubits, 64));
    }
    let mut dets = Vec::new();
    if n_electrons <= n_qubits {
        let limit: u128 = 1u128 << n_qubits;
        let mut v: u64 = if n_electrons == 0 { 0 } else { u64::MAX >> (64 - n_electrons) };
        loop {
            if (v as u128) >= limit {
                break;
            }
            let d = Determinant::new(v);
            let keep = match ms2 {
                None => true,
                Some(m) => {
                    let alpha = (v & 0x5555_5555_5555_5555).count_ones() as i64;
                    let beta = (v & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as i64;
                    alpha - beta == m
                }
            };
            if keep {
                dets.push(d);
            }
            if v == 0 {
                break;
            }
            // next integer with the same popcount (Gosper)
            let c = v & v.wrapping_neg();
            let r = match v.checked_add(c) {
                Some(r) => r,
                None => break,
            };
            v = (((r ^ v) >> 2) / c) | r;
        }
    }
    Ok(DeterminantBasis::from_dets(n_qubits, dets))
}

/// Square matrix over a determinant basis.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub basis: DeterminantBasis,
    pub matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// All eigenvalues in ascending order.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let err = self.hermiticity_error();
        if err > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(err));
        }
        let mut ev: Vec<f64> = if is_real(&self.matrix) {
            SymmetricEigen::new(self.matrix.map(|z| z.re)).eigenvalues.iter().copied().collect()
        } else {
            SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect()
        };
        ev.sort_by(|a, b| a.total_cmp(b));
        Ok(ev)
    }
}

fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.im.abs() < 1e-14)
}

/// Matrix elements `⟨Φ_ν|H|Φ_μ⟩` by sparse action on each basis state.
pub fn dense_matrix_fermion(op: &FermionOperator, basis: &DeterminantBasis) -> DenseOperator {
    let n = basis.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (col, d) in basis.dets.iter().enumerate() {
        for (d2, amp) in op.apply_to_determinant(d.bits()) {
            if let Some(row) = basis.index.get(&d2) {
                m[(*row, col)] += amp;
            }
        }
    }
    DenseOperator {
        basis: basis.clone(),
        matrix: m,
    }
}

pub fn dense_matrix_pauli(op: &PauliOperator, basis: &DeterminantBasis) -> DenseOperator {
    let n = basis.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (col, d) in basis.dets.iter().enumerate() {
        for (k, c) in op.iter() {
            let (d2, ph) = k.apply(d.bits());
            if let Some(row) = basis.index.get(&d2) {
                m[(*row, col)] += c * ph;
            }
        }
    }
    DenseOperator {
        basis: basis.clone(),
        matrix: m,
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    /// Amplitudes over the basis, unit norm, largest entry real positive.
    pub vector: Vec<Complex64>,
    pub basis: DeterminantBasis,
}

impl GroundState {
    /// Embeds the vector in the full `2^n` register.
    pub fn to_statevector(&self) -> Statevector {
        let n = self.basis.n_qubits();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        for (d, a) in self.basis.determinants().iter().zip(&self.vector) {
            amps[d.bits() as usize] = *a;
        }
        Statevector::from_amplitudes(n, amps)
    }
}

/// Lowest eigenpair of a Hermitian dense operator.
pub fn ground_state(h: &DenseOperator) -> Result<GroundState> {
    let err = h.hermiticity_error();
    if err > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(err));
    }
    if h.basis.is_empty() {
        return Err(Error::Config("empty determinant basis".into()));
    }
    let (energy, mut vector): (f64, Vec<Complex64>) = if is_real(&h.matrix) {
        let eig = SymmetricEigen::new(h.matrix.map(|z| z.re));
        let i = argmin(eig.eigenvalues.iter().copied());
        (
            eig.eigenvalues[i],
            eig.eigenvectors.column(i).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    } else {
        let eig = SymmetricEigen::new(h.matrix.clone());
        let i = argmin(eig.eigenvalues.iter().copied());
        (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect())
    };
    let norm = vector.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let pivot = vector
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let phase = vector[pivot].conj() / vector[pivot].norm();
    for a in vector.iter_mut() {
        *a *= phase / norm;
    }
    Ok(GroundState {
        energy,
        vector,
        basis: h.basis.clone(),
    })
}

/// FCI ground state of a problem in its particle-number sector, optionally
/// restricted further to the reference's `S_z`.
pub fn problem_ground_state(problem: &MolecularProblem, fix_sz: bool) -> Result<GroundState> {
    let ms2 = fix_sz.then(|| problem.ms2());
    let basis = enumerate_determinants(problem.n_qubits, problem.n_electrons, ms2)?;
    ground_state(&dense_matrix_fermion(&problem.hamiltonian, &basis))
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::FermionKey;

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_determinants(4, 2, None).unwrap().len(), 6);
        assert_eq!(enumerate_determinants(4, 2, Some(0)).unwrap().len(), 4);
        assert_eq!(enumerate_determinants(12, 6, None).unwrap().len(), 924);
        assert_eq!(enumerate_determinants(12, 6, Some(0)).unwrap().len(), 400);
        assert_eq!(enumerate_determinants(3, 0, None).unwrap().len(), 1);
        assert_eq!(enumerate_determinants(64, 64, None).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_is_ascending() {
        let b = enumerate_determinants(6, 3, None).unwrap();
        let bits: Vec<u64> = b.determinants().iter().map(|d| d.bits()).collect();
        assert!(bits.windows(2).all(|w| w[0] < w[1]));
        assert!(bits.iter().all(|v| v.count_ones() == 3));
        assert_eq!(b.index_of(Determinant::new(0b000111)), Some(0));
    }

    #[test]
    fn identity_and_number_matrices() {
        let b = DeterminantBasis::full(2).unwrap();
        let id = dense_matrix_fermion(&FermionOperator::identity(1.0), &b);
        assert_eq!(id.matrix, DMatrix::identity(4, 4));
        let b1 = DeterminantBasis::full(1).unwrap();
        let n0 = dense_matrix_fermion(&FermionOperator::from_term(FermionKey::new(&[0], &[0]), 1.0), &b1);
        assert_eq!(n0.matrix[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(n0.matrix[(1, 1)], Complex64::new(1.0, 0.0));
    }

    fn dense(entries: &[f64], n: usize) -> DenseOperator {
        DenseOperator {
            basis: DeterminantBasis::full(n.trailing_zeros() as usize).unwrap(),
            matrix: DMatrix::from_row_slice(n, n, &entries.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()),
        }
    }

    #[test]
    fn two_by_two_ground_states() {
        let g = ground_state(&dense(&[-1.0, 0.0, 0.0, 1.0], 2)).unwrap();
        assert_eq!(g.energy, -1.0);
        assert!((g.vector[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let g = ground_state(&dense(&[0.0, 1.0, 1.0, 0.0], 2)).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // largest-magnitude entry is made real positive; tie resolves to the first
        let expected = if g.vector[0].re > 0.0 { [r, -r] } else { [-r, r] };
        assert!((g.vector[0].re - expected[0]).abs() < 1e-14);
        assert!((g.vector[1].re - expected[1]).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        assert!(matches!(
            ground_state(&dense(&[0.0, 1.0, 0.0, 0.0], 2)),
            Err(Error::NotHermitian(_))
        ));
    }
}
