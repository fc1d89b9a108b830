//! Second-quantized molecular Hamiltonian assembly.

use crate::fcidump::FcidumpData;
use crate::fermion::{FermionKey, FermionOperator};
use crate::statevector::Determinant;
use crate::{Error, Result, ZERO_FLOOR};

/// Integral tolerance for permutational symmetry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct MolecularProblem {
    pub hamiltonian: FermionOperator,
    pub n_electrons: usize,
    pub n_qubits: usize,
    pub core_energy: f64,
    pub hf_determinant: Determinant,
}

impl MolecularProblem {
    pub fn n_spatial(&self) -> usize {
        self.n_qubits / 2
    }

    /// `⟨Φ_HF|H|Φ_HF⟩`, core energy included.
    pub fn hf_energy(&self) -> f64 {
        self.hamiltonian
            .apply_to_determinant(self.hf_determinant.bits())
            .into_iter()
            .filter(|&(d, _)| d == self.hf_determinant.bits())
            .map(|(_, a)| a)
            .sum()
    }

    /// `2·S_z` of the reference determinant.
    pub fn ms2(&self) -> i64 {
        let d = self.hf_determinant.bits();
        let alpha = (d & 0x5555_5555_5555_5555).count_ones() as i64;
        let beta = (d & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as i64;
        alpha - beta
    }
}

/// `H = Σ h_pq a†_{pσ} a_{qσ} + ½ Σ (pq|rs) a†_{pσ} a†_{rτ} a_{sτ} a_{qσ} + E_core`
/// over interleaved spin orbitals, with the aufbau reference occupying the
/// `n_electrons` lowest spin orbitals.
pub fn build_hamiltonian(data: &FcidumpData) -> Result<MolecularProblem> {
    if data.symmetry_violation > SYMMETRY_TOLERANCE {
        return Err(Error::AsymmetricIntegrals {
            deviation: data.symmetry_violation,
        });
    }
    let n = data.n_spatial;
    let n_qubits = 2 * n;
    if n_qubits > 64 {
        return Err(Error::TooManyQubits(n_qubits, 64));
    }
    let so = |p: usize, spin: usize| 2 * p + spin;

    let mut h = FermionOperator::identity(data.core_energy);
    for p in 0..n {
        for q in 0..n {
            let v = data.h1(p, q);
            if v == 0.0 {
                continue;
            }
            for sigma in 0..2 {
                h.add_term(FermionKey::new(&[so(p, sigma)], &[so(q, sigma)]), v);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = data.eri(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            // a†_{pσ} a†_{rτ} a_{sτ} a_{qσ}
                            let cre = [so(p, sigma), so(r, tau)];
                            let ann = [so(s, tau), so(q, sigma)];
                            if let Some((key, sign)) = FermionKey::from_indices(&cre, &ann) {
                                h.add_term(key, 0.5 * v * sign);
                            }
                        }
                    }
                }
            }
        }
    }
    h.prune(ZERO_FLOOR);
    let hf = Determinant::aufbau(data.n_electrons);
    Ok(MolecularProblem {
        hamiltonian: h,
        n_electrons: data.n_electrons,
        n_qubits,
        core_energy: data.core_energy,
        hf_determinant: hf,
    })
}

/// Number of stored non-identity terms.
pub fn count_terms(h: &FermionOperator) -> usize {
    h.len()
}
