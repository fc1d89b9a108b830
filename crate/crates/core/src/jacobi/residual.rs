use std::collections::BTreeMap;

use crate::fermion::FermionOperator;
use crate::pauli::PauliOperator;
use crate::statevector::Determinant;
use crate::ZERO_FLOOR;

/// Off-reference amplitudes `c̃_μ = ⟨Φ_μ|H̃|Φ0⟩`, keyed by determinant bits.
///
/// The reference component is split off into `reference_energy`; stored
/// entries all exceed the zero floor in magnitude.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualVector {
    entries: BTreeMap<u64, f64>,
    reference_energy: f64,
}

impl ResidualVector {
    pub fn from_entries<I: IntoIterator<Item = (Determinant, f64)>>(entries: I, reference_energy: f64) -> Self {
        let mut map = BTreeMap::new();
        for (d, c) in entries {
            *map.entry(d.bits()).or_insert(0.0) += c;
        }
        map.retain(|_, c: &mut f64| c.abs() > ZERO_FLOOR);
        ResidualVector {
            entries: map,
            reference_energy,
        }
    }

    pub fn reference_energy(&self) -> f64 {
        self.reference_energy
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, d: Determinant) -> f64 {
        self.entries.get(&d.bits()).copied().unwrap_or(0.0)
    }

    /// Entries in ascending determinant order.
    pub fn iter(&self) -> impl Iterator<Item = (Determinant, f64)> + '_ {
        self.entries.iter().map(|(d, c)| (Determinant::new(*d), *c))
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Keeps only determinants with `n` electrons.
    pub fn restricted_to_electrons(&self, n: usize) -> Self {
        ResidualVector {
            entries: self
                .entries
                .iter()
                .filter(|(d, _)| d.count_ones() as usize == n)
                .map(|(d, c)| (*d, *c))
                .collect(),
            reference_energy: self.reference_energy,
        }
    }
}

/// `H̃|Φ0⟩` by per-term bit operations; linear in the number of terms.
pub fn classical_residual_fermion(h: &FermionOperator, phi0: Determinant) -> ResidualVector {
    let mut diagonal = h.constant();
    let mut off = BTreeMap::new();
    for (key, c) in h.iter() {
        if let Some((d, s)) = key.apply(phi0.bits()) {
            if d == phi0.bits() {
                diagonal += s * c;
            } else {
                *off.entry(d).or_insert(0.0) += s * c;
            }
        }
    }
    off.retain(|_, c: &mut f64| c.abs() > ZERO_FLOOR);
    ResidualVector {
        entries: off,
        reference_energy: diagonal,
    }
}

/// Pauli counterpart. For a real Hermitian source each string acts as a real
/// signed permutation on determinants, so only real parts are kept.
pub fn classical_residual_pauli(h: &PauliOperator, phi0: Determinant) -> ResidualVector {
    let mut diagonal = 0.0;
    let mut off = BTreeMap::new();
    for (key, c) in h.iter() {
        let (d, phase) = key.apply(phi0.bits());
        let amp = (c * phase).re;
        if d == phi0.bits() {
            diagonal += amp;
        } else {
            *off.entry(d).or_insert(0.0) += amp;
        }
    }
    off.retain(|_, c: &mut f64| c.abs() > ZERO_FLOOR);
    ResidualVector {
        entries: off,
        reference_energy: diagonal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::FermionKey;
    use crate::jw::jordan_wigner;

    #[test]
    fn eigenstate_has_empty_residual() {
        let mut h = FermionOperator::number_operator(4);
        h.set_constant(0.5);
        let r = classical_residual_fermion(&h, Determinant::new(0b0011));
        assert!(r.is_empty());
        assert_eq!(r.reference_energy(), 2.5);
    }

    #[test]
    fn single_excitation_entry() {
        let h = FermionOperator::from_term(FermionKey::new(&[2], &[1]), 0.3);
        let r = classical_residual_fermion(&h, Determinant::new(0b0011));
        assert_eq!(r.len(), 1);
        // a†_2 a_1 |0011⟩: a_1 passes one occupied orbital, a†_2 passes one
        assert_eq!(r.get(Determinant::new(0b0101)), 0.3);
    }

    #[test]
    fn pauli_and_fermion_residuals_agree() {
        let mut h = FermionOperator::identity(-0.2);
        h.add_term(FermionKey::new(&[3], &[0]), 0.4);
        h.add_term(FermionKey::new(&[0], &[3]), 0.4);
        h.add_term(FermionKey::new(&[2, 3], &[0, 1]), -0.15);
        h.add_term(FermionKey::new(&[0, 1], &[2, 3]), -0.15);
        h.add_term(FermionKey::new(&[1], &[1]), 0.7);
        let phi0 = Determinant::new(0b0011);
        let a = classical_residual_fermion(&h, phi0);
        let b = classical_residual_pauli(&jordan_wigner(&h), phi0);
        assert!((a.reference_energy() - b.reference_energy()).abs() < 1e-14);
        assert_eq!(a.len(), b.len());
        for (d, c) in a.iter() {
            assert!((c - b.get(d)).abs() < 1e-14);
        }
    }
}
