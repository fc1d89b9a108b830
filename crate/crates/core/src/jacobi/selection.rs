use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::residual::ResidualVector;
use super::Flavor;
use crate::fermion::{FermionGenerator, FermionKey};
use crate::pauli::PauliGenerator;
use crate::statevector::{Determinant, Generator};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionPhase {
    Deterministic,
    Stochastic,
}

/// Largest `|c̃_μ|`; ties go to the lowest bit pattern.
pub fn select_deterministic(r: &ResidualVector) -> Option<Determinant> {
    let mut best: Option<(Determinant, f64)> = None;
    for (d, c) in r.iter() {
        // entries arrive in ascending order, so strict > keeps the lowest tie
        if best.is_none_or(|(_, b)| c.abs() > b) {
            best = Some((d, c.abs()));
        }
    }
    best.map(|(d, _)| d)
}

/// Samples `μ ∝ |c̃_μ|²` over all entries except `exclude`; `None` when
/// nothing remains.
pub fn select_stochastic<R: rand::Rng + ?Sized>(
    r: &ResidualVector,
    exclude: Option<Determinant>,
    rng: &mut R,
) -> Option<Determinant> {
    let pool: Vec<(Determinant, f64)> = r.iter().filter(|(d, _)| Some(*d) != exclude).map(|(d, c)| (d, c * c)).collect();
    let dist = WeightedIndex::new(pool.iter().map(|(_, w)| *w)).ok()?;
    Some(pool[dist.sample(rng)].0)
}

/// Deterministic-then-stochastic selection. The switch happens once, at the
/// first cycle whose argmax repeats the previous pick, and is permanent.
#[derive(Clone, Debug)]
pub struct SelectionState {
    phase: SelectionPhase,
    last: Option<Determinant>,
    rng: ChaCha8Rng,
    k_c: Option<usize>,
}

impl SelectionState {
    pub fn new(seed: u64) -> Self {
        SelectionState {
            phase: SelectionPhase::Deterministic,
            last: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
            k_c: None,
        }
    }

    pub fn phase(&self) -> SelectionPhase {
        self.phase
    }

    pub fn last(&self) -> Option<Determinant> {
        self.last
    }

    /// Cycle at which the stochastic phase began.
    pub fn k_c(&self) -> Option<usize> {
        self.k_c
    }

    pub fn select(&mut self, r: &ResidualVector, cycle: usize) -> Option<Determinant> {
        if self.phase == SelectionPhase::Deterministic {
            let pick = select_deterministic(r)?;
            if Some(pick) != self.last {
                self.last = Some(pick);
                return Some(pick);
            }
            self.phase = SelectionPhase::Stochastic;
            self.k_c = Some(cycle);
        }
        let pick = select_stochastic(r, self.last, &mut self.rng)?;
        self.last = Some(pick);
        Some(pick)
    }
}

/// Generator rotating `phi0` into `phi_mu`.
///
/// Pauli: X on every differing qubit, Y on the lowest one. Fermionic:
/// `A = E − E†` with `E` creating `phi_mu \ phi0`, annihilating
/// `phi0 \ phi_mu`, and signed so that `⟨Φ_μ|E|Φ0⟩ = +1`.
pub fn generator_from_determinant(phi0: Determinant, phi_mu: Determinant, flavor: Flavor) -> Result<Generator> {
    if phi0.electrons() != phi_mu.electrons() {
        return Err(Error::ParticleNumber {
            from: phi0.to_string(),
            to: phi_mu.to_string(),
        });
    }
    if phi0 == phi_mu {
        return Err(Error::Config("generator target equals the reference".into()));
    }
    let (a, b) = (phi0.bits(), phi_mu.bits());
    match flavor {
        Flavor::Pauli => Ok(Generator::Pauli(
            PauliGenerator::between(a, b).expect("distinct determinants"),
        )),
        Flavor::Fermionic => {
            let key = FermionKey {
                cre: b & !a,
                ann: a & !b,
            };
            let (d, sign) = key.apply(a).expect("pure excitation acts on the reference");
            debug_assert_eq!(d, b);
            Ok(Generator::Fermion(FermionGenerator::new(key, sign, a)?))
        }
    }
}
