use serde::{Deserialize, Serialize};

use crate::fermion::{FermionKey, FermionOperator, IndexClasses};
use crate::pauli::PauliOperator;
use crate::statevector::Determinant;
use crate::{Error, Result, ZERO_FLOOR};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationMode {
    /// Drop every term with `|h| < ε`.
    Amplitude,
    /// Keep rank ≤ 2 always, rank > 2 only when `|h| ≥ ε`, and never keep
    /// rank above the electron count.
    RankAware,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub mode: TruncationMode,
    pub epsilon: f64,
    /// Cumulant screening threshold; rank > 2 terms below it are decomposed.
    pub kappa: Option<f64>,
    pub n_electrons: usize,
}

pub fn truncate_fermion(h: &FermionOperator, policy: &TruncationPolicy) -> FermionOperator {
    let mut out = h.clone();
    let eps = policy.epsilon;
    match policy.mode {
        TruncationMode::Amplitude => out.retain(|_, c| c.abs() >= eps),
        TruncationMode::RankAware => {
            let max_rank = policy.n_electrons;
            out.retain(|k, c| {
                let r = k.rank();
                r <= max_rank && (r <= 2 || c.abs() >= eps)
            })
        }
    }
    out
}

/// Amplitude truncation of a qubit operator; the identity term is kept.
pub fn truncate_pauli(h: &PauliOperator, policy: &TruncationPolicy) -> Result<PauliOperator> {
    if policy.mode == TruncationMode::RankAware {
        return Err(Error::RankAwareOnPauli);
    }
    let mut out = h.clone();
    let eps = policy.epsilon;
    out.retain(|k, c| k.is_identity() || c.norm() >= eps);
    Ok(out)
}

/// `Π_{s∈T} n_s · E^P_Q = sign · key`, for spectator subset `T` disjoint
/// from the pure indices.
fn with_spectators(classes: &IndexClasses, subset: u64) -> (FermionKey, f64) {
    let spectators = mask_bits(subset);
    let mut cre = spectators.clone();
    cre.extend(mask_bits(classes.pure_creations));
    let mut ann: Vec<usize> = mask_bits(classes.pure_annihilations).into_iter().rev().collect();
    ann.extend(spectators.into_iter().rev());
    FermionKey::from_indices(&cre, &ann).expect("disjoint index sets")
}

fn mask_bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Restricted cumulant screening of rank > 2 terms with `|h| < κ`.
///
/// Write the term as `h · Π_{s∈S} n_s · E^P_Q` with `m = |P|` pure pairs and
/// `l = |S|` spectators. If any spectator is empty in the reference the term
/// is dropped. Otherwise `t = max(0, 2 − m)` spectators are retained and the
/// rest set to their reference occupation 1, averaging over the `C(l, t)`
/// choices of retained spectators. Terms with no spectators pass through.
pub fn cumulant_decompose(h: &FermionOperator, kappa: f64, reference: Determinant) -> FermionOperator {
    let mut out = FermionOperator::identity(h.constant());
    for (key, &c) in h.iter() {
        if key.rank() <= 2 || c.abs() >= kappa {
            out.add_term(*key, c);
            continue;
        }
        let classes = key.classify();
        let spectators = classes.spectators;
        if spectators == 0 {
            out.add_term(*key, c);
            continue;
        }
        if spectators & !reference.bits() != 0 {
            continue;
        }
        let l = classes.spectator_count();
        let t = 2usize.saturating_sub(classes.pure_pairs());
        let (full, sign) = with_spectators(&classes, spectators);
        debug_assert_eq!(full, *key);
        let weight = c * sign / binomial(l, t);
        let mut sub = spectators;
        loop {
            if sub.count_ones() as usize == t {
                let (k, s) = with_spectators(&classes, sub);
                out.add_term(k, weight * s);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & spectators;
        }
    }
    out.prune(ZERO_FLOOR);
    out
}
