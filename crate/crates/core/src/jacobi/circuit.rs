use std::collections::HashMap;

use crate::jw::jordan_wigner;
use crate::pauli::PauliKey;
use crate::statevector::{Circuit, Generator, GivensStep};

/// Appends `step`, or folds it into the earliest step with the same
/// generator when `|angle| < threshold`. Returns whether a merge happened.
pub fn merge_step(circuit: &mut Circuit, step: GivensStep, threshold: Option<f64>) -> bool {
    if let Some(limit) = threshold {
        if step.angle.abs() < limit {
            if let Some(earlier) = circuit.steps_mut().iter_mut().find(|s| s.generator == step.generator) {
                earlier.angle += step.angle;
                return true;
            }
        }
    }
    circuit.push(step);
    false
}

fn staircase(p: &PauliKey) -> usize {
    2 * p.weight().saturating_sub(1)
}

/// Staircase CNOT estimate: `2(w − 1)` per Pauli exponential. Fermionic
/// steps count each string of the Jordan–Wigner image of their generator.
#[derive(Clone, Debug, Default)]
pub struct CnotCounter {
    cache: HashMap<Generator, usize>,
}

impl CnotCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generator_cost(&mut self, g: &Generator) -> usize {
        if let Some(&n) = self.cache.get(g) {
            return n;
        }
        let n = match g {
            Generator::Pauli(p) => staircase(&p.key()),
            Generator::Fermion(f) => jordan_wigner(&f.anti_hermitian())
                .iter()
                .filter(|(k, c)| !k.is_identity() && c.norm() > crate::ZERO_FLOOR)
                .map(|(k, _)| staircase(k))
                .sum(),
        };
        self.cache.insert(g.clone(), n);
        n
    }

    pub fn circuit_cost(&mut self, circuit: &Circuit) -> usize {
        circuit.steps().iter().map(|s| self.generator_cost(&s.generator)).sum()
    }
}

pub fn estimate_cnot_count(circuit: &Circuit) -> usize {
    CnotCounter::new().circuit_cost(circuit)
}
