//! The quantum Jacobi iteration.
//!
//! Each cycle reads a residual off the classically tracked Hamiltonian
//! `H^(k) = Û† H Û`, picks a generator, measures a 2×2 block on the backend,
//! solves for the Givens angle and conjugates `H^(k)` by the new rotation.

pub mod block;
pub mod circuit;
pub mod residual;
pub mod run;
pub mod selection;
pub mod truncation;

pub use block::{measure_block, solve_givens, Backend, EffectiveBlock, StatevectorBackend};
pub use circuit::{estimate_cnot_count, merge_step, CnotCounter};
pub use residual::{classical_residual_fermion, classical_residual_pauli, ResidualVector};
pub use run::{
    run_quantum_jacobi, Convergence, CycleRecord, JacobiRun, Method, ResidualSource, RunConfig, RunSummary,
    RunTrace, Termination, TopKMass,
};
pub use selection::{
    generator_from_determinant, select_deterministic, select_stochastic, SelectionPhase, SelectionState,
};
pub use truncation::{cumulant_decompose, truncate_fermion, truncate_pauli, TruncationMode, TruncationPolicy};

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::fermion::FermionOperator;
use crate::pauli::PauliOperator;
use crate::statevector::{Determinant, Generator};
use crate::{Error, Result};

/// Operator family a method works in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Pauli,
    Fermionic,
}

/// Classically tracked Hamiltonian in either representation.
#[derive(Clone, Debug, PartialEq)]
pub enum ApproxHamiltonian {
    Fermion(FermionOperator),
    Pauli(PauliOperator),
}

impl ApproxHamiltonian {
    pub fn flavor(&self) -> Flavor {
        match self {
            ApproxHamiltonian::Fermion(_) => Flavor::Fermionic,
            ApproxHamiltonian::Pauli(_) => Flavor::Pauli,
        }
    }

    /// Stored terms, identity excluded.
    pub fn term_count(&self) -> usize {
        match self {
            ApproxHamiltonian::Fermion(h) => h.len(),
            ApproxHamiltonian::Pauli(h) => h.non_identity_len(),
        }
    }

    pub fn residual(&self, phi0: Determinant) -> ResidualVector {
        match self {
            ApproxHamiltonian::Fermion(h) => classical_residual_fermion(h, phi0),
            ApproxHamiltonian::Pauli(h) => classical_residual_pauli(h, phi0),
        }
    }

    /// `e^{−iθμ̂} H e^{iθμ̂}` by the closed-form term-wise expansion.
    pub fn transform(&self, generator: &Generator, theta: f64, exec: Execution) -> Result<Self> {
        match (self, generator) {
            (ApproxHamiltonian::Fermion(h), Generator::Fermion(g)) => {
                Ok(ApproxHamiltonian::Fermion(h.conjugate(g, theta, exec)))
            }
            (ApproxHamiltonian::Pauli(h), Generator::Pauli(g)) => Ok(ApproxHamiltonian::Pauli(h.conjugate(g, theta, exec))),
            _ => Err(Error::Config("generator flavor does not match the Hamiltonian".into())),
        }
    }

    /// Applies the policy; `None` leaves the operator untouched.
    pub fn truncated(self, policy: Option<&TruncationPolicy>, reference: Determinant) -> Result<Self> {
        let Some(policy) = policy else {
            return Ok(self);
        };
        match self {
            ApproxHamiltonian::Fermion(h) => {
                let screened = match policy.kappa {
                    Some(kappa) => cumulant_decompose(&h, kappa, reference),
                    None => h,
                };
                Ok(ApproxHamiltonian::Fermion(truncate_fermion(&screened, policy)))
            }
            ApproxHamiltonian::Pauli(h) => Ok(ApproxHamiltonian::Pauli(truncate_pauli(&h, policy)?)),
        }
    }
}
