//! Quantum Jacobi diagonalization of second-quantized molecular Hamiltonians.
//!
//! The Hamiltonian is driven toward block-diagonal form with respect to a
//! reference determinant by a sequence of Givens rotations. Generators are
//! picked from a classically approximated residual, and rotation angles come
//! from 2×2 effective blocks measured on a (simulated) quantum backend.
//!
//! Module map:
//!
//! * [`fermion`], [`pauli`], [`jw`]: operator algebra and closed-form conjugations.
//! * [`fcidump`], [`hamiltonian`]: integral ingestion and Hamiltonian assembly.
//! * [`statevector`]: the simulated backend.
//! * [`jacobi`]: residuals, selection, angle solve, truncation and the main loop.
//! * [`fci`]: brute-force reference diagonalization.
//! * [`diagnostics`]: residual weight statistics.

pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod fci;
pub mod fcidump;
pub mod fermion;
pub mod hamiltonian;
pub mod jacobi;
pub mod jw;
pub mod pauli;
pub mod statevector;

pub use error::{Error, Result};
pub use exec::Execution;
pub use fermion::{FermionGenerator, FermionKey, FermionOperator, Ladder};
pub use hamiltonian::{build_hamiltonian, MolecularProblem};
pub use pauli::{PauliGenerator, PauliKey, PauliOperator};
pub use statevector::{Circuit, Determinant, Generator, GivensStep, Statevector};

/// Coefficients with magnitude below this are treated as exact zeros.
pub const ZERO_FLOOR: f64 = 1e-14;
