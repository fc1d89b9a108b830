use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::fermion::FermionOperator;
use crate::jw::jordan_wigner;
use crate::pauli::PauliOperator;
use crate::statevector::{Circuit, Determinant, Generator, Statevector};
use crate::Result;

/// `[[e0, c], [c, e_mu]]` in the basis `{Φ0, Φ̃_μ}`, where
/// `Φ̃_μ = e^{i(π/2)μ̂} Φ0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveBlock {
    pub e0: f64,
    pub e_mu: f64,
    pub c: f64,
}

impl EffectiveBlock {
    /// `RᵀMR` with `R = [[cos θ, −sin θ], [sin θ, cos θ]]`; the first
    /// column of `R` is the rotated reference `cos θ Φ0 + sin θ Φ̃_μ`.
    pub fn rotated(&self, theta: f64) -> [[f64; 2]; 2] {
        let (s, c) = theta.sin_cos();
        let m00 = c * c * self.e0 + 2.0 * s * c * self.c + s * s * self.e_mu;
        let m11 = s * s * self.e0 - 2.0 * s * c * self.c + c * c * self.e_mu;
        let m01 = s * c * (self.e_mu - self.e0) + (c * c - s * s) * self.c;
        [[m00, m01], [m01, m11]]
    }

    /// Lower eigenvalue.
    pub fn lower(&self) -> f64 {
        let mean = 0.5 * (self.e0 + self.e_mu);
        let half = 0.5 * (self.e0 - self.e_mu);
        mean - half.hypot(self.c)
    }
}

/// Angle bringing the lower eigenvector onto the reference, and that
/// eigenvalue.
pub fn solve_givens(block: &EffectiveBlock) -> (f64, f64) {
    let e_next = block.lower();
    let EffectiveBlock { e0, e_mu, c } = *block;
    if c == 0.0 {
        // already diagonal; swap only if the excited entry is lower
        return if e0 <= e_mu { (0.0, e0) } else { (FRAC_PI_2, e_mu) };
    }
    if e0 == e_mu {
        return (-FRAC_PI_4 * c.signum(), e_next);
    }
    let theta0 = 0.5 * (2.0 * c / (e0 - e_mu)).atan();
    let alt = if theta0 > 0.0 { theta0 - FRAC_PI_2 } else { theta0 + FRAC_PI_2 };
    let theta = if block.rotated(theta0)[0][0] <= block.rotated(alt)[0][0] {
        theta0
    } else {
        alt
    };
    (theta, e_next)
}

/// Expectation values of the original Hamiltonian on prepared states.
pub trait Backend {
    /// `⟨ψ|H|ψ⟩` with `|ψ⟩ = Û v |Φ0⟩`, where `v` is the optional
    /// pre-rotation `e^{iθμ̂}` applied to the reference before the circuit.
    fn expectation(&mut self, circuit: &Circuit, pre_rotation: Option<(&Generator, f64)>) -> Result<f64>;

    /// Exact energy of `Û|Φ0⟩` when the backend can provide it.
    fn noiseless_energy(&self, _circuit: &Circuit) -> Result<Option<f64>> {
        Ok(None)
    }
}

/// Exact statevector simulation, optionally with per-term shot noise.
pub struct StatevectorBackend {
    n_qubits: usize,
    reference: Determinant,
    hamiltonian: FermionOperator,
    pauli: Option<PauliOperator>,
    shots: Option<u64>,
    rng: ChaCha8Rng,
    exec: Execution,
}

impl StatevectorBackend {
    pub fn new(hamiltonian: FermionOperator, n_qubits: usize, reference: Determinant, exec: Execution) -> Self {
        StatevectorBackend {
            n_qubits,
            reference,
            hamiltonian,
            pauli: None,
            shots: None,
            rng: ChaCha8Rng::seed_from_u64(0),
            exec,
        }
    }

    /// Every expectation is estimated from `shots` ±1 outcomes per Pauli
    /// string of the qubit Hamiltonian.
    pub fn with_shots(mut self, shots: u64, seed: u64) -> Self {
        self.pauli = Some(jordan_wigner(&self.hamiltonian));
        self.shots = Some(shots);
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self
    }

    pub fn prepare(&self, circuit: &Circuit, pre_rotation: Option<(&Generator, f64)>) -> Result<Statevector> {
        let mut psi = Statevector::basis_state(self.n_qubits, self.reference)?;
        if let Some((g, theta)) = pre_rotation {
            psi.apply_rotation(g, theta, self.exec);
        }
        circuit.apply(&mut psi, self.exec);
        Ok(psi)
    }

    /// Noiseless energy of the circuit state.
    pub fn exact_energy(&self, circuit: &Circuit) -> Result<f64> {
        self.prepare(circuit, None)?.expectation_fermion(&self.hamiltonian, self.exec)
    }
}

impl Backend for StatevectorBackend {
    fn expectation(&mut self, circuit: &Circuit, pre_rotation: Option<(&Generator, f64)>) -> Result<f64> {
        let psi = self.prepare(circuit, pre_rotation)?;
        match (self.shots, &self.pauli) {
            (Some(shots), Some(pauli)) => {
                let seed = self.rng.next_u64();
                Ok(psi.expectation_sampled(pauli, shots, seed, self.exec)?.value)
            }
            _ => psi.expectation_fermion(&self.hamiltonian, self.exec),
        }
    }

    fn noiseless_energy(&self, circuit: &Circuit) -> Result<Option<f64>> {
        self.exact_energy(circuit).map(Some)
    }
}

/// Two measurements: `E_μ` at a π/2 pre-rotation and the π/4 value, from
/// which `c = E_{π/4} − (E0 + E_μ)/2`. `e0` is carried over, not measured.
pub fn measure_block<B: Backend + ?Sized>(
    backend: &mut B,
    circuit: &Circuit,
    generator: &Generator,
    e0: f64,
) -> Result<EffectiveBlock> {
    let e_mu = backend.expectation(circuit, Some((generator, FRAC_PI_2)))?;
    let e_quarter = backend.expectation(circuit, Some((generator, FRAC_PI_4)))?;
    Ok(EffectiveBlock {
        e0,
        e_mu,
        c: e_quarter - 0.5 * (e0 + e_mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(e0: f64, e_mu: f64, c: f64) -> EffectiveBlock {
        EffectiveBlock { e0, e_mu, c }
    }

    #[test]
    fn diagonal_blocks() {
        assert_eq!(solve_givens(&block(-1.0, 2.0, 0.0)), (0.0, -1.0));
        let (theta, e) = solve_givens(&block(2.0, -1.0, 0.0));
        assert_eq!(e, -1.0);
        assert_eq!(block(2.0, -1.0, 0.0).rotated(theta)[0][0], -1.0);
    }

    #[test]
    fn off_diagonal_only() {
        let b = block(0.0, 0.0, 1.0);
        let (theta, e) = solve_givens(&b);
        assert_eq!(e, -1.0);
        let r = b.rotated(theta);
        assert!((r[0][0] + 1.0).abs() < 1e-15);
        assert!(r[0][1].abs() < 1e-15);
    }

    #[test]
    fn closed_form_lower_root() {
        let b = block(-1.0, 1.0, 0.1);
        let (theta, e) = solve_givens(&b);
        assert!((e + 1.01f64.sqrt()).abs() < 1e-15);
        let r = b.rotated(theta);
        assert!((r[0][0] - e).abs() < 1e-14);
        assert!(r[0][1].abs() < 1e-14);
    }

    #[test]
    fn inverted_block_picks_lower_root() {
        let b = block(1.0, -1.0, 0.3);
        let (theta, e) = solve_givens(&b);
        assert!(e < -1.0);
        assert!((b.rotated(theta)[0][0] - e).abs() < 1e-14);
    }
}
