//! Dense statevector simulation standing in for the quantum device.
//!
//! Qubit `k` holds the occupation of spin orbital `k` (Jordan–Wigner), so a
//! determinant is simply a basis index.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::fermion::{FermionGenerator, FermionOperator};
use crate::pauli::{PauliGenerator, PauliKey, PauliOperator};
use crate::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 26;

/// Imaginary residue tolerated in expectation values of Hermitian operators.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// Occupation bitstring; bit `k` set means spin orbital `k` is occupied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Determinant(u64);

impl Determinant {
    pub fn new(bits: u64) -> Self {
        Determinant(bits)
    }

    /// The `n_electrons` lowest spin orbitals occupied.
    pub fn aufbau(n_electrons: usize) -> Self {
        assert!(n_electrons <= 64);
        Determinant(if n_electrons == 64 {
            !0
        } else {
            (1u64 << n_electrons) - 1
        })
    }

    pub fn bits(&self) -> u64 {
        self.0
    }

    pub fn electrons(&self) -> usize {
        self.0.count_ones() as usize
    }

    /// Bitstring with qubit 0 rightmost.
    pub fn to_bitstring(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .rev()
            .map(|q| if self.0 >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:b}", self.0)
    }
}

/// Hermitian generator `μ̂` of a Givens rotation `e^{iθμ̂}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    Pauli(PauliGenerator),
    /// `μ̂ = −iA`, so `e^{iθμ̂} = e^{θA}`.
    Fermion(FermionGenerator),
}

impl Generator {
    pub fn label(&self) -> String {
        match self {
            Generator::Pauli(g) => g.key().to_string(),
            Generator::Fermion(g) => {
                let sign = if g.sign() < 0.0 { "-" } else { "+" };
                format!("{sign}{}", g.excitation())
            }
        }
    }

    /// Determinant reached from `reference` (bits flipped by the generator).
    pub fn target(&self, reference: Determinant) -> Determinant {
        match self {
            Generator::Pauli(g) => Determinant(reference.0 ^ g.key().x),
            Generator::Fermion(g) => {
                let e = g.excitation();
                Determinant(reference.0 ^ e.cre ^ e.ann)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GivensStep {
    pub generator: Generator,
    pub angle: f64,
}

/// Ordered rotations `u^(1), u^(2), …` of `Û = u^(1) u^(2) ⋯ u^(k)`.
///
/// Acting on a state, the last step is applied first.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    steps: Vec<GivensStep>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<GivensStep>) -> Self {
        Circuit { steps }
    }

    pub fn push(&mut self, step: GivensStep) {
        assert!(step.angle.is_finite(), "non-finite rotation angle");
        self.steps.push(step);
    }

    pub fn steps(&self) -> &[GivensStep] {
        &self.steps
    }

    pub fn steps_mut(&mut self) -> &mut [GivensStep] {
        &mut self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `Û |state⟩`.
    pub fn apply(&self, state: &mut Statevector, exec: Execution) {
        for step in self.steps.iter().rev() {
            state.apply_rotation(&step.generator, step.angle, exec);
        }
    }

    /// `Û |reference⟩`.
    pub fn prepare(&self, n_qubits: usize, reference: Determinant, exec: Execution) -> Result<Statevector> {
        let mut s = Statevector::basis_state(n_qubits, reference)?;
        self.apply(&mut s, exec);
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Computational basis state `|d⟩`.
    pub fn basis_state(n_qubits: usize, d: Determinant) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits, MAX_QUBITS));
        }
        let dim = 1usize << n_qubits;
        if (d.0 as u128) >= dim as u128 {
            return Err(Error::Backend(format!(
                "determinant {d} does not fit in {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[d.0 as usize] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1usize << n_qubits);
        Statevector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, d: Determinant) -> Complex64 {
        self.amps[d.0 as usize]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_rotation(&mut self, generator: &Generator, theta: f64, exec: Execution) {
        match generator {
            Generator::Pauli(g) => self.apply_pauli_rotation(g.key(), theta, exec),
            Generator::Fermion(g) => self.apply_fermionic_rotation(g, theta, exec),
        }
    }

    /// `|ψ⟩ ← (cos θ + i sin θ P)|ψ⟩`.
    pub fn apply_pauli_rotation(&mut self, p: PauliKey, theta: f64, exec: Execution) {
        if theta == 0.0 {
            return;
        }
        let (s, c) = theta.sin_cos();
        let is = Complex64::new(0.0, s);
        let old = &self.amps;
        // (Pψ)[j] = phase(j ^ x) ψ[j ^ x]
        let new = exec.map_range(old.len(), |j| {
            let src = j as u64 ^ p.x;
            let (_, ph) = p.apply(src);
            c * old[j] + is * ph * old[src as usize]
        });
        self.amps = new;
    }

    /// `A|ψ⟩` for a real anti-Hermitian generator, gathered row by row:
    /// `(Aψ)_j = −Σ_d ⟨d|A|j⟩ ψ_d`.
    fn apply_anti_hermitian(&self, g: &FermionGenerator, exec: Execution) -> Vec<Complex64> {
        let amps = &self.amps;
        exec.map_range(amps.len(), |j| match g.apply(j as u64) {
            Some((d, s)) => -s * amps[d as usize],
            None => Complex64::new(0.0, 0.0),
        })
    }

    /// `|ψ⟩ ← (I + sin θ A + (1 − cos θ) A²)|ψ⟩`.
    pub fn apply_fermionic_rotation(&mut self, g: &FermionGenerator, theta: f64, exec: Execution) {
        if theta == 0.0 {
            return;
        }
        let (s, c) = theta.sin_cos();
        let a1 = self.apply_anti_hermitian(g, exec);
        let tmp = Statevector {
            n_qubits: self.n_qubits,
            amps: a1,
        };
        let a2 = tmp.apply_anti_hermitian(g, exec);
        let u = 1.0 - c;
        exec.for_each_mut(&mut self.amps, |j, x| {
            *x += s * tmp.amps[j] + u * a2[j];
        });
    }

    fn expectation_fermion_complex(&self, h: &FermionOperator, exec: Execution) -> Complex64 {
        let terms: Vec<_> = h.iter().map(|(k, c)| (*k, *c)).collect();
        let amps = &self.amps;
        let constant = h.constant();
        exec.chunked_sum(amps.len(), |d| {
            let a = amps[d];
            if a == Complex64::new(0.0, 0.0) {
                return Complex64::new(0.0, 0.0);
            }
            let mut off = Complex64::new(0.0, 0.0);
            for (k, c) in &terms {
                if let Some((d2, s)) = k.apply(d as u64) {
                    off += amps[d2 as usize].conj() * (s * c);
                }
            }
            Complex64::new(a.norm_sqr() * constant, 0.0) + off * a
        })
    }

    /// `⟨ψ|H|ψ⟩` for a Hermitian fermionic operator.
    pub fn expectation_fermion(&self, h: &FermionOperator, exec: Execution) -> Result<f64> {
        real_part(self.expectation_fermion_complex(h, exec))
    }

    /// `⟨ψ|P|ψ⟩` for a single Pauli string.
    pub fn pauli_string_expectation(&self, p: PauliKey) -> Complex64 {
        let amps = &self.amps;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, a) in amps.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (t, ph) = p.apply(j as u64);
            acc += amps[t as usize].conj() * ph * a;
        }
        acc
    }

    /// Per-term `⟨P_i⟩` in operator order (identity included).
    pub fn pauli_expectations(&self, h: &PauliOperator, exec: Execution) -> Vec<(PauliKey, Complex64, f64)> {
        let terms: Vec<_> = h.iter().map(|(k, c)| (*k, *c)).collect();
        exec.map(&terms, |&(k, c)| {
            let e = if k.is_identity() {
                self.norm().powi(2)
            } else {
                self.pauli_string_expectation(k).re
            };
            (k, c, e)
        })
    }

    pub fn expectation_pauli(&self, h: &PauliOperator, exec: Execution) -> Result<f64> {
        let terms: Vec<_> = h.iter().map(|(k, c)| (*k, *c)).collect();
        let per_term = exec.map(&terms, |&(k, c)| c * self.pauli_string_expectation(k));
        real_part(per_term.into_iter().sum())
    }

    /// Shot-noise estimate of `⟨ψ|H|ψ⟩`: each non-identity string gets
    /// `shots_per_term` independent ±1 outcomes with mean `⟨P_i⟩`.
    pub fn expectation_sampled(
        &self,
        h: &PauliOperator,
        shots_per_term: u64,
        rng_seed: u64,
        exec: Execution,
    ) -> Result<SampledEstimate> {
        if shots_per_term == 0 {
            return Err(Error::Config("shots_per_term must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut value = 0.0;
        let mut total_shots = 0u64;
        for (k, c, e) in self.pauli_expectations(h, exec) {
            if c.im.abs() > IMAG_TOLERANCE {
                return Err(Error::NotHermitian(c.im.abs()));
            }
            if k.is_identity() {
                value += c.re;
                continue;
            }
            let p_plus = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
            let plus = Binomial::new(shots_per_term, p_plus)
                .map_err(|e| Error::Backend(e.to_string()))?
                .sample(&mut rng);
            let mean = (2.0 * plus as f64 - shots_per_term as f64) / shots_per_term as f64;
            value += c.re * mean;
            total_shots += shots_per_term;
        }
        Ok(SampledEstimate { value, total_shots })
    }
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOLERANCE {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledEstimate {
    pub value: f64,
    pub total_shots: u64,
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &Statevector, b: &Statevector) -> f64 {
    a.inner(b).norm_sqr().min(1.0)
}
