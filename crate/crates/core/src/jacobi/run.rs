use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::block::{measure_block, solve_givens, Backend, EffectiveBlock, StatevectorBackend};
use super::circuit::{merge_step, CnotCounter};
use super::residual::ResidualVector;
use super::selection::{generator_from_determinant, SelectionPhase, SelectionState};
use super::truncation::{TruncationMode, TruncationPolicy};
use super::{ApproxHamiltonian, Flavor};
use crate::diagnostics::{participation_ratio, shannon_entropy, topk_mass, WeightDistribution};
use crate::exec::Execution;
use crate::hamiltonian::MolecularProblem;
use crate::jw::jordan_wigner;
use crate::statevector::{Circuit, Determinant, GivensStep};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Qubit operators, amplitude truncation.
    Pqj,
    /// Fermionic operators, rank-aware truncation.
    Fqj,
    /// Fermionic operators, cumulant screening then rank-aware truncation.
    Cfqj,
    ExactFermion,
    ExactPauli,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Pqj, Method::Fqj, Method::Cfqj, Method::ExactFermion, Method::ExactPauli];

    pub fn flavor(self) -> Flavor {
        match self {
            Method::Pqj | Method::ExactPauli => Flavor::Pauli,
            _ => Flavor::Fermionic,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Method::ExactFermion | Method::ExactPauli)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Pqj => "pqj",
            Method::Fqj => "fqj",
            Method::Cfqj => "cfqj",
            Method::ExactFermion => "exact-fermion",
            Method::ExactPauli => "exact-pauli",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-bch-fermionic" => return Ok(Method::ExactFermion),
            "exact-bch-pauli" => return Ok(Method::ExactPauli),
            _ => {}
        }
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    /// Stop once the residual norm falls below this.
    pub residual_floor: f64,
    /// Stop once `|ΔE|` stays below this for `energy_window` cycles.
    pub energy_change_floor: Option<f64>,
    pub energy_window: usize,
}

impl Default for Convergence {
    fn default() -> Self {
        Convergence {
            residual_floor: 1e-7,
            energy_change_floor: Some(1e-9),
            energy_window: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub method: Method,
    pub epsilon: f64,
    /// Cumulant threshold (cfqj only); defaults to `10ε`.
    pub kappa: Option<f64>,
    pub max_cycles: usize,
    pub shots_per_term: Option<u64>,
    pub rng_seed: u64,
    pub merge_threshold: Option<f64>,
    pub convergence: Convergence,
    #[serde(skip)]
    pub execution: Execution,
    /// Store every residual amplitude in the cycle records.
    pub record_residuals: bool,
    /// `K` values for the top-K mass columns.
    pub top_k: Vec<usize>,
}

impl RunConfig {
    pub fn new(method: Method) -> Self {
        RunConfig {
            method,
            epsilon: 0.0,
            kappa: None,
            max_cycles: 100,
            shots_per_term: None,
            rng_seed: 0,
            merge_threshold: None,
            convergence: Convergence::default(),
            execution: Execution::default(),
            record_residuals: false,
            top_k: vec![1, 10, 100],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be finite and nonnegative");
        }
        if let Some(k) = self.kappa {
            if self.method != Method::Cfqj {
                return bad("kappa applies to cfqj only");
            }
            if !(k.is_finite() && k >= self.epsilon) {
                return bad("kappa must be finite and at least epsilon");
            }
        }
        if self.shots_per_term == Some(0) {
            return bad("shots per term must be at least 1");
        }
        if let Some(t) = self.merge_threshold {
            if !(t >= 0.0 && t.is_finite()) {
                return bad("merge threshold must be finite and nonnegative");
            }
        }
        if self.top_k.contains(&0) {
            return bad("top-K values must be at least 1");
        }
        Ok(())
    }

    pub fn truncation_policy(&self, n_electrons: usize) -> Option<TruncationPolicy> {
        let mode = match self.method {
            Method::Pqj => TruncationMode::Amplitude,
            Method::Fqj | Method::Cfqj => TruncationMode::RankAware,
            Method::ExactFermion | Method::ExactPauli => return None,
        };
        let kappa = match self.method {
            Method::Cfqj => Some(self.kappa.unwrap_or(10.0 * self.epsilon)),
            _ => None,
        };
        Some(TruncationPolicy {
            mode,
            epsilon: self.epsilon,
            kappa,
            n_electrons,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualSource {
    Exact,
    Approximate,
}

/// One line of the run trace. Cycle 0 is the reference record; residual
/// statistics always describe `H^(k)` after the cycle's transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    /// `E^(k)`, the lower root of the last block (Hartree).
    pub energy: f64,
    /// `⟨Φ0|H^(k)|Φ0⟩` of the tracked operator.
    pub reference_energy: f64,
    pub generator: Option<String>,
    pub target: Option<u64>,
    /// `c̃` of the selected determinant.
    pub pick_amplitude: Option<f64>,
    pub coupling: Option<f64>,
    pub e_mu: Option<f64>,
    pub theta: Option<f64>,
    pub merged: bool,
    pub term_count: usize,
    pub residual_norm: f64,
    pub residual_support: usize,
    pub entropy: Option<f64>,
    pub participation_ratio: Option<f64>,
    pub topk_mass: Vec<TopKMass>,
    pub expectation_count: usize,
    pub circuit_length: usize,
    pub cnot_estimate: usize,
    pub phase: SelectionPhase,
    pub residual_source: ResidualSource,
    /// Noiseless circuit energy, reported for shot-noise and merged runs
    /// where it can differ from `energy`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_amplitudes: Option<Vec<(u64, f64)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopKMass {
    pub k: usize,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "detail")]
pub enum Termination {
    MaxCycles,
    ResidualConverged,
    EnergyConverged,
    SelectionExhausted,
    Aborted(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub method: Method,
    pub rng_seed: u64,
    pub records: Vec<CycleRecord>,
    pub k_c: Option<usize>,
    pub termination: Termination,
    pub circuit: Circuit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: Method,
    pub rng_seed: u64,
    pub cycles: usize,
    pub final_energy: f64,
    pub final_state_energy: Option<f64>,
    pub k_c: Option<usize>,
    pub expectation_count: usize,
    pub final_term_count: usize,
    pub circuit_length: usize,
    pub cnot_estimate: usize,
    pub termination: Termination,
}

impl RunTrace {
    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }

    pub fn final_record(&self) -> &CycleRecord {
        self.records.last().expect("trace holds the reference record")
    }

    pub fn cycles(&self) -> usize {
        self.records.len() - 1
    }

    pub fn summary(&self) -> RunSummary {
        let last = self.final_record();
        RunSummary {
            method: self.method,
            rng_seed: self.rng_seed,
            cycles: self.cycles(),
            final_energy: last.energy,
            final_state_energy: last.state_energy,
            k_c: self.k_c,
            expectation_count: last.expectation_count,
            final_term_count: last.term_count,
            circuit_length: last.circuit_length,
            cnot_estimate: last.cnot_estimate,
            termination: self.termination.clone(),
        }
    }
}

/// Stepwise driver. `H^(k)`, the circuit and the records are observable
/// between cycles.
pub struct JacobiRun<B: Backend> {
    config: RunConfig,
    reference: Determinant,
    n_electrons: usize,
    policy: Option<TruncationPolicy>,
    hamiltonian: ApproxHamiltonian,
    residual: ResidualVector,
    energy: f64,
    circuit: Circuit,
    selection: SelectionState,
    backend: B,
    cnots: CnotCounter,
    records: Vec<CycleRecord>,
    termination: Option<Termination>,
}

impl JacobiRun<StatevectorBackend> {
    /// Run on the built-in statevector backend (noisy if shots are set).
    pub fn new(problem: &MolecularProblem, config: RunConfig) -> Result<Self> {
        let mut backend = StatevectorBackend::new(
            problem.hamiltonian.clone(),
            problem.n_qubits,
            problem.hf_determinant,
            config.execution,
        );
        if let Some(shots) = config.shots_per_term {
            backend = backend.with_shots(shots, config.rng_seed.wrapping_add(0x9E37_79B9_7F4A_7C15));
        }
        Self::with_backend(problem, config, backend)
    }
}

impl<B: Backend> JacobiRun<B> {
    pub fn with_backend(problem: &MolecularProblem, config: RunConfig, backend: B) -> Result<Self> {
        config.validate()?;
        let reference = problem.hf_determinant;
        let hamiltonian = match config.method.flavor() {
            Flavor::Fermionic => ApproxHamiltonian::Fermion(problem.hamiltonian.clone()),
            Flavor::Pauli => ApproxHamiltonian::Pauli(jordan_wigner(&problem.hamiltonian)),
        };
        let policy = config.truncation_policy(problem.n_electrons);
        let mut run = JacobiRun {
            selection: SelectionState::new(config.rng_seed),
            config,
            reference,
            n_electrons: problem.n_electrons,
            policy,
            residual: ResidualVector::default(),
            energy: 0.0,
            hamiltonian,
            circuit: Circuit::new(),
            backend,
            cnots: CnotCounter::new(),
            records: Vec::new(),
            termination: None,
        };
        run.residual = run.current_residual();
        run.energy = run.residual.reference_energy();
        let record = run.record(0, None);
        run.records.push(record);
        Ok(run)
    }

    fn current_residual(&self) -> ResidualVector {
        let r = self.hamiltonian.residual(self.reference);
        match self.hamiltonian.flavor() {
            Flavor::Pauli => r.restricted_to_electrons(self.n_electrons),
            Flavor::Fermionic => r,
        }
    }

    pub fn hamiltonian(&self) -> &ApproxHamiltonian {
        &self.hamiltonian
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn residual(&self) -> &ResidualVector {
        &self.residual
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn records(&self) -> &[CycleRecord] {
        &self.records
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn termination(&self) -> Option<&Termination> {
        self.termination.as_ref()
    }

    pub fn cycles_done(&self) -> usize {
        self.records.len() - 1
    }

    fn record(&mut self, cycle: usize, step: Option<StepInfo>) -> CycleRecord {
        let dist = WeightDistribution::from_amplitudes(self.residual.iter().map(|(_, c)| c));
        let topk_mass = match &dist {
            Some(d) => self
                .config
                .top_k
                .iter()
                .map(|&k| TopKMass { k, mass: topk_mass(d, k) })
                .collect(),
            None => Vec::new(),
        };
        let residual_source = if self.config.method.is_exact() {
            ResidualSource::Exact
        } else {
            ResidualSource::Approximate
        };
        CycleRecord {
            cycle,
            energy: self.energy,
            reference_energy: self.residual.reference_energy(),
            generator: step.as_ref().map(|s| s.label.clone()),
            target: step.as_ref().map(|s| s.target),
            pick_amplitude: step.as_ref().map(|s| s.pick_amplitude),
            coupling: step.as_ref().map(|s| s.block.c),
            e_mu: step.as_ref().map(|s| s.block.e_mu),
            theta: step.as_ref().map(|s| s.theta),
            merged: step.as_ref().is_some_and(|s| s.merged),
            term_count: self.hamiltonian.term_count(),
            residual_norm: self.residual.norm(),
            residual_support: self.residual.len(),
            entropy: dist.as_ref().map(shannon_entropy),
            participation_ratio: dist.as_ref().map(participation_ratio),
            topk_mass,
            expectation_count: 2 * cycle,
            circuit_length: self.circuit.len(),
            cnot_estimate: self.cnots.circuit_cost(&self.circuit),
            phase: self.selection.phase(),
            residual_source,
            state_energy: step.and_then(|s| s.state_energy),
            residual_amplitudes: self
                .config
                .record_residuals
                .then(|| self.residual.iter().map(|(d, c)| (d.bits(), c)).collect()),
        }
    }

    fn energy_converged(&self) -> bool {
        let Some(floor) = self.config.convergence.energy_change_floor else {
            return false;
        };
        let w = self.config.convergence.energy_window;
        if w == 0 || self.records.len() <= w {
            return false;
        }
        self.records[self.records.len() - w - 1..]
            .windows(2)
            .all(|p| (p[1].energy - p[0].energy).abs() < floor)
    }

    /// Runs one cycle. Returns `false` once the run has terminated.
    pub fn step(&mut self) -> bool {
        if self.termination.is_some() {
            return false;
        }
        let cycle = self.cycles_done() + 1;
        if cycle > self.config.max_cycles {
            self.termination = Some(Termination::MaxCycles);
            return false;
        }
        if self.residual.norm() < self.config.convergence.residual_floor {
            self.termination = Some(Termination::ResidualConverged);
            return false;
        }
        match self.cycle(cycle) {
            Ok(true) => {}
            Ok(false) => {
                self.termination = Some(Termination::SelectionExhausted);
                return false;
            }
            Err(e) => {
                self.termination = Some(Termination::Aborted(e.to_string()));
                return false;
            }
        }
        if self.energy_converged() {
            self.termination = Some(Termination::EnergyConverged);
            return false;
        }
        true
    }

    fn cycle(&mut self, cycle: usize) -> Result<bool> {
        let Some(target) = self.selection.select(&self.residual, cycle) else {
            return Ok(false);
        };
        let pick_amplitude = self.residual.get(target);
        let generator = generator_from_determinant(self.reference, target, self.config.method.flavor())?;
        let block = measure_block(&mut self.backend, &self.circuit, &generator, self.energy)?;
        let (theta, e_next) = solve_givens(&block);
        let label = generator.label();
        let transformed = self.hamiltonian.transform(&generator, theta, self.config.execution)?;
        let merged = merge_step(
            &mut self.circuit,
            GivensStep {
                generator,
                angle: theta,
            },
            self.config.merge_threshold,
        );
        self.hamiltonian = transformed.truncated(self.policy.as_ref(), self.reference)?;
        self.residual = self.current_residual();
        self.energy = e_next;
        let state_energy = if self.config.shots_per_term.is_some() || self.config.merge_threshold.is_some() {
            self.backend.noiseless_energy(&self.circuit)?
        } else {
            None
        };
        let info = StepInfo {
            label,
            target: target.bits(),
            pick_amplitude,
            block,
            theta,
            merged,
            state_energy,
        };
        let record = self.record(cycle, Some(info));
        self.records.push(record);
        Ok(true)
    }

    /// Runs to termination and returns the trace.
    pub fn finish(mut self) -> RunTrace {
        while self.step() {}
        RunTrace {
            method: self.config.method,
            rng_seed: self.config.rng_seed,
            records: self.records,
            k_c: self.selection.k_c(),
            termination: self.termination.unwrap_or(Termination::MaxCycles),
            circuit: self.circuit,
        }
    }
}

struct StepInfo {
    label: String,
    target: u64,
    pick_amplitude: f64,
    block: EffectiveBlock,
    theta: f64,
    merged: bool,
    state_energy: Option<f64>,
}

/// Full QJ loop on the statevector backend.
pub fn run_quantum_jacobi(problem: &MolecularProblem, config: RunConfig) -> Result<RunTrace> {
    Ok(JacobiRun::new(problem, config)?.finish())
}
