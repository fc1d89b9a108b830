//! Output formats and batch orchestration behind the `qjacobi` binary.
//!
//! Traces are JSON lines, one [`TraceLine`] per cycle record. Summaries are
//! CSV rows of [`SummaryRow`]. Both carry [`SCHEMA_VERSION`].

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use qjacobi::diagnostics::{participation_ratio, shannon_entropy, topk_mass, WeightDistribution};
use qjacobi::fcidump::parse_fcidump;
use qjacobi::jacobi::{run_quantum_jacobi, CycleRecord, RunConfig, RunTrace, Termination};
use qjacobi::{build_hamiltonian, Execution, MolecularProblem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Error category plus a one-line message.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(kind: &'static str, message: impl fmt::Display) -> Self {
        Failure {
            kind,
            message: message.to_string().replace('\n', " "),
        }
    }

    /// `{"error":kind,"message":...}` on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

pub type CliResult<T> = Result<T, Failure>;

pub trait Categorize<T> {
    fn kind(self, kind: &'static str) -> CliResult<T>;
}

impl<T, E: fmt::Display> Categorize<T> for Result<T, E> {
    fn kind(self, kind: &'static str) -> CliResult<T> {
        self.map_err(|e| Failure::new(kind, e))
    }
}

pub fn load_problem(path: &Path) -> CliResult<MolecularProblem> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    let data = parse_fcidump(&text).map_err(|e| Failure::new("parse", format!("{}: {e}", path.display())))?;
    build_hamiltonian(&data).kind("input")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub schema_version: u32,
    #[serde(flatten)]
    pub record: CycleRecord,
}

fn finite_record(r: &CycleRecord) -> bool {
    let scalars = [r.energy, r.reference_energy, r.residual_norm];
    let optional = [r.pick_amplitude, r.coupling, r.e_mu, r.theta, r.entropy, r.participation_ratio, r.state_energy];
    scalars.iter().all(|x| x.is_finite())
        && optional.iter().flatten().all(|x| x.is_finite())
        && r.topk_mass.iter().all(|t| t.mass.is_finite())
        && r.residual_amplitudes.iter().flatten().all(|(_, c)| c.is_finite())
}

pub fn write_trace(path: &Path, trace: &RunTrace) -> CliResult<()> {
    let file = File::create(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    for record in &trace.records {
        if !finite_record(record) {
            return Err(Failure::new("schema", format!("non-finite value in cycle {}", record.cycle)));
        }
        let line = TraceLine {
            schema_version: SCHEMA_VERSION,
            record: record.clone(),
        };
        serde_json::to_writer(&mut out, &line).kind("io")?;
        out.write_all(b"\n").kind("io")?;
    }
    out.flush().kind("io")
}

pub fn read_trace(path: &Path) -> CliResult<Vec<CycleRecord>> {
    let file = File::open(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.kind("io")?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TraceLine =
            serde_json::from_str(&line).map_err(|e| Failure::new("schema", format!("line {}: {e}", i + 1)))?;
        if parsed.schema_version != SCHEMA_VERSION {
            return Err(Failure::new(
                "schema",
                format!("line {}: schema version {} (expected {SCHEMA_VERSION})", i + 1, parsed.schema_version),
            ));
        }
        records.push(parsed.record);
    }
    Ok(records)
}

/// Per-run summary; columns are fixed in declaration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub schema_version: u32,
    pub method: String,
    pub seed: u64,
    pub cycles: usize,
    pub final_energy: f64,
    pub final_state_energy: Option<f64>,
    pub fci_energy: Option<f64>,
    pub fci_error: Option<f64>,
    pub k_c: Option<usize>,
    pub expectation_count: usize,
    pub final_term_count: usize,
    pub circuit_length: usize,
    pub cnot_estimate: usize,
    pub termination: String,
}

pub const SUMMARY_COLUMNS: [&str; 14] = [
    "schema_version",
    "method",
    "seed",
    "cycles",
    "final_energy",
    "final_state_energy",
    "fci_energy",
    "fci_error",
    "k_c",
    "expectation_count",
    "final_term_count",
    "circuit_length",
    "cnot_estimate",
    "termination",
];

fn termination_label(t: &Termination) -> String {
    match t {
        Termination::MaxCycles => "max-cycles".into(),
        Termination::ResidualConverged => "residual-converged".into(),
        Termination::EnergyConverged => "energy-converged".into(),
        Termination::SelectionExhausted => "selection-exhausted".into(),
        Termination::Aborted(m) => format!("aborted: {m}"),
    }
}

pub fn summary_row(trace: &RunTrace, fci_energy: Option<f64>) -> SummaryRow {
    let s = trace.summary();
    SummaryRow {
        schema_version: SCHEMA_VERSION,
        method: s.method.to_string(),
        seed: s.rng_seed,
        cycles: s.cycles,
        final_energy: s.final_energy,
        final_state_energy: s.final_state_energy,
        fci_energy,
        fci_error: fci_energy.map(|e| s.final_state_energy.unwrap_or(s.final_energy) - e),
        k_c: s.k_c,
        expectation_count: s.expectation_count,
        final_term_count: s.final_term_count,
        circuit_length: s.circuit_length,
        cnot_estimate: s.cnot_estimate,
        termination: termination_label(&s.termination),
    }
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    for row in rows {
        let optional = [row.final_state_energy, row.fci_energy, row.fci_error];
        if !row.final_energy.is_finite() || optional.iter().flatten().any(|e| !e.is_finite()) {
            return Err(Failure::new("schema", "non-finite summary value"));
        }
        w.serialize(row).kind("io")?;
    }
    w.flush().kind("io")
}

pub fn read_summary(path: &Path) -> CliResult<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    r.deserialize().map(|row| row.kind("schema")).collect()
}

/// Independent runs, in parallel across configurations and sequential
/// within each; results keep the input order and share no state.
pub fn batch_sweep(problem: &MolecularProblem, configs: &[RunConfig]) -> CliResult<Vec<RunTrace>> {
    configs
        .par_iter()
        .map(|c| {
            let mut c = c.clone();
            c.execution = Execution::Serial;
            run_quantum_jacobi(problem, c).kind("config")
        })
        .collect()
}

/// Diagnostics time series computed from a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagRow {
    pub cycle: usize,
    pub expectation_count: usize,
    pub energy: f64,
    pub residual_norm: f64,
    pub support: usize,
    pub entropy: Option<f64>,
    pub participation_ratio: Option<f64>,
    pub topk: Vec<(usize, f64)>,
}

/// Uses stored residual amplitudes when present, otherwise the statistics
/// already in the records.
pub fn diagnostics_series(records: &[CycleRecord]) -> Vec<DiagRow> {
    records
        .iter()
        .map(|r| {
            let (support, entropy, pr, topk) = match &r.residual_amplitudes {
                Some(amps) => {
                    let d = WeightDistribution::from_amplitudes(amps.iter().map(|(_, c)| *c));
                    let ks: Vec<usize> = r.topk_mass.iter().map(|t| t.k).collect();
                    match d {
                        Some(d) => (
                            d.support(),
                            Some(shannon_entropy(&d)),
                            Some(participation_ratio(&d)),
                            ks.iter().map(|&k| (k, topk_mass(&d, k))).collect(),
                        ),
                        None => (0, None, None, Vec::new()),
                    }
                }
                None => (
                    r.residual_support,
                    r.entropy,
                    r.participation_ratio,
                    r.topk_mass.iter().map(|t| (t.k, t.mass)).collect(),
                ),
            };
            DiagRow {
                cycle: r.cycle,
                expectation_count: r.expectation_count,
                energy: r.energy,
                residual_norm: r.residual_norm,
                support,
                entropy,
                participation_ratio: pr,
                topk,
            }
        })
        .collect()
}

pub fn write_diagnostics<W: Write>(out: W, rows: &[DiagRow]) -> CliResult<()> {
    let mut ks: Vec<usize> = rows.iter().flat_map(|r| r.topk.iter().map(|(k, _)| *k)).collect();
    ks.sort_unstable();
    ks.dedup();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["cycle", "expectation_count", "energy", "residual_norm", "support", "entropy", "participation_ratio"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(ks.iter().map(|k| format!("top{k}_mass")));
    w.write_record(&header).kind("io")?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        let mut rec = vec![
            r.cycle.to_string(),
            r.expectation_count.to_string(),
            r.energy.to_string(),
            r.residual_norm.to_string(),
            r.support.to_string(),
            opt(r.entropy),
            opt(r.participation_ratio),
        ];
        for k in &ks {
            rec.push(opt(r.topk.iter().find(|(kk, _)| kk == k).map(|(_, m)| *m)));
        }
        w.write_record(&rec).kind("io")?;
    }
    w.flush().kind("io")
}
