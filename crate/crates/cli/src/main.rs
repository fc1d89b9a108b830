use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qjacobi::fci::{enumerate_determinants, problem_ground_state};
use qjacobi::jacobi::{run_quantum_jacobi, Method, RunConfig, Termination};
use qjacobi::jw::jordan_wigner;
use qjacobi::{Execution, MolecularProblem};
use qjacobi_cli::{
    batch_sweep, diagnostics_series, load_problem, read_trace, summary_row, write_diagnostics, write_summary,
    write_trace, Categorize, CliResult, Failure,
};

/// Largest determinant space diagonalized automatically for error reporting.
const AUTO_FCI_LIMIT: usize = 2000;

#[derive(Parser)]
#[command(name = "qjacobi", version, about = "Quantum Jacobi diagonalization runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one QJ calculation.
    Run(RunArgs),
    /// Exact ground state by dense diagonalization.
    Fci(FciArgs),
    /// List the Jordan–Wigner qubit Hamiltonian.
    JwDump(JwArgs),
    /// Entropy, participation ratio and top-K mass per cycle of a trace.
    Diag(DiagArgs),
    /// Independent seeded runs, aggregated into one summary table.
    Sweep(SweepArgs),
}

// Aliases keep clap from treating these as optional flags; `none` is an explicit value.
type MaybeShots = Option<u64>;
type MaybeFloat = Option<f64>;

fn parse_optional<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    if s.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|e: T::Err| e.to_string())
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: qjacobi::Error| e.to_string())
}

#[derive(Args, Clone)]
struct MethodArgs {
    #[arg(long)]
    fcidump: PathBuf,
    /// pqj | fqj | cfqj | exact-fermion | exact-pauli
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// cfqj only; defaults to 10·epsilon.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 100)]
    max_cycles: usize,
    /// Shots per Pauli term, or `none` for exact expectations.
    #[arg(long, value_parser = parse_optional::<u64>, default_value = "none")]
    shots: MaybeShots,
    /// Rotation angles below this merge into an earlier identical gate; `none` disables.
    #[arg(long, value_parser = parse_optional::<f64>, default_value = "none")]
    merge_threshold: MaybeFloat,
    #[arg(long, default_value_t = 1e-7)]
    residual_floor: f64,
    /// `none` disables the energy-change stopping rule.
    #[arg(long, value_parser = parse_optional::<f64>, default_value = "1e-9")]
    energy_floor: MaybeFloat,
    /// Store all residual amplitudes in the trace.
    #[arg(long)]
    record_residuals: bool,
    /// Sequential execution inside each run.
    #[arg(long)]
    serial: bool,
    /// Reference energy for error columns; computed by FCI when small enough.
    #[arg(long)]
    fci_energy: Option<f64>,
}

impl MethodArgs {
    fn config(&self, seed: u64) -> RunConfig {
        let mut c = RunConfig::new(self.method);
        c.epsilon = self.epsilon;
        c.kappa = self.kappa;
        c.max_cycles = self.max_cycles;
        c.shots_per_term = self.shots;
        c.rng_seed = seed;
        c.merge_threshold = self.merge_threshold;
        c.convergence.residual_floor = self.residual_floor;
        c.convergence.energy_change_floor = self.energy_floor;
        c.record_residuals = self.record_residuals;
        c.execution = if self.serial { Execution::Serial } else { Execution::Parallel };
        c
    }

    fn reference_energy(&self, problem: &MolecularProblem) -> CliResult<Option<f64>> {
        if self.fci_energy.is_some() {
            return Ok(self.fci_energy);
        }
        let dim = enumerate_determinants(problem.n_qubits, problem.n_electrons, Some(problem.ms2()))
            .kind("input")?
            .len();
        if dim > AUTO_FCI_LIMIT {
            return Ok(None);
        }
        Ok(Some(problem_ground_state(problem, true).kind("fci")?.energy))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: MethodArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct FciArgs {
    #[arg(long)]
    fcidump: PathBuf,
    /// Diagonalize the whole particle-number sector instead of the reference S_z sector.
    #[arg(long)]
    any_sz: bool,
    /// CSV dump of the ground-state amplitudes.
    #[arg(long)]
    vector: Option<PathBuf>,
}

#[derive(Args)]
struct JwArgs {
    #[arg(long)]
    fcidump: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DiagArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: MethodArgs,
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long)]
    summary: PathBuf,
    /// Directory for per-seed traces (`seed_<n>.jsonl`).
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::new("io", format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_run(args: RunArgs) -> CliResult<()> {
    let problem = load_problem(&args.common.fcidump)?;
    let reference = args.common.reference_energy(&problem)?;
    let trace = run_quantum_jacobi(&problem, args.common.config(args.seed)).kind("config")?;
    if let Some(p) = &args.trace {
        write_trace(p, &trace)?;
    }
    let row = summary_row(&trace, reference);
    if let Some(p) = &args.summary {
        write_summary(p, std::slice::from_ref(&row))?;
    }
    println!("{}", serde_json::to_string(&row).kind("io")?);
    if let Termination::Aborted(m) = &trace.termination {
        return Err(Failure::new("run", m));
    }
    Ok(())
}

fn cmd_fci(args: FciArgs) -> CliResult<()> {
    let problem = load_problem(&args.fcidump)?;
    let g = problem_ground_state(&problem, !args.any_sz).kind("fci")?;
    if let Some(p) = &args.vector {
        let mut w = csv::Writer::from_path(p).map_err(|e| Failure::new("io", format!("{}: {e}", p.display())))?;
        w.write_record(["determinant", "bits", "re", "im"]).kind("io")?;
        for (d, a) in g.basis.determinants().iter().zip(&g.vector) {
            w.write_record([
                d.bits().to_string(),
                d.to_bitstring(problem.n_qubits),
                a.re.to_string(),
                a.im.to_string(),
            ])
            .kind("io")?;
        }
        w.flush().kind("io")?;
    }
    let out = serde_json::json!({
        "energy": g.energy,
        "hf_energy": problem.hf_energy(),
        "dimension": g.basis.len(),
        "n_qubits": problem.n_qubits,
        "n_electrons": problem.n_electrons,
    });
    println!("{out}");
    Ok(())
}

fn cmd_jw(args: JwArgs) -> CliResult<()> {
    let problem = load_problem(&args.fcidump)?;
    let qubit = jordan_wigner(&problem.hamiltonian);
    let mut out = output(args.output.as_deref())?;
    for (k, c) in qubit.iter() {
        let label = if k.is_identity() { "I".to_string() } else { k.to_string() };
        writeln!(out, "{:+.16e}\t{:+.16e}\t{}", c.re, c.im, label).kind("io")?;
    }
    out.flush().kind("io")
}

fn cmd_diag(args: DiagArgs) -> CliResult<()> {
    let records = read_trace(&args.trace)?;
    write_diagnostics(output(args.output.as_deref())?, &diagnostics_series(&records))
}

fn cmd_sweep(args: SweepArgs) -> CliResult<()> {
    if args.seeds == 0 {
        return Err(Failure::new("bad-flags", "--seeds must be at least 1"));
    }
    let problem = load_problem(&args.common.fcidump)?;
    let reference = args.common.reference_energy(&problem)?;
    let configs: Vec<RunConfig> = (0..args.seeds).map(|i| args.common.config(args.seed_start + i)).collect();
    let traces = batch_sweep(&problem, &configs)?;
    if let Some(dir) = &args.trace_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::new("io", format!("{}: {e}", dir.display())))?;
        for t in &traces {
            write_trace(&dir.join(format!("seed_{}.jsonl", t.rng_seed)), t)?;
        }
    }
    let rows: Vec<_> = traces.iter().map(|t| summary_row(t, reference)).collect();
    write_summary(&args.summary, &rows)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("{}", Failure::new("bad-flags", first).to_json_line());
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Fci(a) => cmd_fci(a),
        Command::JwDump(a) => cmd_jw(a),
        Command::Diag(a) => cmd_diag(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json_line());
            ExitCode::FAILURE
        }
    }
}
