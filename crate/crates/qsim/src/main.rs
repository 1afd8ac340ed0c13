//! `qsim`: run circuits, benchmark backends and explore local models.
//!
//! Exit status is 0 on success, 2 for usage errors and unreadable or invalid
//! input, and 3 when a backend or solver fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qsim_core::bench::{self, DepthRule};
use qsim_core::circuit::{classify_gottesman_knill, library, parse_circuit};
use qsim_core::lhv::{
    self, find_local_model, mermin_correlators, pauli_alphabets, quantum_table, Arithmetic,
    CommTopology, CorrelationTable, FindOptions, LocalModel, LpOutcome,
};
use qsim_core::report::{self, Format};
use qsim_core::{stabilizer, statevector, Backend};

#[derive(Parser)]
#[command(
    name = "qsim",
    version,
    about = "Quantum circuit simulator and locality laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a `.qc` circuit and print outcome counts as JSON.
    Run {
        /// Defaults to the stabilizer backend for Gottesman-Knill circuits, dense otherwise.
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, env = "QSIM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        circuit: PathBuf,
    },
    /// Time a backend on random Clifford circuits over a range of sizes.
    Bench {
        #[arg(long, value_enum)]
        backend: BackendArg,
        #[arg(long)]
        min_n: usize,
        #[arg(long)]
        max_n: usize,
        /// Gate count, or gates per qubit with `--depth-scale linear`.
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = DepthScale::Fixed)]
        depth_scale: DepthScale,
        #[arg(long, default_value_t = 1)]
        shots: u64,
        #[arg(long, env = "QSIM_SEED", default_value_t = 0)]
        seed: u64,
        /// `.csv` files get CSV rows, anything else JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Bell {
        #[command(subcommand)]
        command: BellCommand,
    },
    Lhv {
        #[command(subcommand)]
        command: LhvCommand,
    },
}

#[derive(Subcommand)]
enum BellCommand {
    /// Sweep the singlet CHSH value over rotated settings.
    Chsh {
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, env = "QSIM_SEED", default_value_t = 0)]
        seed: u64,
        /// `.csv` files get `t,s,s_sampled` rows, anything else JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LhvCommand {
    /// Search for a local model of a state's Pauli statistics.
    Find {
        #[arg(long, value_enum)]
        state: StateArg,
        #[arg(long, default_value_t = 0)]
        bits: usize,
        /// Messages as `sender>receiver`, parties numbered from 1, e.g. `2>1,3>2`.
        #[arg(long)]
        topology: Option<String>,
        #[arg(long, value_enum, default_value_t = ArithmeticArg::Auto)]
        arithmetic: ArithmeticArg,
        /// Merge strategies with identical tables before solving.
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a model file written by `lhv find`.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, env = "QSIM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Sv,
    Stab,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Sv => Backend::StateVector,
            BackendArg::Stab => Backend::Stabilizer,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DepthScale {
    Fixed,
    Linear,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateArg {
    Singlet,
    Ghz3,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArithmeticArg {
    Auto,
    Exact,
    Float,
}

enum Failure {
    Usage(anyhow::Error),
    Backend(anyhow::Error),
}

type CliResult = Result<(), Failure>;

trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn backend(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
    fn backend(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Backend(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            backend,
            shots,
            seed,
            out,
            circuit,
        } => run(backend, shots, seed, out.as_deref(), &circuit),
        Command::Bench {
            backend,
            min_n,
            max_n,
            depth,
            depth_scale,
            shots,
            seed,
            out,
        } => bench(
            backend.into(),
            min_n,
            max_n,
            depth,
            depth_scale,
            shots,
            seed,
            out.as_deref(),
        ),
        Command::Bell {
            command:
                BellCommand::Chsh {
                    steps,
                    shots,
                    seed,
                    out,
                },
        } => chsh(steps, shots, seed, out.as_deref()),
        Command::Lhv {
            command:
                LhvCommand::Find {
                    state,
                    bits,
                    topology,
                    arithmetic,
                    dedup,
                    out,
                },
        } => find(
            state,
            bits,
            topology.as_deref(),
            arithmetic,
            dedup,
            out.as_deref(),
        ),
        Command::Lhv {
            command:
                LhvCommand::Simulate {
                    model,
                    shots,
                    seed,
                    out,
                },
        } => simulate(&model, shots, seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("qsim: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Backend(e)) => {
            eprintln!("qsim: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => report::write_text(path, text).backend(),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn is_csv(out: Option<&Path>) -> bool {
    out.and_then(Path::extension)
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn run(
    backend: Option<BackendArg>,
    shots: u64,
    seed: u64,
    out: Option<&Path>,
    path: &Path,
) -> CliResult {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .usage()?;
    let circuit = parse_circuit(&text)
        .with_context(|| format!("{}", path.display()))
        .usage()?;
    let backend = match backend {
        Some(b) => b.into(),
        None if classify_gottesman_knill(&circuit).is_gk => Backend::Stabilizer,
        None => Backend::StateVector,
    };
    let result = match backend {
        Backend::StateVector => statevector::run(&circuit, shots, seed),
        Backend::Stabilizer => stabilizer::run(&circuit, shots, seed),
    }
    .backend()?;
    emit(out, &report::to_json(&result).backend()?)
}

#[allow(clippy::too_many_arguments)]
fn bench(
    backend: Backend,
    min_n: usize,
    max_n: usize,
    depth: usize,
    scale: DepthScale,
    shots: u64,
    seed: u64,
    out: Option<&Path>,
) -> CliResult {
    if min_n < 2 {
        return Err(Failure::Usage(anyhow!("--min-n must be at least 2")));
    }
    if depth == 0 {
        return Err(Failure::Usage(anyhow!("--depth must be at least 1")));
    }
    if backend == Backend::StateVector && max_n > statevector::MAX_QUBITS {
        return Err(Failure::Usage(anyhow!(
            "the dense backend is limited to {} qubits",
            statevector::MAX_QUBITS
        )));
    }
    let rule = match scale {
        DepthScale::Fixed => DepthRule::Fixed(depth),
        DepthScale::Linear => DepthRule::Linear(depth),
    };
    let ns = bench::n_values(backend, min_n, max_n);
    let report = bench::bench_scaling(backend, &ns, rule, shots, seed).backend()?;
    let format = if is_csv(out) {
        Format::Csv
    } else {
        Format::Json
    };
    emit(out, &report::render_bench(&report, format).backend()?)
}

fn chsh(steps: usize, shots: u64, seed: u64, out: Option<&Path>) -> CliResult {
    if steps == 0 {
        return Err(Failure::Usage(anyhow!("--steps must be at least 1")));
    }
    let singlet = statevector::evolve(&library::gk_entangler()).backend()?;
    let sweep = lhv::chsh_sweep(&singlet, steps, shots, seed).backend()?;
    let pauli = quantum_table(&singlet, &pauli_alphabets(2)).backend()?;
    if is_csv(out) {
        let mut text = String::from("t,s,s_sampled\n");
        for p in &sweep.points {
            text += &format!(
                "{},{},{}\n",
                report::format_float(p.t),
                report::format_float(p.s),
                report::format_float(p.s_sampled)
            );
        }
        return emit(out, &text);
    }
    let mut doc = serde_json::to_value(&sweep).backend()?;
    doc["pauli_max_abs_s"] = json!(lhv::max_chsh(&pauli).backend()?);
    doc["classical_bound"] = json!(2.0);
    emit(out, &report::to_json(&doc).backend()?)
}

fn find(
    state: StateArg,
    bits: usize,
    topology: Option<&str>,
    arithmetic: ArithmeticArg,
    dedup: bool,
    out: Option<&Path>,
) -> CliResult {
    let topology: CommTopology = match (topology, state, bits) {
        (Some(t), _, _) => t.parse().usage()?,
        (None, _, 0) => CommTopology::none(),
        (None, StateArg::Ghz3, 1) => "2>1".parse().usage()?,
        (None, _, _) => {
            return Err(Failure::Usage(anyhow!(
                "--bits {bits} needs an explicit --topology"
            )))
        }
    };
    if topology.budget() != bits {
        return Err(Failure::Usage(anyhow!(
            "topology {topology:?} sends {} bits but --bits is {bits}",
            topology.budget()
        )));
    }
    let (name, circuit) = match state {
        StateArg::Singlet => ("singlet", library::gk_entangler()),
        StateArg::Ghz3 => ("ghz3", library::ghz(3)),
    };
    let psi = statevector::evolve(&circuit).backend()?;
    let target = quantum_table(&psi, &pauli_alphabets(psi.n_qubits())).backend()?;
    topology.check_parties(target.parties()).usage()?;
    let options = FindOptions {
        arithmetic: match arithmetic {
            ArithmeticArg::Auto => Arithmetic::Auto,
            ArithmeticArg::Exact => Arithmetic::Exact,
            ArithmeticArg::Float => Arithmetic::Float,
        },
        dedup,
    };
    let outcome = match find_local_model(&target, &topology, options) {
        Ok(o) => o,
        Err(e @ (lhv::LhvError::TooManyStrategies { .. } | lhv::LhvError::Shape(_))) => {
            return Err(Failure::Usage(e.into()))
        }
        Err(e) => return Err(Failure::Backend(e.into())),
    };
    let arithmetic = if outcome.is_exact() { "exact" } else { "float" };
    let doc = match outcome {
        LpOutcome::Feasible(f) => {
            let mut doc = serde_json::to_value(&f.model).backend()?;
            doc["status"] = json!("feasible");
            doc["strategy_indices"] = json!(f.indices);
            doc["max_error"] = json!(f.max_error);
            if let Some(w) = f.exact_weights {
                doc["exact_weights"] = json!(w.iter().map(ToString::to_string).collect::<Vec<_>>());
            }
            doc
        }
        LpOutcome::Infeasible(c) => {
            let mut certificate = json!({
                "coefficients": c.coefficients,
                "bound": c.bound,
                "target_value": c.target_value,
                "max_local_value": c.max_local_value,
            });
            if let Some((coefficients, bound)) = &c.exact {
                let ints: Vec<Vec<String>> = coefficients
                    .iter()
                    .map(|row| row.iter().map(ToString::to_string).collect())
                    .collect();
                certificate["exact_coefficients"] = json!(ints);
                certificate["exact_bound"] = json!(bound.to_string());
            }
            json!({
                "status": "infeasible",
                "alphabets": target.alphabets,
                "topology": topology,
                "certificate": certificate,
            })
        }
    };
    let mut doc = doc;
    doc["state"] = json!(name);
    doc["arithmetic"] = json!(arithmetic);
    emit(out, &report::to_json(&doc).backend()?)
}

fn simulate(path: &Path, shots: u64, seed: u64, out: Option<&Path>) -> CliResult {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .usage()?;
    let doc: Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not JSON", path.display()))
        .usage()?;
    if doc.get("status").and_then(Value::as_str) == Some("infeasible") {
        return Err(Failure::Usage(anyhow!(
            "{} holds a certificate, not a model",
            path.display()
        )));
    }
    let model: LocalModel = serde_json::from_value(doc)
        .with_context(|| format!("{} is not a model file", path.display()))
        .usage()?;
    model.validate().usage()?;
    let sim = lhv::simulate_model(&model, shots, seed).backend()?;
    let analytic = model.induced_table().backend()?;
    let mut doc = json!({
        "shots": shots,
        "seed": seed,
        "topology": model.topology,
        "bits_used_per_shot": sim.bits_used_per_shot,
        "profile_shots": sim.profile_shots,
        "empirical": sim.empirical,
        "max_tvd_to_model": sim.empirical.max_tvd(&analytic),
    });
    if let Some(m) = mermin(&sim.empirical) {
        doc["mermin"] = json!(m);
    }
    emit(out, &report::to_json(&doc).backend()?)
}

fn mermin(table: &CorrelationTable) -> Option<[f64; 4]> {
    mermin_correlators(table).ok()
}
