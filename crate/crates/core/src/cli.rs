//! Command-line front end. `run_with` takes explicit output streams so the
//! whole surface can be exercised in-process.

use crate::benchmark::{run_grid_experiment, run_uniform_experiment, search_bound_optimal, to_csv, BenchmarkConfig};
use crate::instance::{load_instance, Instance, InstanceError, SequencePair};
use crate::lagrangian::{LagrangianError, SolverConfig};
use crate::mnbc::{check_bruteforce_with, encode_with, random_feasibility, CenterRule, EncodeOptions, MnbcError, ZeroTwoFeasibility};
use crate::oracle::{sandwich, OracleError, DEFAULT_RESOLUTION};
use crate::report::{BoundReport, Method, SequenceLabels};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "minmax-bounds", version, about = "Lower bounds for two-stage min-max generalization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds of one action sequence, as JSON.
    Bounds {
        instance: PathBuf,
        #[arg(long)]
        u0: String,
        #[arg(long)]
        u1: String,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Bound-optimal sequence for each method, as JSON.
    Search {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Benchmark experiments, as CSV.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// {0,2}-programming to MNBC reduction.
    #[command(subcommand)]
    Mnbc(MnbcCommand),
    /// Grid reference for the second stage and the full bound sandwich.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        u0: String,
        #[arg(long)]
        u1: String,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Samples on the regular grid, i = 1..imax.
    Grid {
        #[command(flatten)]
        common: ExperimentArgs,
    },
    /// Uniform samples averaged over trials, i = 1..imax.
    Uniform {
        #[command(flatten)]
        common: ExperimentArgs,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    imax: Option<usize>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Full-size run: imax = 15 and trials = 100.
    #[arg(long)]
    full_scale: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Subcommand)]
pub enum MnbcCommand {
    /// Encode a {0,2}-feasibility system as an MNBC instance.
    Encode {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        options: EncodeArgs,
    },
    /// Compare both problems by enumerating {0,2}^d.
    Check {
        /// System to check; omit with --fuzz.
        #[arg(required_unless_present = "fuzz")]
        input: Option<PathBuf>,
        /// Check this many random systems instead.
        #[arg(long, conflicts_with = "input")]
        fuzz: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        options: EncodeArgs,
    },
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Offset inequality balls by r * a instead of r * a / |a|.
    #[arg(long)]
    literal: bool,
    /// Keep right-hand sides that exceed the cube maximum of a^T x.
    #[arg(long)]
    no_clamp: bool,
}

impl EncodeArgs {
    fn options(&self) -> EncodeOptions {
        EncodeOptions {
            center_rule: if self.literal { CenterRule::Literal } else { CenterRule::Normalized },
            clamp_rhs: !self.no_clamp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cgrl,
    Tr,
    Ld,
    All,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Cgrl => vec![Method::Cgrl],
            MethodArg::Tr => vec![Method::Tr],
            MethodArg::Ld => vec![Method::Ld],
            MethodArg::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    gradient_tolerance: Option<f64>,
    #[arg(long)]
    margin_m: Option<f64>,
    #[arg(long)]
    margin_c: Option<f64>,
    #[arg(long)]
    initial_step: Option<f64>,
    #[arg(long)]
    backtracking: Option<f64>,
    /// Skip the interior Newton phase and run projected gradient ascent only.
    #[arg(long)]
    no_barrier: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, CliError> {
        let mut c = SolverConfig::default();
        if let Some(v) = self.max_iterations {
            c.max_iterations = v;
        }
        for (value, slot, name) in [
            (self.gradient_tolerance, &mut c.gradient_tolerance, "gradient-tolerance"),
            (self.margin_m, &mut c.margin_m, "margin-m"),
            (self.margin_c, &mut c.margin_c, "margin-c"),
            (self.initial_step, &mut c.initial_step, "initial-step"),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Input(format!("--{name} must be positive, got {v}")));
                }
                *slot = v;
            }
        }
        if let Some(v) = self.backtracking {
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::Input(format!("--backtracking must lie in (0, 1), got {v}")));
            }
            c.backtracking = v;
        }
        c.barrier_phase = !self.no_barrier;
        Ok(c)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Mnbc(#[from] MnbcError),
    #[error("solver failure: {0}")]
    Solver(#[from] LagrangianError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) => EXIT_SOLVER,
            _ => EXIT_INPUT,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Dual(e) => CliError::Solver(e),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    Ok(load_instance(&read(path)?)?)
}

fn write_output(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.into(), source }),
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct SearchEntry {
    method: Method,
    sequence: SequenceLabels,
    bound: f64,
}

#[derive(Serialize)]
struct SearchOutput {
    results: Vec<SearchEntry>,
}

#[derive(Serialize)]
struct OracleOutput {
    sequence: SequenceLabels,
    #[serde(flatten)]
    report: crate::oracle::SandwichReport,
    holds: bool,
}

#[derive(Serialize)]
struct CheckOutput {
    ip_feasible: bool,
    mnbc_feasible_on_cube: bool,
    agree: bool,
    witness: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct FuzzOutput {
    instances: usize,
    disagreements: usize,
    agree: bool,
}

fn sequence_of(inst: &Instance, u0: &str, u1: &str) -> Result<SequencePair, CliError> {
    Ok(inst.sequence(u0, u1)?)
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Input("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Input(e.to_string())),
    }
}

fn experiment(cmd: &ExperimentCommand, out: &mut dyn Write) -> Result<(), CliError> {
    let config = BenchmarkConfig::default();
    let (common, uniform) = match cmd {
        ExperimentCommand::Grid { common } => (common, None),
        ExperimentCommand::Uniform { common, trials, seed } => (common, Some((*trials, *seed))),
    };
    let solver = common.solver.config()?;
    let imax = common.imax.unwrap_or(if common.full_scale { 15 } else { 8 });
    if imax == 0 {
        return Err(CliError::Input("--imax must be at least 1".into()));
    }
    let text = match uniform {
        None => with_jobs(common.jobs, || run_grid_experiment(imax, &config, &solver))?
            .map(|rows| to_csv(&rows, false))?,
        Some((trials, seed)) => {
            let trials = trials.unwrap_or(if common.full_scale { 100 } else { 20 });
            if trials == 0 {
                return Err(CliError::Input("--trials must be at least 1".into()));
            }
            with_jobs(common.jobs, || run_uniform_experiment(imax, trials, seed, &config, &solver))?
                .map(|rows| to_csv(&rows, true))?
        }
    };
    write_output(&text, common.out.as_deref(), out)
}

fn mnbc(cmd: &MnbcCommand, out: &mut dyn Write) -> Result<(), CliError> {
    let parse = |path: &Path| -> Result<ZeroTwoFeasibility, CliError> {
        serde_json::from_str(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    };
    match cmd {
        MnbcCommand::Encode { input, out: path, options } => {
            let m = encode_with(&parse(input)?, options.options())?;
            write_output(&json(&m), path.as_deref(), out)
        }
        MnbcCommand::Check { input: Some(input), options, .. } => {
            let r = check_bruteforce_with(&parse(input)?, options.options())?;
            let report = CheckOutput {
                ip_feasible: r.ip_feasible,
                mnbc_feasible_on_cube: r.mnbc_feasible_on_cube,
                agree: r.agrees(),
                witness: r.witness,
            };
            write_output(&json(&report), None, out)
        }
        MnbcCommand::Check { input: None, fuzz, seed, options } => {
            let n = fuzz.unwrap_or(0);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut disagreements = 0;
            for _ in 0..n {
                let f = random_feasibility(&mut rng, 6, 4);
                if !check_bruteforce_with(&f, options.options())?.agrees() {
                    disagreements += 1;
                }
            }
            let report = FuzzOutput { instances: n, disagreements, agree: disagreements == 0 };
            write_output(&json(&report), None, out)
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Bounds { instance, u0, u1, method, solver } => {
            let inst = read_instance(instance)?;
            let seq = sequence_of(&inst, u0, u1)?;
            let report = BoundReport::compute(&inst, seq, &method.methods(), &solver.config()?)?;
            write_output(&json(&report), None, out)
        }
        Command::Search { instance, method, solver } => {
            let inst = read_instance(instance)?;
            let solver = solver.config()?;
            let mut results = Vec::new();
            for m in method.methods() {
                let (seq, bound) = search_bound_optimal(&inst, m, &solver)?;
                results.push(SearchEntry {
                    method: m,
                    sequence: SequenceLabels::of(&inst, seq),
                    bound,
                });
            }
            write_output(&json(&SearchOutput { results }), None, out)
        }
        Command::Experiment(cmd) => experiment(cmd, out),
        Command::Mnbc(cmd) => mnbc(cmd, out),
        Command::Oracle { instance, u0, u1, resolution, solver } => {
            let inst = read_instance(instance)?;
            let seq = sequence_of(&inst, u0, u1)?;
            let report = sandwich(&inst, seq, *resolution, &solver.config()?)?;
            let output = OracleOutput {
                sequence: SequenceLabels::of(&inst, seq),
                holds: report.holds(),
                report,
            };
            write_output(&json(&output), None, out)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
