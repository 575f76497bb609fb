//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use caei_core::cake::{greedy_contiguous, max_welfare_fixed_agents, solve_existence};
use caei_core::discrete::{max_welfare_relaxed, solve_caei};
use caei_core::divisible::{max_welfare_caei, solve_eg, DEFAULT_EG_TOLERANCE};
use caei_core::exactmath::{from_f64, parse_rational, Rational};
use caei_core::model::{CaeiSolution, Clearing, Grouping, Instance, ModelKind};
use caei_core::verify::{oracle_caei_search, oracle_max_satisfiable, verify_caei};
use caei_core::Error;
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde::Serialize;

use crate::files::{self, FileError, ReportFile};
use crate::generate::{generate, GenError, GenSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_GUARD: i32 = 4;
/// The solver gave up (no convergence) or hit an internal inconsistency.
pub const EXIT_SOLVER: i32 = 5;

/// Default tolerance for verifying solutions marked inexact.
pub const INEXACT_TOLERANCE: (i64, i64) = (1, 1_000_000);

#[derive(Parser, Debug)]
#[command(name = "caei", version, about = "Competitive allocations from equal incomes for single-minded agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute some equilibrium for an instance.
    Solve {
        file: PathBuf,
        /// Divisible goods only: Eisenberg-Gale (floating point) or the exact LP search.
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Write the solution here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a welfare-maximizing equilibrium.
    Maxwelfare {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Group::Types)]
        group: Group,
        /// Let copies remain unsold (discrete goods only, required there).
        #[arg(long)]
        relaxed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution against an instance; exits 0 iff it is an equilibrium.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        /// Absolute tolerance; defaults to 0 for exact solutions and 1e-6 otherwise.
        #[arg(long)]
        tol: Option<String>,
        /// Allow unsold resources regardless of what the solution file records.
        #[arg(long)]
        relaxed: bool,
    },
    /// Brute-force ground truth for small instances.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleKind::Caei)]
        kind: OracleKind,
    },
    /// Write a random instance.
    Gen {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        agents: usize,
        /// Goods (divisible), items (discrete), or the most intervals per demand (cake).
        #[arg(long)]
        goods: usize,
        #[arg(long)]
        seed: u64,
        /// Cake only: single-interval demands.
        #[arg(long)]
        contiguous: bool,
        /// Exactly this many distinct demands.
        #[arg(long)]
        types: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Eg,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Group {
    Types,
    Agents,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Satisfiable,
    Caei,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Divisible,
    Cake,
    Discrete,
}

/// A failed command: exit status and message for standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInput(_) | Error::ModelMismatch(_) => EXIT_USAGE,
            Error::Infeasible | Error::NoCaei => EXIT_INFEASIBLE,
            Error::GuardExceeded(_) => EXIT_GUARD,
            Error::NonConvergence { .. } | Error::Internal(_) | Error::ExactMath(_) => EXIT_SOLVER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        Failure::usage(e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn file_failure(path: &Path, e: FileError) -> Failure {
    let code = match &e {
        FileError::Model(inner) => Failure::from(inner.clone()).code,
        _ => EXIT_USAGE,
    };
    Failure {
        code,
        message: format!("{}: {e}", path.display()),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    files::parse_instance(&read_text(path)?).map_err(|e| file_failure(path, e))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write output: {e}"))),
    }
}

fn solve(instance: &Instance, method: Method) -> Result<CaeiSolution, Failure> {
    match (instance, method) {
        (Instance::Divisible(inst), Method::Eg) => Ok(solve_eg(inst, DEFAULT_EG_TOLERANCE)?),
        (Instance::Divisible(inst), Method::Exact) => Ok(max_welfare_caei(inst, Grouping::ByTypes)?),
        (_, Method::Eg) => Err(Failure::usage("--method eg applies to divisible instances only")),
        (Instance::Cake(inst), Method::Exact) => Ok(solve_existence(inst)?),
        (Instance::Discrete(inst), Method::Exact) => Ok(solve_caei(inst)?),
    }
}

fn max_welfare(instance: &Instance, group: Group, relaxed: bool) -> Result<CaeiSolution, Failure> {
    let grouping = match group {
        Group::Types => Grouping::ByTypes,
        Group::Agents => Grouping::ByAgents,
    };
    match instance {
        Instance::Discrete(inst) if relaxed => Ok(max_welfare_relaxed(inst, grouping)?),
        Instance::Discrete(_) => Err(Failure::usage(
            "welfare maximization with full clearing is not available for discrete goods; \
             pass --relaxed, or use `oracle --kind caei` on small instances",
        )),
        _ if relaxed => Err(Failure::usage("--relaxed applies to discrete instances only")),
        Instance::Divisible(inst) => Ok(max_welfare_caei(inst, grouping)?),
        Instance::Cake(inst) if inst.demands().iter().all(|d| d.intervals().len() == 1) => {
            Ok(greedy_contiguous(inst)?)
        }
        Instance::Cake(inst) => Ok(max_welfare_fixed_agents(inst)?),
    }
}

fn parse_tolerance(text: &str) -> Result<Rational, Failure> {
    let value = parse_rational(text)
        .ok()
        .or_else(|| text.trim().parse::<f64>().ok().and_then(from_f64))
        .ok_or_else(|| Failure::usage(format!("--tol: cannot parse {text:?} as a number")))?;
    if value.is_negative() {
        return Err(Failure::usage("--tol must be nonnegative"));
    }
    Ok(value)
}

#[derive(Serialize)]
struct SatisfiableOutput {
    welfare: usize,
    witness: Vec<usize>,
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Solve { file, method, out } => {
            let instance = load_instance(&file)?;
            let sol = solve(&instance, method)?;
            emit(&files::solution_json(&sol), out.as_deref(), stdout)?;
        }
        Command::Maxwelfare { file, group, relaxed, out } => {
            let instance = load_instance(&file)?;
            let sol = max_welfare(&instance, group, relaxed)?;
            emit(&files::solution_json(&sol), out.as_deref(), stdout)?;
        }
        Command::Verify { instance, solution, tol, relaxed } => {
            let inst = load_instance(&instance)?;
            let sol = files::parse_solution(&read_text(&solution)?, &inst).map_err(|e| {
                let mut f = file_failure(&solution, e);
                if f.code == EXIT_USAGE && f.message.contains("`served`") {
                    f.code = EXIT_VERIFY_FAILED;
                }
                f
            })?;
            let tolerance = match tol {
                Some(text) => parse_tolerance(&text)?,
                None if sol.exact => Rational::from_integer(0.into()),
                None => Rational::new(INEXACT_TOLERANCE.0.into(), INEXACT_TOLERANCE.1.into()),
            };
            let clearing = if relaxed { Clearing::Relaxed } else { sol.clearing };
            let report = verify_caei(&inst, &sol, &tolerance, clearing)?;
            emit(&files::render(&ReportFile::new(&report, &tolerance, clearing)), None, stdout)?;
            return Ok(if report.is_caei { EXIT_OK } else { EXIT_VERIFY_FAILED });
        }
        Command::Oracle { file, kind } => {
            let instance = load_instance(&file)?;
            let text = match kind {
                OracleKind::Satisfiable => {
                    let (welfare, witness) = oracle_max_satisfiable(&instance)?;
                    files::render(&SatisfiableOutput { welfare, witness })
                }
                OracleKind::Caei => files::solution_json(&oracle_caei_search(&instance)?),
            };
            emit(&text, None, stdout)?;
        }
        Command::Gen { model, agents, goods, seed, contiguous, types, out } => {
            let spec = GenSpec {
                model: match model {
                    Model::Divisible => ModelKind::Divisible,
                    Model::Cake => ModelKind::Cake,
                    Model::Discrete => ModelKind::Discrete,
                },
                agents,
                goods,
                seed,
                contiguous,
                types,
            };
            emit(&files::instance_json(&generate(&spec)?), out.as_deref(), stdout)?;
        }
    }
    Ok(EXIT_OK)
}

/// Runs one command line and returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
