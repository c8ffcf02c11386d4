//! Command-line front end: reads a JSON problem, runs one task, writes a JSON
//! report.
//!
//! Exit codes: 0 when a decision was made (either way, including an
//! exhausted solver budget), 2 for invalid input (no report is written),
//! 3 for numerical indeterminacy (a report with verdict `"indeterminate"`).

pub mod fixtures;
pub mod schema;
pub mod tasks;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use model_space_lab::Variant;

use schema::{ProblemFile, ReportFile, Task, Verdict, INDETERMINATE};
use tasks::{Overrides, Settings, SEED_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numerically indeterminate: {0}")]
    Indeterminate(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Indeterminate(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "model-space-lab", version, about = "Truncated Toeplitz operators on three-dimensional model spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Modified Clark basis: level set, phases, norms.
    ClarkBasis(TaskArgs),
    /// Matrix of a TTO in the Clark basis (symbol defaults to z).
    TtoMatrix(TaskArgs),
    /// Determinant test with a least-squares certificate.
    CheckDetthm(TaskArgs),
    /// Clark-basis relation between s4, s5 and s6.
    CheckClarkS6(TaskArgs),
    /// Search for a real orthogonal U making U S Uᵀ satisfy the Clark relation.
    SolveSo3(TaskArgs),
    /// Corollary families against random Clark bases.
    Corollary(TaskArgs),
    /// Regenerate the golden problem/report pairs.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct TaskArgs {
    /// Problem file.
    #[arg(long = "in", value_name = "PROBLEM")]
    input: PathBuf,
    /// Report file; standard output when omitted.
    #[arg(long, value_name = "REPORT")]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    quadrature_points: Option<usize>,
    #[arg(long)]
    variant: Option<Variant>,
}

impl TaskArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            tol: self.tol,
            seed: self.seed,
            starts: self.starts,
            quadrature_points: self.quadrature_points,
            variant: self.variant,
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let result = match cli.command {
        Command::Fixtures { dir } => fixtures::write_all(&dir).map(|_| 0),
        Command::ClarkBasis(a) => run_task(Task::ClarkBasis, &a, env_seed.as_deref()),
        Command::TtoMatrix(a) => run_task(Task::TtoMatrix, &a, env_seed.as_deref()),
        Command::CheckDetthm(a) => run_task(Task::CheckDetthm, &a, env_seed.as_deref()),
        Command::CheckClarkS6(a) => run_task(Task::CheckClarkS6, &a, env_seed.as_deref()),
        Command::SolveSo3(a) => run_task(Task::SolveSo3, &a, env_seed.as_deref()),
        Command::Corollary(a) => run_task(Task::Corollary, &a, env_seed.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("model-space-lab: {e}");
            e.exit_code()
        }
    }
}

fn run_task(task: Task, args: &TaskArgs, env_seed: Option<&str>) -> Result<u8, CliError> {
    let text = read(&args.input)?;
    let problem = ProblemFile::parse(&text)?;
    let settings = Settings::resolve(&problem, &args.overrides(), env_seed)?;
    let report = tasks::execute(task, &problem, &settings, true)?;
    let json = report.to_json()?;
    match &args.out {
        Some(path) => write(path, &json)?,
        None => {
            let _ = std::io::stdout().write_all(json.as_bytes());
        }
    }
    Ok(exit_code(&report))
}

pub fn exit_code(report: &ReportFile) -> u8 {
    match &report.verdict {
        Verdict::Status(s) if s == INDETERMINATE => {
            if let Some(d) = &report.diagnostic {
                eprintln!("model-space-lab: numerically indeterminate: {d}");
            }
            3
        }
        _ => 0,
    }
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    // an unreadable problem file is an input error, not an i/o failure
    fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub(crate) fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
