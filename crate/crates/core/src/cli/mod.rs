//! Command-line front end: `solve`, `verify`, `sweep` and `demo` over JSON
//! game spec files.
//!
//! Exit codes: 0 success, 1 input error, 2 no equilibrium of the requested
//! kind, 3 verification failure.

mod solve;
mod spec_file;
mod sweep;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::GameError;

pub use solve::{
    solve, verify, AptNodeRecord, AptSolutionFile, BinarySolution, SolutionFile, Solved,
};
pub use spec_file::{
    AptSpec, BinaryEquilibrium, BinarySpec, ContinuousSpec, Family, GameSpecFile, SolverOptions,
    SweepSpec,
};
pub use sweep::{svg_plot, sweep, SweepTable};

/// Shipped example specs, by file name.
pub const SHIPPED_SPECS: [(&str, &str); 5] = [
    (
        "binary-conservative",
        include_str!("../../specs/binary-conservative.json"),
    ),
    (
        "binary-aggressive",
        include_str!("../../specs/binary-aggressive.json"),
    ),
    (
        "binary-pooling",
        include_str!("../../specs/binary-pooling.json"),
    ),
    (
        "continuous-slaph",
        include_str!("../../specs/continuous-slaph.json"),
    ),
    ("apt-toy", include_str!("../../specs/apt-toy.json")),
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::NoEquilibrium(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::WrongRegime { .. } | GameError::InfeasiblePools { .. } => {
                CliError::NoEquilibrium(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "deception-games",
    version,
    about = "Solve and verify cyber-deception games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a spec; writes solution.json and solution.txt to --out, or JSON to stdout.
    Solve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a solution file against its spec; exit 0 iff it passes.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve over a range of one parameter; writes sweep.csv to --out, or CSV to stdout.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        param: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a line plot to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Solve and verify every shipped example spec.
    Demo {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

/// Runs the command line given by `args` (program name first) and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve { spec, out, seed } => {
            let mut spec = GameSpecFile::load(&spec)?;
            if let Some(seed) = seed {
                spec.options.seed = seed;
            }
            let solved = solve(&spec)?;
            match out {
                Some(dir) => {
                    write_solution(&dir, &solved)?;
                    emit(&solved.table);
                }
                None => emit(&(to_json(&solved.solution)? + "\n")),
            }
            Ok(())
        }
        Command::Verify {
            spec,
            solution,
            tolerance,
            out,
        } => {
            let spec = GameSpecFile::load(&spec)?;
            let solution = load_solution(&solution)?;
            let report = verify(&spec, &solution, tolerance)?;
            let json = to_json(&report)?;
            match out {
                Some(dir) => {
                    write_file(&dir.join("report.json"), &json)?;
                    emit(&format!(
                        "verdict {:?}: worst residual {:e} (tolerance {:e})\n",
                        report.verdict,
                        report.worst(),
                        report.tolerance
                    ));
                }
                None => emit(&(json + "\n")),
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "worst residual {:e} exceeds {:e}",
                    report.worst(),
                    report.tolerance
                )))
            }
        }
        Command::Sweep {
            spec,
            param,
            from,
            to,
            steps,
            out,
            svg,
        } => {
            let spec = GameSpecFile::load(&spec)?;
            let base = spec.options.sweep.clone();
            let pick = |flag: Option<f64>, get: fn(&SweepSpec) -> f64, name: &str| {
                flag.or(base.as_ref().map(get)).ok_or_else(|| {
                    CliError::Input(format!("sweep needs --{name} or a sweep block"))
                })
            };
            let s = SweepSpec {
                parameter: param
                    .or(base.as_ref().map(|b| b.parameter.clone()))
                    .ok_or_else(|| {
                        CliError::Input("sweep needs --param or a sweep block".into())
                    })?,
                from: pick(from, |b| b.from, "from")?,
                to: pick(to, |b| b.to, "to")?,
                steps: steps.or(base.as_ref().map(|b| b.steps)).ok_or_else(|| {
                    CliError::Input("sweep needs --steps or a sweep block".into())
                })?,
            };
            let table = sweep(&spec, &s)?;
            let csv = table.to_csv();
            match out {
                Some(dir) => write_file(&dir.join("sweep.csv"), &csv)?,
                None => emit(&csv),
            }
            if let Some(path) = svg {
                write_file(&path, &svg_plot(&table))?;
            }
            Ok(())
        }
        Command::Demo {
            out,
            seed,
            tolerance,
        } => demo(out.as_deref(), seed, tolerance),
    }
}

fn demo(out: Option<&Path>, seed: Option<u64>, tolerance: Option<f64>) -> Result<(), CliError> {
    let mut failed = Vec::new();
    for (name, text) in SHIPPED_SPECS {
        let mut spec = GameSpecFile::parse(text, name)?;
        if let Some(seed) = seed {
            spec.options.seed = seed;
        }
        let solved = solve(&spec)?;
        let report = verify(&spec, &solved.solution, tolerance)?;
        if let Some(dir) = out {
            let dir = dir.join(name);
            write_solution(&dir, &solved)?;
            write_file(&dir.join("report.json"), &to_json(&report)?)?;
        }
        emit(&format!(
            "{name:<22} {:?}  worst residual {:e}\n",
            report.verdict,
            report.worst()
        ));
        if !report.passed() {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Input(format!("serialisation: {e}")))
}

fn load_solution(path: &Path) -> Result<SolutionFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| spec_file::json_error(&path.display().to_string(), &e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn write_solution(dir: &Path, solved: &Solved) -> Result<(), CliError> {
    write_file(
        &dir.join("solution.json"),
        &(to_json(&solved.solution)? + "\n"),
    )?;
    write_file(&dir.join("solution.txt"), &solved.table)?;
    for (name, contents) in &solved.extra_files {
        write_file(&dir.join(name), contents)?;
    }
    Ok(())
}
