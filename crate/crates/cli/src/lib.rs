//! Batch front end for the `quateq` solver.
//!
//! Reads a JSON problem file, solves every problem (concurrently, output in
//! input order) and writes a single JSON document to standard output.

use std::collections::HashSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use quateq::{
    solve, solve_nonreal_p, solve_real_p, verify_solution_set, EquationCoefficients,
    Error as SolveError, OracleConfig, OracleReport, Quaternion, SolutionSet, SolverConfig,
    Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID_COEFFICIENTS: i32 = 3;
pub const EXIT_ORACLE_MISMATCH: i32 = 4;

/// Infinite sets get this many internal samples for `residual_max` when no
/// samples were requested.
const RESIDUAL_SAMPLES: usize = 64;

#[derive(Debug, Parser)]
#[command(
    name = "quateq",
    version,
    about = "Solve X·P·X* + X·Q + R·X* = S over the quaternions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve every problem in a JSON problem file.
    Solve(SolveArgs),
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    pub file: PathBuf,
    /// Classification tolerance (relative).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Points to emit for each circle or 3-sphere.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Cross-check every answer with the Newton multistart oracle.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also report the real-P and nonreal-P formulas separately.
    #[arg(long)]
    pub both_branches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub id: String,
    #[serde(rename = "P")]
    pub p: [f64; 4],
    #[serde(rename = "Q")]
    pub q: [f64; 4],
    #[serde(rename = "R")]
    pub r: [f64; 4],
    #[serde(rename = "S")]
    pub s: [f64; 4],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub problems: Vec<Problem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Options>,
}

/// Settings after merging file options with command-line flags (flags win).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tolerance: f64,
    pub samples: usize,
    pub verify: bool,
    pub seed: u64,
    pub both_branches: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tolerance: SolverConfig::default().eps_class,
            samples: 0,
            verify: false,
            seed: 0,
            both_branches: false,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Io(String),
    InvalidCoefficients(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Io(_) => EXIT_IO,
            CliError::InvalidCoefficients(_) => EXIT_INVALID_COEFFICIENTS,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::InvalidCoefficients(m) => write!(f, "invalid coefficients: {m}"),
        }
    }
}

/// Parses a problem file and checks that ids are unique.
pub fn parse_problem_file(text: &str) -> Result<ProblemFile, CliError> {
    let file: ProblemFile =
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut seen = HashSet::new();
    for p in &file.problems {
        if !seen.insert(p.id.as_str()) {
            return Err(CliError::Parse(format!("duplicate problem id {:?}", p.id)));
        }
    }
    Ok(file)
}

/// Shortest round-trip JSON for a problem file.
pub fn emit_problem_file(file: &ProblemFile) -> String {
    serde_json::to_string_pretty(file).expect("problem files always serialize")
}

/// `n` members of `set`: circles at equispaced angles, 3-spheres along
/// seeded uniform directions, finite sets verbatim whatever `n` is.
pub fn emit_samples(set: &SolutionSet, n: usize, seed: u64) -> Vec<Quaternion> {
    set.sample(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BranchOutcome {
    Solved(SolutionSet),
    Undefined { error: String },
}

impl From<Result<SolutionSet, SolveError>> for BranchOutcome {
    fn from(r: Result<SolutionSet, SolveError>) -> Self {
        match r {
            Ok(set) => BranchOutcome::Solved(set),
            Err(e) => BranchOutcome::Undefined {
                error: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport {
    pub real: BranchOutcome,
    pub nonreal: BranchOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemResult {
    pub id: String,
    #[serde(flatten)]
    pub solution: SolutionSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Quaternion>>,
    /// Largest `|X·P·X* + X·Q + R·X* − S|` over the reported members, or
    /// over internal samples of an infinite set; null for an empty set.
    pub residual_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branches: Option<BranchReport>,
}

impl ProblemResult {
    pub fn verified(&self) -> bool {
        self.oracle
            .as_ref()
            .is_none_or(|o| o.verdict == Some(Verdict::Match))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub problems: Vec<ProblemResult>,
}

fn coefficients(p: &Problem) -> Result<EquationCoefficients, CliError> {
    EquationCoefficients::from_arrays(p.p, p.q, p.r, p.s)
        .map_err(|e| CliError::InvalidCoefficients(format!("problem {:?}: {e}", p.id)))
}

fn solve_one(
    id: &str,
    c: &EquationCoefficients,
    settings: &Settings,
    seed: u64,
) -> Result<ProblemResult, CliError> {
    let cfg = SolverConfig::new(settings.tolerance);
    let set = solve(c, &cfg)
        .map_err(|e| CliError::InvalidCoefficients(format!("problem {id:?}: {e}")))?;

    let samples = (!set.is_finite()).then(|| emit_samples(&set, settings.samples, seed));
    let residual_points = match &samples {
        Some(s) if !s.is_empty() => s.clone(),
        Some(_) => emit_samples(&set, RESIDUAL_SAMPLES, seed),
        None => set.points(),
    };
    let residual_max = residual_points
        .iter()
        .map(|x| c.residual(*x))
        .reduce(f64::max);

    let oracle = if settings.verify {
        let report = verify_solution_set(c, &set, &OracleConfig::with_seed(seed))
            .map_err(|e| CliError::InvalidCoefficients(format!("problem {id:?}: {e}")))?;
        Some(report)
    } else {
        None
    };
    let branches = settings.both_branches.then(|| BranchReport {
        real: solve_real_p(c, &cfg).into(),
        nonreal: solve_nonreal_p(c, &cfg).into(),
    });
    Ok(ProblemResult {
        id: id.to_string(),
        solution: set,
        samples,
        residual_max,
        oracle,
        branches,
    })
}

/// Solves every problem; the i-th problem uses seed `settings.seed + i`.
pub fn solve_file(file: &ProblemFile, settings: &Settings) -> Result<Report, CliError> {
    let coeffs = file
        .problems
        .iter()
        .map(coefficients)
        .collect::<Result<Vec<_>, _>>()?;
    let problems = file
        .problems
        .par_iter()
        .zip(coeffs.par_iter())
        .enumerate()
        .map(|(i, (p, c))| solve_one(&p.id, c, settings, settings.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report { problems })
}

/// Merges file options with command-line flags.
pub fn settings(file: &ProblemFile, args: &SolveArgs) -> Result<Settings, CliError> {
    let opts = file.options.clone().unwrap_or_default();
    let defaults = Settings::default();
    let s = Settings {
        tolerance: args
            .tolerance
            .or(opts.tolerance)
            .unwrap_or(defaults.tolerance),
        samples: args.samples.or(opts.samples).unwrap_or(defaults.samples),
        verify: args.verify || opts.verify.unwrap_or(defaults.verify),
        seed: args.seed.or(opts.seed).unwrap_or(defaults.seed),
        both_branches: args.both_branches,
    };
    if !(s.tolerance.is_finite() && s.tolerance > 0.0) {
        return Err(CliError::Parse(format!(
            "tolerance must be positive, got {}",
            s.tolerance
        )));
    }
    Ok(s)
}

fn run_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.file.display())))?;
    let file = parse_problem_file(&text)?;
    let settings = settings(&file, args)?;
    let report = solve_file(&file, &settings)?;
    let json = serde_json::to_string(&report).expect("reports always serialize");
    writeln!(out, "{json}")
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Io(format!("writing output: {e}")))?;
    Ok(if report.problems.iter().all(ProblemResult::verified) {
        EXIT_OK
    } else {
        EXIT_ORACLE_MISMATCH
    })
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return if code == 0 { EXIT_OK } else { EXIT_PARSE };
        }
    };
    let Command::Solve(args) = cli.command;
    match run_solve(&args, out) {
        Ok(code) => {
            if code == EXIT_ORACLE_MISMATCH {
                let _ = writeln!(
                    err,
                    "quateq: oracle disagreed with at least one closed-form answer"
                );
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "quateq: {e}");
            e.exit_code()
        }
    }
}
