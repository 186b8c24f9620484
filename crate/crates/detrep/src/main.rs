//! Command-line front end: build/verify determinantal representations, solve
//! bivariate systems, and run the benchmark harness.
//!
//! Exit codes: 0 success, 2 parse error, 3 unsupported degree, 4 numerical
//! failure, 5 singular two-parameter problem.

use clap::{Args, Parser, Subcommand, ValueEnum};
use detrep::bench::{run_bench, report_to_json, report_to_table, BenchConfig, Field, Scenario};
use detrep::builder::{build, verify, BuildOptions};
use detrep::io;
use detrep::polycore::homogenize;
use detrep::twopar::{solve_system, RootFlag, SolveOptions};
use detrep::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "detrep",
    about = "Minimal determinantal representations of bivariate polynomials \
             and eigenvalue-based system solving"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Seed for all randomized steps
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Verification sample count
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Relative singular-value threshold for conic rank decisions
    #[arg(long, default_value_t = 1e-8)]
    tol_rank: f64,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a determinantal representation of one polynomial
    Build {
        /// Polynomial file (text or JSON)
        input: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Recompute the identity residual of a stored representation
    Verify {
        /// Polynomial file (text or JSON)
        input: PathBuf,
        /// Representation JSON produced by `detrep build`
        #[arg(long)]
        rep: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Solve a system of two bivariate polynomials
    Solve {
        /// First polynomial file
        input_p: PathBuf,
        /// Second polynomial file
        input_q: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the benchmark harness
    Bench {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated degrees
        #[arg(long, default_value = "3,4,5", value_delimiter = ',')]
        degrees: Vec<usize>,
        #[arg(long, value_enum, default_value_t = FieldArg::Real)]
        field: FieldArg,
        #[arg(long, value_enum, default_value_t = ScenarioArg::Full)]
        scenario: ScenarioArg,
        /// Zero all timing fields for byte-identical reports
        #[arg(long)]
        omit_timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Full,
    SquaredFactor,
}

const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_SINGULAR: u8 = 5;

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) => EXIT_PARSE,
        Error::UnsupportedDegree(_) => EXIT_UNSUPPORTED,
        Error::SingularDelta0 => EXIT_SINGULAR,
        _ => EXIT_NUMERICAL,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(code)
}

fn read_poly(path: &Path) -> Result<detrep::polycore::AffinePoly, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_PARSE, format!("{}: {}", path.display(), e)))?;
    io::parse_poly(&text).map_err(|e| fail(EXIT_PARSE, e))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), ExitCode> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| fail(EXIT_NUMERICAL, format!("{}: {}", path.display(), e))),
        None => {
            println!("{}", content);
            Ok(())
        }
    }
}

fn build_opts(common: &CommonOpts) -> BuildOptions {
    BuildOptions {
        tol_rank: common.tol_rank,
        seed: common.seed,
        ..BuildOptions::default()
    }
}

fn cmd_build(input: &Path, common: &CommonOpts) -> Result<ExitCode, ExitCode> {
    let q = read_poly(input)?;
    let p = homogenize(&q).map_err(|e| fail(exit_for(&e), e))?;
    let rep = build(&p, &build_opts(common)).map_err(|e| fail(exit_for(&e), e))?;
    let residual =
        verify(&p, &rep, common.samples.max(1), common.seed).map_err(|e| fail(exit_for(&e), e))?;
    emit(&common.out, &io::rep_to_json(&rep, residual))?;
    Ok(if residual <= 1e-7 {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: residual {:.3e} exceeds 1e-7", residual);
        ExitCode::from(EXIT_NUMERICAL)
    })
}

fn cmd_verify(input: &Path, rep_path: &Path, common: &CommonOpts) -> Result<ExitCode, ExitCode> {
    let q = read_poly(input)?;
    let p = homogenize(&q).map_err(|e| fail(exit_for(&e), e))?;
    let rep_text = std::fs::read_to_string(rep_path)
        .map_err(|e| fail(EXIT_PARSE, format!("{}: {}", rep_path.display(), e)))?;
    let rep = io::rep_from_json(&rep_text).map_err(|e| fail(EXIT_PARSE, e))?;
    let residual =
        verify(&p, &rep, common.samples.max(1), common.seed).map_err(|e| fail(exit_for(&e), e))?;
    println!("residual {:.6e}", residual);
    Ok(if residual <= 1e-7 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERICAL)
    })
}

fn cmd_solve(path_p: &Path, path_q: &Path, common: &CommonOpts) -> Result<ExitCode, ExitCode> {
    let p = read_poly(path_p)?;
    let q = read_poly(path_q)?;
    let opts = SolveOptions {
        build: build_opts(common),
        ..SolveOptions::default()
    };
    let roots = solve_system(&p, &q, &opts).map_err(|e| fail(exit_for(&e), e))?;
    emit(&common.out, &io::roots_to_json(&roots))?;
    let scale = p.norm().max(q.norm());
    let ok = roots
        .flags
        .iter()
        .zip(&roots.residuals)
        .filter(|(f, _)| **f != RootFlag::Clustered)
        .all(|(_, r)| r.0.max(r.1) <= 1e-6 * scale);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: a non-clustered root has residual above 1e-6");
        ExitCode::from(EXIT_NUMERICAL)
    })
}

fn cmd_bench(
    common: &CommonOpts,
    degrees: &[usize],
    field: FieldArg,
    scenario: ScenarioArg,
    omit_timing: bool,
) -> Result<ExitCode, ExitCode> {
    if degrees.iter().any(|d| !(2..=5).contains(d)) {
        return Err(fail(EXIT_PARSE, "degrees must lie in 2..=5"));
    }
    let config = BenchConfig {
        degrees: degrees.to_vec(),
        samples_per_cell: common.samples,
        field: match field {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        },
        seed: common.seed,
        scenario: match scenario {
            ScenarioArg::Full => Scenario::Full,
            ScenarioArg::SquaredFactor => Scenario::SquaredFactor,
        },
        omit_timing,
    };
    let report = run_bench(&config);
    eprint!("{}", report_to_table(&report));
    emit(&common.out, &report_to_json(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build { input, common } => cmd_build(input, common),
        Command::Verify { input, rep, common } => cmd_verify(input, rep, common),
        Command::Solve {
            input_p,
            input_q,
            common,
        } => cmd_solve(input_p, input_q, common),
        Command::Bench {
            common,
            degrees,
            field,
            scenario,
            omit_timing,
        } => cmd_bench(common, degrees, *field, *scenario, *omit_timing),
    };
    match result {
        Ok(code) => code,
        Err(code) => code,
    }
}
