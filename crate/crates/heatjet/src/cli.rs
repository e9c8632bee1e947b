//! Batch front end: `compute`, `verify`, and `selftest`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::io::{Problem, ProblemDoc, VerifyLevel};
use crate::pipeline::compute_result;
use crate::verify::{selftest, verify_problem};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_TRUNCATION: u8 = 4;
pub const EXIT_VERIFICATION: u8 = 5;

/// Exact heat-expansion coefficient jets for generalized Laplacians given in
/// normal coordinates. All arithmetic is exact rational; outputs are germs at
/// the basepoint (jets at the origin), nothing off the diagonal.
#[derive(Parser)]
#[command(name = "heatjet", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Override the problem file's truncation degree for the a_k jets.
    #[arg(long)]
    max_degree: Option<u32>,
    /// Override the problem file's largest coefficient index K.
    #[arg(long)]
    max_k: Option<usize>,
    /// Tag every reported coefficient with the symbolic prefactor
    /// (4 pi)^(-n/2). The factor is irrational and never folded into the
    /// rational coefficients; it is recorded as a flag in the output.
    #[arg(long)]
    reinstate_4pi: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute heat coefficient jets for a problem file.
    Compute {
        /// Problem file (JSON).
        spec: PathBuf,
        /// Output document path.
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Recompute and verify a problem file without writing results.
    Verify {
        /// Problem file (JSON).
        spec: PathBuf,
        /// Verification level (overrides the file's option).
        #[arg(long, value_parser = parse_level)]
        level: Option<VerifyLevel>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the built-in identity suite; needs no input file.
    Selftest,
}

fn parse_level(s: &str) -> Result<VerifyLevel, String> {
    match s {
        "none" => Ok(VerifyLevel::None),
        "fast" => Ok(VerifyLevel::Fast),
        "full" => Ok(VerifyLevel::Full),
        other => Err(format!("unknown level {other:?}; use none, fast or full")),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InsufficientDegree { .. } => EXIT_TRUNCATION,
        Error::OrderBound { .. } => EXIT_VERIFICATION,
        _ => EXIT_VALIDATION,
    }
}

struct LoadedProblem {
    problem: Problem,
    sha256: String,
}

fn load_problem(path: &Path, overrides: &Overrides) -> Result<LoadedProblem, u8> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_PARSE);
        }
    };
    let sha256 = hex_digest(&bytes);
    let text = match String::from_utf8(bytes) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {} is not UTF-8: {e}", path.display());
            return Err(EXIT_PARSE);
        }
    };
    let mut doc = match ProblemDoc::parse(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: cannot parse {}: {e}", path.display());
            return Err(EXIT_PARSE);
        }
    };
    if let Some(k) = overrides.max_k {
        doc.max_k = k;
    }
    if let Some(d) = overrides.max_degree {
        doc.max_degree = d;
    }
    if overrides.reinstate_4pi {
        doc.options.reinstate_4pi = true;
    }
    let problem = match doc.load() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::InsufficientDegree { .. } = e {
                let b = crate::io::DegreeBounds::for_targets(doc.max_k, doc.max_degree, None);
                eprintln!(
                    "note: targets K = {}, D = {} need input jets exact through degree {} \
                     (difference order {}, operator coefficients through degree {})",
                    doc.max_k,
                    doc.max_degree,
                    b.required_input_degree,
                    b.difference_order,
                    b.operator_coefficient_degree,
                );
                return Err(EXIT_TRUNCATION);
            }
            return Err(exit_code_for(&e));
        }
    };
    Ok(LoadedProblem { problem, sha256 })
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn print_bounds(problem: &Problem) {
    let b = &problem.bounds;
    println!(
        "targets: a_0..a_{} exact through degree {}",
        problem.max_k, problem.max_degree
    );
    println!(
        "degree requirements: difference order {}, operator coefficients through degree {}, \
         input jets through degree {} (declared: {})",
        b.difference_order,
        b.operator_coefficient_degree,
        b.required_input_degree,
        match b.declared_input_degree {
            Some(j) => format!("degree {j}"),
            None => "exact polynomials".into(),
        }
    );
}

fn print_checks(checks: &[crate::io::CheckDoc]) -> bool {
    let mut all = true;
    for c in checks {
        if c.passed {
            println!("PASS {}", c.name);
        } else {
            all = false;
            println!("FAIL {}", c.name);
            if let Some(detail) = &c.detail {
                println!("     {detail}");
            }
        }
    }
    all
}

fn cmd_compute(spec: &Path, output: &Path, overrides: &Overrides) -> u8 {
    let loaded = match load_problem(spec, overrides) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let problem = &loaded.problem;
    print_bounds(problem);

    let doc = match compute_result(problem, loaded.sha256) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    let verification_passed = match &doc.verification {
        None => true,
        Some(v) => {
            print_checks(&v.checks);
            v.passed
        }
    };
    if let Err(e) = std::fs::write(output, doc.to_json()) {
        eprintln!("error: cannot write {}: {e}", output.display());
        return EXIT_VALIDATION;
    }
    println!("wrote {}", output.display());
    if verification_passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}

fn cmd_verify(spec: &Path, level: Option<VerifyLevel>, overrides: &Overrides) -> u8 {
    let loaded = match load_problem(spec, overrides) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let problem = &loaded.problem;
    print_bounds(problem);
    let level = match level.unwrap_or(problem.options.verify_level) {
        VerifyLevel::None => VerifyLevel::Fast,
        other => other,
    };
    let checks = match verify_problem(problem, level) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    if print_checks(&checks) {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}

fn cmd_selftest() -> u8 {
    let checks = selftest();
    if print_checks(&checks) {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Compute {
            spec,
            output,
            overrides,
        } => cmd_compute(spec, output, overrides),
        Command::Verify {
            spec,
            level,
            overrides,
        } => cmd_verify(spec, *level, overrides),
        Command::Selftest => cmd_selftest(),
    };
    ExitCode::from(code)
}
