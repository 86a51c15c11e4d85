//! `choqlab` command-line front end.
//!
//! Every subcommand prints a JSON run report on stdout and a one-line summary
//! on stderr. Exit codes: 0 pass, 1 check failed, 2 parse or I/O error,
//! 3 dimension mismatch, 4 domain or axiom mismatch, 5 invalid cut level.

mod commands;
mod input;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::input::InputLog;
use crate::report::RunReport;

#[derive(Parser)]
#[command(
    name = "choqlab",
    version,
    about = "Lovász extensions and additivity axiom checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an extension at one or more points.
    Eval(EvalArgs),
    /// Check a function against an additivity axiom.
    Check(CheckArgs),
    /// Split a vector at a cut level and verify the recomposition.
    Decompose(DecomposeArgs),
    /// Generate a random set function.
    Gen(GenArgs),
    /// Compare two extensions by sampling.
    Compare(CompareArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    /// Extension JSON file, `-` for stdin, or inline JSON.
    pub extension: String,
    /// A vector or a list of vectors: file, `-`, or inline JSON such as `[3,5]`.
    pub vectors: String,
    /// Also evaluate the dual (or split) form.
    #[arg(long)]
    pub dual: bool,
    /// Also evaluate the telescoping form of a symmetric extension.
    #[arg(long)]
    pub symmetric_telescoping: bool,
    /// Also evaluate the Möbius and affine-interpolation oracles.
    #[arg(long)]
    pub oracles: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct CheckArgs {
    /// `builtin:min2|max2|product2|abs1` or an extension JSON file.
    pub target: String,
    #[arg(long)]
    pub axiom: String,
    /// full | nonneg | nonpos | centered:A | box:LO,HI
    #[arg(long, default_value = "full")]
    pub domain: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, env = "CHOQLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; the verdict does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Restrict homogeneity to positive scalars.
    #[arg(long)]
    pub positive_only: bool,
    /// Comma-separated values for the deterministic sweep.
    #[arg(long, value_delimiter = ',')]
    pub lattice: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-9)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    Min,
    Max,
    Median,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Min => "min",
            Mode::Max => "max",
            Mode::Median => "median",
        }
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct DecomposeArgs {
    /// The vector: file, `-`, or inline JSON such as `[-3,5]`.
    pub x: String,
    #[arg(long)]
    pub cut: f64,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long, default_value = "full")]
    pub domain: String,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "CHOQLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// general | capacity | capacity_normalized
    #[arg(long, default_value = "capacity")]
    pub kind: String,
    /// Also write the set function to this file.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args)]
pub struct CompareArgs {
    pub a: String,
    pub b: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, env = "CHOQLAB_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn parse(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn usage(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn dimension(message: String) -> Self {
        Self { code: 3, message }
    }

    pub fn domain(message: String) -> Self {
        Self { code: 4, message }
    }

    pub fn cut(message: String) -> Self {
        Self { code: 5, message }
    }
}

impl From<choqlab::Error> for CliError {
    fn from(e: choqlab::Error) -> Self {
        use choqlab::Error as E;
        let code = match &e {
            E::Dimension(_) => 3,
            E::Domain(_) | E::DomainKind { .. } | E::SamplerExhausted { .. } => 4,
            E::NegativeCut(_) => 5,
            E::Value(_) | E::SingularSystem(_) | E::BudgetExceeded { .. } => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let started = Instant::now();
    let mut log = InputLog::default();
    let outcome = match &cli.command {
        Command::Eval(a) => commands::eval(a, &mut log),
        Command::Check(a) => commands::check_cmd(a, &mut log),
        Command::Decompose(a) => commands::decompose(a, &mut log),
        Command::Gen(a) => commands::gen(a, &mut log),
        Command::Compare(a) => commands::compare(a, &mut log),
    };
    match outcome {
        Ok(out) => {
            let report = RunReport::new(
                argv,
                log.finish(),
                out.seed,
                out.results,
                started.elapsed().as_millis() as u64,
            );
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            eprintln!("{}", out.summary);
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
