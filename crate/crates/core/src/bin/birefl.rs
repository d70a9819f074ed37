use std::path::PathBuf;
use std::process::ExitCode;

use birefl::cli::{run, Command, JobSpec, StarArg};
use clap::{Parser, Subcommand};

/// Involution, square-zero and unitary decompositions with checkable
/// certificates.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Matrix JSON file (`{"n": .., "entries": [..]}`).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Algebra JSON file (`{"ambient_dim": n, "basis": [..]}` or `{"generators": [..]}`).
    #[arg(long, global = true)]
    algebra: Option<PathBuf>,

    /// `transpose` or `form:<path>`.
    #[arg(long, global = true)]
    star: Option<StarArg>,

    /// Certificate to check (verify only).
    #[arg(long, global = true)]
    cert: Option<PathBuf>,

    /// Equality and rank tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Polynomial square root of an invertible element.
    Sqrt,
    /// Product of two involutions.
    Birefl,
    /// Sum of two square-zero elements.
    Szero,
    /// Unitary conjugator of order dividing four (needs --star).
    Unitary4,
    /// Recheck a certificate.
    Verify,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let max_retries = match std::env::var("BIREFL_MAX_RETRIES") {
        Ok(v) => match v.parse::<usize>() {
            Ok(r) => Some(r),
            Err(_) => {
                eprintln!("BIREFL_MAX_RETRIES must be a non-negative integer, got `{v}`");
                return ExitCode::from(1);
            }
        },
        Err(_) => None,
    };
    let job = JobSpec {
        command: match args.command {
            Cmd::Sqrt => Command::Sqrt,
            Cmd::Birefl => Command::Birefl,
            Cmd::Szero => Command::Szero,
            Cmd::Unitary4 => Command::Unitary4,
            Cmd::Verify => Command::Verify,
        },
        input: args.input,
        algebra: args.algebra,
        star: args.star,
        cert: args.cert,
        tol: args.tol,
        seed: args.seed,
        max_retries,
    };
    let outcome = run(&job);
    if outcome.status == 1 {
        eprint!("{}", outcome.output);
        return ExitCode::from(1);
    }
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", outcome.output),
    }
    ExitCode::from(outcome.status as u8)
}
