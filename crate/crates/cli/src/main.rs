use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sqzlift_cli::{Failure, Params};

/// Exact obstruction theory for lifting modules along square-zero extensions of finite rings.
#[derive(Parser)]
#[command(name = "sqzlift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the ring, the square-zero datum and the input.
    Check(Common),
    /// Free resolution of the input over the quotient ring.
    Resolve(Common),
    /// Ext groups of the input with coefficients in itself and in J ⊗ input.
    Ext(Common),
    /// Tor groups of J against the input.
    Tor(Common),
    /// The obstruction class and whether it vanishes.
    Obstruct(Common),
    /// Every lift up to equivalence, with the torsor check.
    Lifts(Common),
    /// Fiber sequence, J-adic tower, pair round trips and section invariance.
    Verify(Common),
    /// Brute-force lift enumeration and Ext by cochain enumeration.
    Oracle(Common),
    /// Agreement of the lift classification with the brute-force count.
    Torsor(Common),
}

#[derive(Args)]
struct Common {
    /// Instance file (TOML).
    instance: PathBuf,
    /// Extra resolution degrees past the top of the input.
    #[arg(long)]
    resolution_length: Option<usize>,
    /// Search budget for the brute-force oracle.
    #[arg(long)]
    budget: Option<usize>,
    /// Seed for a random preimage section instead of the canonical one.
    #[arg(long)]
    section: Option<u64>,
    /// Highest Ext/Tor degree reported.
    #[arg(long, default_value_t = 2)]
    max_degree: usize,
}

fn emit(value: &serde_json::Value) {
    let text = serde_json::to_string_pretty(value).expect("reports are plain JSON");
    // A closed pipe is the reader's choice; the exit code still reports the outcome.
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::Malformed { path: "arguments".into(), message: e.kind().to_string() };
            eprint!("{e}");
            emit(&f.diagnostic(None));
            return ExitCode::from(f.exit_code());
        }
    };
    let (name, common) = match &cli.command {
        Command::Check(c) => ("check", c),
        Command::Resolve(c) => ("resolve", c),
        Command::Ext(c) => ("ext", c),
        Command::Tor(c) => ("tor", c),
        Command::Obstruct(c) => ("obstruct", c),
        Command::Lifts(c) => ("lifts", c),
        Command::Verify(c) => ("verify", c),
        Command::Oracle(c) => ("oracle", c),
        Command::Torsor(c) => ("torsor", c),
    };
    let params = Params {
        resolution_length: common.resolution_length,
        budget: common.budget,
        section: common.section,
        max_degree: common.max_degree,
    };
    match sqzlift_cli::run(name, &common.instance, &params) {
        Ok(outcome) => {
            emit(&outcome.report);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(f) => {
            emit(&f.diagnostic(Some(name)));
            ExitCode::from(f.exit_code())
        }
    }
}
