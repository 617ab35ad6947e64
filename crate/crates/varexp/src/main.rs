use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use varexp::config::Mode;
use varexp::runner::{run, Overrides};

#[derive(Parser)]
#[command(name = "varexp", version, about = "Variable-exponent quasilinear solver and verification suites")]
struct Cli {
    #[command(subcommand)]
    mode: Command,
    /// JSON configuration; the built-in benchmark when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the suites and multi-start descent; 0 when unset.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the verification suites.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cells per axis.
    #[arg(long, global = true)]
    resolution: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run the truncation scheme and write the report, solution and plot data.
    Solve,
    /// Run the randomized inequality suites.
    Verify,
    /// Estimate the Sobolev and weighted embedding constants.
    Constants,
    /// Tabulate errors against a manufactured solution.
    Manufactured,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = match cli.mode {
        Command::Solve => Mode::Solve,
        Command::Verify => Mode::Verify,
        Command::Constants => Mode::Constants,
        Command::Manufactured => Mode::Manufactured,
    };
    let overrides = Overrides {
        mode: Some(mode),
        out: cli.out,
        seed: cli.seed,
        threads: cli.threads,
        resolution: cli.resolution,
    };
    match run(cli.config.as_deref(), &overrides) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            println!("wrote {} files to {}", outcome.files.len(), outcome.directory.display());
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status().code() as u8)
        }
    }
}
