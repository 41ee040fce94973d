use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use undistort_cli::{catalog, run_file, RunOptions};

#[derive(Parser)]
#[command(
    name = "undistort",
    version,
    about = "Distortion invariants for class-preserving homeomorphisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print its report.
    Run {
        file: PathBuf,
        /// Also write report.txt and CSV tables into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the default orbit budget.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Print the built-in spaces, families, measures and analyses.
    ListFamilies,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListFamilies => {
            print!("{}", catalog());
            ExitCode::SUCCESS
        }
        Command::Run {
            file,
            out,
            seed,
            budget,
        } => {
            let options = RunOptions { seed, budget };
            let outcome = match run_file(&file, &options) {
                Ok(o) => o,
                Err(err) => {
                    eprintln!("{}: {err}", file.display());
                    return ExitCode::from(err.exit_code() as u8);
                }
            };
            print!("{}", outcome.report.text());
            if let Some(dir) = out {
                if let Err(err) = outcome.report.write_to(&dir) {
                    eprintln!("{}: {err}", dir.display());
                    return ExitCode::from(undistort_cli::EXIT_IO as u8);
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
    }
}
