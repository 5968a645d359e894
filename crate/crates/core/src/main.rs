use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gibbs_sos::cli::{self, exit, EXPERIMENTS};

#[derive(Parser)]
#[command(name = "gibbs-sos", version, about = "Run Gibbs-sampler experiments from config files")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a config file and write its artifacts.
    Run { config: PathBuf },
    /// List registered experiments.
    List,
    /// Parse and resolve a config without running it.
    Validate { config: PathBuf },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    match Args::parse().command {
        Command::List => {
            // A closed pipe (e.g. `| head`) is not an error.
            let mut out = std::io::stdout().lock();
            for (name, about) in EXPERIMENTS {
                if writeln!(out, "{name:<16} {about}").is_err() {
                    break;
                }
            }
            code(exit::PASS)
        }
        Command::Validate { config } => match cli::load(&config) {
            Ok(cfg) => {
                println!("{}", serde_json::to_string_pretty(&cfg).unwrap_or_default());
                code(exit::PASS)
            }
            Err(e) => {
                eprintln!("error: {e}");
                code(e.exit_code())
            }
        },
        Command::Run { config } => match cli::load(&config).and_then(|cfg| cli::run(&cfg)) {
            Ok((outcome, dir)) => {
                for c in &outcome.checks {
                    println!("{} {} (measured {:e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured);
                }
                println!("artifacts: {}", dir.display());
                code(if outcome.passed() { exit::PASS } else { exit::CHECKS_FAILED })
            }
            Err(e) => {
                eprintln!("error: {e}");
                code(e.exit_code())
            }
        },
    }
}
