use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qgt::config::load_config;
use qgt::{claims, ewl, report, Error};

#[derive(Parser)]
#[command(
    name = "qgt",
    version,
    about = "Quantum game procedures: distributions, induced games, equilibria, claim checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analysis described by a config file and write its artifact.
    Run { config: std::path::PathBuf },
    /// Check every built-in claim, one line per result.
    Verify,
    /// List the built-in procedure catalog.
    ListCatalog,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => match run(&config) {
            Ok(0) => ExitCode::SUCCESS,
            Ok(failed) => {
                eprintln!("{failed} claim(s) failed");
                ExitCode::from(1)
            }
            Err(e) => fail(&e),
        },
        Command::Verify => match verify() {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => fail(&e),
        },
        Command::ListCatalog => {
            for name in ewl::catalog_names() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
    }
}

fn run(path: &Path) -> qgt::Result<usize> {
    let cfg = load_config(path)?;
    let summary = report::run(&cfg)?;
    println!("wrote {}", summary.path.display());
    Ok(summary.failed_claims)
}

fn verify() -> qgt::Result<bool> {
    let results = claims::verify_claims()?;
    for r in &results {
        println!(
            "{} {} (max deviation {:.3e}, tolerance {:.3e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.max_deviation(),
            r.tolerance
        );
    }
    let ok = claims::all_pass(&results);
    if !ok {
        eprintln!(
            "{} of {} claims failed",
            results.iter().filter(|r| !r.pass).count(),
            results.len()
        );
    }
    Ok(ok)
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}
