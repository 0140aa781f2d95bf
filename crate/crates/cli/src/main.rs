use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cylspec_cli::run::{configure_threads, MANIFEST};
use cylspec_cli::{run, Overrides, Problem, Result, RunConfig};

/// Spectral heat, Poisson and Navier-Stokes solvers in a closed cylinder.
#[derive(Parser)]
#[command(name = "cylspec", version)]
struct Cli {
    #[arg(value_enum)]
    problem: Problem,
    /// Flat JSON config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.problem = cli.problem;
    config.apply(&cli.overrides);
    let manifest = run(&config)?;
    for (key, value) in &manifest.results {
        if key != "rows" {
            println!("{key} = {value}");
        }
    }
    if manifest.problem == Problem::Bench {
        print!("{}", std::fs::read_to_string(config.output_path.join("bench.csv")).unwrap_or_default());
    }
    println!("wrote {}", config.output_path.join(MANIFEST).display());
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cylspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
