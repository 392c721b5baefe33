//! `fluxlab`: scenario runner for the flux-insertion and state-growing
//! numerical core. Declarative JSON configs in, deterministic CSV/JSON
//! artifacts out, with a manifest per run.

mod config;
mod output;
mod scenarios;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{schema, CliError, LoadedConfig, Scenario};
use output::RunOutput;

#[derive(Parser)]
#[command(name = "fluxlab", version, about = "Flux-insertion and state-growing scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config file.
    Run {
        /// Path to the scenario config (JSON).
        config: PathBuf,
        /// Output directory (overrides the config's "output" field).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on worker threads for parallel scenarios.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the available scenarios and their parameters.
    List,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, jobs } => match run(&config, out, jobs) {
            Ok(dir) => {
                println!("wrote {}", dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!(
                    "{}",
                    serde_json::to_string(&e.report()).expect("error report serializes")
                );
                ExitCode::FAILURE
            }
        },
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
    }
}

fn run(config_path: &PathBuf, out: Option<PathBuf>, jobs: Option<usize>) -> Result<PathBuf, CliError> {
    let text = fs::read_to_string(config_path).map_err(|e| CliError::Io {
        path: config_path.display().to_string(),
        message: e.to_string(),
    })?;
    let cfg: LoadedConfig = config::parse_config(&text)?;
    let dir = out
        .or_else(|| cfg.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("fluxlab-out"));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Numeric(e.to_string()))?;

    let mut output = RunOutput::create(&dir, &cfg)?;
    pool.install(|| scenarios::run(&cfg, &mut output))?;
    output.finish(&cfg, jobs)
}

fn list() {
    for scenario in Scenario::all() {
        println!("{}", scenario.name());
        println!("  {}", scenario.describe());
        for spec in schema(scenario) {
            let requirement = if spec.required { "required" } else { "optional" };
            println!("  - {} ({requirement}): {}; {}", spec.key, spec.kind.shape(), spec.doc);
        }
        println!();
    }
}
