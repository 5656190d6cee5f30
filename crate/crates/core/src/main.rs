use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcomb_core::config::{self, ScenarioConfig};
use qcomb_core::runner::{self, RunOptions};
use qcomb_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qcomb", version, about = "Biphoton frequency-comb interference simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write sweep.csv, summary.json and theory.csv.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Write expectation values instead of sampled counts.
        #[arg(long)]
        noiseless: bool,
        /// Detector seed; overrides the config and QCOMB_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Override a config value, e.g. `--set detector.repeats=5`.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
    },
    /// Write only the noiseless fine-grid theory.csv.
    Theory {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
    },
    /// Check a config and print it with every default filled in.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
    },
}

fn load(path: &Path, overrides: &[String]) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    config::parse_config_with_overrides(&text, overrides)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            noiseless,
            seed,
            set,
        } => {
            let cfg = load(&config, &set)?;
            let opts = RunOptions::from_env(noiseless, seed)?;
            let output = runner::run_scenario(&cfg, &opts)?;
            output.write_to(&out)?;
            let warnings = output.summary.get("warnings").and_then(|w| w.as_str()).unwrap_or("");
            if !warnings.is_empty() {
                eprintln!("warning: {warnings}");
            }
        }
        Command::Theory { config, out, set } => {
            let cfg = load(&config, &set)?;
            let table = runner::theory(&cfg)?;
            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join("theory.csv"), table).map_err(Error::from)?;
        }
        Command::Validate { config, set } => {
            let cfg = load(&config, &set)?;
            print!("{}", config::to_canonical_string(&cfg));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let category = e.category();
            eprintln!("error [{}]: {e}", category.as_str());
            ExitCode::from(category.exit_code() as u8)
        }
    }
}
