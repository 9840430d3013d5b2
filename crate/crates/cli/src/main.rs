use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use wavelab_core::lab::{run_scenario, LabError, Scenario, Summary};
use wavelab_core::model::{parse_scenario, ConfigError};

const EXIT_ASSERTION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Scenario runner for the two-component cubic wave lab.
#[derive(Debug, Parser)]
#[command(name = "wavelab", version)]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "WAVELAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the scenario described by a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a built-in scenario.
    Scenario {
        name: String,
        #[arg(long, required_unless_present = "print_config")]
        out: Option<PathBuf>,
        /// Override a configuration key, e.g. `--set data.epsilon=0.2`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print the built-in configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// List the built-in scenarios.
    List,
}

fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| UsageError(format!("override {s:?} is not of the form key=value")))?;
    let k = k.trim();
    // bare keys live in the scenario section
    let key = if k.contains('.') { k.to_string() } else { format!("scenario.{k}") };
    Ok((key, v.trim().to_string()))
}

fn report(summary: &Summary, out: &Path) -> ExitCode {
    for a in &summary.assertions {
        let status = if a.pass { "pass" } else { "FAIL" };
        println!("{status}  {:<36} {:.4e}", a.name, a.value);
    }
    println!("{}: {} ({})", summary.scenario, if summary.pass { "pass" } else { "FAIL" }, out.display());
    if summary.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ASSERTION)
    }
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::List => {
            for name in Scenario::NAMES {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = parse_scenario(&text).with_context(|| format!("parsing {}", config.display()))?;
            let (summary, _) = run_scenario(&cfg, &out)?;
            Ok(report(&summary, &out))
        }
        Command::Scenario {
            name,
            out,
            overrides,
            print_config,
        } => {
            let scenario: Scenario = name.parse()?;
            if print_config {
                print!("{}", scenario.default_config());
                return Ok(ExitCode::SUCCESS);
            }
            let overrides = overrides.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>>>()?;
            let cfg = scenario.config(&overrides)?;
            let out = out.unwrap_or_default();
            if cfg.name != scenario.name() {
                return Err(UsageError("overrides may not rename the scenario".into()).into());
            }
            let (summary, _) = run_scenario(&cfg, &out)?;
            Ok(report(&summary, &out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.is::<UsageError>()
                || e.is::<ConfigError>()
                || matches!(
                    e.downcast_ref::<LabError>(),
                    Some(LabError::UnknownScenario(_) | LabError::Config(_))
                );
            ExitCode::from(if usage { EXIT_USAGE } else { EXIT_ERROR })
        }
    }
}
