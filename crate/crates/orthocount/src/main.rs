use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use orthocount::commands::{self, Command};
use orthocount::config::ExperimentConfig;
use orthocount::error::CliError;
use orthocount::output::OutDir;
use orthocount::threads::Threads;

/// Counting common perpendiculars in hyperbolic manifolds.
#[derive(Parser, Debug)]
#[command(name = "orthocount", version)]
struct Cli {
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; overrides ORTHOCOUNT_WORKERS and the config.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| CliError::Config {
        key: None,
        message: format!("cannot read {}: {e}", cli.config.display()),
        line: None,
        column: None,
    })?;
    let cfg = ExperimentConfig::parse(&text)?;
    if cli.workers == Some(0) {
        return Err(CliError::Config { key: Some("workers".into()), message: "--workers must be at least 1".into(), line: None, column: None });
    }
    let exec = Threads::resolve(cli.workers, cfg.workers).map_err(|m| CliError::Config { key: Some("ORTHOCOUNT_WORKERS".into()), message: m, line: None, column: None })?;
    let out = OutDir::create(&cli.out)?;
    commands::run(cli.command, &cfg, &out, &exec)
}
