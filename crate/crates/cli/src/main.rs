//! `carleson`: runs the verification pipelines from a TOML experiment file.

mod commands;
mod config;
mod error;
mod output;

use clap::Parser;
use commands::Command;
use config::{ExperimentConfig, Format};
use error::{CliError, CliResult};
use output::Output;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "carleson", version, about = "Boundary-estimate verification runner")]
struct Cli {
    /// Experiment file (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel instance runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report formats, overriding `output.format`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

fn execute(cli: &Cli) -> CliResult<()> {
    let (cfg, bytes) = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => {
            let cfg = ExperimentConfig::default();
            let text = toml::to_string(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
            (cfg, text.into_bytes())
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure the thread pool: {e}")))?;
    }
    let out = Output::new(
        cli.out.clone().unwrap_or_else(|| cfg.output.dir.clone()),
        cli.format.unwrap_or(cfg.output.format),
        &bytes,
    );
    for p in commands::run(&cli.command, &cfg, &out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            let msg = serde_json::json!({
                "error": e.kind(),
                "command": cli.command.name(),
                "exit_code": code,
                "message": e.to_string(),
            });
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
