mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Layer, PipelineConfig};
use crate::error::CliError;

/// Link software homepages to web-archive captures around the year of their
/// top-cited publication.
#[derive(Parser, Debug)]
#[command(name = "archivelink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find trigger-term software mentions in publication text.
    Mine(CommonArgs),
    /// Look up captures and classify each software's archival status.
    Link(CommonArgs),
    /// Profile the archived landing page of every archived software.
    Classify(CommonArgs),
    /// Aggregate link results and profiles into tables.
    Report(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Pipeline config file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use a fixture directory as the archive backend.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Output directory for stage files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Maximum requests per second to a remote archive.
    #[arg(long)]
    rate_limit: Option<f64>,
    /// Worker threads for archive lookups.
    #[arg(long)]
    workers: Option<usize>,
    /// Count captures of every HTTP status, not only 200 and revisits.
    #[arg(long)]
    keep_all_statuses: bool,
}

impl CommonArgs {
    fn resolve(&self) -> Result<PipelineConfig, CliError> {
        let file = match &self.config {
            Some(path) => Layer::from_file(path)?,
            None => Layer::default(),
        };
        let env = Layer::from_env(|k| std::env::var(k).ok())?;
        let flags = Layer {
            fixture: self.fixture.clone(),
            out: self.out.clone(),
            rate_limit: self.rate_limit,
            workers: self.workers,
            keep_all_statuses: self.keep_all_statuses.then_some(true),
            ..Default::default()
        };
        PipelineConfig::resolve(file.overlay(env).overlay(flags))
    }
}

type Stage = fn(&PipelineConfig) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, stage): (&CommonArgs, Stage) = match &cli.command {
        Command::Mine(a) => (a, commands::mine),
        Command::Link(a) => (a, commands::link),
        Command::Classify(a) => (a, commands::classify),
        Command::Report(a) => (a, commands::report),
    };
    let cfg = args.resolve()?;
    stage(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
