//! Experiment runner: reads one JSON config, runs one experiment, writes
//! `summary.json` and CSV tables under `<out>/<experiment>/<label>/`.

mod config;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] anderson_thermo::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use anderson_thermo::Error;
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Core(Error::Config(_)) => 2,
            CliError::Core(Error::Geometry(_) | Error::Sector(_)) => 3,
            CliError::Core(Error::Solver { .. }) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "anderson-thermo", version, about = "Run one many-body random-operator experiment")]
struct Args {
    /// JSON configuration file.
    config: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output root directory [default: runs].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of disorder realizations override.
    #[arg(long)]
    realizations: Option<usize>,
    /// Worker threads for the realization pool.
    #[arg(long)]
    workers: Option<usize>,
    /// Run directory name instead of a timestamp.
    #[arg(long)]
    label: Option<String>,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut config = RunConfig::parse(&text)?;
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(m) = args.realizations {
        config.realizations = m;
    }
    if let Some(o) = &args.out {
        config.out = Some(o.clone());
    }
    if let Some(l) = &args.label {
        config.label = Some(l.clone());
    }
    config.validate()?;
    Ok(config)
}

fn set_workers(workers: Option<usize>) -> Result<(), CliError> {
    let Some(w) = workers else { return Ok(()) };
    if w == 0 {
        return Err(CliError::Config("workers: must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(w)
        .build_global()
        .map_err(|e| CliError::Config(format!("workers: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    if w > 1 {
        eprintln!("built without the parallel feature, running on one thread");
    }
    Ok(())
}

fn execute(args: &Args) -> Result<PathBuf, CliError> {
    let config = load(args)?;
    set_workers(args.workers)?;
    let digest = config.digest();
    let outcome = experiments::run(&config)?;

    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("runs"));
    let dir = output::run_directory(&out, config.experiment.name(), config.label.as_deref())?;
    let mut files = Vec::new();
    for table in &outcome.tables {
        output::write_table(&dir, table, &digest, config.seed)?;
        files.push(format!("{}.csv", table.name));
    }
    let summary = json!({
        "experiment": config.experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": digest,
        "seed": config.seed,
        "realizations": config.realizations,
        "parallel": anderson_thermo::exec::is_parallel(),
        "config": config,
        "results": outcome.results,
        "files": files,
    });
    output::write_summary(&dir, &summary)?;
    Ok(dir)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
