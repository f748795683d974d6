use std::path::PathBuf;
use std::process::ExitCode;

use anisohit::Error;
use anisohit_cli::{emit_csv, exit_code, run_pipeline, ExperimentConfig, Pipeline};
use anisohit_cli::{EXIT_FAIL, EXIT_PASS};
use clap::Parser;

/// Runs one verification pipeline and writes `<out>/<pipeline>.csv`.
#[derive(Debug, Parser)]
#[command(name = "anisohit", version)]
struct Cli {
    pipeline: Pipeline,
    /// Flat `key = value` configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the CSV report.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Suppress the per-row report on stdout.
    #[arg(long)]
    quiet: bool,
}

fn init_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("ANISOHIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::Config(format!(
                "ANISOHIT_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot configure {n} threads: {e}")))
}

fn run(cli: &Cli) -> Result<bool, Error> {
    init_threads()?;
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if !cli.out.is_dir() {
        return Err(Error::Config(format!(
            "output directory {} does not exist",
            cli.out.display()
        )));
    }
    let rows = run_pipeline(cli.pipeline, &cfg)?;
    let path = cli.out.join(format!("{}.csv", cli.pipeline.name()));
    emit_csv(&rows, &path)?;
    if !cli.quiet {
        for row in &rows {
            println!("{row}");
        }
    }
    let failed = rows.iter().filter(|r| !r.pass()).count();
    println!(
        "{}: {} rows, {failed} failed, report {}",
        cli.pipeline.name(),
        rows.len(),
        path.display()
    );
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(EXIT_PASS as u8),
        Ok(false) => ExitCode::from(EXIT_FAIL as u8),
        Err(e) => {
            eprintln!("anisohit: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
