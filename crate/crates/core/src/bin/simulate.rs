use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use crn_core::harness::{emit_outputs, run_experiment, ExperimentConfig, Scheme};
use crn_core::Error;

/// Run one experiment and write its CSVs, plot script and manifest.
#[derive(Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the number of seeds.
    #[arg(long)]
    seeds: Option<u32>,
    /// Override the scenario.
    #[arg(long)]
    scenario: Option<String>,
    /// Comma-separated scheme list, e.g. `NSC+CA,RS+Random`.
    #[arg(long)]
    scheme: Option<String>,
    /// First seed.
    #[arg(long)]
    seed_offset: Option<u64>,
}

fn load(args: &Args) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(s) = args.seeds {
        cfg.seeds = s;
    }
    if let Some(s) = &args.scenario {
        cfg.scenario = s.parse()?;
    }
    if let Some(list) = &args.scheme {
        cfg.schemes = list
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Scheme>, _>>()?;
    }
    if let Some(k) = args.seed_offset {
        cfg.seed_offset = k;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load(&args)
        .and_then(|cfg| run_experiment(&cfg))
        .and_then(|r| emit_outputs(&r, &args.out).map(|files| (r, files)));
    match result {
        Ok((r, files)) => {
            for row in &r.rows {
                println!("{}", row.to_csv_row());
            }
            eprintln!("wrote {} files to {}", files.len(), args.out.display());
            ExitCode::SUCCESS
        }
        Err(Error::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
