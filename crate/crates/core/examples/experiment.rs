//! Run a scenario through the harness and write its outputs.
//!
//! ```text
//! cargo run --release --example experiment -- apl_vs_shortcuts 10 out/
//! ```
//!
//! Arguments: scenario name, seed count, output directory (optional).

use std::path::PathBuf;

use crn_core::harness::{emit_outputs, run_experiment, ExperimentConfig, Scenario, SummaryRow};

fn main() -> crn_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let scenario: Scenario = args
        .next()
        .as_deref()
        .unwrap_or("apl_vs_shortcuts")
        .parse()?;
    let seeds = match args.next() {
        Some(s) => s
            .parse()
            .map_err(|_| crn_core::Error::Config(format!("bad seed count {s}")))?,
        None => 5,
    };

    let mut cfg = ExperimentConfig::new(scenario);
    cfg.seeds = seeds;
    println!("config hash {}", cfg.hash());
    let r = run_experiment(&cfg)?;
    println!("{}", SummaryRow::CSV_HEADER);
    for row in &r.rows {
        println!("{}", row.to_csv_row());
    }
    if let Some(dir) = args.next() {
        let files = emit_outputs(&r, &PathBuf::from(dir))?;
        eprintln!("wrote {} files", files.len());
    }
    Ok(())
}
