use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::Scenario;
use super::run::{ExperimentResult, SummaryRow};
use crate::capacity::CapacityReport;
use crate::dissemination::SimResult;
use crate::error::{Error, Result};

fn metric(s: Scenario) -> (&'static str, &'static str) {
    match s {
        Scenario::LatencyVsShortcuts => ("latency", "latency (slots)"),
        Scenario::AplVsShortcuts => ("apl_ratio", "L(N)/L(0)"),
        _ => ("capa_e", "effective capacity (Mbps)"),
    }
}

/// gnuplot script drawing the scenario's metric, one line per scheme.
fn plot_script(r: &ExperimentResult, csv: &str) -> String {
    let s = r.config.scenario;
    let (col, label) = metric(s);
    let idx = SummaryRow::CSV_HEADER
        .split(',')
        .position(|c| c == col)
        .expect("metric column exists")
        + 1;
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set key autotitle columnhead");
    let _ = writeln!(out, "set terminal pngcairo size 800,600");
    let _ = writeln!(out, "set output '{}.png'", s.name());
    let _ = writeln!(out, "set xlabel '{}'", s.axis());
    let _ = writeln!(out, "set ylabel '{label}'");
    let plots: Vec<String> = r
        .config
        .schemes
        .iter()
        .map(|sc| {
            format!(
                "'{csv}' using ($2 eq '{name}' ? $5 : 1/0):{idx} with linespoints title '{name}'",
                name = sc.name()
            )
        })
        .collect();
    let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    out
}

fn write(path: &Path, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, text)?;
    written.push(path.to_path_buf());
    Ok(())
}

/// Writes the summary CSV, per-run capacity and dissemination CSVs, a
/// gnuplot script, the resolved config and a manifest into `out_dir`.
/// Returns the written paths.
pub fn emit_outputs(r: &ExperimentResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if r.rows.is_empty() {
        return Err(Error::Config("no results to write".into()));
    }
    let name = r.config.scenario.name();
    let runs = out_dir.join("runs");
    fs::create_dir_all(&runs)?;
    let mut written = Vec::new();

    let mut summary = String::from(SummaryRow::CSV_HEADER);
    summary.push('\n');
    for row in &r.rows {
        summary.push_str(&row.to_csv_row());
        summary.push('\n');
    }
    let csv_name = format!("{name}.csv");
    write(&out_dir.join(&csv_name), &summary, &mut written)?;

    for &scheme in &r.config.schemes {
        let cells: Vec<_> = r.cells.iter().filter(|c| c.scheme == scheme).collect();
        let mut cap = format!("x,seed,{}\n", CapacityReport::CSV_HEADER);
        for c in &cells {
            let _ = writeln!(cap, "{},{},{}", c.x, c.seed, c.capacity.to_csv_row());
        }
        write(
            &runs.join(format!("{name}_{}_capacity.csv", scheme.slug())),
            &cap,
            &mut written,
        )?;
        if cells.iter().any(|c| c.sim.is_some()) {
            let mut sim = format!("{}\n", SimResult::CSV_HEADER);
            for c in &cells {
                if let Some(s) = &c.sim {
                    let _ = writeln!(sim, "{}", s.to_csv_row(name, c.seed, c.shortcuts));
                }
            }
            write(
                &runs.join(format!("{name}_{}_sim.csv", scheme.slug())),
                &sim,
                &mut written,
            )?;
        }
    }

    write(
        &out_dir.join(format!("{name}.gp")),
        &plot_script(r, &csv_name),
        &mut written,
    )?;
    let resolved = r.config.resolved();
    write(
        &out_dir.join("config.toml"),
        &resolved.to_toml(),
        &mut written,
    )?;

    let mut manifest = String::new();
    let _ = writeln!(
        manifest,
        "software = {} {}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION")
    );
    let _ = writeln!(manifest, "config_hash = sha256:{}", r.config.hash());
    let _ = writeln!(manifest, "scenario = {name}");
    let schemes: Vec<&str> = r.config.schemes.iter().map(|s| s.name()).collect();
    let _ = writeln!(manifest, "schemes = {}", schemes.join(","));
    let _ = writeln!(manifest, "seeds = {}", r.config.seeds);
    let _ = writeln!(manifest, "seed_offset = {}", r.config.seed_offset);
    let _ = writeln!(manifest, "factor_policy = {}", r.config.model.factor_policy);
    let _ = writeln!(
        manifest,
        "path_length = harmonic mean over all ordered pairs; apl_connected_ratio excludes disconnected pairs"
    );
    let _ = writeln!(
        manifest,
        "capacity_source = measured k, C(G), L(G), p_avg (capa_e); nominal k, C(G) (capa_e_analytic)"
    );
    for p in &written {
        if let Ok(rel) = p.strip_prefix(out_dir) {
            let _ = writeln!(manifest, "file = {}", rel.display());
        }
    }
    write(&out_dir.join("manifest.txt"), &manifest, &mut written)?;
    Ok(written)
}
