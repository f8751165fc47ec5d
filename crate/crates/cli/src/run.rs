//! Scenario execution and artifact writing.
//!
//! Each time point is evaluated independently and sequentially by one
//! worker, so the numbers do not depend on how many workers run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::json;

use spinbath_core::bath::EnsembleSource;
use spinbath_core::single::SingleQubitEvolver;
use spinbath_core::two_qubit::{
    concurrence, esd_scan, Propagation, TwoQubitEvolver, DEFAULT_ESD_TOL,
};

use crate::config::{Mode, Scenario, SystemConfig};
use crate::CliError;

/// Environment variable read by the binary for the worker count; `0` or
/// unset uses one worker per core.
pub const WORKERS_ENV: &str = "SPINBATH_WORKERS";

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub times: Vec<f64>,
    pub columns: Vec<String>,
    /// One row per time point, in `columns` order.
    pub rows: Vec<Vec<f64>>,
    pub source: EnsembleSource,
    pub n_terms: usize,
    pub n_classes: usize,
    pub log_partition: f64,
    pub warnings: Vec<String>,
    /// Sudden-death intervals per concurrence column.
    pub esd_intervals: Vec<(String, Vec<(f64, f64)>)>,
    pub initial_bloch: Vec<(String, [f64; 3])>,
    pub workers: usize,
    pub elapsed: Duration,
}

impl RunOutput {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Evaluates every channel on the scenario grid with `workers` threads
/// (`0` for one per core).
pub fn compute(scenario: &Scenario, workers: usize) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let ens = scenario.build_ensemble()?;
    let times = scenario.grid.times();
    let variants = scenario.variants;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::validation(WORKERS_ENV, e.to_string()))?;

    let mut warnings = Vec::new();
    if let Some(alpha) = scenario.bath.ignored_ising_entry() {
        warnings.push(format!(
            "bath.ising[{}] = {alpha} is ignored: an open chain has n_spins - 1 bonds",
            scenario.bath.n_spins - 1
        ));
    }

    let mut columns = Vec::new();
    let mut esd_intervals = Vec::new();
    let mut initial_bloch = Vec::new();
    let (rows, n_classes) = match scenario.system {
        SystemConfig::Single(sys) => {
            let ev = SingleQubitEvolver::new(&sys, &ens)?;
            let mut names = |suffix: &str| {
                for axis in ["px", "py", "pz"] {
                    columns.push(format!("{axis}_{suffix}"));
                }
            };
            if variants.woc() {
                names("woc");
                initial_bloch.push(("woc".to_string(), ev.initial_woc().as_array()));
            }
            if variants.wc() {
                names("wc");
                names("wc_compact");
                initial_bloch.push(("wc".to_string(), ev.initial_wc().as_array()));
            }
            let rows = pool.install(|| {
                times
                    .par_iter()
                    .map(|&t| {
                        let mut row = Vec::with_capacity(9);
                        if variants.woc() {
                            row.extend(ev.woc_at(t).as_array());
                        }
                        if variants.wc() {
                            row.extend(ev.wc_at(t).as_array());
                            row.extend(ev.wc_compact_at(t).as_array());
                        }
                        row
                    })
                    .collect()
            });
            (rows, ev.class_count())
        }
        SystemConfig::TwoQubit(spec) => {
            let ev = TwoQubitEvolver::new(&spec, &ens, Propagation::Auto)?;
            let flags: Vec<bool> = [(variants.woc(), false), (variants.wc(), true)]
                .into_iter()
                .filter_map(|(on, corr)| on.then_some(corr))
                .collect();
            for &corr in &flags {
                columns.push(if corr { "c_wc" } else { "c_woc" }.to_string());
            }
            let rows: Vec<Vec<f64>> = pool.install(|| {
                times
                    .par_iter()
                    .map(|&t| {
                        flags
                            .iter()
                            .map(|&corr| concurrence(&ev.state_at(t, corr)))
                            .collect::<Result<Vec<f64>, _>>()
                    })
                    .collect::<Result<_, _>>()
            })?;
            for (k, name) in columns.iter().enumerate() {
                let c: Vec<f64> = rows.iter().map(|r| r[k]).collect();
                esd_intervals.push((name.clone(), esd_scan(&times, &c, DEFAULT_ESD_TOL)));
            }
            (rows, ev.class_count())
        }
    };

    Ok(RunOutput {
        times,
        columns,
        rows,
        source: ens.source,
        n_terms: ens.terms.len(),
        n_classes,
        log_partition: ens.log_partition(),
        warnings,
        esd_intervals,
        initial_bloch,
        workers: pool.current_num_threads(),
        elapsed: start.elapsed(),
    })
}

/// `t` then every channel, 17 significant digits, LF line endings.
pub fn csv_text(out: &RunOutput) -> String {
    let mut s = String::with_capacity(24 * (out.columns.len() + 1) * (out.times.len() + 1));
    s.push('t');
    for c in &out.columns {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for (t, row) in out.times.iter().zip(&out.rows) {
        let _ = write!(s, "{t:.16e}");
        for v in row {
            let _ = write!(s, ",{v:.16e}");
        }
        s.push('\n');
    }
    s
}

pub fn meta_json(scenario: &Scenario, out: &RunOutput) -> serde_json::Value {
    let mut meta = json!({
        "scenario": scenario.to_document(),
        "engine": {
            "requested": scenario.engine.as_str(),
            "used": out.source.as_str(),
        },
        "bath": {
            "terms": out.n_terms,
            "coupling_classes": out.n_classes,
            "log_partition": out.log_partition,
        },
        "columns": out.columns,
        "rows": out.times.len(),
        "time_axis": format!(
            "uniform grid of {} points on [0, {}]; preset ranges are a fixed default, not read from figure axes",
            scenario.grid.points, scenario.grid.t_max
        ),
        "workers": out.workers,
        "elapsed_seconds": out.elapsed.as_secs_f64(),
        "code_version": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        "warnings": out.warnings,
    });
    if !out.initial_bloch.is_empty() {
        meta["initial_bloch"] = out
            .initial_bloch
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
    }
    if scenario.mode() == Mode::TwoQubit {
        meta["esd_tolerance"] = json!(DEFAULT_ESD_TOL);
        meta["esd_intervals"] = out
            .esd_intervals
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
    }
    meta
}

/// A gnuplot script that reads only the CSV next to it.
pub fn plot_script(scenario: &Scenario, out: &RunOutput, csv_name: &str) -> String {
    let (ylabel, shown): (&str, Vec<&str>) = match scenario.mode() {
        Mode::Single => ("p_x", vec!["px_woc", "px_wc"]),
        Mode::TwoQubit => ("concurrence", vec!["c_woc", "c_wc"]),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# Run from this directory: gnuplot -persist {}",
        csv_name.replace(".csv", ".gp")
    );
    let _ = writeln!(s, "# Columns: t,{}", out.columns.join(","));
    s.push_str("set datafile separator ','\n");
    s.push_str("set key top right\n");
    s.push_str("set xlabel 't'\n");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    let _ = writeln!(s, "set xrange [0:{}]", scenario.grid.t_max);
    let plots: Vec<String> = shown
        .iter()
        .filter(|c| out.columns.iter().any(|x| x == *c))
        .map(|c| {
            let (style, title) = if c.ends_with("_woc") {
                ("dt 2 lc rgb 'blue'", "without correlations")
            } else {
                ("dt 1 lc rgb 'red'", "with correlations")
            };
            format!("'{csv_name}' using 1:'{c}' with lines {style} title '{title}'")
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub plot: PathBuf,
}

pub fn write_artifacts(
    scenario: &Scenario,
    out: &RunOutput,
    prefix: &Path,
) -> Result<Artifacts, CliError> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let with = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    let paths = Artifacts {
        csv: with(".csv"),
        meta: with(".meta.json"),
        plot: with(".gp"),
    };
    let csv_name = paths
        .csv
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let write =
        |path: &Path, body: String| fs::write(path, body).map_err(|e| CliError::io(path, e));
    write(&paths.csv, csv_text(out))?;
    let mut meta =
        serde_json::to_string_pretty(&meta_json(scenario, out)).expect("meta serializes");
    meta.push('\n');
    write(&paths.meta, meta)?;
    write(&paths.plot, plot_script(scenario, out, &csv_name))?;
    Ok(paths)
}

/// [`compute`] then [`write_artifacts`].
pub fn run(
    scenario: &Scenario,
    prefix: &Path,
    workers: usize,
) -> Result<(RunOutput, Artifacts), CliError> {
    let out = compute(scenario, workers)?;
    let paths = write_artifacts(scenario, &out, prefix)?;
    Ok((out, paths))
}
