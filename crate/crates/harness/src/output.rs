//! Report files: pretty JSON documents and flat CSV tables for plotting.
//!
//! Floats are written in the shortest decimal form that parses back to the
//! same bits, so reports round-trip exactly.

use std::fs;
use std::path::{Path, PathBuf};

use reak_core::engine::{RunOutcome, TraceEvent, TraceRecord};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{HarnessError, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "REAK_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "reak-output";

/// Output directory by precedence: command line, configuration file,
/// environment, built-in default.
pub fn resolve_output_dir(cli: Option<&Path>, config: Option<&Path>) -> PathBuf {
    cli.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Output(format!("{}: {e}", path.display())))?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Output(format!("{}: {e}", path.display())))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| HarnessError::Output(format!("{}: {e}", path.display())))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |e| HarnessError::Output(format!("{}: {e}", path.display()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn event_name(e: TraceEvent) -> &'static str {
    match e {
        TraceEvent::Learn => "learn",
        TraceEvent::Bound => "bound",
        TraceEvent::PoolGrowth => "pool_growth",
    }
}

pub const TRACE_COLUMNS: [&str; 18] = [
    "iteration",
    "event",
    "n_train",
    "n_pool",
    "alpha",
    "omega2_size",
    "max_score",
    "added",
    "pf_hat",
    "eps_max",
    "safe_wse_lo",
    "safe_wse_hi",
    "fail_wse_lo",
    "fail_wse_hi",
    "n_omega2_fail_lo",
    "n_omega2_fail_hi",
    "theta_refit",
    "confidence",
];

/// One row per trace record.
pub fn write_trace_csv(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(TRACE_COLUMNS).map_err(&err)?;
    for t in trace {
        let b = t.bound;
        w.write_record([
            t.iteration.to_string(),
            event_name(t.event).to_string(),
            t.n_train.to_string(),
            t.n_pool.to_string(),
            t.alpha.to_string(),
            t.omega2_size.to_string(),
            opt(t.max_score),
            opt(t.added),
            t.pf_hat.to_string(),
            opt(t.eps_max),
            opt(b.map(|b| b.safe_wse_ci.0)),
            opt(b.map(|b| b.safe_wse_ci.1)),
            opt(b.map(|b| b.fail_wse_ci.0)),
            opt(b.map(|b| b.fail_wse_ci.1)),
            opt(b.map(|b| b.n_omega2_fail_range.0)),
            opt(b.map(|b| b.n_omega2_fail_range.1)),
            t.theta_refit.to_string(),
            opt(b.map(|b| b.confidence)),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Final pool of a low-dimensional run: coordinates, density, prediction,
/// sampling-region membership and evaluated responses.
pub fn write_pool_csv(path: &Path, outcome: &RunOutcome<f64>) -> Result<()> {
    let pool = &outcome.pool;
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    let mut header: Vec<String> = (1..=pool.dim()).map(|j| format!("x{j}")).collect();
    header.extend(
        ["density", "pred_mean", "pred_sd", "pred_fail", "in_esr", "evaluated", "g"]
            .iter()
            .map(|s| s.to_string()),
    );
    w.write_record(&header).map_err(&err)?;
    let mask = outcome.partition.esr_mask(pool.len());
    for i in 0..pool.len() {
        let mut row: Vec<String> = pool.row(i).iter().map(|v| v.to_string()).collect();
        row.push(pool.density()[i].to_string());
        row.push(pool.pred_mean[i].to_string());
        row.push(pool.pred_sd[i].to_string());
        row.push(u8::from(pool.pred_fail(i)).to_string());
        row.push(u8::from(mask[i]).to_string());
        row.push(u8::from(pool.is_evaluated(i)).to_string());
        row.push(opt(pool.evaluated(i)));
        w.write_record(&row).map_err(&err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Writes serializable rows with a header taken from their field names.
pub fn write_rows_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    for r in rows {
        w.serialize(r).map_err(&err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_rows_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<std::result::Result<Vec<T>, _>>().map_err(csv_err(path))
}
