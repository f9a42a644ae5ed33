//! CSV export of run records.
//!
//! Fixed header, one row per record, LF line endings. Floats are written in
//! scientific notation with 17 significant digits, enough for bit-exact
//! round-trips; the outlier flag is 0/1.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::metrics::{BatchMetrics, RunMetrics};
use crate::run::Record;

pub const CSV_HEADER: &str = "t,xi_x,xi_y,xi_z,y_x,y_y,y_z,outlier,xihat_eqv_x,xihat_eqv_y,xihat_eqv_z,xihat_naive_x,xihat_naive_y,xihat_naive_z,angle_err_eqv,angle_err_naive,V,Vdot";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders records to CSV text (header plus one line per record).
pub fn format_records(records: &[Record]) -> String {
    // 18 columns at ~24 bytes each.
    let mut out = String::with_capacity(CSV_HEADER.len() + 1 + records.len() * 440);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let fields = [
            fmt17(r.t),
            fmt17(r.xi.x),
            fmt17(r.xi.y),
            fmt17(r.xi.z),
            fmt17(r.y.x),
            fmt17(r.y.y),
            fmt17(r.y.z),
            (r.outlier as u8).to_string(),
            fmt17(r.xihat_eqv.x),
            fmt17(r.xihat_eqv.y),
            fmt17(r.xihat_eqv.z),
            fmt17(r.xihat_naive.x),
            fmt17(r.xihat_naive.y),
            fmt17(r.xihat_naive.z),
            fmt17(r.angle_err_eqv),
            fmt17(r.angle_err_naive),
            fmt17(r.v),
            fmt17(r.vdot),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(records: &[Record], path: &Path) -> Result<(), OutputError> {
    write_text(&format_records(records), path)
}

pub const METRICS_HEADER: &str = "run,seed,final_err_eqv,final_err_naive,median_ss_eqv,median_ss_naive,convergence_time_eqv,convergence_time_naive,outliers";

/// Renders batch per-run metrics as CSV (angles in radians, times in
/// seconds; inf marks runs that never converged).
pub fn format_metrics(batch: &BatchMetrics) -> String {
    let mut out = String::new();
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for (i, m) in batch.per_run.iter().enumerate() {
        let RunMetrics {
            seed,
            final_err_eqv,
            final_err_naive,
            median_ss_eqv,
            median_ss_naive,
            convergence_time_eqv,
            convergence_time_naive,
            outlier_count,
        } = *m;
        out.push_str(&format!(
            "{i},{seed},{},{},{},{},{},{},{outlier_count}\n",
            fmt17(final_err_eqv),
            fmt17(final_err_naive),
            fmt17(median_ss_eqv),
            fmt17(median_ss_naive),
            fmt17(convergence_time_eqv),
            fmt17(convergence_time_naive),
        ));
    }
    out
}

pub fn write_text(text: &str, path: &Path) -> Result<(), OutputError> {
    let io = |source| OutputError::Io { path: path.display().to_string(), source };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)?;
    f.flush().map_err(io)
}
