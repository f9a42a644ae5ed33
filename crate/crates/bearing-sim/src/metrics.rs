//! Per-run and batch summary metrics.
//!
//! The steady-state window is the last 10 s of a run (half the run when it
//! is shorter than 20 s), matching the reference window of [10, 20] s at the
//! default duration. Convergence time is the start of the last interval on
//! which the error stays below half a degree; infinity if it never does.

use crate::run::Record;

const CONVERGENCE_THRESHOLD_DEG: f64 = 0.5;

/// Summary of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunMetrics {
    pub seed: u64,
    pub final_err_eqv: f64,
    pub final_err_naive: f64,
    pub median_ss_eqv: f64,
    pub median_ss_naive: f64,
    pub convergence_time_eqv: f64,
    pub convergence_time_naive: f64,
    pub outlier_count: u32,
}

fn median(mut values: Vec<f64>) -> f64 {
    assert!(!values.is_empty(), "median over a non-empty window");
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn convergence_time(records: &[Record], err: impl Fn(&Record) -> f64) -> f64 {
    let threshold = CONVERGENCE_THRESHOLD_DEG.to_radians();
    // Walk backwards to the last violation.
    let mut converged_from = None;
    for r in records.iter().rev() {
        if err(r) >= threshold {
            break;
        }
        converged_from = Some(r.t);
    }
    converged_from.unwrap_or(f64::INFINITY)
}

impl RunMetrics {
    pub fn from_records(seed: u64, records: &[Record], outlier_count: u32, duration: f64) -> Self {
        let window_start = duration - (duration * 0.5).min(10.0);
        let window: Vec<&Record> = records.iter().filter(|r| r.t >= window_start).collect();
        let last = records.last().expect("runs emit at least one record");
        RunMetrics {
            seed,
            final_err_eqv: last.angle_err_eqv,
            final_err_naive: last.angle_err_naive,
            median_ss_eqv: median(window.iter().map(|r| r.angle_err_eqv).collect()),
            median_ss_naive: median(window.iter().map(|r| r.angle_err_naive).collect()),
            convergence_time_eqv: convergence_time(records, |r| r.angle_err_eqv),
            convergence_time_naive: convergence_time(records, |r| r.angle_err_naive),
            outlier_count,
        }
    }
}

/// Batch aggregate: per-run rows plus medians across runs. Order-independent
/// in the aggregate fields.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchMetrics {
    pub per_run: Vec<RunMetrics>,
    /// Runs where the equivariant steady-state median beats the naive one.
    pub eqv_wins: usize,
    pub median_final_err_eqv: f64,
    pub median_final_err_naive: f64,
    pub median_ss_eqv: f64,
    pub median_ss_naive: f64,
    pub total_outliers: u64,
}

impl BatchMetrics {
    pub fn aggregate(per_run: Vec<RunMetrics>) -> Self {
        assert!(!per_run.is_empty());
        let eqv_wins = per_run.iter().filter(|m| m.median_ss_eqv < m.median_ss_naive).count();
        let collect = |f: &dyn Fn(&RunMetrics) -> f64| median(per_run.iter().map(f).collect());
        BatchMetrics {
            eqv_wins,
            median_final_err_eqv: collect(&|m| m.final_err_eqv),
            median_final_err_naive: collect(&|m| m.final_err_naive),
            median_ss_eqv: collect(&|m| m.median_ss_eqv),
            median_ss_naive: collect(&|m| m.median_ss_naive),
            total_outliers: per_run.iter().map(|m| m.outlier_count as u64).sum(),
            per_run,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bearing_core::Vector3;

    fn record(t: f64, err_eqv: f64, err_naive: f64) -> Record {
        let e3 = Vector3::new(0.0, 0.0, 1.0);
        Record {
            t,
            xi: e3,
            y: e3,
            outlier: false,
            xihat_eqv: e3,
            xihat_naive: e3,
            angle_err_eqv: err_eqv,
            angle_err_naive: err_naive,
            v: 0.0,
            vdot: 0.0,
        }
    }

    #[test]
    fn median_definitions() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(vec![1.0, f64::INFINITY]), f64::INFINITY);
    }

    #[test]
    fn convergence_time_finds_last_crossing() {
        let thr = 0.5_f64.to_radians();
        let recs: Vec<Record> = vec![
            record(0.0, 10.0 * thr, thr * 0.1),
            record(1.0, 0.2 * thr, thr * 2.0),
            record(2.0, 0.1 * thr, thr * 0.4),
            record(3.0, 0.05 * thr, thr * 0.3),
        ];
        let m = RunMetrics::from_records(0, &recs, 0, 3.0);
        assert_eq!(m.convergence_time_eqv, 1.0);
        assert_eq!(m.convergence_time_naive, 2.0);

        let never: Vec<Record> = vec![record(0.0, thr, thr), record(1.0, thr * 3.0, thr)];
        let m = RunMetrics::from_records(0, &never, 0, 1.0);
        assert_eq!(m.convergence_time_eqv, f64::INFINITY);
    }

    #[test]
    fn window_takes_last_ten_seconds() {
        // 0..=20 s at 1 s steps; errors rise linearly, so the window median
        // over [10, 20] is the value at 15 s.
        let recs: Vec<Record> = (0..=20).map(|i| record(i as f64, i as f64, 0.0)).collect();
        let m = RunMetrics::from_records(0, &recs, 0, 20.0);
        assert_eq!(m.median_ss_eqv, 15.0);

        // Short runs use the trailing half.
        let recs: Vec<Record> = (0..=4).map(|i| record(i as f64, i as f64, 0.0)).collect();
        let m = RunMetrics::from_records(0, &recs, 0, 4.0);
        assert_eq!(m.median_ss_eqv, 3.0);
    }

    #[test]
    fn aggregate_is_permutation_invariant() {
        let a = RunMetrics {
            seed: 0,
            final_err_eqv: 0.1,
            final_err_naive: 0.2,
            median_ss_eqv: 0.05,
            median_ss_naive: 0.3,
            convergence_time_eqv: 2.0,
            convergence_time_naive: 5.0,
            outlier_count: 3,
        };
        let b = RunMetrics { seed: 1, median_ss_eqv: 0.4, median_ss_naive: 0.1, ..a };
        let c = RunMetrics { seed: 2, final_err_eqv: 0.3, ..a };
        let fwd = BatchMetrics::aggregate(vec![a, b, c]);
        let rev = BatchMetrics::aggregate(vec![c, b, a]);
        assert_eq!(fwd.eqv_wins, rev.eqv_wins);
        assert_eq!(fwd.median_ss_eqv, rev.median_ss_eqv);
        assert_eq!(fwd.median_final_err_eqv, rev.median_final_err_eqv);
        assert_eq!(fwd.total_outliers, rev.total_outliers);
        assert_eq!(fwd.eqv_wins, 2);
    }
}
