//! Seeded simulation runs: truth, corrupted measurements, both observers.
//!
//! One run is a fixed-step loop over n = round(duration/dt) steps. Records
//! are emitted at t_i = i dt for i = 0..=n: row i holds the state at t_i and
//! the measurement current at t_i (fresh when the decimation divides i, held
//! otherwise; the final row always holds the last measurement). Each step
//! samples the clean input at the midpoint, corrupts a copy for the
//! observers, advances truth on the group with the clean input, and advances
//! the enabled observers with the shared corrupted measurement and input.
//!
//! Randomness: stream 0 draws the sinusoid spec (when random) and then the
//! initial bearing (when random); streams 1..3 carry input, bearing, and
//! outlier noise. Draws happen regardless of which observers are enabled, so
//! a given seed produces the same trajectories under every observer
//! selection.

use bearing_core::dynamics::{
    random_spec, InputSource, SceneError, SceneSpec, SinusoidSpec, TruthState,
};
use bearing_core::geom3::project_tangent;
use bearing_core::noise::{
    maybe_outlier, perturb_bearing, perturb_input, random_unit_vector, NoiseStreams,
};
use bearing_core::observer::{
    diagnostics, estimate, step_group_observer, step_naive_observer, GroupObserverState,
    ManifoldObserverState,
};
use bearing_core::{InputPair, Rotation3, UnitVector3, Vector3};
use thiserror::Error;

use crate::config::{ConfigError, InputConfig, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scene is invalid over the run horizon: {0}")]
    Scene(#[from] SceneError),
    #[error("simulation produced a non-finite value at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
}

/// One CSV row: the state at one record time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    pub t: f64,
    pub xi: Vector3,
    pub y: Vector3,
    pub outlier: bool,
    pub xihat_eqv: Vector3,
    pub xihat_naive: Vector3,
    pub angle_err_eqv: f64,
    pub angle_err_naive: f64,
    pub v: f64,
    pub vdot: f64,
}

/// Numerical health counters accumulated over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunStats {
    /// Largest orthogonality defect seen on any stored rotation.
    pub max_rotation_defect: f64,
    /// Polar re-orthonormalizations applied (defect above 1e-12).
    pub repairs: u32,
    pub outlier_count: u32,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<Record>,
    pub stats: RunStats,
}

enum Model {
    Sinusoid(SinusoidSpec),
    Scene(SceneSpec),
}

impl InputSource for Model {
    fn raw_input(&self, t: f64) -> (Vector3, Vector3) {
        match self {
            Model::Sinusoid(s) => s.raw_input(t),
            Model::Scene(s) => s.raw_input(t),
        }
    }
}

pub fn run_single(cfg: &RunConfig) -> Result<Vec<Record>, RunError> {
    run_single_detailed(cfg).map(|out| out.records)
}

pub fn run_single_detailed(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    run_single_with_observer_init(cfg, None)
}

/// Run with an explicit initial group estimate (identity when None, the
/// reference initialization). The naive observer starts at the matching
/// bearing estimate.
pub fn run_single_with_observer_init(
    cfg: &RunConfig,
    xhat0: Option<Rotation3>,
) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let h = cfg.dt;
    let n = ((cfg.duration / h).round() as usize).max(1);
    let noise = cfg.noise.to_spec(cfg.seed);
    let mut streams = NoiseStreams::new(cfg.seed);

    // Stream 0, in order: sinusoid spec if random, then bearing if random.
    let model = match &cfg.input {
        InputConfig::Sinusoid(s) => Model::Sinusoid(match &s.channels {
            Some(ch) => ch.to_core(),
            None => random_spec(&mut streams.initial_conditions),
        }),
        InputConfig::Scene(s) => {
            let spec = s.to_core()?;
            spec.validate(cfg.duration, 1000)?;
            Model::Scene(spec)
        }
    };
    let xi0 = match (&model, cfg.initial_bearing) {
        (Model::Scene(s), _) => s.bearing_at(0.0)?,
        (_, Some(b)) => {
            UnitVector3::normalize(Vector3::from_array(b)).expect("validated initial_bearing")
        }
        (_, None) => random_unit_vector(&mut streams.initial_conditions),
    };

    let mut truth = TruthState::from_initial_bearing(xi0);
    let k = cfg.gain;
    let mut group = GroupObserverState::from_estimate(xhat0.unwrap_or_else(Rotation3::identity), k);
    let mut naive = ManifoldObserverState::from_estimate(estimate(group.xhat), k);
    let step_eqv = cfg.observer.runs_equivariant();
    let step_naive = cfg.observer.runs_naive();
    let decim = cfg.measurement_decimation as usize;

    let mut records = Vec::with_capacity(n + 1);
    let mut stats = RunStats { steps: n, ..RunStats::default() };
    let mut y = truth.xi;
    let mut outlier = false;

    let push_record = |records: &mut Vec<Record>,
                       stats: &mut RunStats,
                       t: f64,
                       truth: &TruthState,
                       group: &GroupObserverState,
                       naive: &ManifoldObserverState,
                       y: UnitVector3,
                       outlier: bool|
     -> Result<(), RunError> {
        let d = diagnostics(truth.x, group.xhat, truth.xi, k);
        let rec = Record {
            t,
            xi: truth.xi.vector(),
            y: y.vector(),
            outlier,
            xihat_eqv: estimate(group.xhat).vector(),
            xihat_naive: naive.xihat.vector(),
            angle_err_eqv: d.angle_err,
            angle_err_naive: bearing_core::geom3::geodesic_angle(naive.xihat, truth.xi),
            v: d.lyapunov,
            vdot: d.lyapunov_rate,
        };
        let finite = rec.xi.is_finite()
            && rec.y.is_finite()
            && rec.xihat_eqv.is_finite()
            && rec.xihat_naive.is_finite()
            && rec.angle_err_eqv.is_finite()
            && rec.angle_err_naive.is_finite()
            && rec.v.is_finite()
            && rec.vdot.is_finite();
        if !finite {
            return Err(RunError::NonFinite { step: records.len(), t });
        }
        let defect = truth.x.ortho_defect().max(group.xhat.ortho_defect());
        stats.max_rotation_defect = stats.max_rotation_defect.max(defect);
        records.push(rec);
        Ok(())
    };

    for i in 0..n {
        if i % decim == 0 {
            let deflected = perturb_bearing(truth.xi, &noise, &mut streams.bearing);
            let (m, flag) = maybe_outlier(deflected, &noise, &mut streams.outlier);
            y = m;
            outlier = flag;
            if flag {
                stats.outlier_count += 1;
            }
        }
        push_record(&mut records, &mut stats, i as f64 * h, &truth, &group, &naive, y, outlier)?;

        let next = bearing_core::dynamics::step_truth(&truth, &model, h);
        let u_noisy = if cfg.input_noise_before_projection {
            let (omega, vprime) = model.raw_input(truth.t + 0.5 * h);
            let raw = perturb_input(InputPair::new(omega, vprime), &noise, &mut streams.input);
            InputPair::new(raw.omega, project_tangent(truth.xi, raw.vbar))
        } else {
            perturb_input(next.u_clean, &noise, &mut streams.input)
        };
        if !(u_noisy.is_finite() && next.xi.vector().is_finite()) {
            return Err(RunError::NonFinite { step: i, t: truth.t });
        }
        if step_eqv {
            group = step_group_observer(&group, y, u_noisy, h);
            if group.xhat.ortho_defect() > 1e-12 {
                group.xhat = group
                    .xhat
                    .renormalized()
                    .map_err(|_| RunError::NonFinite { step: i, t: truth.t })?;
                stats.repairs += 1;
            }
        }
        if step_naive {
            naive = step_naive_observer(&naive, y, u_noisy, h);
        }
        truth = next;
        if truth.x.ortho_defect() > 1e-12 {
            truth = TruthState {
                x: truth
                    .x
                    .renormalized()
                    .map_err(|_| RunError::NonFinite { step: i, t: truth.t })?,
                ..truth
            };
            stats.repairs += 1;
        }
    }
    push_record(&mut records, &mut stats, n as f64 * h, &truth, &group, &naive, y, outlier)?;

    Ok(RunOutput { records, stats })
}

/// Runs `cfg.runs` independent simulations on seeds seed, seed+1, ... and
/// aggregates their metrics. Sequential; the aggregate is order-independent
/// by construction.
pub fn run_batch(cfg: &RunConfig) -> Result<crate::metrics::BatchMetrics, RunError> {
    cfg.validate()?;
    let mut per_run = Vec::with_capacity(cfg.runs as usize);
    for i in 0..cfg.runs as u64 {
        let mut one = cfg.clone();
        one.seed = cfg.seed.wrapping_add(i);
        one.runs = 1;
        let out = run_single_detailed(&one)?;
        per_run.push(crate::metrics::RunMetrics::from_records(
            one.seed,
            &out.records,
            out.stats.outlier_count,
            cfg.duration,
        ));
    }
    Ok(crate::metrics::BatchMetrics::aggregate(per_run))
}
