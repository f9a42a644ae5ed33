//! Ground-truth generation for the bearing system.
//!
//! The true bearing obeys `xi_dot = -S(omega) xi + vbar` with vbar tangent to
//! xi. Truth is propagated on the rotation group: the state X advances by the
//! exponential of the lifted velocity (exact on the group for inputs frozen
//! across one step) and the bearing is read back through the group action.
//! Input signals come either from per-axis sinusoids or from a kinematic
//! vehicle/target scene; both are sampled at the step midpoint.
//!
//! A plain Euler-plus-renormalize sphere integrator is also provided. It is
//! the scheme the sphere-based observers use and the cross-check for the
//! group integrator.

use core::f64::consts::PI;

use libm::{cos, sin};
use rand::Rng;

use crate::geom3::{
    exp_so3, project_tangent, rotation_between, AlgebraVector, Rotation3, UnitVector3, Vector3,
};
use crate::symmetry::{lift, phi, InputPair, Origin};

/// One sinusoidal channel: amplitude * sin(2 pi frequency t + phase).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency_hz: f64,
    pub phase: f64,
}

impl Sinusoid {
    pub const ZERO: Sinusoid = Sinusoid { amplitude: 0.0, frequency_hz: 0.0, phase: 0.0 };

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * sin(2.0 * PI * self.frequency_hz * t + self.phase)
    }
}

/// Per-axis sinusoidal input signals for the angular velocity and for the
/// raw (pre-projection) linear velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinusoidSpec {
    pub omega: [Sinusoid; 3],
    pub vprime: [Sinusoid; 3],
}

impl SinusoidSpec {
    pub const ZERO: SinusoidSpec =
        SinusoidSpec { omega: [Sinusoid::ZERO; 3], vprime: [Sinusoid::ZERO; 3] };
}

/// A deterministic input signal: angular velocity and raw linear velocity as
/// functions of time. The tangent projection of the linear part happens at
/// the sampling site, against the current bearing.
pub trait InputSource {
    fn raw_input(&self, t: f64) -> (Vector3, Vector3);
}

impl InputSource for SinusoidSpec {
    fn raw_input(&self, t: f64) -> (Vector3, Vector3) {
        let omega =
            Vector3::new(self.omega[0].value(t), self.omega[1].value(t), self.omega[2].value(t));
        let vprime =
            Vector3::new(self.vprime[0].value(t), self.vprime[1].value(t), self.vprime[2].value(t));
        (omega, vprime)
    }
}

fn rand_sinusoid<R: Rng + ?Sized>(rng: &mut R) -> Sinusoid {
    Sinusoid {
        amplitude: rng.random_range(0.0..10.0),
        frequency_hz: rng.random_range(0.0..10.0),
        phase: rng.random_range(-PI..PI),
    }
}

/// Draws a random input spec: amplitudes and frequencies uniform on [0, 10],
/// phases uniform on (-pi, pi). Draw order is the three omega channels, then
/// the three linear channels, each as (amplitude, frequency, phase).
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R) -> SinusoidSpec {
    let omega = [rand_sinusoid(rng), rand_sinusoid(rng), rand_sinusoid(rng)];
    let vprime = [rand_sinusoid(rng), rand_sinusoid(rng), rand_sinusoid(rng)];
    SinusoidSpec { omega, vprime }
}

/// Bearing velocity under input u: -S(omega) xi + vbar. Tangent to xi
/// whenever vbar is.
pub fn bearing_derivative(xi: UnitVector3, u: InputPair) -> Vector3 {
    u.vbar - u.omega.cross(xi.vector())
}

/// Samples an input source at time t, projecting the linear part onto the
/// tangent plane at xi.
pub fn sample_input<S: InputSource + ?Sized>(t: f64, spec: &S, xi: UnitVector3) -> InputPair {
    let (omega, vprime) = spec.raw_input(t);
    InputPair { omega, vbar: project_tangent(xi, vprime) }
}

/// One scalar trajectory channel for scene curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve {
    /// c[0] + c[1] t + c[2] t^2 + c[3] t^3
    Cubic { c: [f64; 4] },
    /// offset + amplitude sin(2 pi frequency t + phase)
    Wave { offset: f64, amplitude: f64, frequency_hz: f64, phase: f64 },
}

impl Curve {
    pub const ZERO: Curve = Curve::Cubic { c: [0.0; 4] };

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Curve::Cubic { c } => c[0] + t * (c[1] + t * (c[2] + t * c[3])),
            Curve::Wave { offset, amplitude, frequency_hz, phase } => {
                offset + amplitude * sin(2.0 * PI * frequency_hz * t + phase)
            }
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            Curve::Cubic { c } => c[1] + t * (2.0 * c[2] + t * 3.0 * c[3]),
            Curve::Wave { amplitude, frequency_hz, phase, .. } => {
                let w = 2.0 * PI * frequency_hz;
                amplitude * w * cos(w * t + phase)
            }
        }
    }
}

/// Scene-level error: the bearing is undefined when vehicle and target
/// coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SceneError {
    CoincidentPositions,
    /// min_distance must be positive and respected over the sampled horizon.
    MinDistanceViolated,
}

impl core::fmt::Display for SceneError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let msg = match self {
            SceneError::CoincidentPositions => "vehicle and target positions coincide",
            SceneError::MinDistanceViolated => {
                "vehicle-target separation drops below min_distance on the sampled horizon"
            }
        };
        f.write_str(msg)
    }
}

impl core::error::Error for SceneError {}

/// Kinematic vehicle/target scene: parametric position curves for both
/// bodies plus a single-axis vehicle attitude trajectory. Realizes the
/// bearing and scaled-velocity definitions directly, as an alternative input
/// source to the sinusoids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneSpec {
    pub vehicle_position: [Curve; 3],
    pub target_position: [Curve; 3],
    pub attitude_axis: UnitVector3,
    pub attitude_angle: Curve,
    /// Lower bound on vehicle-target separation the scene must keep.
    pub min_distance: f64,
}

fn eval3(c: &[Curve; 3], t: f64) -> Vector3 {
    Vector3::new(c[0].value(t), c[1].value(t), c[2].value(t))
}

fn rate3(c: &[Curve; 3], t: f64) -> Vector3 {
    Vector3::new(c[0].rate(t), c[1].rate(t), c[2].rate(t))
}

impl SceneSpec {
    pub fn vehicle_position_at(&self, t: f64) -> Vector3 {
        eval3(&self.vehicle_position, t)
    }

    pub fn target_position_at(&self, t: f64) -> Vector3 {
        eval3(&self.target_position, t)
    }

    pub fn attitude_at(&self, t: f64) -> Rotation3 {
        exp_so3(AlgebraVector(self.attitude_axis.vector() * self.attitude_angle.value(t)))
    }

    /// Body angular velocity of the single-axis attitude trajectory.
    pub fn body_rate_at(&self, t: f64) -> Vector3 {
        self.attitude_axis.vector() * self.attitude_angle.rate(t)
    }

    pub fn bearing_at(&self, t: f64) -> Result<UnitVector3, SceneError> {
        scene_to_bearing(
            self.vehicle_position_at(t),
            self.target_position_at(t),
            self.attitude_at(t),
        )
    }

    /// Checks min_distance > 0 and that the separation stays above it at
    /// `samples + 1` uniform times on [0, duration].
    pub fn validate(&self, duration: f64, samples: usize) -> Result<(), SceneError> {
        if !(self.min_distance > 0.0) {
            return Err(SceneError::MinDistanceViolated);
        }
        let n = samples.max(1);
        for i in 0..=n {
            let t = duration * (i as f64) / (n as f64);
            let sep = (self.target_position_at(t) - self.vehicle_position_at(t)).norm();
            if !(sep >= self.min_distance) {
                return Err(SceneError::MinDistanceViolated);
            }
        }
        Ok(())
    }
}

impl InputSource for SceneSpec {
    fn raw_input(&self, t: f64) -> (Vector3, Vector3) {
        let p = self.target_position_at(t) - self.vehicle_position_at(t);
        let pdot = rate3(&self.target_position, t) - rate3(&self.vehicle_position, t);
        let omega = self.body_rate_at(t);
        // 1/|p| R^T pdot; a validated scene keeps |p| bounded away from 0.
        let vprime = self.attitude_at(t).transpose().apply(pdot) * (1.0 / p.norm());
        (omega, vprime)
    }
}

/// Body-frame bearing of the target from the vehicle: R^T (p_T - p_B) / |.|.
pub fn scene_to_bearing(
    p_b: Vector3,
    p_t: Vector3,
    r: Rotation3,
) -> Result<UnitVector3, SceneError> {
    let p = p_t - p_b;
    if p.norm() < 1e-12 {
        return Err(SceneError::CoincidentPositions);
    }
    UnitVector3::normalize(r.transpose().apply(p)).map_err(|_| SceneError::CoincidentPositions)
}

/// Distance-scaled tangential relative velocity in the body frame:
/// (1/|p|) (I - b b^T) R^T pdot, tangent to the bearing b by construction.
pub fn scene_to_vbar(
    p_b: Vector3,
    p_t: Vector3,
    pdot_b: Vector3,
    pdot_t: Vector3,
    r: Rotation3,
) -> Result<Vector3, SceneError> {
    let p = p_t - p_b;
    let dist = p.norm();
    if dist < 1e-12 {
        return Err(SceneError::CoincidentPositions);
    }
    let b = scene_to_bearing(p_b, p_t, r)?;
    Ok(project_tangent(b, r.transpose().apply(pdot_t - pdot_b) * (1.0 / dist)))
}

/// Ground-truth state: time, bearing, the group state that carries it, and
/// the most recent clean (pre-noise) input sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthState {
    pub t: f64,
    pub xi: UnitVector3,
    pub x: Rotation3,
    pub u_clean: InputPair,
}

impl TruthState {
    /// Starts a trajectory at the given bearing with X(0) chosen so that the
    /// group action reproduces it: phi(X(0), origin) = xi0.
    pub fn from_initial_bearing_about(origin: Origin, xi0: UnitVector3) -> Self {
        let x = rotation_between(origin.direction(), xi0).transpose();
        // Store the projected bearing so xi and X are exactly consistent.
        TruthState { t: 0.0, xi: phi(x, origin.direction()), x, u_clean: InputPair::ZERO }
    }

    pub fn from_initial_bearing(xi0: UnitVector3) -> Self {
        Self::from_initial_bearing_about(Origin::default(), xi0)
    }
}

/// Advances the truth one step with an explicitly supplied input:
/// X+ = X exp(h S(lift)), bearing read back through the action.
pub fn step_truth_with_input_about(
    origin: Origin,
    state: &TruthState,
    u: InputPair,
    h: f64,
) -> TruthState {
    let lam = lift(phi(state.x, origin.direction()), u);
    let x_next = state.x * exp_so3(AlgebraVector(lam.vector() * h));
    TruthState { t: state.t + h, xi: phi(x_next, origin.direction()), x: x_next, u_clean: u }
}

pub fn step_truth_with_input(state: &TruthState, u: InputPair, h: f64) -> TruthState {
    step_truth_with_input_about(Origin::default(), state, u, h)
}

/// Advances the truth one step, sampling the input source at the step
/// midpoint t + h/2 (projected against the pre-step bearing).
pub fn step_truth_about<S: InputSource + ?Sized>(
    origin: Origin,
    state: &TruthState,
    spec: &S,
    h: f64,
) -> TruthState {
    let u = sample_input(state.t + 0.5 * h, spec, state.xi);
    step_truth_with_input_about(origin, state, u, h)
}

pub fn step_truth<S: InputSource + ?Sized>(state: &TruthState, spec: &S, h: f64) -> TruthState {
    step_truth_about(Origin::default(), state, spec, h)
}

/// Direct sphere integrator: one Euler step of the bearing velocity followed
/// by renormalization.
pub fn step_bearing_euler(xi: UnitVector3, u: InputPair, h: f64) -> UnitVector3 {
    UnitVector3::normalize(xi.vector() + bearing_derivative(xi, u) * h)
        .expect("Euler step stays near the sphere for small h")
}
