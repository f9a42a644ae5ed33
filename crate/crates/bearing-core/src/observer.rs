//! Bearing observers and their error diagnostics.
//!
//! The primary observer lives on the rotation group: it integrates a copy of
//! the lifted system and steers it with an innovation term built from the
//! measured bearing, then reads its estimate back through the group action.
//! Because the correction enters through the group, the estimator inherits
//! the symmetry of the plant and its error dynamics are autonomous.
//!
//! Two sphere-based forms are provided for comparison: one algebraically
//! equivalent to the group observer (it transports with the measured bearing
//! in the velocity coupling term) and a naive variant that uses its own
//! estimate there instead. The naive form loses the autonomous error
//! property and degrades under measurement noise.

use crate::geom3::{
    exp_so3, geodesic_angle, project_tangent, AlgebraVector, Rotation3, UnitVector3, Vector3,
};
use crate::symmetry::{lift, phi, InputPair, Origin};

/// Group observer state: the rotation estimate and the innovation gain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupObserverState {
    pub xhat: Rotation3,
    pub k: f64,
}

impl GroupObserverState {
    /// Identity initial estimate, which places the bearing estimate at the
    /// origin direction.
    pub fn new(k: f64) -> Self {
        GroupObserverState { xhat: Rotation3::identity(), k }
    }

    pub fn from_estimate(xhat: Rotation3, k: f64) -> Self {
        GroupObserverState { xhat, k }
    }
}

/// Innovation in algebra coordinates:
/// Xhat vbar x Xhat y - Xhat vbar x origin + k (Xhat y x origin).
///
/// Vanishes when y sits at the estimate (the first two terms cancel and the
/// cross in the gain term degenerates), so a converged observer is driven by
/// the lifted replica alone.
pub fn correction_about(
    origin: Origin,
    xhat: Rotation3,
    y: UnitVector3,
    vbar: Vector3,
    k: f64,
) -> AlgebraVector {
    let ring = origin.direction().vector();
    let vbar_g = xhat.apply(vbar);
    let y_g = xhat.apply(y.vector());
    AlgebraVector(vbar_g.cross(y_g) - vbar_g.cross(ring) + y_g.cross(ring) * k)
}

pub fn correction(xhat: Rotation3, y: UnitVector3, vbar: Vector3, k: f64) -> AlgebraVector {
    correction_about(Origin::default(), xhat, y, vbar, k)
}

/// One observer step: Xhat+ = exp(h Delta) Xhat exp(h Lambda_hat), with the
/// replica velocity lifted at the current estimate and the innovation
/// applied on the left (in the symmetry group, not the body frame).
pub fn step_group_observer_about(
    origin: Origin,
    state: &GroupObserverState,
    y: UnitVector3,
    u: InputPair,
    h: f64,
) -> GroupObserverState {
    let lam = lift(phi(state.xhat, origin.direction()), u);
    let delta = correction_about(origin, state.xhat, y, u.vbar, state.k);
    let xhat = exp_so3(AlgebraVector(delta.vector() * h))
        * state.xhat
        * exp_so3(AlgebraVector(lam.vector() * h));
    GroupObserverState { xhat, k: state.k }
}

pub fn step_group_observer(
    state: &GroupObserverState,
    y: UnitVector3,
    u: InputPair,
    h: f64,
) -> GroupObserverState {
    step_group_observer_about(Origin::default(), state, y, u, h)
}

/// Bearing estimate carried by the group state: the action of Xhat on the
/// origin direction.
pub fn estimate_about(origin: Origin, xhat: Rotation3) -> UnitVector3 {
    phi(xhat, origin.direction())
}

pub fn estimate(xhat: Rotation3) -> UnitVector3 {
    estimate_about(Origin::default(), xhat)
}

/// Sphere observer state shared by the equivalent and naive forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManifoldObserverState {
    pub xihat: UnitVector3,
    pub k: f64,
}

impl ManifoldObserverState {
    /// Starts at the origin direction, matching the identity group estimate.
    pub fn new(k: f64) -> Self {
        ManifoldObserverState { xihat: UnitVector3::E3, k }
    }

    pub fn from_estimate(xihat: UnitVector3, k: f64) -> Self {
        ManifoldObserverState { xihat, k }
    }
}

fn step_sphere(
    state: &ManifoldObserverState,
    transport: Vector3,
    y: UnitVector3,
    h: f64,
) -> ManifoldObserverState {
    let xv = state.xihat.vector();
    let deriv = xv.cross(transport) + project_tangent(state.xihat, y.vector()) * state.k;
    let xihat = UnitVector3::normalize(xv + deriv * h)
        .expect("sphere observer step stays near the sphere for small h");
    ManifoldObserverState { xihat, k: state.k }
}

/// Sphere form of the group observer: transports with omega + vbar x y (the
/// measured bearing in the coupling term) and corrects along the tangent
/// projection of y. Equivalent to the group observer up to integration
/// error.
pub fn step_manifold_observer(
    state: &ManifoldObserverState,
    y: UnitVector3,
    u: InputPair,
    h: f64,
) -> ManifoldObserverState {
    step_sphere(state, u.omega + u.vbar.cross(y.vector()), y, h)
}

/// Naive sphere observer: transports with omega + vbar x xihat, i.e. couples
/// the velocity through its own estimate. Equals a plain replica of the
/// bearing kinematics plus the same innovation; its error dynamics depend on
/// the true state and it loses accuracy under measurement noise.
pub fn step_naive_observer(
    state: &ManifoldObserverState,
    y: UnitVector3,
    u: InputPair,
    h: f64,
) -> ManifoldObserverState {
    step_sphere(state, u.omega + u.vbar.cross(state.xihat.vector()), y, h)
}

/// Error diagnostics for the group observer against the true state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorDiagnostics {
    /// Group error E = X Xhat^T. Identity exactly when the estimate is exact.
    pub group_error: Rotation3,
    /// The error expressed on the sphere: the action of E on the origin.
    pub error_direction: UnitVector3,
    /// Height-style error measure 1 - origin . E origin, in [0, 2].
    pub lyapunov: f64,
    /// Analytic decay rate -k |E^T origin x origin|^2, nonpositive.
    pub lyapunov_rate: f64,
    /// Geodesic angle between the bearing estimate and the true bearing.
    pub angle_err: f64,
}

pub fn diagnostics_about(
    origin: Origin,
    x: Rotation3,
    xhat: Rotation3,
    xi: UnitVector3,
    k: f64,
) -> ErrorDiagnostics {
    let ring = origin.direction();
    let group_error = x * xhat.transpose();
    let error_direction = phi(group_error, ring);
    let e_ring = group_error.apply(ring.vector());
    let lyapunov = 1.0 - ring.vector().dot(e_ring);
    let sigma = group_error.transpose().apply(ring.vector()).cross(ring.vector());
    let lyapunov_rate = -k * sigma.norm_squared();
    let angle_err = geodesic_angle(estimate_about(origin, xhat), xi);
    ErrorDiagnostics { group_error, error_direction, lyapunov, lyapunov_rate, angle_err }
}

pub fn diagnostics(x: Rotation3, xhat: Rotation3, xi: UnitVector3, k: f64) -> ErrorDiagnostics {
    diagnostics_about(Origin::default(), x, xhat, xi, k)
}
