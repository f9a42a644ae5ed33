//! Rotation-group symmetry of the bearing kinematics.
//!
//! A rotation X acts on a bearing xi from the right as `phi(X, xi) = X^T xi`
//! and on the input u = (omega, vbar) as `psi(X, u) = (X^T omega, X^T vbar)`.
//! The action is transitive, so the whole sphere is reachable from a fixed
//! reference direction (the origin, e3 by default), and the bearing
//! kinematics lift to a velocity on the group itself,
//! `lift(xi, u) = omega + vbar x xi`,
//! read as coordinates of a skew matrix. Flowing the group state along the
//! lift and projecting through `phi` reproduces the sphere flow; that is
//! what makes a group-side observer possible. `check_equivariance` and
//! `check_lift_conditions` evaluate both sides of the defining identities
//! numerically and return residuals so tests can pin tolerances.

use crate::geom3::{
    geodesic_angle, mat_frobenius, mat_mul, mat_sub, mat_transpose, project_tangent, skew,
    AlgebraVector, Rotation3, UnitVector3, Vector3,
};

/// System input: angular velocity (rad/s) and distance-scaled linear
/// velocity (1/s).
///
/// `vbar` is nominally tangent to the current bearing, but measured inputs
/// carry full 3D noise and may leave the tangent plane; every consumer of an
/// `InputPair` stays well defined in that case (the lift's cross product
/// simply discards the radial part).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputPair {
    pub omega: Vector3,
    pub vbar: Vector3,
}

impl InputPair {
    pub const ZERO: InputPair = InputPair { omega: Vector3::ZERO, vbar: Vector3::ZERO };

    pub const fn new(omega: Vector3, vbar: Vector3) -> Self {
        InputPair { omega, vbar }
    }

    pub fn is_finite(&self) -> bool {
        self.omega.is_finite() && self.vbar.is_finite()
    }
}

/// The reference direction the group state is anchored to. Fixed for the
/// lifetime of a run; any unit vector works, e3 is the default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Origin {
    xi_ring: UnitVector3,
}

impl Origin {
    pub const fn new(xi_ring: UnitVector3) -> Self {
        Origin { xi_ring }
    }

    pub const fn direction(self) -> UnitVector3 {
        self.xi_ring
    }
}

impl Default for Origin {
    fn default() -> Self {
        Origin { xi_ring: UnitVector3::E3 }
    }
}

/// Right action of a rotation on a bearing: X^T xi, renormalized.
pub fn phi(x: Rotation3, xi: UnitVector3) -> UnitVector3 {
    x.transpose().apply_unit(xi)
}

/// Induced action on inputs: (X^T omega, X^T vbar).
pub fn psi(x: Rotation3, u: InputPair) -> InputPair {
    let xt = x.transpose();
    InputPair { omega: xt.apply(u.omega), vbar: xt.apply(u.vbar) }
}

/// Lift of the bearing kinematics into the Lie algebra, as the vector
/// omega + vbar x xi.
///
/// Adding any multiple of xi to vbar leaves the result unchanged, so a
/// non-tangent vbar is handled by construction.
pub fn lift(xi: UnitVector3, u: InputPair) -> AlgebraVector {
    AlgebraVector(u.omega + u.vbar.cross(xi.vector()))
}

/// Bearing velocity under the raw kinematics: -S(omega) xi + vbar. Local
/// copy of the closed form so the residual checks in this module evaluate
/// both sides independently.
fn kinematics(xi: UnitVector3, u: InputPair) -> Vector3 {
    u.vbar - u.omega.cross(xi.vector())
}

/// Residual of the equivariance identity: transforming the velocity must
/// match the velocity of the transformed state and input,
/// ||X^T f(xi, u) - f(phi(X, xi), psi(X, u))||.
///
/// Meaningful when vbar is tangent to xi; with the designed action the
/// residual is at rounding level.
pub fn check_equivariance(x: Rotation3, xi: UnitVector3, u: InputPair) -> f64 {
    let lhs = x.transpose().apply(kinematics(xi, u));
    let rhs = kinematics(phi(x, xi), psi(x, u));
    (lhs - rhs).norm()
}

/// Residuals of the two lift conditions.
///
/// First: the lifted velocity must project back onto the bearing velocity,
/// ||-S(lift(xi, u)) xi - f(xi, u)||. Second: the lift must intertwine the
/// group actions, ||X^T S(lift(xi, u)) X - S(lift(phi(X, xi), psi(X, u)))||
/// in the Frobenius norm.
pub fn check_lift_conditions(x: Rotation3, xi: UnitVector3, u: InputPair) -> (f64, f64) {
    let lam = lift(xi, u).vector();
    let projected = -lam.cross(xi.vector());
    let r1 = (projected - kinematics(xi, u)).norm();

    let xm = x.matrix();
    let conjugated = mat_mul(&mat_transpose(&xm), &mat_mul(&skew(lam), &xm));
    let lifted_there = skew(lift(phi(x, xi), psi(x, u)).vector());
    let r2 = mat_frobenius(&mat_sub(&conjugated, &lifted_there));
    (r1, r2)
}

/// Whether E fixes the given origin direction under the action, within an
/// angular tolerance. The set of such rotations (spins about the origin) is
/// exactly where the group observer's error is allowed to settle.
pub fn is_in_stabilizer_about(origin: Origin, e: Rotation3, tol: f64) -> bool {
    geodesic_angle(phi(e, origin.direction()), origin.direction()) <= tol
}

/// `is_in_stabilizer_about` at the default origin e3.
pub fn is_in_stabilizer(e: Rotation3, tol: f64) -> bool {
    is_in_stabilizer_about(Origin::default(), e, tol)
}

/// Angular velocity equivalent of a tangent linear velocity: vbar x xi.
/// Satisfies -(vbar x xi) x xi = vbar for tangent vbar, which is why the
/// lift can absorb the linear velocity into a single rotation rate.
pub fn induced_angular_velocity(xi: UnitVector3, vbar: Vector3) -> Vector3 {
    vbar.cross(xi.vector())
}

/// Tangent-projects vbar so callers can build exactly tangent test inputs.
pub fn tangent_input(xi: UnitVector3, omega: Vector3, vbar_raw: Vector3) -> InputPair {
    InputPair { omega, vbar: project_tangent(xi, vbar_raw) }
}
