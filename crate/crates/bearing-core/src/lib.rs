//! Bearing estimation on the unit sphere.
//!
//! This crate implements the state estimation problem of tracking a unit
//! bearing vector that evolves under an angular velocity `omega` and a
//! distance-scaled linear velocity `vbar`. The sphere is handled through its
//! rotation-group symmetry: the bearing kinematics are lifted to SO(3), an
//! observer is run on the group, and its state is projected back to the
//! sphere. A direct sphere-based observer is included as a baseline.
//!
//! Modules:
//!
//! - [`geom3`]: fixed-size 3D kernel (vectors, rotations, skew map,
//!   exponential map, geodesic angles).
//! - [`symmetry`]: the group action on bearings, the induced input action,
//!   and the lift of the bearing kinematics into the Lie algebra.
//! - [`dynamics`]: ground-truth propagation on the group, sinusoidal and
//!   scene-derived input signals.
//! - [`observer`]: the group observer with its correction term, the
//!   equivalent sphere form, the naive baseline, and Lyapunov diagnostics.
//! - [`noise`]: seeded input noise, bearing rotation noise, and outlier
//!   replacement with independent per-run sub-streams.
//!
//! The crate is `no_std` (tests build with std) and allocation-free.

#![cfg_attr(not(test), no_std)]

pub mod dynamics;
pub mod geom3;
pub mod noise;
pub mod observer;
pub mod symmetry;

pub use geom3::{AlgebraVector, Rotation3, UnitVector3, Vector3};
pub use symmetry::InputPair;
