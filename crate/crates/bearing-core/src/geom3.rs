//! Fixed-size 3D geometry kernel.
//!
//! Plain-array matrices and small value types, with the handful of
//! operations the rest of the crate needs: the skew map, tangent projection,
//! the SO(3) exponential, a rotation-between construction, geodesic angles,
//! and polar renormalization for drift repair. Everything is a pure function
//! over `Copy` values.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use libm::{acos, fabs, sqrt};

/// Accepted deviation of |norm - 1| when adopting an allegedly unit vector.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Accepted Frobenius orthogonality defect ||R^T R - I||_F of a rotation.
pub const ROTATION_ORTHO_TOL: f64 = 1e-9;

// Below this rotation angle the Rodrigues coefficients use series forms.
const SMALL_ANGLE: f64 = 1e-8;

/// Error cases for constructing or repairing geometric values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomError {
    /// A component was NaN or infinite.
    NonFinite,
    /// A direction was requested from a (near-)zero vector.
    ZeroVector,
    /// The vector norm is farther than `UNIT_NORM_TOL` from 1.
    NotUnit,
    /// The matrix orthogonality defect exceeds `ROTATION_ORTHO_TOL`.
    NotRotation,
    /// Orthonormalization produced a reflection (determinant <= 0).
    NegativeDeterminant,
    /// The matrix is too far from invertible to project onto SO(3).
    Singular,
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            GeomError::NonFinite => "non-finite component",
            GeomError::ZeroVector => "zero vector has no direction",
            GeomError::NotUnit => "vector norm is not within tolerance of 1",
            GeomError::NotRotation => "matrix is not orthonormal within tolerance",
            GeomError::NegativeDeterminant => "matrix has non-positive determinant",
            GeomError::Singular => "matrix is numerically singular",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for GeomError {}

/// A real 3-vector. Units depend on context (rad/s for angular velocities,
/// 1/s for scaled linear velocities, dimensionless on the sphere).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vector3 {
    pub const ZERO: Vector3 = Vector3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vector3 { x, y, z }
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Vector3 { x: a[0], y: a[1], z: a[2] }
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vector3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vector3) -> Vector3 {
        Vector3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        sqrt(self.norm_squared())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vector3 {
    type Output = Vector3;
    fn add(self, o: Vector3) -> Vector3 {
        Vector3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vector3 {
    type Output = Vector3;
    fn sub(self, o: Vector3) -> Vector3 {
        Vector3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vector3 {
    type Output = Vector3;
    fn neg(self) -> Vector3 {
        Vector3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vector3 {
    type Output = Vector3;
    fn mul(self, s: f64) -> Vector3 {
        Vector3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// A point on the unit sphere. Constructors normalize or reject, so the
/// stored vector is always unit to machine precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVector3 {
    v: Vector3,
}

impl UnitVector3 {
    pub const E1: UnitVector3 = UnitVector3 { v: Vector3 { x: 1.0, y: 0.0, z: 0.0 } };
    pub const E2: UnitVector3 = UnitVector3 { v: Vector3 { x: 0.0, y: 1.0, z: 0.0 } };
    pub const E3: UnitVector3 = UnitVector3 { v: Vector3 { x: 0.0, y: 0.0, z: 1.0 } };

    /// Adopts a vector that is already unit length within `UNIT_NORM_TOL`,
    /// renormalizing the residual.
    pub fn from_unit(v: Vector3) -> Result<Self, GeomError> {
        if !v.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let n = v.norm();
        if fabs(n - 1.0) > UNIT_NORM_TOL {
            return Err(GeomError::NotUnit);
        }
        Ok(UnitVector3 { v: v * (1.0 / n) })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn normalize(v: Vector3) -> Result<Self, GeomError> {
        if !v.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let n = v.norm();
        if n < 1e-150 {
            return Err(GeomError::ZeroVector);
        }
        Ok(UnitVector3 { v: v * (1.0 / n) })
    }

    pub const fn vector(self) -> Vector3 {
        self.v
    }

    pub fn dot(self, o: UnitVector3) -> f64 {
        self.v.dot(o.v)
    }
}

/// Row-major 3x3 matrix.
pub type Matrix3 = [[f64; 3]; 3];

pub fn mat_identity() -> Matrix3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn mat_mul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat_transpose(a: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat_vec(a: &Matrix3, v: Vector3) -> Vector3 {
    Vector3 {
        x: a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
        y: a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
        z: a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z,
    }
}

pub fn mat_add(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

pub fn mat_sub(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

pub fn mat_scale(s: f64, a: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = s * a[i][j];
        }
    }
    out
}

pub fn mat_frobenius(a: &Matrix3) -> f64 {
    let mut acc = 0.0;
    for row in a {
        for e in row {
            acc += e * e;
        }
    }
    sqrt(acc)
}

pub fn mat_det(a: &Matrix3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn mat_inverse(a: &Matrix3) -> Option<Matrix3> {
    let det = mat_det(a);
    if !det.is_finite() || fabs(det) < 1e-12 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut adj = [[0.0; 3]; 3];
    // Adjugate transpose: cofactor of (i, j) lands at (j, i).
    adj[0][0] = a[1][1] * a[2][2] - a[1][2] * a[2][1];
    adj[0][1] = a[0][2] * a[2][1] - a[0][1] * a[2][2];
    adj[0][2] = a[0][1] * a[1][2] - a[0][2] * a[1][1];
    adj[1][0] = a[1][2] * a[2][0] - a[1][0] * a[2][2];
    adj[1][1] = a[0][0] * a[2][2] - a[0][2] * a[2][0];
    adj[1][2] = a[0][2] * a[1][0] - a[0][0] * a[1][2];
    adj[2][0] = a[1][0] * a[2][1] - a[1][1] * a[2][0];
    adj[2][1] = a[0][1] * a[2][0] - a[0][0] * a[2][1];
    adj[2][2] = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    Some(mat_scale(inv_det, &adj))
}

/// Frobenius norm of A^T A - I, the orthogonality defect used everywhere a
/// rotation invariant is checked.
pub fn gram_defect(a: &Matrix3) -> f64 {
    let g = mat_mul(&mat_transpose(a), a);
    mat_frobenius(&mat_sub(&g, &mat_identity()))
}

/// A rotation matrix. The invariants (orthogonality within
/// `ROTATION_ORTHO_TOL`, positive determinant) hold for every value that can
/// be observed outside this module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation3 {
    m: Matrix3,
}

impl Rotation3 {
    pub fn identity() -> Self {
        Rotation3 { m: mat_identity() }
    }

    /// Adopts a matrix, verifying the rotation invariants.
    pub fn from_matrix(m: Matrix3) -> Result<Self, GeomError> {
        for row in &m {
            for e in row {
                if !e.is_finite() {
                    return Err(GeomError::NonFinite);
                }
            }
        }
        if gram_defect(&m) > ROTATION_ORTHO_TOL {
            return Err(GeomError::NotRotation);
        }
        if mat_det(&m) <= 0.0 {
            return Err(GeomError::NegativeDeterminant);
        }
        Ok(Rotation3 { m })
    }

    // For construction sites that guarantee the invariants analytically.
    pub(crate) fn from_matrix_unchecked(m: Matrix3) -> Self {
        Rotation3 { m }
    }

    pub fn matrix(&self) -> Matrix3 {
        self.m
    }

    /// The inverse rotation (transpose).
    pub fn transpose(&self) -> Self {
        Rotation3 { m: mat_transpose(&self.m) }
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    pub fn apply(&self, v: Vector3) -> Vector3 {
        mat_vec(&self.m, v)
    }

    /// Rotates a unit vector, renormalizing the rounding residual.
    pub fn apply_unit(&self, u: UnitVector3) -> UnitVector3 {
        UnitVector3::normalize(self.apply(u.vector()))
            .expect("rotating a unit vector keeps it unit")
    }

    pub fn det(&self) -> f64 {
        mat_det(&self.m)
    }

    /// Orthogonality defect ||R^T R - I||_F of the stored matrix.
    pub fn ortho_defect(&self) -> f64 {
        gram_defect(&self.m)
    }

    /// Rotation angle in [0, pi] recovered from the trace.
    pub fn rotation_angle(&self) -> f64 {
        let tr = self.m[0][0] + self.m[1][1] + self.m[2][2];
        acos(clamp_unit_interval((tr - 1.0) * 0.5))
    }

    /// Projects back onto SO(3); used to repair accumulated drift.
    pub fn renormalized(&self) -> Result<Self, GeomError> {
        orthonormalize(self.m)
    }
}

impl Mul for Rotation3 {
    type Output = Rotation3;
    // The product of two rotations drifts from orthogonality only at the
    // rounding level, far inside ROTATION_ORTHO_TOL.
    fn mul(self, o: Rotation3) -> Rotation3 {
        Rotation3 { m: mat_mul(&self.m, &o.m) }
    }
}

/// Coordinates of a skew-symmetric matrix, i.e. an element of the rotation
/// group's Lie algebra written as the vector w with S(w) b = w x b.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraVector(pub Vector3);

impl AlgebraVector {
    pub const fn vector(self) -> Vector3 {
        self.0
    }
}

impl From<Vector3> for AlgebraVector {
    fn from(v: Vector3) -> Self {
        AlgebraVector(v)
    }
}

fn clamp_unit_interval(x: f64) -> f64 {
    // Guards acos against arguments like 1 + 1e-16 produced by rounding.
    if x > 1.0 {
        1.0
    } else if x < -1.0 {
        -1.0
    } else {
        x
    }
}

/// The skew map: skew(a) * b = a x b.
pub fn skew(a: Vector3) -> Matrix3 {
    [[0.0, -a.z, a.y], [a.z, 0.0, -a.x], [-a.y, a.x, 0.0]]
}

/// Orthogonal projection of x onto the tangent plane at y: (I - y y^T) x.
pub fn project_tangent(y: UnitVector3, x: Vector3) -> Vector3 {
    let yv = y.vector();
    x - yv * yv.dot(x)
}

/// Rodrigues formula for exp(S(w)).
///
/// The coefficients sin(t)/t and (1 - cos(t))/t^2 switch to their series
/// forms below t = 1e-8, which removes the removable singularity at w = 0.
/// The output satisfies the rotation invariants by construction.
pub fn exp_so3(w: AlgebraVector) -> Rotation3 {
    let v = w.vector();
    let theta2 = v.norm_squared();
    let theta = sqrt(theta2);
    let (a, b) = if theta < SMALL_ANGLE {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        (libm::sin(theta) / theta, (1.0 - libm::cos(theta)) / theta2)
    };
    let k = skew(v);
    let k2 = mat_mul(&k, &k);
    let m = mat_add(&mat_identity(), &mat_add(&mat_scale(a, &k), &mat_scale(b, &k2)));
    Rotation3::from_matrix_unchecked(m)
}

/// The rotation carrying a onto b: result * a = b, axis along a x b, angle
/// arccos(a . b).
///
/// For antipodal inputs (a . b < -1 + 1e-12) there is no preferred axis; a
/// deterministic one is chosen by crossing a with the canonical basis vector
/// least aligned with a (smallest index on ties) and the result is the half
/// turn about that axis.
pub fn rotation_between(a: UnitVector3, b: UnitVector3) -> Rotation3 {
    let av = a.vector();
    let bv = b.vector();
    let c = av.dot(bv);
    if c < -1.0 + 1e-12 {
        let mags = [fabs(av.x), fabs(av.y), fabs(av.z)];
        let mut idx = 0;
        if mags[1] < mags[idx] {
            idx = 1;
        }
        if mags[2] < mags[idx] {
            idx = 2;
        }
        let basis =
            [Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 1.0, 0.0), Vector3::new(0.0, 0.0, 1.0)];
        let n = UnitVector3::normalize(av.cross(basis[idx]))
            .expect("basis vector least aligned with a is not parallel to a")
            .vector();
        // Half turn about n: 2 n n^T - I.
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let ni = [n.x, n.y, n.z][i];
                let nj = [n.x, n.y, n.z][j];
                m[i][j] = 2.0 * ni * nj - if i == j { 1.0 } else { 0.0 };
            }
        }
        return Rotation3::from_matrix_unchecked(m);
    }
    // R = I + S(u) + S(u)^2 / (1 + c) with u = a x b; the division is safe
    // because the antipodal branch has been taken already.
    let u = av.cross(bv);
    let k = skew(u);
    let k2 = mat_mul(&k, &k);
    let m = mat_add(&mat_identity(), &mat_add(&k, &mat_scale(1.0 / (1.0 + c), &k2)));
    Rotation3::from_matrix_unchecked(m)
}

/// Great-circle angle between two directions, arccos of the clamped dot
/// product, in [0, pi].
pub fn geodesic_angle(a: UnitVector3, b: UnitVector3) -> f64 {
    acos(clamp_unit_interval(a.dot(b)))
}

/// Nearest rotation to a matrix (polar projection) via Higham's Newton
/// iteration Y <- (Y + Y^-T) / 2.
///
/// Intended for drift repair: the input must already be close to SO(3)
/// (Frobenius distance well under 0.5). Rejects matrices that project onto a
/// reflection.
pub fn orthonormalize(m: Matrix3) -> Result<Rotation3, GeomError> {
    for row in &m {
        for e in row {
            if !e.is_finite() {
                return Err(GeomError::NonFinite);
            }
        }
    }
    if fabs(mat_det(&m)) < 0.1 {
        return Err(GeomError::Singular);
    }
    let mut y = m;
    for _ in 0..30 {
        let inv = mat_inverse(&y).ok_or(GeomError::Singular)?;
        y = mat_scale(0.5, &mat_add(&y, &mat_transpose(&inv)));
        if gram_defect(&y) < 1e-15 {
            break;
        }
    }
    if gram_defect(&y) > 1e-12 {
        return Err(GeomError::NotRotation);
    }
    if mat_det(&y) <= 0.0 {
        return Err(GeomError::NegativeDeterminant);
    }
    Ok(Rotation3::from_matrix_unchecked(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn rand_vector(r: &mut ChaCha12Rng, scale: f64) -> Vector3 {
        Vector3::new(
            r.random_range(-scale..scale),
            r.random_range(-scale..scale),
            r.random_range(-scale..scale),
        )
    }

    fn rand_unit(r: &mut ChaCha12Rng) -> UnitVector3 {
        loop {
            let v = rand_vector(r, 1.0);
            if v.norm() > 0.1 {
                return UnitVector3::normalize(v).unwrap();
            }
        }
    }

    fn rand_rotation(r: &mut ChaCha12Rng) -> Rotation3 {
        exp_so3(AlgebraVector(rand_vector(r, 3.0)))
    }

    fn mat_close(a: &Matrix3, b: &Matrix3, tol: f64) -> bool {
        mat_frobenius(&mat_sub(a, b)) <= tol
    }

    #[test]
    fn skew_matches_cross_product() {
        let e1 = Vector3::new(1.0, 0.0, 0.0);
        let e2 = Vector3::new(0.0, 1.0, 0.0);
        let got = mat_vec(&skew(e1), e2);
        assert_eq!(got, Vector3::new(0.0, 0.0, 1.0));

        let mut r = rng(1);
        for _ in 0..100 {
            let a = rand_vector(&mut r, 5.0);
            let b = rand_vector(&mut r, 5.0);
            let lhs = mat_vec(&skew(a), b);
            let rhs = a.cross(b);
            assert!((lhs - rhs).norm() <= 1e-12);
            // Cross-product antisymmetry: S(a) b = -S(b) a.
            assert!((lhs + mat_vec(&skew(b), a)).norm() <= 1e-12);
        }
    }

    #[test]
    fn skew_layout_and_zero() {
        let m = skew(Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(m, [[0.0, -3.0, 2.0], [3.0, 0.0, -1.0], [-2.0, 1.0, 0.0]]);
        assert_eq!(skew(Vector3::ZERO), [[0.0; 3]; 3]);
        // Antisymmetry of the matrix itself.
        let t = mat_transpose(&m);
        assert!(mat_close(&mat_add(&m, &t), &[[0.0; 3]; 3], 0.0));
    }

    #[test]
    fn project_tangent_examples() {
        let p = project_tangent(UnitVector3::E3, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(p, Vector3::new(1.0, 2.0, 0.0));

        let mut r = rng(2);
        for _ in 0..100 {
            let y = rand_unit(&mut r);
            let x = rand_vector(&mut r, 4.0);
            let p = project_tangent(y, x);
            // In the tangent plane, idempotent, and kills y itself.
            assert!(fabs(y.vector().dot(p)) <= 1e-12);
            assert!((project_tangent(y, p) - p).norm() <= 1e-12);
            assert!(project_tangent(y, y.vector()).norm() <= 1e-12);
            // (I - y y^T) x = -S(y)^2 x.
            let k = skew(y.vector());
            let k2 = mat_mul(&k, &k);
            let via_skew = -mat_vec(&k2, x);
            assert!((p - via_skew).norm() <= 1e-12);
        }
    }

    #[test]
    fn exp_so3_identity_and_quarter_turn() {
        assert!(mat_close(&exp_so3(AlgebraVector(Vector3::ZERO)).matrix(), &mat_identity(), 0.0));

        let quarter = exp_so3(AlgebraVector(Vector3::new(0.0, 0.0, core::f64::consts::FRAC_PI_2)));
        let got = quarter.apply(Vector3::new(1.0, 0.0, 0.0));
        assert!((got - Vector3::new(0.0, 1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn exp_so3_inverse_and_invariants() {
        let mut r = rng(3);
        for _ in 0..200 {
            let w = rand_vector(&mut r, 6.0);
            let rot = exp_so3(AlgebraVector(w));
            let back = exp_so3(AlgebraVector(-w));
            assert!(mat_close(&(rot * back).matrix(), &mat_identity(), 1e-12));
            // Output satisfies the rotation invariants with no repair.
            assert!(rot.ortho_defect() <= 1e-14);
            assert!(rot.det() > 0.0);
        }
    }

    #[test]
    fn exp_so3_small_angle_series() {
        // Angles straddling the series guard agree with the closed form's
        // limit behavior: exp(S(w)) v ~ v + w x v for tiny w.
        for &scale in &[1e-7, 1e-9, 1e-12, 0.0] {
            let w = Vector3::new(0.6, -0.3, 0.2) * scale;
            let rot = exp_so3(AlgebraVector(w));
            assert!(rot.ortho_defect() <= 1e-15);
            let v = Vector3::new(0.2, 0.4, -0.9);
            let lin = v + w.cross(v);
            assert!((rot.apply(v) - lin).norm() <= 1e-15 + scale * scale);
        }
    }

    #[test]
    fn rotation_between_basis_vectors() {
        let r = rotation_between(UnitVector3::E1, UnitVector3::E2);
        // Quarter turn about e3.
        let expected = exp_so3(AlgebraVector(Vector3::new(0.0, 0.0, core::f64::consts::FRAC_PI_2)));
        assert!(mat_close(&r.matrix(), &expected.matrix(), 1e-12));
    }

    #[test]
    fn rotation_between_same_and_random() {
        let mut r = rng(4);
        for _ in 0..300 {
            let a = rand_unit(&mut r);
            let b = rand_unit(&mut r);
            let rot = rotation_between(a, b);
            assert!((rot.apply(a.vector()) - b.vector()).norm() <= 1e-10);
            assert!(rot.ortho_defect() <= 1e-13);
            // Angle agrees with the geodesic angle.
            assert!(fabs(rot.rotation_angle() - geodesic_angle(a, b)) <= 1e-7);
        }
        let a = rand_unit(&mut r);
        assert!(mat_close(&rotation_between(a, a).matrix(), &mat_identity(), 1e-12));
    }

    #[test]
    fn rotation_between_antipodal() {
        let minus_e3 = UnitVector3::normalize(Vector3::new(0.0, 0.0, -1.0)).unwrap();
        let r = rotation_between(UnitVector3::E3, minus_e3);
        assert!(
            (r.apply(Vector3::new(0.0, 0.0, 1.0)) - Vector3::new(0.0, 0.0, -1.0)).norm() <= 1e-12
        );
        assert!(r.ortho_defect() <= 1e-15);
        assert!(r.det() > 0.0);

        let mut rr = rng(5);
        for _ in 0..100 {
            let a = rand_unit(&mut rr);
            let b = UnitVector3::normalize(-a.vector()).unwrap();
            let rot = rotation_between(a, b);
            assert!((rot.apply(a.vector()) - b.vector()).norm() <= 1e-10);
            assert!(fabs(rot.rotation_angle() - core::f64::consts::PI) <= 1e-6);
        }
    }

    #[test]
    fn geodesic_angle_examples() {
        assert_eq!(geodesic_angle(UnitVector3::E1, UnitVector3::E1), 0.0);
        assert!(
            fabs(geodesic_angle(UnitVector3::E1, UnitVector3::E2) - core::f64::consts::FRAC_PI_2)
                <= 1e-15
        );
        let minus_e1 = UnitVector3::normalize(Vector3::new(-1.0, 0.0, 0.0)).unwrap();
        assert!(fabs(geodesic_angle(UnitVector3::E1, minus_e1) - core::f64::consts::PI) <= 1e-15);
    }

    #[test]
    fn geodesic_angle_symmetry_and_triangle() {
        let mut r = rng(6);
        for _ in 0..300 {
            let a = rand_unit(&mut r);
            let b = rand_unit(&mut r);
            let c = rand_unit(&mut r);
            assert_eq!(geodesic_angle(a, b), geodesic_angle(b, a));
            assert!(geodesic_angle(a, c) <= geodesic_angle(a, b) + geodesic_angle(b, c) + 1e-10);
        }
    }

    #[test]
    fn orthonormalize_identity_and_scaled() {
        let id = orthonormalize(mat_identity()).unwrap();
        assert!(mat_close(&id.matrix(), &mat_identity(), 1e-15));

        // Polar projection of c * R is exactly R.
        let mut r = rng(7);
        for _ in 0..50 {
            let rot = rand_rotation(&mut r);
            let got = orthonormalize(mat_scale(1.001, &rot.matrix())).unwrap();
            assert!(mat_close(&got.matrix(), &rot.matrix(), 1e-12));
        }
    }

    #[test]
    fn orthonormalize_perturbed() {
        let mut r = rng(8);
        for _ in 0..50 {
            let rot = rand_rotation(&mut r);
            let mut m = rot.matrix();
            for row in &mut m {
                for e in row.iter_mut() {
                    *e += 1e-6 * r.random_range(-1.0..1.0);
                }
            }
            let fixed = orthonormalize(m).unwrap();
            assert!(fixed.ortho_defect() <= 1e-14);
            // Still close to the original rotation.
            assert!(mat_close(&fixed.matrix(), &rot.matrix(), 1e-5));
        }
    }

    #[test]
    fn orthonormalize_rejects_reflections() {
        let reflection = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert_eq!(orthonormalize(reflection), Err(GeomError::NegativeDeterminant));
    }

    #[test]
    fn rotation_compatibility_with_skew() {
        // skew(R u) = R skew(u) R^T.
        let mut r = rng(9);
        for _ in 0..1000 {
            let rot = rand_rotation(&mut r);
            let u = rand_vector(&mut r, 5.0);
            let lhs = skew(rot.apply(u));
            let rm = rot.matrix();
            let rhs = mat_mul(&rm, &mat_mul(&skew(u), &mat_transpose(&rm)));
            assert!(mat_close(&lhs, &rhs, 1e-12));
        }
    }

    #[test]
    fn unit_vector_constructors() {
        assert_eq!(UnitVector3::from_unit(Vector3::new(0.0, 0.0, 1.0)).unwrap(), UnitVector3::E3);
        assert_eq!(UnitVector3::from_unit(Vector3::new(0.5, 0.0, 0.0)), Err(GeomError::NotUnit));
        assert_eq!(UnitVector3::normalize(Vector3::ZERO), Err(GeomError::ZeroVector));
        assert_eq!(
            UnitVector3::normalize(Vector3::new(f64::NAN, 0.0, 0.0)),
            Err(GeomError::NonFinite)
        );
        let u = UnitVector3::normalize(Vector3::new(3.0, -4.0, 12.0)).unwrap();
        assert!(fabs(u.vector().norm() - 1.0) <= 1e-15);
    }

    #[test]
    fn rotation_from_matrix_checks() {
        assert!(Rotation3::from_matrix(mat_identity()).is_ok());
        let skewed = [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(Rotation3::from_matrix(skewed), Err(GeomError::NotRotation));
        let reflection = [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(Rotation3::from_matrix(reflection), Err(GeomError::NegativeDeterminant));
    }
}
