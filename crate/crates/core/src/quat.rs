//! Scalar quaternion arithmetic and the quaternion/rotation correspondence.
//!
//! Components are stored scalar-first, `(w, x, y, z)` for `w + x·i + y·j + z·k`,
//! in memory and in every serialized form (`[w, x, y, z]`).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SnaError};

pub type Vec3 = [f64; 3];

/// Inputs this close to unit norm are renormalized silently.
pub const UNIT_RENORMALIZE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Pure quaternion `x·i + y·j + z·k` for a 3-vector.
    pub const fn pure(v: Vec3) -> Self {
        Self::new(0.0, v[0], v[1], v[2])
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_squared(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Euclidean inner product of the coefficient 4-vectors, `Re(p̄·q)`.
    pub fn dot(self, other: Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn vector(self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `q / |q|`; `None` for the zero quaternion.
    pub fn normalized(self) -> Option<UnitQuaternion> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(UnitQuaternion(self / n))
        } else {
            None
        }
    }

    /// Real 4×4 matrix `L` with `L·[q] = [self·q]`.
    pub fn left_matrix(self) -> [[f64; 4]; 4] {
        let Quaternion { w, x, y, z } = self;
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    }

    /// Real 4×4 matrix `R` with `R·[q] = [q·self]`.
    pub fn right_matrix(self) -> [[f64; 4]; 4] {
        let Quaternion { w, x, y, z } = self;
        [
            [w, -x, -y, -z],
            [x, w, z, -y],
            [y, -z, w, x],
            [z, y, -x, w],
        ]
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

/// A quaternion of unit norm (within 1e-12).
///
/// The sign is not forced: `q` and `-q` are distinct values representing the
/// same rotation. Use [`UnitQuaternion::canonicalize_sign`] where a unique
/// representative is needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion(Quaternion::ONE);

    /// Accepts `q` when `| |q| - 1 | <= 1e-6`, renormalizing it; rejects otherwise.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_RENORMALIZE_TOL {
            return Err(SnaError::NotUnit { norm: n });
        }
        Ok(UnitQuaternion(q / n))
    }

    /// Caller guarantees unit norm.
    pub(crate) const fn new_unchecked(q: Quaternion) -> Self {
        UnitQuaternion(q)
    }

    /// `cos(angle/2) + sin(angle/2)·axis`, sign-canonicalized.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self> {
        Ok(Self::from_axis_angle_raw(axis, angle)?.canonicalize_sign())
    }

    /// Same as [`from_axis_angle`](Self::from_axis_angle) without the sign canonicalization.
    pub fn from_axis_angle_raw(axis: Vec3, angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
            return Err(SnaError::NonUnitAxis { norm: n });
        }
        let (s, c) = (0.5 * angle).sin_cos();
        Ok(UnitQuaternion(Quaternion::new(c, s * axis[0], s * axis[1], s * axis[2])))
    }

    pub fn quaternion(self) -> Quaternion {
        self.0
    }

    pub fn w(self) -> f64 {
        self.0.w
    }

    pub fn conj(self) -> Self {
        UnitQuaternion(self.0.conj())
    }

    /// For a unit quaternion the inverse is the conjugate.
    pub fn inverse(self) -> Self {
        self.conj()
    }

    /// Representative of `{q, -q}` with `w > 0`, or `w = 0` and the first
    /// nonzero of `(x, y, z)` positive.
    pub fn canonicalize_sign(self) -> Self {
        let q = self.0;
        let flip = if q.w != 0.0 {
            q.w < 0.0
        } else {
            q.vector()
                .into_iter()
                .find(|c| *c != 0.0)
                .is_some_and(|c| c < 0.0)
        };
        if flip {
            UnitQuaternion(-q)
        } else {
            self
        }
    }

    pub fn to_rotation_matrix(self) -> RotationMatrix {
        let Quaternion { w, x, y, z } = self.0;
        RotationMatrix([
            [
                w * w + x * x - y * y - z * z,
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                w * w - x * x + y * y - z * z,
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                w * w - x * x - y * y + z * z,
            ],
        ])
    }

    /// `q·v·q̄`, equal to `to_rotation_matrix(q)·v`.
    pub fn rotate_vector(self, v: Vec3) -> Vec3 {
        let r = self.0 * Quaternion::pure(v) * self.0.conj();
        r.vector()
    }

    /// Spectral norm `‖R(p) - R(q)‖₂`, through the closed form
    /// `|p - q|·sqrt(4 - |p - q|²)`.
    pub fn rotation_distance(self, other: UnitQuaternion) -> f64 {
        let d2 = (self.0 - other.0).norm_squared();
        (d2 * (4.0 - d2).max(0.0)).sqrt()
    }

    /// Rotation angle in `[0, π]` and unit axis (`[0, 0, 1]` for the identity).
    pub fn to_axis_angle(self) -> (Vec3, f64) {
        let q = self.canonicalize_sign().0;
        let s = (q.x * q.x + q.y * q.y + q.z * q.z).sqrt();
        if s == 0.0 {
            return ([0.0, 0.0, 1.0], 0.0);
        }
        let angle = 2.0 * s.atan2(q.w);
        ([q.x / s, q.y / s, q.z / s], angle)
    }
}

impl TryFrom<[f64; 4]> for UnitQuaternion {
    type Error = SnaError;
    fn try_from(a: [f64; 4]) -> Result<Self> {
        UnitQuaternion::new(Quaternion::from(a))
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(q: UnitQuaternion) -> Self {
        q.0.to_array()
    }
}

impl From<UnitQuaternion> for Quaternion {
    fn from(q: UnitQuaternion) -> Self {
        q.0
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, o: UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion(self.0 * o.0)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion(-self.0)
    }
}

impl fmt::Display for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Proper orthogonal 3×3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(pub [[f64; 3]; 3]);

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix =
        RotationMatrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn transpose(&self) -> RotationMatrix {
        let m = &self.0;
        RotationMatrix(std::array::from_fn(|i| std::array::from_fn(|j| m[j][i])))
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        std::array::from_fn(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest elementwise absolute difference.
    pub fn max_abs_diff(&self, other: &RotationMatrix) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, o: RotationMatrix) -> RotationMatrix {
        let (a, b) = (&self.0, &o.0);
        RotationMatrix(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum())
        }))
    }
}

pub(crate) fn vec3_norm(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn vec3_scale(v: Vec3, s: f64) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub(crate) fn vec3_cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn vec3_dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Angle between two nonzero vectors, via `atan2(|a×b|, a·b)`.
pub(crate) fn vec3_angle(a: Vec3, b: Vec3) -> f64 {
    vec3_norm(vec3_cross(a, b)).atan2(vec3_dot(a, b))
}
