//! Sensor-network attitude solver.
//!
//! Given a complete relative attitude matrix `Ô` (with `O_ij = q_i·conj(q_j)`)
//! and any number of reference sensors, recover every sensor attitude:
//!
//! 1. dominant eigenpair `(λ₁, V₁)` of `Ô`, `R̂ = √N·V₁`;
//! 2. gauge `ŝ`, the least-squares right factor taking `R̂_r` onto the
//!    reference attitudes;
//! 3. `Q̂ = R̂·ŝ`;
//! 4. per-component normalization and sign canonicalization.
//!
//! Sensors are indexed from 0.

mod bounds;
mod criteria;

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SnaError};
use crate::qmat::{power_iteration, PowerIterationOptions, QuatMatrix, QuatVector};
use crate::quat::{Quaternion, UnitQuaternion};

pub use bounds::{bounds_report, gauge_aligned_error, BoundsReport, WEYL_TOL};
pub use criteria::{attitude_error, criterion_c1, criterion_c2, relative_error};

/// Tolerance for the relative attitude matrix invariants.
pub const RELATIVE_MATRIX_TOL: f64 = 1e-9;
/// Components of `R̂·ŝ` below this norm cannot be normalized.
pub const DEGENERATE_COMPONENT_NORM: f64 = 1e-12;

/// Attitudes of all sensors, each sign-canonicalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<UnitQuaternion>", into = "Vec<UnitQuaternion>")]
pub struct AttitudeVector(Vec<UnitQuaternion>);

impl AttitudeVector {
    pub fn new(entries: Vec<UnitQuaternion>) -> Self {
        Self(entries.into_iter().map(UnitQuaternion::canonicalize_sign).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[UnitQuaternion] {
        &self.0
    }

    pub fn get(&self, i: usize) -> UnitQuaternion {
        self.0[i]
    }

    pub fn to_quat_vector(&self) -> QuatVector {
        QuatVector::from_units(&self.0)
    }

    /// Componentwise right multiplication by a unit quaternion.
    pub fn mul_right(&self, s: UnitQuaternion) -> AttitudeVector {
        AttitudeVector::new(self.0.iter().map(|q| *q * s).collect())
    }
}

impl From<Vec<UnitQuaternion>> for AttitudeVector {
    fn from(v: Vec<UnitQuaternion>) -> Self {
        AttitudeVector::new(v)
    }
}

impl From<AttitudeVector> for Vec<UnitQuaternion> {
    fn from(v: AttitudeVector) -> Self {
        v.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub index: usize,
    pub attitude: UnitQuaternion,
}

/// Reference sensors with known attitudes, sorted by strictly increasing index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Reference>", into = "Vec<Reference>")]
pub struct ReferenceSet(Vec<Reference>);

impl ReferenceSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(index: usize, attitude: UnitQuaternion) -> Self {
        Self(vec![Reference { index, attitude }])
    }

    /// Sorts by index; duplicate indices are rejected.
    pub fn new(mut refs: Vec<Reference>) -> Result<Self> {
        refs.sort_by_key(|r| r.index);
        if let Some(w) = refs.windows(2).find(|w| w[0].index == w[1].index) {
            return Err(SnaError::InvalidReferences(format!(
                "duplicate reference index {}",
                w[0].index
            )));
        }
        Ok(Self(refs))
    }

    /// References taken from a known attitude vector.
    pub fn from_truth(truth: &AttitudeVector, indices: &[usize]) -> Result<Self> {
        let refs = indices
            .iter()
            .map(|&index| {
                if index >= truth.len() {
                    Err(SnaError::InvalidReferences(format!(
                        "index {index} out of range for {} sensors",
                        truth.len()
                    )))
                } else {
                    Ok(Reference { index, attitude: truth.get(index) })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(refs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Reference> {
        self.0.iter()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|r| r.index).collect()
    }

    pub fn attitudes(&self) -> QuatVector {
        self.0.iter().map(|r| r.attitude.quaternion()).collect()
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|r| r.index >= n) {
            Some(r) => Err(SnaError::InvalidReferences(format!(
                "index {} out of range for {n} sensors",
                r.index
            ))),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<Reference>> for ReferenceSet {
    type Error = SnaError;
    fn try_from(v: Vec<Reference>) -> Result<Self> {
        ReferenceSet::new(v)
    }
}

impl From<ReferenceSet> for Vec<Reference> {
    fn from(r: ReferenceSet) -> Self {
        r.0
    }
}

/// Square hermitian matrix of unit quaternions with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuatMatrix", into = "QuatMatrix")]
pub struct RelativeAttitudeMatrix(QuatMatrix);

impl RelativeAttitudeMatrix {
    /// Validates the invariants within [`RELATIVE_MATRIX_TOL`].
    pub fn new(m: QuatMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(SnaError::InvalidRelativeMatrix(format!(
                "matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        for i in 0..n {
            for j in 0..n {
                let norm = m[(i, j)].norm();
                if !norm.is_finite() || (norm - 1.0).abs() > RELATIVE_MATRIX_TOL {
                    return Err(SnaError::InvalidRelativeMatrix(format!(
                        "entry ({i}, {j}) is not a unit quaternion (norm {norm})"
                    )));
                }
            }
            let d = (m[(i, i)] - Quaternion::ONE).norm();
            if d > RELATIVE_MATRIX_TOL {
                return Err(SnaError::InvalidRelativeMatrix(format!(
                    "diagonal entry ({i}, {i}) = {} is not 1",
                    m[(i, i)]
                )));
            }
        }
        let defect = m.hermitian_defect()?;
        if defect > RELATIVE_MATRIX_TOL * m.frobenius_norm().max(1.0) {
            return Err(SnaError::InvalidRelativeMatrix(format!(
                "matrix is not hermitian (‖O - O*‖_F = {defect:e})"
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: QuatMatrix) -> Self {
        Self(m)
    }

    /// Number of sensors.
    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &QuatMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> QuatMatrix {
        self.0
    }
}

impl Deref for RelativeAttitudeMatrix {
    type Target = QuatMatrix;
    fn deref(&self) -> &QuatMatrix {
        &self.0
    }
}

impl TryFrom<QuatMatrix> for RelativeAttitudeMatrix {
    type Error = SnaError;
    fn try_from(m: QuatMatrix) -> Result<Self> {
        RelativeAttitudeMatrix::new(m)
    }
}

impl From<RelativeAttitudeMatrix> for QuatMatrix {
    fn from(m: RelativeAttitudeMatrix) -> Self {
        m.0
    }
}

/// `O = Q·Q*`, i.e. `O_ij = q_i·conj(q_j)`.
pub fn build_relative_matrix(q: &AttitudeVector) -> RelativeAttitudeMatrix {
    let v = q.to_quat_vector();
    let n = v.len();
    let mut m = v.outer();
    // Exact unit diagonal.
    for i in 0..n {
        m[(i, i)] = Quaternion::ONE;
    }
    RelativeAttitudeMatrix(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub attitudes: AttitudeVector,
    pub lambda1: f64,
    /// Unit gauge `ŝ`; absent without references.
    pub gauge: Option<UnitQuaternion>,
    /// `C1(R̂) = ‖Ô - R̂·R̂*‖_F²`.
    pub c1_value: f64,
    /// `C2` at its least-squares minimizer; absent without references.
    pub c2_value: Option<f64>,
    pub gauge_fixed: bool,
    pub iterations: usize,
    /// `R̂ = √N·V₁`.
    #[serde(skip)]
    pub eigenvector: QuatVector,
}

pub fn solve(
    o_hat: &RelativeAttitudeMatrix,
    refs: &ReferenceSet,
    opts: &PowerIterationOptions,
) -> Result<SolveReport> {
    let n = o_hat.n();
    refs.check_range(n)?;

    let pair = power_iteration(o_hat, opts)?;
    let r_hat = pair.vector.scale((n as f64).sqrt());

    let (gauge, c2_value) = if refs.is_empty() {
        (None, None)
    } else {
        let r_r = r_hat.select(&refs.indices());
        let q_r = refs.attitudes();
        let raw = least_squares_gauge(&r_r, &q_r)?;
        let c2 = criterion_c2(&q_r, &r_r, raw)?;
        let unit = raw
            .normalized()
            .ok_or(SnaError::ZeroNorm("least-squares gauge R_r*·Q_r"))?;
        (Some(unit), Some(c2))
    };
    let s = gauge.map_or(Quaternion::ONE, UnitQuaternion::quaternion);

    let attitudes = r_hat
        .mul_right(s)
        .iter()
        .enumerate()
        .map(|(index, q)| {
            let norm = q.norm();
            if norm < DEGENERATE_COMPONENT_NORM {
                return Err(SnaError::DegenerateEigenvector { index, norm });
            }
            Ok(UnitQuaternion::new_unchecked(*q / norm))
        })
        .collect::<Result<Vec<_>>>()?;

    let c1_value = criterion_c1(o_hat, &r_hat)?;
    Ok(SolveReport {
        attitudes: AttitudeVector::new(attitudes),
        lambda1: pair.value,
        gauge,
        c1_value,
        c2_value,
        gauge_fixed: !refs.is_empty(),
        iterations: pair.iterations,
        eigenvector: r_hat,
    })
}

/// `(R_r*·R_r)⁻¹·(R_r*·Q_r)` before normalization. `R_r*·R_r = ‖R_r‖²` is a
/// positive real, so this is `R_r*·Q_r / ‖R_r‖²`.
pub fn least_squares_gauge(r_r: &QuatVector, q_r: &QuatVector) -> Result<Quaternion> {
    if r_r.is_empty() || q_r.is_empty() {
        return Err(SnaError::Empty("reference vectors"));
    }
    if r_r.len() != q_r.len() {
        return Err(SnaError::DimensionMismatch(format!(
            "R_r has {} entries, Q_r has {}",
            r_r.len(),
            q_r.len()
        )));
    }
    let norm2 = r_r.norm_squared();
    if norm2.sqrt() <= DEGENERATE_COMPONENT_NORM {
        return Err(SnaError::ZeroNorm("R_r"));
    }
    Ok(r_r.inner(q_r) / norm2)
}

/// Unit gauge `ŝ` taking `R_r` onto `Q_r` in the least-squares sense.
pub fn compute_s(r_r: &QuatVector, q_r: &QuatVector) -> Result<UnitQuaternion> {
    least_squares_gauge(r_r, q_r)?
        .normalized()
        .ok_or(SnaError::ZeroNorm("R_r*·Q_r"))
}
