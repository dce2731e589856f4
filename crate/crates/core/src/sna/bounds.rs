//! Perturbation diagnostics against a known noiseless matrix.
//!
//! With `e = e(O) = ‖Ô - O‖_F / ‖O‖_F` and the spectrum `λ₁ ≥ … ≥ λ_N` of `Ô`:
//!
//! - Weyl: `1 - e ≤ λ₁/N ≤ 1` and `|λ_i|/N ≤ e` for `i ≥ 2`;
//! - Davis-Kahan, when `e < 1/2`: `e(R) ≤ e / (1 - 2e)`, with `e(R)` measured
//!   after right-gauge alignment of `R̂` to `R`.
//!
//! Violations are reported as flags, never as errors.

use serde::{Deserialize, Serialize};

use super::{relative_error, RelativeAttitudeMatrix};
use crate::error::{Result, SnaError};
use crate::qmat::{quat_spectrum_via_chi, QuatVector};
use crate::quat::Quaternion;

/// Slack on the Weyl and Davis-Kahan inequalities.
pub const WEYL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub e_o: f64,
    pub lambda1_over_n: f64,
    pub max_tail_over_n: f64,
    /// `λ₁ - λ₂` (0 for a single sensor).
    pub eigengap: f64,
    pub dk_bound: Option<f64>,
    pub e_r: Option<f64>,
    pub weyl_ok: bool,
    pub dk_ok: Option<bool>,
    pub spectrum: Vec<f64>,
}

/// `min_s ‖R̂·s - R‖_F / ‖R‖_F` over unit quaternions `s`; the minimizer is
/// `s = R̂*·R / |R̂*·R|`.
pub fn gauge_aligned_error(r_hat: &QuatVector, r: &QuatVector) -> Result<f64> {
    if r_hat.len() != r.len() {
        return Err(SnaError::DimensionMismatch(format!(
            "R̂ has {} entries, R has {}",
            r_hat.len(),
            r.len()
        )));
    }
    let s = r_hat.inner(r).normalized().map_or(Quaternion::ONE, |u| u.quaternion());
    relative_error(&r_hat.mul_right(s), r)
}

pub fn bounds_report(
    o_hat: &RelativeAttitudeMatrix,
    o: &RelativeAttitudeMatrix,
    r_hat: Option<&QuatVector>,
    r: Option<&QuatVector>,
) -> Result<BoundsReport> {
    let n = o.n();
    if o_hat.n() != n {
        return Err(SnaError::DimensionMismatch(format!(
            "estimated matrix is {0}x{0}, truth is {n}x{n}",
            o_hat.n()
        )));
    }
    let nf = n as f64;
    let e_o = relative_error(o_hat.matrix(), o.matrix())?;
    let spectrum = quat_spectrum_via_chi(o_hat)?;
    let lambda1_over_n = spectrum[0] / nf;
    let max_tail_over_n = spectrum[1..].iter().map(|l| l.abs()).fold(0.0, f64::max) / nf;
    let eigengap = if n > 1 { spectrum[0] - spectrum[1] } else { 0.0 };

    let weyl_ok = 1.0 - e_o <= lambda1_over_n + WEYL_TOL
        && lambda1_over_n <= 1.0 + WEYL_TOL
        && max_tail_over_n <= e_o + WEYL_TOL;

    let e_r = match (r_hat, r) {
        (Some(r_hat), Some(r)) => Some(gauge_aligned_error(r_hat, r)?),
        _ => None,
    };
    let dk_bound = (e_o < 0.5).then(|| e_o / (1.0 - 2.0 * e_o));
    let dk_ok = match (dk_bound, e_r) {
        (Some(bound), Some(e_r)) => Some(e_r <= bound + WEYL_TOL),
        _ => None,
    };

    Ok(BoundsReport {
        e_o,
        lambda1_over_n,
        max_tail_over_n,
        eigengap,
        dk_bound,
        e_r,
        weyl_ok,
        dk_ok,
        spectrum,
    })
}
