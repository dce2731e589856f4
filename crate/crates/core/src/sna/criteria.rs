use super::AttitudeVector;
use crate::error::{Result, SnaError};
use crate::qmat::{QuatMatrix, QuatVector};
use crate::quat::Quaternion;

/// `C1(P) = ‖Ô - P·P*‖_F²`, evaluated entrywise.
pub fn criterion_c1(o_hat: &QuatMatrix, p: &QuatVector) -> Result<f64> {
    if !o_hat.is_square() || o_hat.rows() != p.len() {
        return Err(SnaError::DimensionMismatch(format!(
            "{}x{} matrix against vector of length {}",
            o_hat.rows(),
            o_hat.cols(),
            p.len()
        )));
    }
    let n = p.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (o_hat[(i, j)] - p[i] * p[j].conj()).norm_squared();
        }
    }
    Ok(acc)
}

/// `C2(t) = ‖Q_r - R_r·t‖²`.
pub fn criterion_c2(q_r: &QuatVector, r_r: &QuatVector, t: Quaternion) -> Result<f64> {
    if q_r.len() != r_r.len() {
        return Err(SnaError::DimensionMismatch(format!(
            "Q_r has {} entries, R_r has {}",
            q_r.len(),
            r_r.len()
        )));
    }
    Ok(q_r.iter().zip(r_r.iter()).map(|(q, r)| (*q - *r * t).norm_squared()).sum())
}

/// `‖X̂ - X‖_F / ‖X‖_F`.
pub fn relative_error<T: AsRef<[Quaternion]> + ?Sized>(x_hat: &T, x: &T) -> Result<f64> {
    let (a, b) = (x_hat.as_ref(), x.as_ref());
    if a.len() != b.len() {
        return Err(SnaError::DimensionMismatch(format!(
            "{} estimated entries against {} reference entries",
            a.len(),
            b.len()
        )));
    }
    let denom: f64 = b.iter().map(|q| q.norm_squared()).sum::<f64>().sqrt();
    if denom == 0.0 {
        return Err(SnaError::ZeroNorm("reference in relative error"));
    }
    let num: f64 = a.iter().zip(b).map(|(p, q)| (*p - *q).norm_squared()).sum::<f64>().sqrt();
    Ok(num / denom)
}

/// Relative error after flipping each `q̂_i` to whichever of `±q̂_i` is closer
/// to `q_i`; insensitive to double-cover sign choices.
pub fn attitude_error(q_hat: &AttitudeVector, q: &AttitudeVector) -> Result<f64> {
    if q_hat.len() != q.len() {
        return Err(SnaError::DimensionMismatch(format!(
            "{} estimated attitudes against {} true attitudes",
            q_hat.len(),
            q.len()
        )));
    }
    let aligned: Vec<Quaternion> = q_hat
        .as_slice()
        .iter()
        .zip(q.as_slice())
        .map(|(a, b)| {
            let (a, b) = (a.quaternion(), b.quaternion());
            if a.dot(b) < 0.0 {
                -a
            } else {
                a
            }
        })
        .collect();
    let truth: Vec<Quaternion> = q.as_slice().iter().map(|u| u.quaternion()).collect();
    relative_error(aligned.as_slice(), truth.as_slice())
}
