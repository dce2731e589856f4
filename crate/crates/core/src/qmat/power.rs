//! Normalized power iteration for hermitian quaternion matrices.
//!
//! `V_k = X_k / ‖X_k‖`, `X_{k+1} = A·V_k`. Real eigenvalues commute with every
//! quaternion, so the complex argument carries over unchanged; the iterate
//! converges to a right eigenvector of the eigenvalue of largest modulus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{QuatMatrix, QuatVector};
use crate::error::{Result, SnaError};
use crate::quat::Quaternion;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterationOptions {
    pub max_iterations: usize,
    /// Convergence threshold on `‖A·V - V·λ‖_F`.
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for PowerIterationOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            residual_tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit Frobenius norm.
    pub vector: QuatVector,
    pub iterations: usize,
    pub residual: f64,
}

/// Dominant right eigenpair of a hermitian matrix.
///
/// The eigenvalue estimate is the Rayleigh value `Re(V*·A·V)`, which keeps
/// its sign when the dominant eigenvalue is negative (the norm ratio
/// `‖X_{k+1}‖/‖X_k‖` would only give its modulus).
pub fn power_iteration(a: &QuatMatrix, opts: &PowerIterationOptions) -> Result<EigenPair> {
    if !a.is_square() {
        return Err(SnaError::DimensionMismatch(format!(
            "power iteration needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if opts.residual_tol.is_nan() || opts.residual_tol <= 0.0 {
        return Err(SnaError::Config(format!(
            "residual_tol must be positive, got {}",
            opts.residual_tol
        )));
    }
    if opts.max_iterations == 0 {
        return Err(SnaError::Config("max_iterations must be positive".into()));
    }

    let n = a.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start: QuatVector = (0..n)
        .map(|_| {
            Quaternion::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        })
        .collect();
    let mut v = normalize(start)?;
    let mut residual = f64::INFINITY;

    for k in 1..=opts.max_iterations {
        let x = a.mat_vec_unchecked(v.as_slice());
        let value = v.inner(&x).w;
        residual = x.sub(&v.scale(value)).norm();
        if residual <= opts.residual_tol {
            return Ok(EigenPair {
                value,
                vector: v,
                iterations: k,
                residual,
            });
        }
        v = normalize(x)?;
    }
    Err(SnaError::Convergence {
        iterations: opts.max_iterations,
        residual,
    })
}

fn normalize(x: QuatVector) -> Result<QuatVector> {
    let norm = x.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(SnaError::ZeroIterate);
    }
    Ok(x.scale(1.0 / norm))
}
