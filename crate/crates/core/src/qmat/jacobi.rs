//! Cyclic Jacobi eigensolver for dense complex hermitian matrices.
//!
//! Used as the independent oracle for spectra and as the small SVD engine in
//! relative-attitude estimation. Each rotation first removes the phase of the
//! pivot `a_pq`, then applies a real Jacobi rotation.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Result, SnaError};

/// Stop once the off-diagonal Frobenius norm falls below this fraction of `‖H‖_F`.
pub const ORACLE_SWEEP_TOL: f64 = 1e-12;
pub const ORACLE_MAX_SWEEPS: usize = 100;

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eigen_oracle(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if h.rows() != h.cols() {
        return Err(SnaError::NotHermitian(format!(
            "matrix is {}x{}, not square",
            h.rows(),
            h.cols()
        )));
    }
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(SnaError::NotHermitian(
            "‖H - H*‖_F exceeds 1e-10·max(1, ‖H‖_F)".to_string(),
        ));
    }
    let n = h.rows();
    // Work on the exactly hermitian part.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let threshold = ORACLE_SWEEP_TOL * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == ORACLE_MAX_SWEEPS {
            return Err(SnaError::OracleConvergence { sweeps, off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Zeroes `a[p][q]` with `A ← U*·A·U`, `V ← V·U`, where
/// `U = diag(1, conj(e))·[[c, s], [-s, c]]` on rows/columns `p, q` and
/// `e = a_pq / |a_pq|`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let r = b.norm();
    if r == 0.0 {
        return;
    }
    let e = b / r;
    let ec = e.conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();

    // Columns: A·U.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ec * s;
        a[(k, q)] = akp * s + akq * ec * c;
    }
    // Rows: U*·A.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * s + aqk * e * c;
    }
    let zero = Complex64::new(0.0, 0.0);
    a[(p, q)] = zero;
    a[(q, p)] = zero;
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ec * s;
        v[(k, q)] = vkp * s + vkq * ec * c;
    }
}
