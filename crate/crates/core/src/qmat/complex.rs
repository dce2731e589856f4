//! Complex adjoint map.
//!
//! Writing a quaternion as `q = a + j·b` with `a = w + x·i` and `b = y - z·i`
//! complex, a quaternion matrix `M = M₁ + j·M₂` maps to the `2N×2N` complex
//! matrix `[[M₁, -conj(M₂)], [M₂, conj(M₁)]]`. The map is real-linear,
//! multiplicative, preserves hermiticity, scales the Frobenius norm by √2,
//! and doubles every eigenvalue multiplicity.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::{hermitian_eigen_oracle, QuatMatrix, QuatVector};
use crate::error::{Result, SnaError};
use crate::quat::Quaternion;

/// Tolerance used when checking that `χ(M)` eigenvalues pair up.
const PAIRING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mat_mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(SnaError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(SnaError::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect())
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(SnaError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    /// True iff `‖H - H*‖_F <= tol·max(1, ‖H‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        let mut defect = 0.0;
        for i in 0..n {
            for j in 0..n {
                defect += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        defect.sqrt() <= tol * self.frobenius_norm().max(1.0)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

fn split(q: Quaternion) -> (Complex64, Complex64) {
    (Complex64::new(q.w, q.x), Complex64::new(q.y, -q.z))
}

fn join(a: Complex64, b: Complex64) -> Quaternion {
    Quaternion::new(a.re, a.im, b.re, -b.im)
}

pub fn chi(m: &QuatMatrix) -> ComplexMatrix {
    let (r, c) = (m.rows(), m.cols());
    let mut out = ComplexMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let (a, b) = split(m[(i, j)]);
            out[(i, j)] = a;
            out[(i, c + j)] = -b.conj();
            out[(r + i, j)] = b;
            out[(r + i, c + j)] = a.conj();
        }
    }
    out
}

/// Stacks the complex parts `[V₁; V₂]` of `V = V₁ + j·V₂`.
pub fn chi_vec(v: &QuatVector) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (k, q) in v.iter().enumerate() {
        let (a, b) = split(*q);
        out[k] = a;
        out[n + k] = b;
    }
    out
}

/// Inverse of [`chi_vec`]: any vector of the doubled eigenspace maps back to
/// a quaternion eigenvector.
pub fn from_chi_vec(c: &[Complex64]) -> Result<QuatVector> {
    if !c.len().is_multiple_of(2) {
        return Err(SnaError::DimensionMismatch(format!(
            "complex vector of odd length {}",
            c.len()
        )));
    }
    let n = c.len() / 2;
    Ok((0..n).map(|k| join(c[k], c[n + k])).collect())
}

/// The `N` right eigenvalues of a hermitian quaternion matrix, descending.
pub fn quat_spectrum_via_chi(m: &QuatMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(SnaError::DimensionMismatch(format!(
            "square matrix required, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let eig = hermitian_eigen_oracle(&chi(m))?;
    let tol = PAIRING_TOL * m.frobenius_norm().max(1.0);
    eig.values
        .chunks_exact(2)
        .enumerate()
        .map(|(k, pair)| {
            let gap = (pair[0] - pair[1]).abs();
            if gap > tol {
                Err(SnaError::SpectrumPairing(format!(
                    "eigenvalues {} and {} (index {}) differ by {gap:e} > {tol:e}",
                    pair[0],
                    pair[1],
                    2 * k
                )))
            } else {
                Ok(0.5 * (pair[0] + pair[1]))
            }
        })
        .collect()
}

/// Spectral norm `‖M‖₂ = ‖χ(M)‖₂`, from the largest eigenvalue of `χ(M)*χ(M)`.
pub fn operator_norm_2(m: &QuatMatrix) -> Result<f64> {
    let c = chi(m);
    let gram = c.adjoint().mat_mul(&c)?;
    let eig = hermitian_eigen_oracle(&gram)?;
    Ok(eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}
