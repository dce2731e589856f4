//! Dense quaternion matrices and vectors.
//!
//! Products follow the right-module convention: `(A·x)_i = Σ_k A_ik·x_k`, with
//! the matrix entry on the left of every quaternion product. Eigenvalues are
//! right eigenvalues (`A·V = V·λ`).

mod complex;
mod jacobi;
mod power;

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SnaError};
use crate::quat::{Quaternion, UnitQuaternion};

pub use complex::{
    chi, chi_vec, from_chi_vec, operator_norm_2, quat_spectrum_via_chi, ComplexMatrix,
};
pub use jacobi::{hermitian_eigen_oracle, HermitianEigen, ORACLE_MAX_SWEEPS, ORACLE_SWEEP_TOL};
pub use power::{power_iteration, EigenPair, PowerIterationOptions};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuatVector(Vec<Quaternion>);

impl QuatVector {
    pub fn new(entries: Vec<Quaternion>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Quaternion::ZERO; n])
    }

    pub fn from_units(entries: &[UnitQuaternion]) -> Self {
        Self(entries.iter().map(|q| q.quaternion()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Quaternion> {
        self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|q| q.norm_squared()).sum()
    }

    /// Euclidean (Frobenius) norm.
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Inner product `self*·other = Σ conj(self_k)·other_k`.
    pub fn inner(&self, other: &QuatVector) -> Quaternion {
        assert_eq!(self.len(), other.len(), "inner product length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .fold(Quaternion::ZERO, |acc, (a, b)| acc + a.conj() * *b)
    }

    /// Componentwise right multiplication `V·s`.
    pub fn mul_right(&self, s: Quaternion) -> QuatVector {
        QuatVector(self.0.iter().map(|q| *q * s).collect())
    }

    pub fn scale(&self, s: f64) -> QuatVector {
        QuatVector(self.0.iter().map(|q| *q * s).collect())
    }

    pub fn sub(&self, other: &QuatVector) -> QuatVector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        QuatVector(self.0.iter().zip(&other.0).map(|(a, b)| *a - *b).collect())
    }

    pub fn select(&self, indices: &[usize]) -> QuatVector {
        QuatVector(indices.iter().map(|&i| self.0[i]).collect())
    }

    /// Outer product `self·self*`.
    pub fn outer(&self) -> QuatMatrix {
        let n = self.len();
        QuatMatrix::from_fn(n, n, |i, j| self.0[i] * self.0[j].conj())
    }
}

impl AsRef<[Quaternion]> for QuatVector {
    fn as_ref(&self) -> &[Quaternion] {
        &self.0
    }
}

impl Index<usize> for QuatVector {
    type Output = Quaternion;
    fn index(&self, i: usize) -> &Quaternion {
        &self.0[i]
    }
}

impl IndexMut<usize> for QuatVector {
    fn index_mut(&mut self, i: usize) -> &mut Quaternion {
        &mut self.0[i]
    }
}

impl FromIterator<Quaternion> for QuatVector {
    fn from_iter<T: IntoIterator<Item = Quaternion>>(iter: T) -> Self {
        QuatVector(iter.into_iter().collect())
    }
}

/// Dense row-major quaternion matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuatMatrixJson", into = "QuatMatrixJson")]
pub struct QuatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

/// Wire form: `{ "rows": N, "cols": M, "entries": [[w,x,y,z], ...] }`, row-major.
#[derive(Serialize, Deserialize)]
struct QuatMatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

impl TryFrom<QuatMatrixJson> for QuatMatrix {
    type Error = SnaError;
    fn try_from(j: QuatMatrixJson) -> Result<Self> {
        QuatMatrix::from_row_major(j.rows, j.cols, j.entries)
    }
}

impl From<QuatMatrix> for QuatMatrixJson {
    fn from(m: QuatMatrix) -> Self {
        QuatMatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries,
        }
    }
}

impl QuatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Quaternion::ONE } else { Quaternion::ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(SnaError::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(SnaError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Quaternion] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> QuatMatrix {
        QuatMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Result<Quaternion> {
        self.require_square()?;
        Ok((0..self.rows).fold(Quaternion::ZERO, |acc, i| acc + self[(i, i)]))
    }

    /// `Tr(A*A)^{1/2}`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn mat_vec(&self, x: &QuatVector) -> Result<QuatVector> {
        if x.len() != self.cols {
            return Err(SnaError::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(self.mat_vec_unchecked(x.as_slice()))
    }

    pub(crate) fn mat_vec_unchecked(&self, x: &[Quaternion]) -> QuatVector {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Quaternion::ZERO, |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn mat_mul(&self, other: &QuatMatrix) -> Result<QuatMatrix> {
        if self.cols != other.rows {
            return Err(SnaError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(QuatMatrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Quaternion::ZERO, |acc, k| acc + self[(i, k)] * other[(k, j)])
        }))
    }

    pub fn add(&self, other: &QuatMatrix) -> Result<QuatMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QuatMatrix) -> Result<QuatMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> QuatMatrix {
        QuatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|q| *q * s).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &QuatMatrix,
        f: impl Fn(Quaternion, Quaternion) -> Quaternion,
    ) -> Result<QuatMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(SnaError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(QuatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    /// `‖A - A*‖_F`, for square matrices.
    pub fn hermitian_defect(&self) -> Result<f64> {
        self.require_square()?;
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_squared();
            }
        }
        Ok(acc.sqrt())
    }

    /// True iff `‖A - A*‖_F <= tol·max(1, ‖A‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> Result<bool> {
        Ok(self.hermitian_defect()? <= tol * self.frobenius_norm().max(1.0))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(SnaError::DimensionMismatch(format!(
                "square matrix required, got {}x{}",
                self.rows, self.cols
            )))
        }
    }
}

impl AsRef<[Quaternion]> for QuatMatrix {
    fn as_ref(&self) -> &[Quaternion] {
        &self.entries
    }
}

impl Index<(usize, usize)> for QuatMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QuatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn hermitian_2x2() -> QuatMatrix {
        QuatMatrix::from_row_major(2, 2, vec![Quaternion::ONE, Quaternion::J, -Quaternion::J, Quaternion::ONE])
            .unwrap()
    }

    #[test]
    fn identity_times_vector() {
        let x = QuatVector::new(vec![q(1.0, 2.0, 3.0, 4.0), q(-0.5, 0.0, 1.0, 0.25)]);
        assert_eq!(QuatMatrix::identity(2).mat_vec(&x).unwrap(), x);
    }

    #[test]
    fn frobenius_of_all_ones() {
        for n in [1usize, 3, 7] {
            let m = QuatMatrix::from_fn(n, n, |_, _| Quaternion::ONE);
            assert!((m.frobenius_norm() - n as f64).abs() < 1e-12);
        }
        assert_eq!(QuatMatrix::zeros(3, 2).frobenius_norm(), 0.0);
    }

    #[test]
    fn adjoint_and_hermitian_examples() {
        let a = hermitian_2x2();
        assert_eq!(a.adjoint(), a);
        assert!(a.is_hermitian(1e-12).unwrap());
        let b = QuatMatrix::from_row_major(2, 2, vec![Quaternion::ONE, Quaternion::J, Quaternion::J, Quaternion::ONE])
            .unwrap();
        assert!(!b.is_hermitian(1e-12).unwrap());
        assert!(matches!(QuatMatrix::zeros(2, 3).is_hermitian(1e-12), Err(SnaError::DimensionMismatch(_))));
        let r = QuatMatrix::from_fn(2, 3, |i, j| q(i as f64, j as f64, 1.0, -1.0));
        assert_eq!(r.adjoint().adjoint(), r);
    }

    #[test]
    fn outer_product_is_hermitian() {
        let v = QuatVector::new(vec![q(0.5, 0.5, 0.5, 0.5), q(0.0, 0.6, 0.0, 0.8), q(1.0, 0.0, 0.0, 0.0)]);
        let o = v.outer();
        assert!(o.is_hermitian(1e-14).unwrap());
        assert!((o.trace().unwrap() - Quaternion::real(3.0)).norm() < 1e-14);
    }

    #[test]
    fn right_module_product_order() {
        // (A·x)_0 = A_00·x_0 with the matrix entry on the left: i·j = k, not j·i.
        let a = QuatMatrix::from_row_major(1, 1, vec![Quaternion::I]).unwrap();
        let x = QuatVector::new(vec![Quaternion::J]);
        assert_eq!(a.mat_vec(&x).unwrap()[0], Quaternion::K);
    }

    #[test]
    fn dimension_errors() {
        let a = QuatMatrix::zeros(2, 3);
        assert!(a.mat_vec(&QuatVector::zeros(2)).is_err());
        assert!(a.mat_mul(&QuatMatrix::zeros(2, 3)).is_err());
        assert!(a.trace().is_err());
        assert!(QuatMatrix::from_row_major(2, 2, vec![Quaternion::ONE; 3]).is_err());
        assert!(QuatMatrix::from_row_major(0, 0, vec![]).is_err());
    }

    #[test]
    fn json_shape() {
        let a = hermitian_2x2();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"rows":2,"cols":2,"entries":[[1.0,0.0,0.0,0.0],[0.0,0.0,1.0,0.0],[-0.0,-0.0,-1.0,-0.0],[1.0,0.0,0.0,0.0]]}"#
        );
        let back: QuatMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<QuatMatrix>(r#"{"rows":2,"cols":2,"entries":[[1,0,0,0]]}"#).is_err());
    }
}
