#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sna_core::qmat::{QuatMatrix, QuatVector};
use sna_core::simulate::random_unit_quaternion;
use sna_core::{Quaternion, UnitQuaternion};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_quaternion<R: Rng>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> QuatMatrix {
    QuatMatrix::from_fn(rows, cols, |_, _| random_quaternion(rng))
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> QuatVector {
    (0..n).map(|_| random_quaternion(rng)).collect()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> QuatMatrix {
    let mut m = QuatMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Quaternion::real(rng.random_range(-1.0..1.0));
        for j in i + 1..n {
            let q = random_quaternion(rng);
            m[(i, j)] = q;
            m[(j, i)] = q.conj();
        }
    }
    m
}

/// Hermitian matrix with a planted dominant direction: `H + α·w·w*`.
pub fn spiked_hermitian<R: Rng>(rng: &mut R, n: usize, alpha: f64) -> QuatMatrix {
    let h = random_hermitian(rng, n);
    let w = random_vector(rng, n);
    let w = w.scale(1.0 / w.norm());
    h.add(&w.outer().scale(alpha)).unwrap()
}

/// Complex representation built independently of the library, using the
/// textbook layout `q = α + β·j ↦ [[α, β], [-conj(β), conj(α)]]` with
/// `α = w + x·i`, `β = y + z·i`. It differs from the library's layout by a
/// unitary similarity, so norms and spectra agree.
pub fn chi_oracle(m: &QuatMatrix) -> DMatrix<Complex<f64>> {
    let (r, c) = (m.rows(), m.cols());
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let q = m[(i, j)];
            let alpha = Complex::new(q.w, q.x);
            let beta = Complex::new(q.y, q.z);
            out[(i, j)] = alpha;
            out[(i, c + j)] = beta;
            out[(r + i, j)] = -beta.conj();
            out[(r + i, c + j)] = alpha.conj();
        }
    }
    out
}

/// Eigenvalues of a hermitian complex matrix, descending.
pub fn hermitian_eigenvalues(h: DMatrix<Complex<f64>>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Spectral norm of a 3×3 real matrix.
pub fn spectral_norm3(m: Matrix3<f64>) -> f64 {
    m.svd(false, false).singular_values.max()
}

pub fn rotation_to_nalgebra(q: UnitQuaternion) -> Matrix3<f64> {
    let r = q.to_rotation_matrix().0;
    Matrix3::from_fn(|i, j| r[i][j])
}

/// Rotation matrix through nalgebra's own quaternion type.
pub fn nalgebra_rotation(q: UnitQuaternion) -> Matrix3<f64> {
    let [w, x, y, z] = q.quaternion().to_array();
    nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(w, x, y, z))
        .to_rotation_matrix()
        .into_inner()
}

pub fn random_unit<R: Rng>(rng: &mut R) -> UnitQuaternion {
    random_unit_quaternion(rng)
}

/// `min_s ‖a·s - b‖ / ‖b‖` over unit `s`.
pub fn gauge_distance(a: &QuatVector, b: &QuatVector) -> f64 {
    let s = a.inner(b).normalized().map_or(Quaternion::ONE, |u| u.quaternion());
    a.mul_right(s).sub(b).norm() / b.norm()
}
