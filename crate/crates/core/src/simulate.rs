//! Synthetic networks, relative-attitude noise and Monte-Carlo sweeps.
//!
//! Every trial of a sweep draws its own generator from the master seed and
//! the trial index, so the rows do not depend on scheduling.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SnaError};
use crate::qmat::PowerIterationOptions;
use crate::quat::{vec3_norm, vec3_scale, Quaternion, UnitQuaternion, Vec3};
use crate::sna::{
    attitude_error, bounds_report, build_relative_matrix, solve, AttitudeVector, ReferenceSet,
    RelativeAttitudeMatrix,
};

/// Rows with `e_O` in this range enter [`SweepResult::mean_ratio`].
pub const RATIO_WINDOW: (f64, f64) = (0.01, 0.10);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Standard deviation of the perturbation angle, radians.
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(SnaError::Config(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { sigma, seed })
    }
}

pub fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if let Some(u) = q.normalized() {
            return u.canonicalize_sign();
        }
    }
}

pub fn random_attitude_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AttitudeVector {
    AttitudeVector::new((0..n).map(|_| random_unit_quaternion(rng)).collect())
}

/// Uniform direction on the unit sphere.
pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v: Vec3 = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = vec3_norm(v);
        if n > 1e-12 {
            return vec3_scale(v, 1.0 / n);
        }
    }
}

/// `Ô_ij = O_ij·δ_ij` for `i < j`, where `δ_ij` turns about a uniform axis by
/// `|Normal(0, σ)|`; `Ô_ji = conj(Ô_ij)` and the diagonal stays 1.
pub fn perturb_relative_matrix(o: &RelativeAttitudeMatrix, noise: &NoiseModel) -> RelativeAttitudeMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    perturb_with_rng(o, noise.sigma, &mut rng)
}

pub fn perturb_with_rng<R: Rng + ?Sized>(o: &RelativeAttitudeMatrix, sigma: f64, rng: &mut R) -> RelativeAttitudeMatrix {
    let n = o.n();
    let mut m = o.matrix().clone();
    if sigma == 0.0 {
        return o.clone();
    }
    let angle = Normal::new(0.0, sigma).expect("sigma validated as finite and non-negative");
    for i in 0..n {
        for j in i + 1..n {
            let theta = angle.sample(rng).abs();
            let delta = UnitQuaternion::from_axis_angle_raw(random_axis(rng), theta)
                .expect("random_axis returns unit vectors");
            let entry = (m[(i, j)] * delta.quaternion())
                .normalized()
                .expect("product of unit quaternions")
                .quaternion();
            m[(i, j)] = entry;
            m[(j, i)] = entry.conj();
        }
    }
    RelativeAttitudeMatrix::new_unchecked(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_sensors: usize,
    pub ref_indices: Vec<usize>,
    /// Perturbation angle standard deviations, radians, ascending.
    pub sigma_grid: Vec<f64>,
    pub trials_per_sigma: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SweepConfig {
    /// 20 sensors, sensor 0 as reference, σ from 0.01 to 0.18 rad, 30 trials
    /// each. The grid keeps the measured `e(O)` within 10%.
    fn default() -> Self {
        Self {
            n_sensors: 20,
            ref_indices: vec![0],
            sigma_grid: (1..=18).map(|k| k as f64 * 0.01).collect(),
            trials_per_sigma: 30,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(SnaError::Config(m));
        if self.n_sensors < 2 {
            return fail(format!("n_sensors must be >= 2, got {}", self.n_sensors));
        }
        if self.ref_indices.is_empty() {
            return fail("ref_indices must not be empty".into());
        }
        if let Some(&bad) = self.ref_indices.iter().find(|&&r| r >= self.n_sensors) {
            return fail(format!("reference index {bad} out of range for {} sensors", self.n_sensors));
        }
        if self.sigma_grid.is_empty() {
            return fail("sigma_grid must not be empty".into());
        }
        if self.sigma_grid.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return fail("sigma_grid entries must be finite and >= 0".into());
        }
        if self.sigma_grid.windows(2).any(|w| w[1] < w[0]) {
            return fail("sigma_grid must be ascending".into());
        }
        if self.trials_per_sigma == 0 {
            return fail("trials_per_sigma must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub e_o: f64,
    pub e_q: f64,
    pub c1_over_n2: f64,
    pub lambda1_over_n: f64,
    pub weyl_ok: bool,
    /// Absent when `e_O ≥ 1/2`.
    pub dk_ok: Option<bool>,
    /// Set when the solver failed; the numeric fields are then NaN.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub n_sensors: usize,
    pub rows: Vec<SweepRow>,
    /// Least-squares line of `e_Q` on `e_O`; `None` when every `e_O` is equal.
    pub regression: Option<Regression>,
    pub failures: usize,
    /// Mean of `e_Q/e_O` over rows with `e_O` in [`RATIO_WINDOW`].
    pub mean_ratio: Option<f64>,
}

/// Ordinary least squares `y ≈ slope·x + intercept`. A constant `y` is a
/// perfect fit, reported with `r² = 1`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    if xs.len() != ys.len() {
        return Err(SnaError::DimensionMismatch(format!("{} xs against {} ys", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(SnaError::DegenerateRegression("fewer than two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SnaError::DegenerateRegression("all x values are equal"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(Regression { slope, intercept, r2 })
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial(config: &SweepConfig, sigma: f64, trial: u64) -> SweepRow {
    let mut rng = trial_rng(config.seed, trial);
    let q = random_attitude_vector(config.n_sensors, &mut rng);
    let o = build_relative_matrix(&q);
    let o_hat = perturb_with_rng(&o, sigma, &mut rng);
    match evaluate(&q, &o, &o_hat, &config.ref_indices) {
        Ok(row) => SweepRow { sigma, ..row },
        Err(e) => SweepRow {
            sigma,
            e_o: f64::NAN,
            e_q: f64::NAN,
            c1_over_n2: f64::NAN,
            lambda1_over_n: f64::NAN,
            weyl_ok: false,
            dk_ok: None,
            failure: Some(e.to_string()),
        },
    }
}

fn evaluate(
    q: &AttitudeVector,
    o: &RelativeAttitudeMatrix,
    o_hat: &RelativeAttitudeMatrix,
    ref_indices: &[usize],
) -> Result<SweepRow> {
    let refs = ReferenceSet::from_truth(q, ref_indices)?;
    let report = solve(o_hat, &refs, &PowerIterationOptions::default())?;
    let bounds = bounds_report(o_hat, o, Some(&report.eigenvector), Some(&q.to_quat_vector()))?;
    let n2 = (q.len() * q.len()) as f64;
    Ok(SweepRow {
        sigma: 0.0,
        e_o: bounds.e_o,
        e_q: attitude_error(&report.attitudes, q)?,
        c1_over_n2: report.c1_value / n2,
        lambda1_over_n: report.lambda1 / q.len() as f64,
        weyl_ok: bounds.weyl_ok,
        dk_ok: bounds.dk_ok,
        failure: None,
    })
}

pub fn monte_carlo_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let trials = config.trials_per_sigma;
    let total = config.sigma_grid.len() * trials;
    let rows: Vec<SweepRow> = (0..total)
        .into_par_iter()
        .map(|k| run_trial(config, config.sigma_grid[k / trials], k as u64))
        .collect();

    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.failure.is_none()).collect();
    let xs: Vec<f64> = ok.iter().map(|r| r.e_o).collect();
    let ys: Vec<f64> = ok.iter().map(|r| r.e_q).collect();
    let regression = linear_regression(&xs, &ys).ok();
    let ratios: Vec<f64> = ok
        .iter()
        .filter(|r| r.e_o >= RATIO_WINDOW.0 && r.e_o <= RATIO_WINDOW.1)
        .map(|r| r.e_q / r.e_o)
        .collect();
    let mean_ratio = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);

    Ok(SweepResult {
        n_sensors: config.n_sensors,
        failures: rows.len() - ok.len(),
        rows,
        regression,
        mean_ratio,
    })
}

/// Writes `sigma,e_O_pct,e_Q_pct,c1_pct,lambda1_over_N,weyl_ok,dk_ok`.
/// Failed trials keep their `sigma` and leave the other fields empty.
pub fn write_sweep_csv<W: Write>(writer: W, result: &SweepResult) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["sigma", "e_O_pct", "e_Q_pct", "c1_pct", "lambda1_over_N", "weyl_ok", "dk_ok"])?;
    for r in &result.rows {
        let record: Vec<String> = if r.failure.is_some() {
            let mut v = vec![r.sigma.to_string()];
            v.resize(7, String::new());
            v
        } else {
            vec![
                r.sigma.to_string(),
                (100.0 * r.e_o).to_string(),
                (100.0 * r.e_q).to_string(),
                (100.0 * r.c1_over_n2).to_string(),
                r.lambda1_over_n.to_string(),
                r.weyl_ok.to_string(),
                r.dk_ok.map_or(String::new(), |b| b.to_string()),
            ]
        };
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub n_sensors: usize,
    pub rows: usize,
    pub failures: usize,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r2: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub note: Option<String>,
}

impl From<&SweepResult> for RegressionSummary {
    fn from(r: &SweepResult) -> Self {
        Self {
            n_sensors: r.n_sensors,
            rows: r.rows.len(),
            failures: r.failures,
            slope: r.regression.map(|g| g.slope),
            intercept: r.regression.map(|g| g.intercept),
            r2: r.regression.map(|g| g.r2),
            mean_ratio: r.mean_ratio,
            note: r
                .regression
                .is_none()
                .then(|| "slope undefined: measured e_O does not vary across rows".to_string()),
        }
    }
}

/// Nine sensors on a polyhedron-like mount with world fields `g₀`, `h₀`.
///
/// Sensor 0 is the identity. Sensors 1-4 are tilted by 45° and sensors 5-8 by
/// 90°, about horizontal axes at azimuths 0°, 90°, 180° and 270°.
pub fn polyhedron_fixture() -> (AttitudeVector, Vec3, Vec3) {
    let mut q = vec![UnitQuaternion::IDENTITY];
    for tilt in [45.0_f64, 90.0] {
        for azimuth in [0.0_f64, 90.0, 180.0, 270.0] {
            let a = azimuth.to_radians();
            let axis = [-a.sin(), a.cos(), 0.0];
            q.push(UnitQuaternion::from_axis_angle(axis, tilt.to_radians()).expect("unit axis"));
        }
    }
    (AttitudeVector::new(q), [0.0, 0.0, -9.81], [20.0, 0.0, -43.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::quat_spectrum_via_chi;
    use crate::sna::relative_error;

    #[test]
    fn random_quaternions_are_unit_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let qa = random_unit_quaternion(&mut a);
            assert!((qa.quaternion().norm() - 1.0).abs() < 1e-12);
            assert_eq!(qa, random_unit_quaternion(&mut b));
        }
    }

    #[test]
    fn rotation_matrices_average_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut mean = [[0.0; 3]; 3];
        let draws = 100_000;
        for _ in 0..draws {
            let r = random_unit_quaternion(&mut rng).to_rotation_matrix();
            for (row, r_row) in mean.iter_mut().zip(r.0) {
                for (m, v) in row.iter_mut().zip(r_row) {
                    *m += v / draws as f64;
                }
            }
        }
        assert!(mean.iter().flatten().all(|m| m.abs() <= 0.02), "{mean:?}");
    }

    #[test]
    fn attitude_vector_components_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(random_attitude_vector(1, &mut rng).len(), 1);
        assert_eq!(random_attitude_vector(10, &mut rng).len(), 10);
        let draws = 10_000;
        let samples: Vec<(f64, f64)> = (0..draws)
            .map(|_| {
                let v = random_attitude_vector(2, &mut rng);
                (v.get(0).quaternion().x, v.get(1).quaternion().x)
            })
            .collect();
        let n = draws as f64;
        let (ma, mb) = samples.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
        let cov: f64 = samples.iter().map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
        let va: f64 = samples.iter().map(|(x, _)| (x - ma).powi(2)).sum::<f64>() / n;
        let vb: f64 = samples.iter().map(|(_, y)| (y - mb).powi(2)).sum::<f64>() / n;
        assert!((cov / (va * vb).sqrt()).abs() <= 0.05);
    }

    #[test]
    fn zero_noise_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let o = build_relative_matrix(&random_attitude_vector(6, &mut rng));
        assert_eq!(perturb_relative_matrix(&o, &NoiseModel::new(0.0, 9).unwrap()), o);
        assert!(NoiseModel::new(-0.1, 0).is_err());
    }

    #[test]
    fn perturbed_matrix_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let o = build_relative_matrix(&random_attitude_vector(8, &mut rng));
        for sigma in [0.01, 0.3, 2.0] {
            let o_hat = perturb_relative_matrix(&o, &NoiseModel::new(sigma, 5).unwrap());
            assert!(RelativeAttitudeMatrix::new(o_hat.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn error_grows_with_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let o = build_relative_matrix(&random_attitude_vector(10, &mut rng));
        let grid: Vec<f64> = (1..=20).map(|k| 0.02 * k as f64).collect();
        let means: Vec<f64> = grid
            .iter()
            .map(|&sigma| {
                (0..20)
                    .map(|_| {
                        let o_hat = perturb_with_rng(&o, sigma, &mut rng);
                        relative_error(o_hat.matrix(), o.matrix()).unwrap()
                    })
                    .sum::<f64>()
                    / 20.0
            })
            .collect();
        // Spearman rank correlation between sigma (already ranked) and mean e(O).
        let mut order: Vec<usize> = (0..means.len()).collect();
        order.sort_by(|&a, &b| means[a].total_cmp(&means[b]));
        let mut rank = vec![0.0; means.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as f64;
        }
        let n = means.len() as f64;
        let d2: f64 = rank.iter().enumerate().map(|(i, r)| (i as f64 - r).powi(2)).sum();
        let rho = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
        assert!(rho > 0.95, "rho = {rho}");
    }

    #[test]
    fn regression_examples() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let exact = linear_regression(&xs, &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((exact.slope - 2.0).abs() < 1e-12 && (exact.intercept - 1.0).abs() < 1e-12);
        assert!((exact.r2 - 1.0).abs() < 1e-12);
        assert_eq!(linear_regression(&xs, &[4.0; 4]).unwrap().slope, 0.0);
        assert!(linear_regression(&[1.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(linear_regression(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn regression_recovers_noisy_slope() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let noise = Normal::new(0.0, 0.5).unwrap();
        let xs: Vec<f64> = (0..200).map(|k| k as f64 * 0.05).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 * x - 2.0 + noise.sample(&mut rng)).collect();
        let fit = linear_regression(&xs, &ys).unwrap();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let resid: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - fit.slope * x - fit.intercept).powi(2))
            .sum();
        let se = (resid / (n - 2.0) / sxx).sqrt();
        assert!((fit.slope - 1.5).abs() <= 3.0 * se);
    }

    #[test]
    fn zero_sigma_sweep() {
        let config = SweepConfig {
            n_sensors: 6,
            ref_indices: vec![0],
            sigma_grid: vec![0.0],
            trials_per_sigma: 4,
            seed: 1,
        };
        let result = monte_carlo_sweep(&config).unwrap();
        assert_eq!(result.rows.len(), 4);
        assert!(result.regression.is_none());
        for row in &result.rows {
            assert_eq!(row.e_o, 0.0);
            assert!(row.e_q <= 1e-9);
            assert!(row.c1_over_n2 <= 1e-12);
        }
        assert!(RegressionSummary::from(&result).note.is_some());
    }

    #[test]
    fn sweep_is_deterministic_and_bounded() {
        let config = SweepConfig {
            n_sensors: 8,
            ref_indices: vec![0, 3],
            sigma_grid: vec![0.05, 0.2, 0.6],
            trials_per_sigma: 5,
            seed: 11,
        };
        let a = monte_carlo_sweep(&config).unwrap();
        let b = monte_carlo_sweep(&config).unwrap();
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        write_sweep_csv(&mut ca, &a).unwrap();
        write_sweep_csv(&mut cb, &b).unwrap();
        assert_eq!(ca, cb);
        assert_eq!(a.rows.len(), 15);
        assert_eq!(a.failures, 0);
        for row in &a.rows {
            assert!(row.weyl_ok);
            assert_ne!(row.dk_ok, Some(false));
        }
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::default().validate().is_ok());
        let bad = [
            SweepConfig { n_sensors: 1, ..SweepConfig::default() },
            SweepConfig { ref_indices: vec![], ..SweepConfig::default() },
            SweepConfig { ref_indices: vec![20], ..SweepConfig::default() },
            SweepConfig { sigma_grid: vec![0.2, 0.1], ..SweepConfig::default() },
            SweepConfig { sigma_grid: vec![-0.1], ..SweepConfig::default() },
            SweepConfig { trials_per_sigma: 0, ..SweepConfig::default() },
        ];
        for c in bad {
            assert!(matches!(monte_carlo_sweep(&c), Err(SnaError::Config(_))));
        }
    }

    #[test]
    fn fixture_shape() {
        let (q, g0, h0) = polyhedron_fixture();
        assert_eq!(q.len(), 9);
        for (i, a) in q.as_slice().iter().enumerate() {
            assert!((a.quaternion().norm() - 1.0).abs() < 1e-12);
            for b in &q.as_slice()[i + 1..] {
                assert!(a.rotation_distance(*b) > 0.1);
            }
        }
        assert!(crate::quat::vec3_angle(g0, h0) > 0.1);
        let s = quat_spectrum_via_chi(&build_relative_matrix(&q)).unwrap();
        assert!((s[0] - 9.0).abs() < 1e-9 && s[1..].iter().all(|x| x.abs() < 1e-9));
    }
}
