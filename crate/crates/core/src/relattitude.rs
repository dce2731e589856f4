//! Relative attitudes from two shared reference fields.
//!
//! Each sensor measures gravity `g` and the magnetic field `h` in its own
//! frame. Sensor coordinates relate to world coordinates through
//! `[u]_Ri = R(q_i)·[u]_R0`, so the rotation taking frame-`j` coordinates to
//! frame-`i` coordinates is `q_i·conj(q_j) = O_ij`.
//!
//! A rotation `q` with `R(q)·u = v` satisfies `q·ũ - ṽ·q = 0` for the pure
//! quaternions `ũ`, `ṽ`. Stacking that 4×4 linear constraint for `g` and `h`
//! (each normalized to unit length) gives an 8×4 system whose null vector is
//! `q`; it is read off as the right singular vector of the smallest singular
//! value, through the eigen-decomposition of the 4×4 normal matrix.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SnaError};
use crate::qmat::{hermitian_eigen_oracle, ComplexMatrix, QuatMatrix};
use crate::quat::{vec3_angle, vec3_norm, vec3_scale, Quaternion, UnitQuaternion, Vec3};
use crate::sna::{AttitudeVector, RelativeAttitudeMatrix};

/// Minimum angle between `g` and `h` (and between `g` and `-h`).
pub const MIN_FIELD_ANGLE: f64 = 1e-6;
/// Minimum separation of the two smallest singular values.
pub const MIN_SINGULAR_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldMeasurement {
    pub sensor: usize,
    pub g: Vec3,
    pub h: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries {
    pub sensor: usize,
    /// Time-ordered `(g, h)` pairs.
    pub samples: Vec<(Vec3, Vec3)>,
    /// Sampling rate in Hz.
    pub rate: f64,
}

pub fn average_static_samples(series: &SampleSeries) -> Result<FieldMeasurement> {
    if series.samples.is_empty() {
        return Err(SnaError::Empty("sample series"));
    }
    let count = series.samples.len() as f64;
    let mut g = [0.0; 3];
    let mut h = [0.0; 3];
    for (gs, hs) in &series.samples {
        for k in 0..3 {
            g[k] += gs[k];
            h[k] += hs[k];
        }
    }
    Ok(FieldMeasurement {
        sensor: series.sensor,
        g: vec3_scale(g, 1.0 / count),
        h: vec3_scale(h, 1.0 / count),
    })
}

fn unit(v: Vec3, what: &'static str) -> Result<Vec3> {
    let n = vec3_norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(SnaError::ZeroNorm(what));
    }
    Ok(vec3_scale(v, 1.0 / n))
}

fn check_observable(g: Vec3, h: Vec3) -> Result<()> {
    let angle = vec3_angle(g, h);
    let separation = angle.min(std::f64::consts::PI - angle);
    if separation < MIN_FIELD_ANGLE {
        return Err(SnaError::Unobservable { angle });
    }
    Ok(())
}

/// Rotation `q` with `R(q)·g_i ≈ g_j` and `R(q)·h_i ≈ h_j`, sign-canonicalized.
pub fn svdq(m_i: &FieldMeasurement, m_j: &FieldMeasurement) -> Result<UnitQuaternion> {
    let gi = unit(m_i.g, "gravity measurement")?;
    let hi = unit(m_i.h, "magnetic measurement")?;
    let gj = unit(m_j.g, "gravity measurement")?;
    let hj = unit(m_j.h, "magnetic measurement")?;
    check_observable(gi, hi)?;
    check_observable(gj, hj)?;

    let rows: Vec<[f64; 4]> = [(gi, gj), (hi, hj)]
        .into_iter()
        .flat_map(|(u, v)| {
            let right = Quaternion::pure(u).right_matrix();
            let left = Quaternion::pure(v).left_matrix();
            (0..4).map(move |r| std::array::from_fn(|c| right[r][c] - left[r][c]))
        })
        .collect();

    let normal = ComplexMatrix::from_fn(4, 4, |a, b| {
        Complex64::new(rows.iter().map(|row| row[a] * row[b]).sum(), 0.0)
    });
    let eig = hermitian_eigen_oracle(&normal)?;
    let s_min = eig.values[3].max(0.0).sqrt();
    let s_next = eig.values[2].max(0.0).sqrt();
    if s_next - s_min <= MIN_SINGULAR_GAP {
        return Err(SnaError::Ambiguous { s1: s_min, s2: s_next });
    }

    let col = eig.vectors.column(3);
    // Real input keeps the eigenvector real up to a global phase.
    let pivot = col
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    let q: [f64; 4] = std::array::from_fn(|k| (col[k] * phase).re);
    let q = Quaternion::from(q)
        .normalized()
        .ok_or(SnaError::ZeroNorm("singular vector"))?;
    Ok(q.canonicalize_sign())
}

/// Fields seen by each sensor when the world-frame fields are `g0`, `h0`.
pub fn synthesize_measurements(q: &AttitudeVector, g0: Vec3, h0: Vec3) -> Vec<FieldMeasurement> {
    q.as_slice()
        .iter()
        .enumerate()
        .map(|(sensor, qi)| FieldMeasurement {
            sensor,
            g: qi.rotate_vector(g0),
            h: qi.rotate_vector(h0),
        })
        .collect()
}

/// Relative attitude matrix from one measurement per sensor.
///
/// Every unordered pair is estimated once. Each estimate is only defined up
/// to sign, and independent sign choices would break the rank-one structure
/// `O = Q·Q*`, so signs are made consistent through sensor 0: row 0 keeps the
/// canonical sign and `O_ij` is flipped when it disagrees with
/// `conj(O_0i)·O_0j`.
pub fn build_o_from_measurements(measurements: &[FieldMeasurement]) -> Result<RelativeAttitudeMatrix> {
    let ordered = order_by_sensor(measurements)?;
    let n = ordered.len();

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let estimates = pairs
        .par_iter()
        .map(|&(i, j)| {
            // Maps frame-j coordinates to frame-i coordinates.
            svdq(ordered[j], ordered[i])
                .map(UnitQuaternion::quaternion)
                .map_err(|e| SnaError::PairFailure { i, j, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut m = QuatMatrix::identity(n);
    for (&(i, j), &q) in pairs.iter().zip(&estimates) {
        m[(i, j)] = q;
    }
    for i in 1..n {
        for j in i + 1..n {
            let via_zero = m[(0, i)].conj() * m[(0, j)];
            if m[(i, j)].dot(via_zero) < 0.0 {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    Ok(RelativeAttitudeMatrix::new_unchecked(m))
}

fn order_by_sensor(measurements: &[FieldMeasurement]) -> Result<Vec<&FieldMeasurement>> {
    if measurements.is_empty() {
        return Err(SnaError::Empty("measurements"));
    }
    let mut by_sensor: BTreeMap<usize, &FieldMeasurement> = BTreeMap::new();
    for m in measurements {
        if by_sensor.insert(m.sensor, m).is_some() {
            return Err(SnaError::Config(format!(
                "more than one measurement for sensor {}",
                m.sensor
            )));
        }
    }
    let n = by_sensor.keys().next_back().map_or(0, |k| k + 1);
    let missing: Vec<usize> = (0..n).filter(|k| !by_sensor.contains_key(k)).collect();
    if !missing.is_empty() {
        return Err(SnaError::MissingSensors(missing));
    }
    Ok(by_sensor.into_values().collect())
}

/// Reads `sensor,gx,gy,gz,hx,hy,hz` (averaged) or `sensor,t,gx,gy,gz,hx,hy,hz`
/// (raw series) and returns one averaged measurement per sensor, ordered by
/// sensor index.
pub fn read_measurements_csv<R: Read>(reader: R, source: &str) -> Result<Vec<FieldMeasurement>> {
    let parse_err = |message: String| SnaError::Parse {
        path: source.to_string(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let raw = match names.as_slice() {
        ["sensor", "gx", "gy", "gz", "hx", "hy", "hz"] => false,
        ["sensor", "t", "gx", "gy", "gz", "hx", "hy", "hz"] => true,
        _ => {
            return Err(parse_err(format!(
                "unexpected header {names:?}; expected sensor,gx,gy,gz,hx,hy,hz or sensor,t,gx,gy,gz,hx,hy,hz"
            )))
        }
    };
    let offset = if raw { 2 } else { 1 };

    let mut series: BTreeMap<usize, Vec<(Vec3, Vec3)>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| -> Result<f64> {
            let text = record.get(k).unwrap_or("");
            text.parse::<f64>().map_err(|_| {
                parse_err(format!("line {line}, field `{}`: cannot parse {text:?}", &headers[k]))
            })
        };
        let sensor_text = record.get(0).unwrap_or("");
        let sensor: usize = sensor_text.parse().map_err(|_| {
            parse_err(format!("line {line}, field `sensor`: cannot parse {sensor_text:?}"))
        })?;
        if raw {
            field(1)?;
        }
        let g = [field(offset)?, field(offset + 1)?, field(offset + 2)?];
        let h = [field(offset + 3)?, field(offset + 4)?, field(offset + 5)?];
        series.entry(sensor).or_default().push((g, h));
    }

    let n = series.keys().next_back().map_or(0, |k| k + 1);
    let missing: Vec<usize> = (0..n).filter(|k| !series.contains_key(k)).collect();
    if !missing.is_empty() {
        return Err(SnaError::MissingSensors(missing));
    }
    if series.is_empty() {
        return Err(SnaError::Empty("measurement file"));
    }
    series
        .into_iter()
        .map(|(sensor, samples)| {
            average_static_samples(&SampleSeries {
                sensor,
                samples,
                rate: 0.0,
            })
        })
        .collect()
}

/// Writes the averaged form `sensor,gx,gy,gz,hx,hy,hz`.
pub fn write_measurements_csv<W: Write>(writer: W, measurements: &[FieldMeasurement]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["sensor", "gx", "gy", "gz", "hx", "hy", "hz"])?;
    for m in measurements {
        let mut row = vec![m.sensor.to_string()];
        row.extend(m.g.iter().chain(&m.h).map(|v| v.to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
