//! The `sna` command-line driver.
//!
//! Each subcommand has a library-callable `cmd_*` function working on
//! in-memory values; [`run`] adds file handling around them.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SnaError};
use crate::qmat::{quat_spectrum_via_chi, PowerIterationOptions};
use crate::quat::{Quaternion, UnitQuaternion};
use crate::relattitude::{build_o_from_measurements, read_measurements_csv, FieldMeasurement};
use crate::simulate::{monte_carlo_sweep, write_sweep_csv, RegressionSummary, SweepConfig, SweepResult};
use crate::sna::{
    attitude_error, bounds_report, build_relative_matrix, solve, AttitudeVector, BoundsReport, Reference,
    ReferenceSet, RelativeAttitudeMatrix, SolveReport,
};

#[derive(Debug, Parser)]
#[command(name = "sna", version, about = "Sensor-network attitude solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file for all sensor attitudes.
    Solve(SolveArgs),
    /// Build a problem file from field measurements (CSV).
    Estimate(EstimateArgs),
    /// Run a Monte-Carlo noise sweep.
    Simulate(SimulateArgs),
    /// Print the eigenvalues of a problem's relative attitude matrix.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Report JSON; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Ground-truth attitudes JSON; adds bounds and e(Q) to the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Seed of the power-iteration start vector.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Power-iteration residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Extra or replacement reference, `<index>=<w,x,y,z>`; repeatable.
    #[arg(long = "reference", value_parser = parse_reference)]
    pub references: Vec<Reference>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Measurement CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Problem JSON; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Reference sensor, `<index>=<w,x,y,z>`; repeatable. Defaults to sensor 0
    /// with the identity attitude.
    #[arg(long = "reference", value_parser = parse_reference)]
    pub references: Vec<Reference>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sweep configuration JSON; built-in defaults when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Sweep CSV. The regression summary goes next to it with the extension
    /// `.regression.json`.
    #[arg(long)]
    pub output: PathBuf,
    /// Overrides the configuration seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Problem JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Spectrum JSON; only the listing is printed when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// `<index>=<w,x,y,z>`.
pub fn parse_reference(s: &str) -> std::result::Result<Reference, String> {
    let (index, quat) = s
        .split_once('=')
        .ok_or_else(|| format!("expected <index>=<w,x,y,z>, got {s:?}"))?;
    let index: usize = index
        .trim()
        .parse()
        .map_err(|_| format!("invalid sensor index {index:?}"))?;
    let parts: Vec<f64> = quat
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("invalid component {p:?}")))
        .collect::<std::result::Result<_, _>>()?;
    let [w, x, y, z] = parts[..] else {
        return Err(format!("expected 4 components, got {}", parts.len()));
    };
    let attitude = UnitQuaternion::new(Quaternion::new(w, x, y, z)).map_err(|e| e.to_string())?;
    Ok(Reference { index, attitude })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub relative: RelativeAttitudeMatrix,
    #[serde(default)]
    pub references: ReferenceSet,
}

impl ProblemFile {
    pub fn new(relative: RelativeAttitudeMatrix, references: ReferenceSet) -> Self {
        Self { n: relative.n(), relative, references }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != self.relative.n() {
            return Err(SnaError::DimensionMismatch(format!(
                "problem declares n = {} but the matrix is {1}x{1}",
                self.n,
                self.relative.n()
            )));
        }
        if let Some(r) = self.references.iter().find(|r| r.index >= self.n) {
            return Err(SnaError::InvalidReferences(format!(
                "index {} out of range for {} sensors",
                r.index, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub attitudes: AttitudeVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    #[serde(flatten)]
    pub report: SolveReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bounds: Option<BoundsReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub e_q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// `λ₁ - λ₂`; 0 for a single sensor.
    pub eigengap: f64,
}

/// References on the command line replace those of the problem file with the
/// same index and are added otherwise.
pub fn merge_references(base: &ReferenceSet, extra: &[Reference]) -> Result<ReferenceSet> {
    let mut refs: Vec<Reference> = base
        .iter()
        .filter(|r| !extra.iter().any(|e| e.index == r.index))
        .copied()
        .collect();
    refs.extend_from_slice(extra);
    ReferenceSet::new(refs)
}

pub fn cmd_solve(
    problem: &ProblemFile,
    truth: Option<&AttitudeVector>,
    opts: &PowerIterationOptions,
) -> Result<SolveOutput> {
    problem.validate()?;
    let report = solve(&problem.relative, &problem.references, opts)?;
    let (bounds, e_q) = match truth {
        None => (None, None),
        Some(q) => {
            if q.len() != problem.n {
                return Err(SnaError::DimensionMismatch(format!(
                    "truth has {} attitudes, problem has {} sensors",
                    q.len(),
                    problem.n
                )));
            }
            let o = build_relative_matrix(q);
            let bounds = bounds_report(
                &problem.relative,
                &o,
                Some(&report.eigenvector),
                Some(&q.to_quat_vector()),
            )?;
            (Some(bounds), Some(attitude_error(&report.attitudes, q)?))
        }
    };
    Ok(SolveOutput { report, bounds, e_q })
}

pub fn cmd_estimate(measurements: &[FieldMeasurement], references: &[Reference]) -> Result<ProblemFile> {
    let relative = build_o_from_measurements(measurements)?;
    let refs = if references.is_empty() {
        ReferenceSet::single(0, UnitQuaternion::IDENTITY)
    } else {
        ReferenceSet::new(references.to_vec())?
    };
    let problem = ProblemFile::new(relative, refs);
    problem.validate()?;
    Ok(problem)
}

pub fn cmd_simulate(config: &SweepConfig) -> Result<SweepResult> {
    monte_carlo_sweep(config)
}

pub fn cmd_spectrum(problem: &ProblemFile) -> Result<SpectrumReport> {
    problem.validate()?;
    let eigenvalues = quat_spectrum_via_chi(&problem.relative)?;
    let eigengap = if eigenvalues.len() > 1 { eigenvalues[0] - eigenvalues[1] } else { 0.0 };
    Ok(SpectrumReport { eigenvalues, eigengap })
}

/// Eigenvalues as `5, 0, 0`: ten decimals, trailing zeros trimmed.
pub fn format_eigenvalues(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| {
            let s = format!("{v:.10}");
            let s = s.trim_end_matches('0').trim_end_matches('.');
            if s == "-0" { "0".to_string() } else { s.to_string() }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn summarize(out: &SolveOutput) -> String {
    let r = &out.report;
    let n = r.attitudes.len();
    let mut lines = vec![
        format!("sensors: {n}"),
        format!("lambda1: {} (lambda1/N = {})", r.lambda1, r.lambda1 / n as f64),
        format!("C1: {:e} (C1/N^2 = {:e})", r.c1_value, r.c1_value / (n * n) as f64),
        format!("power iterations: {}", r.iterations),
    ];
    match (r.gauge, r.c2_value) {
        (Some(s), Some(c2)) => lines.push(format!("gauge: {} (C2 = {c2:e})", s.quaternion())),
        _ => lines.push("gauge: not fixed (no references)".to_string()),
    }
    if let Some(e_q) = out.e_q {
        lines.push(format!("e(Q): {e_q:e}"));
    }
    if let Some(b) = &out.bounds {
        lines.push(format!("e(O): {:e}", b.e_o));
        lines.push(format!("weyl_ok: {}", b.weyl_ok));
        if let Some(dk) = b.dk_ok {
            lines.push(format!("dk_ok: {dk}"));
        }
    }
    lines.join("\n")
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| SnaError::Io { path: path.display().to_string(), source })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| SnaError::Io { path: path.display().to_string(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(BufReader::new(open(path)?)).map_err(|e| SnaError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| SnaError::Parse {
        path: path.map_or("<stdout>".into(), |p| p.display().to_string()),
        message: e.to_string(),
    })?;
    write_text(path, &(text + "\n"))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let label = path.map_or("<stdout>".into(), |p| p.display().to_string());
    let io = |source| SnaError::Io { path: label.clone(), source };
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes()).map_err(io)?;
            w.flush().map_err(io)
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

pub fn load_problem(path: &Path) -> Result<ProblemFile> {
    let problem: ProblemFile = read_json(path)?;
    problem.validate()?;
    Ok(problem)
}

/// `sweep.csv` → `sweep.regression.json`.
pub fn regression_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("regression.json")
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let mut problem = load_problem(&args.input)?;
            problem.references = merge_references(&problem.references, &args.references)?;
            let truth = match &args.truth {
                Some(p) => Some(read_json::<TruthFile>(p)?.attitudes),
                None => None,
            };
            if !(args.tol > 0.0 && args.tol.is_finite()) {
                return Err(SnaError::Config(format!("--tol must be positive, got {}", args.tol)));
            }
            let opts = PowerIterationOptions { residual_tol: args.tol, seed: args.seed, ..Default::default() };
            let out = cmd_solve(&problem, truth.as_ref(), &opts)?;
            write_json(args.output.as_deref(), &out)?;
            eprintln!("{}", summarize(&out));
        }
        Command::Estimate(args) => {
            let label = args.input.display().to_string();
            let measurements = read_measurements_csv(open(&args.input)?, &label)?;
            let problem = cmd_estimate(&measurements, &args.references)?;
            write_json(args.output.as_deref(), &problem)?;
            eprintln!("estimated {0}x{0} relative attitude matrix", problem.n);
        }
        Command::Simulate(args) => {
            let mut config = match &args.input {
                Some(p) => read_json::<SweepConfig>(p)?,
                None => SweepConfig::default(),
            };
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let result = cmd_simulate(&config)?;
            let label = args.output.display().to_string();
            write_sweep_csv(create(&args.output)?, &result).map_err(|e| SnaError::Io {
                path: label,
                source: std::io::Error::other(e),
            })?;
            let summary = RegressionSummary::from(&result);
            write_json(Some(&regression_path(&args.output)), &summary)?;
            match summary.slope {
                Some(slope) => eprintln!(
                    "{} rows, {} failures, slope {slope}, r2 {}",
                    summary.rows,
                    summary.failures,
                    summary.r2.unwrap_or(f64::NAN)
                ),
                None => eprintln!("{} rows, {} failures, slope undefined", summary.rows, summary.failures),
            }
        }
        Command::Spectrum(args) => {
            let problem = load_problem(&args.input)?;
            let report = cmd_spectrum(&problem)?;
            if let Some(p) = &args.output {
                write_json(Some(p), &report)?;
            }
            write_text(
                None,
                &format!(
                    "eigenvalues: {}\neigengap: {}\n",
                    format_eigenvalues(&report.eigenvalues),
                    format_eigenvalues(&[report.eigengap])
                ),
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_flag() {
        let r = parse_reference("3=1,0,0,0").unwrap();
        assert_eq!(r.index, 3);
        assert_eq!(r.attitude, UnitQuaternion::IDENTITY);
        assert!(parse_reference("3").is_err());
        assert!(parse_reference("x=1,0,0,0").is_err());
        assert!(parse_reference("0=1,0,0").is_err());
        assert!(parse_reference("0=2,0,0,0").is_err());
    }

    #[test]
    fn merging_references() {
        let base = ReferenceSet::single(0, UnitQuaternion::IDENTITY);
        let k = UnitQuaternion::new(Quaternion::K).unwrap();
        let merged = merge_references(&base, &[Reference { index: 0, attitude: k }]).unwrap();
        assert_eq!(merged, ReferenceSet::single(0, k));
        let merged = merge_references(&base, &[Reference { index: 2, attitude: k }]).unwrap();
        assert_eq!(merged.indices(), vec![0, 2]);
    }

    #[test]
    fn eigenvalue_listing() {
        assert_eq!(format_eigenvalues(&[5.0, 1e-15, -2e-14, 0.0]), "5, 0, 0, 0");
        assert_eq!(format_eigenvalues(&[4.25, -0.5]), "4.25, -0.5");
    }

    #[test]
    fn problem_dimension_is_checked() {
        let q = AttitudeVector::new(vec![UnitQuaternion::IDENTITY; 3]);
        let mut p = ProblemFile::new(build_relative_matrix(&q), ReferenceSet::empty());
        assert!(p.validate().is_ok());
        p.n = 4;
        assert!(matches!(cmd_solve(&p, None, &Default::default()), Err(SnaError::DimensionMismatch(_))));
    }
}
