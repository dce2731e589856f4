use thiserror::Error;

pub type Result<T, E = SnaError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SnaError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("quaternion norm {norm} is not unit (tolerance 1e-6)")]
    NotUnit { norm: f64 },

    #[error("axis norm {norm} is not unit (tolerance 1e-9)")]
    NonUnitAxis { norm: f64 },

    #[error("matrix is not hermitian: {0}")]
    NotHermitian(String),

    #[error("invalid relative attitude matrix: {0}")]
    InvalidRelativeMatrix(String),

    #[error("invalid reference set: {0}")]
    InvalidReferences(String),

    #[error("power iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("power iteration hit a zero iterate (A·V = 0)")]
    ZeroIterate,

    #[error("eigen-oracle did not converge after {sweeps} Jacobi sweeps (off-diagonal norm {off:e})")]
    OracleConvergence { sweeps: usize, off: f64 },

    #[error("degenerate eigenvector: component {index} has norm {norm:e} before normalization")]
    DegenerateEigenvector { index: usize, norm: f64 },

    #[error("spectrum of chi(M) does not pair up: {0}")]
    SpectrumPairing(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("zero norm: {0}")]
    ZeroNorm(&'static str),

    #[error("unobservable rotation: gravity and magnetic field are parallel (angle {angle:e} rad)")]
    Unobservable { angle: f64 },

    #[error("ambiguous rotation: smallest singular values {s1:e} and {s2:e} are not separated")]
    Ambiguous { s1: f64, s2: f64 },

    #[error("relative attitude estimation failed for sensor pair ({i}, {j}): {source}")]
    PairFailure {
        i: usize,
        j: usize,
        #[source]
        source: Box<SnaError>,
    },

    #[error("missing measurements for sensors {0:?}")]
    MissingSensors(Vec<usize>),

    #[error("degenerate regression input: {0}")]
    DegenerateRegression(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SnaError {
    /// Process exit code: 2 for input validation failures, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            SnaError::Convergence { .. }
            | SnaError::ZeroIterate
            | SnaError::OracleConvergence { .. }
            | SnaError::DegenerateEigenvector { .. }
            | SnaError::SpectrumPairing(_)
            | SnaError::Ambiguous { .. } => 3,
            SnaError::PairFailure { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
