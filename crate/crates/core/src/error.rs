use thiserror::Error;

/// Failure modes of the library. Every variant is a precondition violation,
/// a numerical abort, or an I/O problem; the CLI maps them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("dyadic index {k} outside resolved range [{min}, {max}]")]
    DyadicOutOfRange { k: i32, min: i32, max: i32 },
    #[error("multiplier undefined at xi = 0 but zero mode has magnitude {0:.3e}")]
    SingularMultiplier(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bilinear sum needs {required} symbol evaluations, budget is {budget}; {hint}")]
    BudgetExceeded { required: u64, budget: u64, hint: String },
    #[error("|omega_r| = {value:.3e} below floor {floor:.1e} at p = {p:?}, q = {q:?}: mask defect")]
    ResonanceGuard { value: f64, floor: f64, p: [f64; 3], q: [f64; 3] },
    #[error("XL mask is empty: need k_max = {k_max} > log2(alpha) + 4 = {threshold:.3}")]
    EmptyXlMask { k_max: i32, threshold: f64 },
    #[error("quadrature resolves degree {available}, content needs {required}")]
    QuadratureDegree { required: usize, available: usize },
    #[error("out-of-band norm {relative:.3e} exceeds tolerance {tolerance:.1e}")]
    OutOfBand { relative: f64, tolerance: f64 },
    #[error("frame certificate {best:.4} above cap {cap:.4} after {attempts} attempts")]
    CertificateCap { cap: f64, best: f64, attempts: usize },
    #[error("bisection bracket failure: {0}")]
    Bracket(String),
    #[error("numerical abort at step {step} (t = {time:.6}): {reason}")]
    NumericalAbort { step: usize, time: f64, reason: String },
    #[error("Picard iteration not contracting: {0}")]
    NonContraction(String),
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("unknown experiment '{id}'; available: {available}")]
    UnknownExperiment { id: String, available: String },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
