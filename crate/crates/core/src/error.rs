use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Bessel order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: i32, max: i32 },

    #[error("argument {0} outside the domain of the function")]
    Domain(String),

    #[error("degenerate curve: speed {speed:.3e} at t = {t}")]
    DegenerateCurve { t: f64, speed: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("unknown shape `{0}` (expected circle, kite, peanut or file:<path>)")]
    UnknownShape(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is numerically singular (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("iteration did not converge after {iterations} iterations ({what})")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("forward solve failed for k = {k}, Nf = {faces}: {reason}")]
    Forward { k: f64, faces: usize, reason: String },

    #[error("disk series resonance at order {order} for k = {k}")]
    Resonance { order: i32, k: f64 },

    #[error("disk series not converged at the order cap {cap}")]
    Truncation { cap: i32 },

    #[error("far-field metadata mismatch: {0}")]
    Metadata(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("polynomial fit failed: {0}")]
    Fit(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
