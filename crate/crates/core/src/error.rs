//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The series has fewer than two observations.
    #[error("series too short: need at least 2 observations, got {0}")]
    TooShort(usize),

    /// A series value is NaN or infinite.
    #[error("non-finite value at position {position} ({value})")]
    NonFinite { position: usize, value: f64 },

    /// Trimming fraction outside the open interval (0, 1/2).
    #[error("trim fraction must lie in (0, 0.5), got {0}")]
    BadTrimFraction(f64),

    /// The trimmed candidate range contains no k.
    #[error("trimmed range is empty: n = {n} is too small for delta = {delta}")]
    EmptyRange { n: usize, delta: f64 },

    /// Every candidate change point had a 0/0 ratio (e.g. a constant series).
    #[error("all candidate change points are degenerate (0/0 ratios); the series carries no CUSUM signal")]
    AllDegenerate,

    /// Long-run variance estimate is zero, so the scaled statistic is undefined.
    #[error("long-run variance estimate is zero")]
    ZeroVariance,

    /// A generator or change specification violates its invariants.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// The requested statistic kind is not valid for this operation.
    #[error("invalid statistic kind for this operation: {0}")]
    InvalidKind(String),

    /// Mismatched configuration, e.g. a critical-value table built for a
    /// different statistic or trimming fraction.
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    /// Input file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Persisted table has an unsupported format version.
    #[error("unsupported table version {found:?}, expected {expected:?}")]
    VersionMismatch { expected: String, found: String },

    /// Persisted table fails its invariants after loading.
    #[error("corrupt critical-value table: {0}")]
    CorruptTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
