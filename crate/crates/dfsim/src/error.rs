//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input probability or parameter fell outside its admissible range.
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Two per-sensor quantities disagree on the number of sensors.
    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A pmf term is 0 or 1 where a statistic needs a finite logarithm or a
    /// positive denominator.
    #[error("degenerate pmf: {0}")]
    DegeneratePmf(String),

    /// The Fisher information that normalizes a score statistic vanished.
    #[error("zero Fisher information: {0}")]
    ZeroInformation(String),

    /// A statistic is constant under the conditioning hypothesis, so its
    /// deflection is undefined.
    #[error("statistic has zero variance under the conditioning hypothesis")]
    ZeroVariance,

    /// A rule was requested in a scenario where it is not defined.
    #[error("rule {rule} is unavailable: {reason}")]
    RuleUnavailable { rule: &'static str, reason: String },

    /// Exhaustive 2^K enumeration was requested for too many sensors.
    #[error("exhaustive enumeration is limited to K <= {max}, got K = {got}")]
    EnumerationTooLarge { max: usize, got: usize },

    /// Too few calibration trials for the requested false-alarm target.
    #[error("calibration needs n_cal * target_pf0 >= {min}, got {got}")]
    InsufficientCalibration { min: f64, got: f64 },

    /// Threshold calibration cannot split a one-atom sample.
    #[error("cannot calibrate a constant statistic")]
    ConstantStatistic,

    /// An experiment configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An experiment configuration or CLI value could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
