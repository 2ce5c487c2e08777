//! Error type shared by all engine modules.

use std::path::PathBuf;

/// Errors produced by dataset handling, classification and solving.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A required input file does not exist.
    #[error("missing file: {}", path.display())]
    MissingFile { path: PathBuf },

    /// A file exists but its content violates the expected schema.
    #[error("{file}: {message}")]
    SchemaViolation { file: String, message: String },

    /// A profile or load series does not cover the expected hour range.
    #[error("{subject}: expected {expected} hourly values, found {found}")]
    LengthMismatch {
        subject: String,
        expected: usize,
        found: usize,
    },

    /// A consumption or load value is negative.
    #[error("{subject}: negative value {value} at hour {hour}")]
    NegativeValue {
        subject: String,
        hour: usize,
        value: f64,
    },

    /// A generator or solver configuration value is out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The system load is constant, so peak hours cannot be ranked.
    #[error("system load is constant; peak hour selection would be arbitrary")]
    DegenerateLoad,

    /// A design needs a peak hour set but none was supplied.
    #[error("design {design} requires a peak hour set")]
    MissingPeakHours { design: String },

    /// The time of use schedule needs a full calendar year of data.
    #[error("time of use schedule requires 8760 or 8784 hours, dataset has {hours}")]
    TouUnavailable { hours: usize },

    /// The dataset has no consumption at all, so no revenue target exists.
    #[error("dataset has zero total consumption")]
    ZeroConsumption,

    /// No household ever counts as peak, so withheld revenue cannot be
    /// recovered through the peak rate.
    #[error(
        "no peak consumption under this design; cannot recover withheld revenue \
         (recovery share {f_recov})"
    )]
    InfeasiblePeakRecovery { f_recov: f64 },

    /// Classifications and household counts disagree on the category set.
    #[error("category {label} is missing from {missing_in}")]
    CategoryMismatch { label: String, missing_in: String },

    /// An underlying read or write failed.
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(file: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaViolation {
            file: file.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig(message.into())
    }

    /// Stable lowercase tag for machine readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingFile { .. } => "missing_file",
            Error::SchemaViolation { .. } => "schema_violation",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NegativeValue { .. } => "negative_value",
            Error::InvalidConfig(_) => "invalid_config",
            Error::DegenerateLoad => "degenerate_load",
            Error::MissingPeakHours { .. } => "missing_peak_hours",
            Error::TouUnavailable { .. } => "tou_unavailable",
            Error::ZeroConsumption => "zero_consumption",
            Error::InfeasiblePeakRecovery { .. } => "infeasible_peak_recovery",
            Error::CategoryMismatch { .. } => "category_mismatch",
            Error::Io(_) => "io_failure",
        }
    }
}
