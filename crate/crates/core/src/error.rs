use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse error classes reported by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Numeric,
    Scenario,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Numeric => "numeric",
            ErrorCategory::Scenario => "scenario",
        }
    }

    /// Process exit status used by the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Numeric => 3,
            ErrorCategory::Scenario => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} out of domain: {detail}")]
    Domain { name: &'static str, detail: String },

    #[error("target power {target} exceeds the maximum {max} of J_{order}^2 on its rising branch")]
    UnreachableTarget { target: f64, max: f64, order: i32 },

    #[error("|J_{order_a}|/|J_{order_b}| = {ratio} is not attained for depth in (0, {window}]")]
    NoSolution {
        ratio: f64,
        order_a: i32,
        order_b: i32,
        window: f64,
    },

    #[error("degenerate fit: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sideband order {order} exceeds the cutoff {cutoff}")]
    CutoffExceeded { order: i64, cutoff: u32 },

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("comb state has zero norm")]
    ZeroState,

    #[error("output bin {0} is not reachable by any kept sideband path")]
    UnreachableBin(String),

    #[error("modulation frequency {mod_frequency} THz does not divide the FSR {fsr} THz into an integer number of steps")]
    IncommensurateModulation { mod_frequency: f64, fsr: f64 },

    #[error("comb has no pair {pair} (pairs are 1..={num_pairs})")]
    MissingPair { pair: usize, num_pairs: usize },

    #[error("fiber length is zero, so the dispersion slope is unobservable")]
    ZeroLength,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            name,
            detail: detail.into(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse { .. } | Error::Validation { .. } | Error::Io(_) => ErrorCategory::Config,
            Error::Domain { .. }
            | Error::UnreachableTarget { .. }
            | Error::NoSolution { .. }
            | Error::Degenerate(_)
            | Error::InvalidArgument(_)
            | Error::CutoffExceeded { .. }
            | Error::Calibration(_) => ErrorCategory::Numeric,
            Error::ZeroState
            | Error::UnreachableBin(_)
            | Error::IncommensurateModulation { .. }
            | Error::MissingPair { .. }
            | Error::ZeroLength => ErrorCategory::Scenario,
        }
    }
}
