use core::fmt;

use crate::stepsize::RuleKind;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    InvalidArgument(&'static str),
    InvalidState(&'static str),
    /// `s·y <= 0`; the caller applies its fallback stepsize.
    CurvatureFailure,
    /// Zero gradient passed to a Rayleigh-quotient stepsize.
    AlreadyConverged,
    /// `1 - alpha * lambda_i` vanished while solving for the exact `q`.
    SingularResolvent { index: usize },
    /// A quantity needed by a formula has a zero denominator.
    Degenerate(&'static str),
    GammaUnavailable,
    /// Not enough iterations recorded yet for the requested rule.
    Warmup,
    /// Requested an iteration that has already left the ring buffer.
    HistoryEvicted { requested: usize, oldest: usize },
    NotDescentDirection,
    LineSearchFailure { trials: usize },
    UnsupportedRule(RuleKind),
    NonFinite(&'static str),
    TooLarge { bytes: usize, cap: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidState(msg) => write!(f, "invalid state: {msg}"),
            Error::CurvatureFailure => f.write_str("curvature condition s·y > 0 violated"),
            Error::AlreadyConverged => f.write_str("gradient is zero"),
            Error::SingularResolvent { index } => {
                write!(f, "singular resolvent at component {index}")
            }
            Error::Degenerate(what) => write!(f, "degenerate denominator in {what}"),
            Error::GammaUnavailable => f.write_str("retarded gamma is unavailable"),
            Error::Warmup => f.write_str("insufficient history for this rule"),
            Error::HistoryEvicted { requested, oldest } => write!(
                f,
                "iteration {requested} is no longer in the history (oldest is {oldest})"
            ),
            Error::NotDescentDirection => f.write_str("search direction is not a descent direction"),
            Error::LineSearchFailure { trials } => {
                write!(f, "line search failed after {trials} trials")
            }
            Error::UnsupportedRule(kind) => {
                write!(f, "stepsize rule {kind:?} is not supported by this solver")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::TooLarge { bytes, cap } => {
                write!(f, "problem needs {bytes} bytes, above the cap of {cap}")
            }
        }
    }
}

impl core::error::Error for Error {}
