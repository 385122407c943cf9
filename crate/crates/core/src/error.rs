//! Library-wide error type.

/// Errors reported by the library.
///
/// Mathematically impossible internal states (broken theorems) panic instead;
/// these variants cover caller-visible misuse and honest numeric failure.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Weight/level combination outside the supported domain.
    #[error("invalid weight/level: {0}")]
    InvalidWeight(String),

    /// Some other argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Series inversion requires a nonzero leading coefficient within the
    /// known window.
    #[error("cannot invert a series whose known window is identically zero")]
    ZeroLeadingCoefficient,

    /// The requested error target cannot be certified (precision pinned too
    /// low, cutoff cap reached, or the weight-2 heuristic failed to certify).
    #[error("cannot certify the requested error target: {0}")]
    UnreachableTolerance(String),

    /// Malformed serialized input (rationals, relation files, series files).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
