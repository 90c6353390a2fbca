//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::report::VerificationReport;
use crate::solver::IterationTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point is outside the universe of the space it was used with.
    #[error("point {point} is outside the universe of `{space}`")]
    Domain { point: String, space: String },

    /// A numeric or structural argument is out of range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A finite-space or mapping document could not be read.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown {kind} `{name}`; available: {}", available.join(", "))]
    Lookup {
        kind: &'static str,
        name: String,
        available: Vec<String>,
    },

    /// The requested check strategy does not apply to this space.
    #[error("strategy error: {0}")]
    Strategy(String),

    /// Kannan constants must lie in [0, 1/4).
    #[error("invalid Kannan constant {0}: must satisfy 0 <= lambda < 1/4")]
    Constant(f64),

    /// A self-map sent a point outside the space.
    #[error("mapping `{map}` sends {point} outside the space")]
    Mapping { map: String, point: String },

    /// An operation that requires valid axioms received a space that fails them.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A check this operation depends on did not pass.
    #[error("dependency `{}` failed", report.title)]
    Dependency { report: Box<VerificationReport> },

    #[error("no fixed point within {iterations} iterations (last step displacement {last_displacement:e})")]
    NonConvergence {
        iterations: usize,
        last_displacement: f64,
        trace: Box<IterationTrace>,
    },

    /// Finite enumeration refused because the space is too large.
    #[error("space has {n} points; enumeration cap is {cap}")]
    Size { n: usize, cap: usize },

    #[error("construction failed: {0}")]
    Construction(String),
}
