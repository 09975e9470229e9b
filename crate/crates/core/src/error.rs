//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by constructors, solvers, and set operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A discrete distribution failed its construction invariants.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    /// A generic precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The constrained program admits no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// The linear program is unbounded below.
    #[error("unbounded linear program")]
    Unbounded,
    /// A problem exceeded the desk-scale guard of the enumeration oracle.
    #[error("problem too large for the enumeration oracle: {0}")]
    TooLarge(String),
    /// A protected class has zero marginal probability.
    #[error("degenerate class: {0}")]
    DegenerateClass(String),
    /// A ratio denominator vanished while mapping parameters to measures.
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),
    /// The moment matrix is numerically singular; only the halfspace route applies.
    #[error("singular moment matrix (condition estimate {0:.3e})")]
    SingularMoment(f64),
    /// A set operation required a nonempty accepted set.
    #[error("empty accepted set")]
    EmptySet,
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
