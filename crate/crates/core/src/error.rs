use std::error;
use std::fmt;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// An argument lies outside an operation's domain.
    Domain(String),
    /// Parameters outside the range a classical bound supports.
    UnsupportedSpec(String),
    /// A search exhausted its range without reaching the target; carries the
    /// best candidate seen so the caller can report how close it came.
    TargetNotReached {
        n_max: u64,
        best_n: u64,
        best_prob: f64,
    },
    /// Input size exceeds a hard enumeration limit.
    Resource(String),
    /// An iterative routine failed to converge; carries the partial value.
    NonConvergence { partial: f64 },
    /// A comparison scenario offering neither a known rate nor observations.
    NothingComputable,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::UnsupportedSpec(msg) => write!(f, "unsupported parameters: {msg}"),
            Error::TargetNotReached {
                n_max,
                best_n,
                best_prob,
            } => write!(
                f,
                "target not reached within n <= {n_max}; best was p = {best_prob} at n = {best_n}"
            ),
            Error::Resource(msg) => write!(f, "resource limit: {msg}"),
            Error::NonConvergence { partial } => {
                write!(f, "iteration failed to converge (partial value {partial})")
            }
            Error::NothingComputable => {
                write!(f, "neither a known rate nor observations; nothing to compute")
            }
        }
    }
}

impl error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
