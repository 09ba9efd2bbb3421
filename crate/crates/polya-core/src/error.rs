//! Error type shared by all computational routes.

use alloc::string::String;
use core::fmt;

/// Convenience alias for results produced by this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by the numerical routines.
///
/// Constraint violations (bad dimensions, invalid parameters, unmet
/// convergence hypotheses) are distinguished from resource exhaustion so that
/// callers can map them to different process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The walk on `Z^d` is recurrent for `d = 1, 2`: the return probability
    /// is `1` and the expected number of visits `u(d)` diverges, so none of
    /// the `u(d)` routes apply.
    RecurrentDimension {
        /// Requested dimension.
        d: u32,
    },
    /// A parameter failed validation.
    InvalidParameter {
        /// Name of the offending parameter.
        name: &'static str,
        /// Human-readable explanation.
        message: String,
    },
    /// A convergence hypothesis of an identity or integral representation is
    /// not satisfied by the supplied parameters.
    Hypothesis {
        /// Short name of the violated hypothesis.
        name: &'static str,
        /// Human-readable explanation with the offending values.
        detail: String,
    },
    /// An intermediate quantity overflowed the double-precision range.
    Overflow {
        /// Description of the quantity that overflowed.
        what: &'static str,
    },
    /// The requested simulation exceeds the configured step budget.
    StepBudgetExceeded {
        /// Worst-case number of steps implied by the request.
        required: u128,
        /// Configured budget.
        budget: u128,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RecurrentDimension { d } => write!(
                f,
                "d = {d}: the simple random walk on Z^{d} is recurrent (return \
                 probability 1); u(d) diverges and p(d) is defined only for d >= 3"
            ),
            Error::InvalidParameter { name, message } => {
                write!(f, "invalid parameter `{name}`: {message}")
            }
            Error::Hypothesis { name, detail } => {
                write!(f, "hypothesis `{name}` violated: {detail}")
            }
            Error::Overflow { what } => write!(f, "overflow computing {what}"),
            Error::StepBudgetExceeded { required, budget } => write!(
                f,
                "simulation would take up to {required} steps, exceeding the step \
                 budget of {budget}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn hypothesis(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            name,
            detail: detail.into(),
        }
    }
}
