use alloc::boxed::Box;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes do not agree.
    DimensionMismatch {
        op: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A NaN or infinite entry was supplied where finite values are required.
    NonFinite,
    /// A pivot fell below the relative singularity threshold.
    SingularMatrix,
    NotPositiveDefinite,
    /// The zero polynomial, or a polynomial without coefficients.
    DegenerateInput,
    /// `C S` is singular for the requested horizon.
    SingularPrediction,
    /// The state left the domain where the flat transformation is defined.
    SingularConfiguration(&'static str),
    /// The Jacobian of the prediction with respect to the input is singular.
    SingularJacobian,
    PredictionDiverged,
    /// The simulated state became non-finite or exceeded the divergence bound.
    StateDiverged,
    /// A closed-loop matrix required to be Hurwitz is not.
    NotHurwitz,
    /// The coarse alpha sweep found more than one stability transition.
    NonMonotoneVerdict,
    /// Too few usable samples were drawn from the valid region.
    SamplingDegenerate { usable: usize },
    SimulationAborted { step: usize, cause: Box<Error> },
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { op, expected, found } => write!(
                f,
                "{op}: dimension mismatch, expected {}x{} but found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::NonFinite => f.write_str("non-finite value"),
            Error::SingularMatrix => f.write_str("matrix is singular"),
            Error::NotPositiveDefinite => f.write_str("matrix is not positive definite"),
            Error::DegenerateInput => f.write_str("degenerate input polynomial"),
            Error::SingularPrediction => {
                f.write_str("prediction matrix CS is singular for this horizon")
            }
            Error::SingularConfiguration(what) => write!(f, "singular configuration: {what}"),
            Error::SingularJacobian => f.write_str("prediction Jacobian is singular"),
            Error::PredictionDiverged => f.write_str("fixed-input prediction diverged"),
            Error::StateDiverged => f.write_str("closed-loop state diverged"),
            Error::NotHurwitz => f.write_str("closed-loop matrix is not Hurwitz"),
            Error::NonMonotoneVerdict => {
                f.write_str("stability verdict is not monotone in alpha")
            }
            Error::SamplingDegenerate { usable } => {
                write!(f, "valid region produced only {usable} usable samples")
            }
            Error::SimulationAborted { step, cause } => {
                write!(f, "simulation aborted at step {step}: {cause}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
