use alloc::string::String;
use core::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two forms over different bases were combined.
    BasisMismatch,
    /// An operation required a basis of a specific size (7 for Hodge duality).
    BasisSize { expected: usize, got: usize },
    /// A matrix that should be skew-symmetric is not, to the given defect.
    NotSkew { defect: f64 },
    /// A matrix or 2-form fails the 𝔤₂ membership conditions.
    NotInG2 { defect: f64 },
    /// A form expected to be semibasic has a vertical component.
    NonSemibasic { max_coeff: f64 },
    /// A linear system was rank-deficient where a unique solution was required.
    RankDeficient { pivot: f64 },
    /// A linear system had no solution within tolerance.
    Inconsistent { residual: f64 },
    /// An exact (rational) linear system had no solution.
    ExactInconsistent,
    /// Eigenvalue structure incompatible with a signed triple summing to zero.
    BadEigenstructure(&'static str),
    /// A built-in model name was not recognised.
    UnknownModel(String),
    /// A parameter value outside the model domain.
    OutOfDomain { r: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BasisMismatch => write!(f, "forms are expressed over different bases"),
            Error::BasisSize { expected, got } => {
                write!(f, "basis of size {expected} required, got {got}")
            }
            Error::NotSkew { defect } => write!(f, "matrix is not skew (defect {defect:e})"),
            Error::NotInG2 { defect } => {
                write!(f, "value fails the g2 conditions (defect {defect:e})")
            }
            Error::NonSemibasic { max_coeff } => {
                write!(f, "form is not semibasic (largest vertical coefficient {max_coeff:e})")
            }
            Error::RankDeficient { pivot } => {
                write!(f, "linear system is rank deficient (pivot {pivot:e})")
            }
            Error::Inconsistent { residual } => {
                write!(f, "linear system inconsistent (residual {residual:e})")
            }
            Error::ExactInconsistent => write!(f, "exact linear system has no solution"),
            Error::BadEigenstructure(s) => write!(f, "bad eigenvalue structure: {s}"),
            Error::UnknownModel(name) => write!(f, "unknown model '{name}'"),
            Error::OutOfDomain { r } => write!(f, "parameter {r} outside the model domain"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
