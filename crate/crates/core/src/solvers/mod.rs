//! Fixed-point iterations that produce [`IterateSequence`]s in exact
//! arithmetic: stationary splittings for `Ax = b` and Newton's method for
//! rational polynomials.
//!
//! [`IterateSequence`]: crate::stability::IterateSequence

mod matrix;
mod newton;
mod stationary;

use thiserror::Error;

use crate::exact::ExactValue;
use crate::stability::StabilityError;

pub use matrix::RationalMatrix;
pub use newton::{bisect_root, newton_contraction, newton_step, run_newton, NewtonRun, RationalPolynomial};
pub use stationary::{SplittingKind, StationarySplitting};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("splitting matrix is singular (zero diagonal in row {row})")]
    SingularSplitting { row: usize },
    #[error("linear system is singular")]
    SingularSystem,
    #[error("relaxation factor {0} outside (0, 2)")]
    InvalidRelaxation(ExactValue),
    #[error("derivative vanishes at {at}")]
    DerivativeZero { at: ExactValue },
    #[error("no sign change found near {near}")]
    NoBracket { near: ExactValue },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Sequence(#[from] StabilityError),
}
