//! Exact truncated multivariate power series.

mod jet;
mod rational;

pub use jet::{Jet, MultiIndex, Vars, MAX_VARS};
pub use rational::{factorial, ParseRationalError, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("jets live on different variable sets ({left} vs {right} variables)")]
    VarMismatch { left: usize, right: usize },
    #[error("variable index {var} out of range for {nvars} variables")]
    VarOutOfRange { var: usize, nvars: usize },
    #[error("cannot invert a jet with zero constant term")]
    ZeroConstantTerm,
}
