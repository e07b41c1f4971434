//! Kronecker-sum operators and an inexact TT-GMRES solver.

mod operator;
mod solver;
mod surrogate;

pub use operator::{KroneckerSumOperator, MeanPreconditioner, ModeFactor};
pub use solver::{tt_gmres, GmresConfig, GmresOutput, GmresTrace, IterationRecord, RoundingMode};
pub use surrogate::{build_cookie_surrogate, parameter_samples};
