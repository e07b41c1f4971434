//! Deterministic and randomized rounding of tensors in Tensor-Train (TT) format.
//!
//! A TT-tensor of order `N` stores one order-3 core per mode; entry
//! `X(i_1, ..., i_N)` is the product of the `i_n`-th slice matrices of the
//! cores. Rounding recompresses the bond ranks linking neighbouring cores.
//!
//! The crate provides
//!
//! * [`tt`]: the TT data structures, unfoldings, arithmetic and file formats,
//! * [`dense`]: the dense kernels (Householder QR, truncated SVD, Gaussian
//!   sketches and Nyström factors) used by every rounding routine,
//! * [`det`]: orthogonalization sweeps, TT-rounding and partial contractions,
//! * [`randomized`]: randomized roundings (orthogonalize-then-randomize,
//!   randomize-then-orthogonalize, two-sided generalized Nyström) and the
//!   structured rounding of sums of TT-tensors,
//! * [`gmres`]: Kronecker-sum operators and an inexact TT-GMRES solver,
//! * [`cost`], [`generators`] and [`experiments`]: flop models, test tensors
//!   and the benchmark drivers used by the `ttround` CLI.

// `!(x >= 0.0)` style checks are deliberate: NaN has to fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost;
pub mod dense;
pub mod det;
mod error;
pub mod experiments;
pub mod generators;
pub mod gmres;
pub mod randomized;
pub mod tt;

pub use error::{Result, TtError};
pub use nalgebra::DMatrix;
pub use tt::{RankProfile, TtCore, TtTensor};

/// Dense matrix type used throughout the crate (column-major).
pub type Matrix = DMatrix<f64>;
