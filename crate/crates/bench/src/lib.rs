//! Inputs shared by the benchmarks.

use ttround::generators::{perturbed_tensor, random_terms};
use ttround::{RankProfile, TtTensor};

/// Order, mode size, rank and target of the single-tensor rounding runs.
pub const SINGLE: (usize, usize, usize, usize) = (8, 60, 30, 15);

/// `X1 + 1e-6 X2` with both parts of rank `rank`, so the sum has rank `2 rank`.
pub fn perturbed(order: usize, mode: usize, rank: usize) -> TtTensor {
    perturbed_tensor(&vec![mode; order], rank, 1e-6, 0)
        .expect("valid shape")
        .0
}

/// `s` random rank-`rank` summands.
pub fn summands(order: usize, mode: usize, rank: usize, s: usize) -> Vec<TtTensor> {
    random_terms(&vec![mode; order], rank, s, 0).expect("valid shape")
}

pub fn uniform(order: usize, rank: usize) -> RankProfile {
    RankProfile::uniform(order, rank).expect("positive rank")
}
