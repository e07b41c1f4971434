//! Leading-order flop counts of the rounding algorithms.
//!
//! Every count assumes an order-`N` tensor with all mode sizes `I`, input
//! ranks `R` and target ranks `l`; lower-order terms (`O(I R^2 + N R^3)`)
//! are dropped. Only the `N - 2` middle cores are counted.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Right-to-left orthogonalization.
    Orth,
    /// Right-to-left partial contractions against a rank-`l` tensor.
    Contr,
    TtRound,
    OrthRand,
    RandOrth,
    TwoSided,
    /// Randomize-then-orthogonalize on a sum of `s` rank-`R` terms.
    SumRandOrth,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Orth,
        Algorithm::Contr,
        Algorithm::TtRound,
        Algorithm::OrthRand,
        Algorithm::RandOrth,
        Algorithm::TwoSided,
        Algorithm::SumRandOrth,
    ];

    /// The three randomized single-tensor roundings.
    pub const RANDOMIZED: [Algorithm; 3] = [
        Algorithm::OrthRand,
        Algorithm::RandOrth,
        Algorithm::TwoSided,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Orth => "orth",
            Algorithm::Contr => "contr",
            Algorithm::TtRound => "tt-round",
            Algorithm::OrthRand => "orth-rand",
            Algorithm::RandOrth => "rand-orth",
            Algorithm::TwoSided => "two-sided",
            Algorithm::SumRandOrth => "sum-rand-orth",
        }
    }

    /// Cost divided by `(N-2) I R^3` as a polynomial in `beta = l / R`, for
    /// the algorithms whose count has that form.
    pub fn coefficient(self, beta: f64) -> Option<f64> {
        let (b, b2, b3) = (beta, beta * beta, beta * beta * beta);
        Some(match self {
            Algorithm::Orth => 5.0,
            Algorithm::Contr => 2.0 * b + 2.0 * b2,
            Algorithm::TtRound => 5.0 + 6.0 * b + 2.0 * b2,
            Algorithm::OrthRand => 5.0 + 2.0 * b + 4.0 * b2 + 4.0 * b3,
            Algorithm::RandOrth => 4.0 * b + 6.0 * b2 + 4.0 * b3,
            Algorithm::TwoSided => 6.0 * b + 6.0 * b2,
            Algorithm::SumRandOrth => return None,
        })
    }
}

/// Parameters of one cost evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub algorithm: Algorithm,
    pub order: usize,
    pub mode: usize,
    pub rank: usize,
    pub target: usize,
    /// Number of summands (only used by [`Algorithm::SumRandOrth`]).
    pub terms: usize,
}

impl CostModel {
    pub fn new(
        algorithm: Algorithm,
        order: usize,
        mode: usize,
        rank: usize,
        target: usize,
    ) -> Self {
        CostModel {
            algorithm,
            order,
            mode,
            rank,
            target,
            terms: 1,
        }
    }

    pub fn with_terms(mut self, s: usize) -> Self {
        self.terms = s;
        self
    }

    pub fn beta(&self) -> f64 {
        self.target as f64 / self.rank as f64
    }

    /// Leading-order flop count.
    ///
    /// The sum variant uses the published form `4 s R^2 l + 6 s R l^2 + 4 l^2`
    /// per middle core; the QR term of its derivation would be `4 l^3`.
    pub fn flops(&self) -> f64 {
        let middle = self.order.saturating_sub(2) as f64 * self.mode as f64;
        let (r, l, s) = (self.rank as f64, self.target as f64, self.terms as f64);
        let per_core = match self.algorithm {
            Algorithm::Orth => 5.0 * r * r * r,
            Algorithm::Contr => 2.0 * r * r * l + 2.0 * r * l * l,
            Algorithm::TtRound => 5.0 * r * r * r + 6.0 * r * r * l + 2.0 * r * l * l,
            Algorithm::OrthRand => {
                5.0 * r * r * r + 2.0 * r * r * l + 4.0 * r * l * l + 4.0 * l * l * l
            }
            Algorithm::RandOrth => 4.0 * r * r * l + 6.0 * r * l * l + 4.0 * l * l * l,
            Algorithm::TwoSided => 6.0 * r * r * l + 6.0 * r * l * l,
            Algorithm::SumRandOrth => 4.0 * s * r * r * l + 6.0 * s * r * l * l + 4.0 * l * l,
        };
        middle * per_core
    }
}

/// Predicted speedup of each randomized algorithm over TT-rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub beta: f64,
    pub orth_rand: f64,
    pub rand_orth: f64,
    pub two_sided: f64,
}

/// `cost(TT-rounding) / cost(alg)` on a grid of `beta` values, using the
/// simplified forms (so `N`, `I`, `R` cancel out).
///
/// Returns an error message for `beta` outside `(0, 1]`.
pub fn speedup_curve(betas: &[f64]) -> Result<Vec<SpeedupRow>, String> {
    betas
        .iter()
        .map(|&beta| {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(format!("beta must lie in (0, 1], got {beta}"));
            }
            let coef = |a: Algorithm| a.coefficient(beta).expect("single-tensor algorithm");
            let base = coef(Algorithm::TtRound);
            Ok(SpeedupRow {
                beta,
                orth_rand: base / coef(Algorithm::OrthRand),
                rand_orth: base / coef(Algorithm::RandOrth),
                two_sided: base / coef(Algorithm::TwoSided),
            })
        })
        .collect()
}

/// `count` evenly spaced points in `(0, 1]`, ending at 1.
pub fn beta_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|k| k as f64 / count as f64).collect()
}
