//! Rounding a sum of `s` random TT-tensors: assembled sum vs per-term sketch.

use serde::{Deserialize, Serialize};

use super::{loglog_slope, median, over_seeds, seed_list, time_reps, ExperimentResult};
use crate::det::tt_round;
use crate::generators::random_terms;
use crate::randomized::{round_rand_orth, round_sum_rand_orth, RoundingConfig};
use crate::tt::add_many;
use crate::{RankProfile, Result, TtError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumMethod {
    /// `tt_round` of the assembled sum at `round_tol`.
    TtRound,
    /// `round_rand_orth` of the assembled sum.
    RandOrth,
    /// `round_sum_rand_orth` on the terms.
    SumRandOrth,
}

impl SumMethod {
    pub const ALL: [SumMethod; 3] = [
        SumMethod::TtRound,
        SumMethod::RandOrth,
        SumMethod::SumRandOrth,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumConfig {
    pub order: usize,
    pub mode: usize,
    /// Rank of every term.
    pub rank: usize,
    pub terms: Vec<usize>,
    /// Target rank of the randomized methods.
    pub ell: usize,
    pub round_tol: f64,
    pub seeds: usize,
    pub base_seed: u64,
    pub reps: usize,
    pub parallel_seeds: bool,
}

impl Default for SumConfig {
    fn default() -> Self {
        SumConfig {
            order: 5,
            mode: 30,
            rank: 20,
            terms: vec![2, 5, 10, 20],
            ell: 20,
            round_tol: 1e-8,
            seeds: 1,
            base_seed: 0,
            reps: 3,
            parallel_seeds: false,
        }
    }
}

impl SumConfig {
    pub fn paper_scale() -> Self {
        SumConfig {
            order: 10,
            mode: 50,
            rank: 30,
            terms: vec![2, 5, 10, 20, 40],
            ell: 30,
            ..Self::default()
        }
    }
}

/// CSV columns:
/// `s,method,seed,error,agreement,time_median,time_min,time_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRecord {
    pub s: usize,
    pub method: SumMethod,
    pub seed: u64,
    /// Relative error against the exact sum.
    pub error: f64,
    /// Relative difference between the `rand-orth` and `sum-rand-orth`
    /// outputs at the same seed; NaN on the other rows.
    pub agreement: f64,
    pub time_median: f64,
    pub time_min: f64,
    pub time_max: f64,
}

pub fn run_sum(cfg: &SumConfig) -> Result<ExperimentResult<SumRecord>> {
    if cfg.order < 2 || cfg.ell == 0 || cfg.terms.contains(&0) {
        return Err(TtError::InvalidArgument(
            "need order >= 2, a positive target and nonempty sums".into(),
        ));
    }
    let dims = vec![cfg.mode; cfg.order];
    let target = RankProfile::uniform(cfg.order, cfg.ell)?;
    let records = over_seeds(
        &seed_list(cfg.base_seed, cfg.seeds),
        cfg.parallel_seeds,
        |seed| {
            let mut out = Vec::new();
            for &s in &cfg.terms {
                let terms = random_terms(&dims, cfg.rank, s, seed)?;
                let refs: Vec<_> = terms.iter().collect();
                let sum = add_many(&refs)?;
                let rcfg = RoundingConfig::new(target.clone(), seed);

                let (a, ta) = time_reps(cfg.reps, || tt_round(&sum, cfg.round_tol))?;
                let (b, tb) = time_reps(cfg.reps, || Ok(round_rand_orth(&sum, &rcfg)?.tensor))?;
                let (c, tc) =
                    time_reps(cfg.reps, || Ok(round_sum_rand_orth(&refs, &rcfg)?.tensor))?;
                let agreement = b.relative_error(&c)?;
                for (method, y, t, agree) in [
                    (SumMethod::TtRound, &a, ta, f64::NAN),
                    (SumMethod::RandOrth, &b, tb, agreement),
                    (SumMethod::SumRandOrth, &c, tc, f64::NAN),
                ] {
                    out.push(SumRecord {
                        s,
                        method,
                        seed,
                        error: y.relative_error(&sum)?,
                        agreement: agree,
                        time_median: t.median,
                        time_min: t.min,
                        time_max: t.max,
                    });
                }
            }
            Ok(out)
        },
    )?;
    Ok(ExperimentResult {
        id: "sum".into(),
        records,
    })
}

impl ExperimentResult<SumRecord> {
    /// Median over seeds of the median wall time.
    pub fn median_time(&self, method: SumMethod, s: usize) -> f64 {
        let v: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.method == method && r.s == s)
            .map(|r| r.time_median)
            .collect();
        median(&v)
    }

    /// Fitted exponent of wall time against `s`.
    pub fn scaling_exponent(&self, method: SumMethod) -> f64 {
        let mut s: Vec<usize> = self.records.iter().map(|r| r.s).collect();
        s.sort_unstable();
        s.dedup();
        let t: Vec<f64> = s.iter().map(|&k| self.median_time(method, k)).collect();
        loglog_slope(&s.iter().map(|&k| k as f64).collect::<Vec<_>>(), &t)
    }

    /// Largest `rand-orth` vs `sum-rand-orth` difference.
    pub fn max_disagreement(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| r.method == SumMethod::RandOrth)
            .map(|r| r.agreement)
            .fold(0.0, f64::max)
    }
}
