//! Rounding `X1 + eps X2` back to low rank, for every method and target.

use serde::{Deserialize, Serialize};

use super::{median, over_seeds, seed_list, time_reps, ExperimentResult, Method};
use crate::generators::perturbed_tensor;
use crate::{RankProfile, Result, TtError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedConfig {
    pub order: usize,
    pub mode: usize,
    /// Rank of both `X1` and `X2`.
    pub rank: usize,
    pub eps: Vec<f64>,
    /// Uniform target ranks.
    pub ells: Vec<usize>,
    pub methods: Vec<Method>,
    pub seeds: usize,
    pub base_seed: u64,
    /// Timing repetitions per rounding.
    pub reps: usize,
    pub parallel_seeds: bool,
}

impl Default for PerturbedConfig {
    fn default() -> Self {
        PerturbedConfig {
            order: 6,
            mode: 20,
            rank: 8,
            eps: vec![1e-2, 1e-6, 1e-10],
            ells: (6..=16).step_by(2).collect(),
            methods: Method::ALL.to_vec(),
            seeds: 5,
            base_seed: 0,
            reps: 3,
            parallel_seeds: false,
        }
    }
}

impl PerturbedConfig {
    /// Order 10, mode size 100, ranks 50 + 50, targets 35 to 80.
    pub fn paper_scale() -> Self {
        PerturbedConfig {
            order: 10,
            mode: 100,
            rank: 50,
            ells: (35..=80).step_by(5).collect(),
            ..Self::default()
        }
    }
}

/// CSV columns: `eps,method,ell,seed,error,time_median,time_min,time_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedRecord {
    pub eps: f64,
    pub method: Method,
    pub ell: usize,
    pub seed: u64,
    /// `||round(X) - X|| / ||X||`.
    pub error: f64,
    pub time_median: f64,
    pub time_min: f64,
    pub time_max: f64,
}

pub fn run_perturbed(cfg: &PerturbedConfig) -> Result<ExperimentResult<PerturbedRecord>> {
    if cfg.order < 2 || cfg.ells.contains(&0) {
        return Err(TtError::InvalidArgument(
            "need order >= 2 and positive target ranks".into(),
        ));
    }
    let dims = vec![cfg.mode; cfg.order];
    let records = over_seeds(
        &seed_list(cfg.base_seed, cfg.seeds),
        cfg.parallel_seeds,
        |seed| {
            let mut out = Vec::new();
            for &eps in &cfg.eps {
                let (x, _) = perturbed_tensor(&dims, cfg.rank, eps, seed)?;
                for &ell in &cfg.ells {
                    let target = RankProfile::uniform(cfg.order, ell)?;
                    for &method in &cfg.methods {
                        let (y, t) = time_reps(cfg.reps, || method.round(&x, &target, seed))?;
                        out.push(PerturbedRecord {
                            eps,
                            method,
                            ell,
                            seed,
                            error: y.relative_error(&x)?,
                            time_median: t.median,
                            time_min: t.min,
                            time_max: t.max,
                        });
                    }
                }
            }
            Ok(out)
        },
    )?;
    Ok(ExperimentResult {
        id: "perturbed".into(),
        records,
    })
}

impl ExperimentResult<PerturbedRecord> {
    /// Median error over seeds; NaN if the combination was not run.
    pub fn median_error(&self, eps: f64, method: Method, ell: usize) -> f64 {
        let v: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.eps == eps && r.method == method && r.ell == ell)
            .map(|r| r.error)
            .collect();
        median(&v)
    }

    pub fn median_time(&self, method: Method, ell: usize) -> f64 {
        let v: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.method == method && r.ell == ell)
            .map(|r| r.time_median)
            .collect();
        median(&v)
    }
}
