//! Rounding the order-10 Hilbert-type tensor to a sweep of target ranks.

use serde::{Deserialize, Serialize};

use super::{median, over_seeds, seed_list, time_reps, ExperimentResult, Method};
use crate::generators::hilbert_reference;
use crate::{RankProfile, Result, TtError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertConfig {
    /// Uniform target ranks; each bond is further limited by its own rank.
    pub targets: Vec<usize>,
    pub methods: Vec<Method>,
    pub seeds: usize,
    pub base_seed: u64,
    pub reps: usize,
    pub parallel_seeds: bool,
}

impl Default for HilbertConfig {
    fn default() -> Self {
        HilbertConfig {
            targets: (1..=12).collect(),
            methods: Method::ALL.to_vec(),
            seeds: 5,
            base_seed: 0,
            reps: 3,
            parallel_seeds: false,
        }
    }
}

/// CSV columns: `target,method,seed,error,time_median,time_min,time_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertRecord {
    pub target: usize,
    pub method: Method,
    pub seed: u64,
    pub error: f64,
    pub time_median: f64,
    pub time_min: f64,
    pub time_max: f64,
}

pub fn run_hilbert(cfg: &HilbertConfig) -> Result<ExperimentResult<HilbertRecord>> {
    if cfg.targets.contains(&0) {
        return Err(TtError::InvalidArgument(
            "target ranks must be positive".into(),
        ));
    }
    let y = hilbert_reference();
    let ranks = y.internal_ranks();
    let records = over_seeds(
        &seed_list(cfg.base_seed, cfg.seeds),
        cfg.parallel_seeds,
        |seed| {
            let mut out = Vec::new();
            for &k in &cfg.targets {
                let target = RankProfile::new(ranks.iter().map(|&r| r.min(k)).collect())?;
                for &method in &cfg.methods {
                    let (x, t) = time_reps(cfg.reps, || method.round(&y, &target, seed))?;
                    out.push(HilbertRecord {
                        target: k,
                        method,
                        seed,
                        error: x.relative_error(&y)?,
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
        id: "hilbert".into(),
        records,
    })
}

impl ExperimentResult<HilbertRecord> {
    pub fn median_error(&self, method: Method, target: usize) -> f64 {
        let v: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.method == method && r.target == target)
            .map(|r| r.error)
            .collect();
        median(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_decrease_with_target() {
        let cfg = HilbertConfig {
            targets: vec![1, 3],
            methods: vec![Method::Deterministic],
            seeds: 1,
            reps: 1,
            ..HilbertConfig::default()
        };
        let res = run_hilbert(&cfg).unwrap();
        assert_eq!(res.records.len(), 2);
        assert!(
            res.median_error(Method::Deterministic, 3) < res.median_error(Method::Deterministic, 1)
        );
    }
}
