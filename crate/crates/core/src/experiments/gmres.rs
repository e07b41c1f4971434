//! TT-GMRES on the surrogate problem with both rounding paths.

use serde::{Deserialize, Serialize};

use super::{time_reps, ExperimentResult};
use crate::gmres::{build_cookie_surrogate, tt_gmres, GmresConfig, GmresTrace, RoundingMode};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmresExperimentConfig {
    pub grid_points: usize,
    pub num_params: usize,
    pub samples: Vec<usize>,
    pub rho_range: (f64, f64),
    pub tol: f64,
    pub max_iter: usize,
    /// Randomized path: sketch oversampling and rank cap.
    pub oversampling: usize,
    pub max_rank: usize,
    pub seed: u64,
    pub reps: usize,
}

impl Default for GmresExperimentConfig {
    fn default() -> Self {
        GmresExperimentConfig {
            grid_points: 64,
            num_params: 3,
            samples: vec![4, 8, 16],
            rho_range: (1.0, 10.0),
            tol: 1e-8,
            max_iter: 50,
            oversampling: 10,
            max_rank: 1000,
            seed: 0,
            reps: 3,
        }
    }
}

impl GmresExperimentConfig {
    pub fn paper_scale() -> Self {
        GmresExperimentConfig {
            grid_points: 256,
            num_params: 4,
            samples: vec![10, 20, 30, 40, 50],
            max_iter: 100,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GmresPath {
    Deterministic,
    Randomized,
}

/// CSV columns: `samples,path,seed,iterations,converged,final_residual,
/// true_residual,max_basis_rank,operator_round_secs,gram_schmidt_round_secs,
/// time_median,time_min,time_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GmresRecord {
    pub samples: usize,
    pub path: GmresPath,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub true_residual: f64,
    /// Largest internal rank of any basis vector.
    pub max_basis_rank: usize,
    /// Totals over the iterations of the first repetition.
    pub operator_round_secs: f64,
    pub gram_schmidt_round_secs: f64,
    pub time_median: f64,
    pub time_min: f64,
    pub time_max: f64,
    #[serde(skip)]
    pub trace: GmresTrace,
}

/// Median wall time of both paths at one sample count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmresSpeedup {
    pub samples: usize,
    pub deterministic_secs: f64,
    pub randomized_secs: f64,
    pub speedup: f64,
}

pub fn run_gmres(cfg: &GmresExperimentConfig) -> Result<ExperimentResult<GmresRecord>> {
    let mut records = Vec::new();
    for &samples in &cfg.samples {
        let (op, f) =
            build_cookie_surrogate(cfg.grid_points, cfg.num_params, samples, cfg.rho_range)?;
        for path in [GmresPath::Deterministic, GmresPath::Randomized] {
            let rounding = match path {
                GmresPath::Deterministic => RoundingMode::Deterministic,
                GmresPath::Randomized => RoundingMode::Randomized {
                    oversampling: cfg.oversampling,
                    max_rank: cfg.max_rank,
                },
            };
            let gcfg = GmresConfig {
                max_iter: cfg.max_iter,
                seed: cfg.seed,
                ..GmresConfig::new(cfg.tol, rounding)
            };
            let (out, t) = time_reps(cfg.reps, || tt_gmres(&op, &f, &gcfg))?;
            let trace = out.trace;
            records.push(GmresRecord {
                samples,
                path,
                seed: cfg.seed,
                iterations: trace.num_iterations(),
                converged: trace.converged,
                final_residual: trace.final_residual(),
                true_residual: trace.true_residual,
                max_basis_rank: trace
                    .iterations
                    .iter()
                    .flat_map(|r| r.basis_ranks.iter().copied())
                    .max()
                    .unwrap_or(1),
                operator_round_secs: trace.iterations.iter().map(|r| r.operator_round_secs).sum(),
                gram_schmidt_round_secs: trace
                    .iterations
                    .iter()
                    .map(|r| r.gram_schmidt_round_secs)
                    .sum(),
                time_median: t.median,
                time_min: t.min,
                time_max: t.max,
                trace,
            });
        }
    }
    Ok(ExperimentResult {
        id: "gmres".into(),
        records,
    })
}

/// Deterministic over randomized wall time for every sample count.
pub fn gmres_speedups(result: &ExperimentResult<GmresRecord>) -> Vec<GmresSpeedup> {
    let mut samples: Vec<usize> = result.records.iter().map(|r| r.samples).collect();
    samples.dedup();
    samples
        .into_iter()
        .filter_map(|s| {
            let time = |p| {
                result
                    .records
                    .iter()
                    .find(|r| r.samples == s && r.path == p)
                    .map(|r| r.time_median)
            };
            let (d, r) = (
                time(GmresPath::Deterministic)?,
                time(GmresPath::Randomized)?,
            );
            Some(GmresSpeedup {
                samples: s,
                deterministic_secs: d,
                randomized_secs: r,
                speedup: d / r,
            })
        })
        .collect()
}
