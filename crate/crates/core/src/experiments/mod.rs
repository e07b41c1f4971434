//! Benchmark drivers behind the `ttround bench` command.
//!
//! Each driver returns an [`ExperimentResult`] whose records serialize to
//! one CSV row each. The column set of an experiment never depends on its
//! configuration. Timing columns are the only ones that change between two
//! runs with the same configuration and seeds.

mod gmres;
mod hilbert;
mod perturbed;
mod sum;

pub use gmres::{
    gmres_speedups, run_gmres, GmresExperimentConfig, GmresPath, GmresRecord, GmresSpeedup,
};
pub use hilbert::{run_hilbert, HilbertConfig, HilbertRecord};
pub use perturbed::{run_perturbed, PerturbedConfig, PerturbedRecord};
pub use sum::{run_sum, SumConfig, SumMethod, SumRecord};

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::det::tt_round_to_ranks;
use crate::randomized::{round_orth_rand, round_rand_orth, round_two_sided, RoundingConfig};
use crate::{RankProfile, Result, TtError, TtTensor};

/// Wall-clock statistics over repeated runs, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

/// Runs `f` `reps` times (at least once) and returns the first result with
/// the timing statistics.
pub fn time_reps<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, Timing)> {
    let mut times = Vec::with_capacity(reps.max(1));
    let mut first = None;
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        let out = f()?;
        times.push(t.elapsed().as_secs_f64());
        first.get_or_insert(out);
    }
    let timing = Timing {
        median: median(&times),
        min: times.iter().copied().fold(f64::INFINITY, f64::min),
        max: times.iter().copied().fold(0.0, f64::max),
    };
    Ok((first.expect("at least one repetition"), timing))
}

/// Median; the mean of the two middle values for even lengths. NaN if empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Records of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult<R> {
    pub id: String,
    pub records: Vec<R>,
}

impl<R: Serialize> ExperimentResult<R> {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| TtError::Format(e.to_string()))
    }
}

/// Single-tensor rounding algorithms compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// TT-rounding to the target ranks.
    Deterministic,
    OrthRand,
    RandOrth,
    TwoSided,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Deterministic,
        Method::OrthRand,
        Method::RandOrth,
        Method::TwoSided,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Deterministic => "deterministic",
            Method::OrthRand => "orth-rand",
            Method::RandOrth => "rand-orth",
            Method::TwoSided => "two-sided",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn round(self, y: &TtTensor, target: &RankProfile, seed: u64) -> Result<TtTensor> {
        let cfg = || RoundingConfig::new(target.clone(), seed);
        Ok(match self {
            Method::Deterministic => tt_round_to_ranks(y, target)?,
            Method::OrthRand => round_orth_rand(y, &cfg())?.tensor,
            Method::RandOrth => round_rand_orth(y, &cfg())?.tensor,
            Method::TwoSided => round_two_sided(y, &cfg())?.tensor,
        })
    }
}

/// Seeds `base, base + 1, ..` of an experiment.
fn seed_list(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|k| base.wrapping_add(k)).collect()
}

/// Maps `f` over the seeds, in parallel if asked; output keeps seed order.
fn over_seeds<T: Send>(
    seeds: &[u64],
    parallel: bool,
    f: impl Fn(u64) -> Result<Vec<T>> + Sync,
) -> Result<Vec<T>> {
    let chunks: Vec<Vec<T>> = if parallel {
        seeds.par_iter().map(|&s| f(s)).collect::<Result<_>>()?
    } else {
        seeds.iter().map(|&s| f(s)).collect::<Result<_>>()?
    };
    Ok(chunks.into_iter().flatten().collect())
}
