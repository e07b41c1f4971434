use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use ttround::experiments::{
    gmres_speedups, run_gmres, run_hilbert, run_perturbed, run_sum, GmresExperimentConfig,
    HilbertConfig, PerturbedConfig, SumConfig, SumMethod,
};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Experiment {
    /// Single-tensor roundings of `X1 + eps X2`.
    Perturbed,
    /// Rounding sums of random TT-tensors.
    Sum,
    /// TT-GMRES on the surrogate problem, both rounding paths.
    Gmres,
    /// Single-tensor roundings of the Hilbert-type tensor.
    Hilbert,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    /// Use the full-size configuration (slow; no pass/fail thresholds).
    #[arg(long)]
    paper_scale: bool,
    /// Run the seeds on the thread pool (see TTROUND_THREADS).
    #[arg(long)]
    parallel_seeds: bool,
    #[arg(long)]
    seeds: Option<usize>,
    /// First seed; the others follow consecutively.
    #[arg(long)]
    seed: Option<u64>,
    /// Timed repetitions per measurement.
    #[arg(long)]
    reps: Option<usize>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary destination (stderr when absent).
    #[arg(long)]
    summary: Option<PathBuf>,
}

pub fn run(a: BenchArgs) -> Result<()> {
    let (csv, summary) = match a.experiment {
        Experiment::Perturbed => {
            let mut cfg = if a.paper_scale {
                PerturbedConfig::paper_scale()
            } else {
                PerturbedConfig::default()
            };
            cfg.parallel_seeds = a.parallel_seeds;
            cfg.seeds = a.seeds.unwrap_or(cfg.seeds);
            cfg.base_seed = a.seed.unwrap_or(cfg.base_seed);
            cfg.reps = a.reps.unwrap_or(cfg.reps);
            let res = run_perturbed(&cfg)?;
            let mut errors = Vec::new();
            for &eps in &cfg.eps {
                for &m in &cfg.methods {
                    for &ell in &cfg.ells {
                        errors.push(json!({"eps": eps, "method": m, "ell": ell, "median_error": res.median_error(eps, m, ell)}));
                    }
                }
            }
            (
                res.to_csv()?,
                json!({"experiment": res.id, "records": res.records.len(), "median_errors": errors}),
            )
        }
        Experiment::Sum => {
            let mut cfg = if a.paper_scale {
                SumConfig::paper_scale()
            } else {
                SumConfig::default()
            };
            cfg.parallel_seeds = a.parallel_seeds;
            cfg.seeds = a.seeds.unwrap_or(cfg.seeds);
            cfg.base_seed = a.seed.unwrap_or(cfg.base_seed);
            cfg.reps = a.reps.unwrap_or(cfg.reps);
            let res = run_sum(&cfg)?;
            let largest = *cfg.terms.iter().max().expect("nonempty term grid");
            let exponents: Vec<Value> = SumMethod::ALL
                .iter()
                .map(|&m| json!({"method": m, "exponent": res.scaling_exponent(m)}))
                .collect();
            let speedup = res.median_time(SumMethod::TtRound, largest)
                / res.median_time(SumMethod::SumRandOrth, largest);
            let summary = json!({
                "experiment": res.id,
                "records": res.records.len(),
                "scaling_exponents": exponents,
                "speedup_at_largest_s": {"s": largest, "speedup": speedup},
                "max_disagreement": res.max_disagreement(),
            });
            (res.to_csv()?, summary)
        }
        Experiment::Gmres => {
            if a.parallel_seeds || a.seeds.is_some() {
                bail!("the gmres experiment runs a single seed");
            }
            let mut cfg = if a.paper_scale {
                GmresExperimentConfig::paper_scale()
            } else {
                GmresExperimentConfig::default()
            };
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.reps = a.reps.unwrap_or(cfg.reps);
            let res = run_gmres(&cfg)?;
            let iterations: Vec<Value> = res
                .records
                .iter()
                .map(|r| json!({"samples": r.samples, "path": r.path, "iterations": r.iterations, "converged": r.converged}))
                .collect();
            let summary = json!({
                "experiment": res.id,
                "records": res.records.len(),
                "iterations": iterations,
                "speedups": gmres_speedups(&res),
            });
            (res.to_csv()?, summary)
        }
        Experiment::Hilbert => {
            // The default already is the full-size configuration.
            let mut cfg = HilbertConfig::default();
            cfg.parallel_seeds = a.parallel_seeds;
            cfg.seeds = a.seeds.unwrap_or(cfg.seeds);
            cfg.base_seed = a.seed.unwrap_or(cfg.base_seed);
            cfg.reps = a.reps.unwrap_or(cfg.reps);
            let res = run_hilbert(&cfg)?;
            let errors: Vec<Value> = cfg
                .methods
                .iter()
                .flat_map(|&m| cfg.targets.iter().map(move |&k| (m, k)))
                .map(|(m, k)| json!({"method": m, "target": k, "median_error": res.median_error(m, k)}))
                .collect();
            (
                res.to_csv()?,
                json!({"experiment": res.id, "records": res.records.len(), "median_errors": errors}),
            )
        }
    };
    emit(&csv, a.out.as_ref(), &summary, a.summary.as_ref())
}

fn emit(
    csv: &str,
    out: Option<&PathBuf>,
    summary: &Value,
    summary_path: Option<&PathBuf>,
) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    let text = serde_json::to_string_pretty(summary)?;
    match summary_path {
        Some(p) => writeln!(
            File::create(p).with_context(|| format!("writing {}", p.display()))?,
            "{text}"
        )?,
        None => eprintln!("{text}"),
    }
    Ok(())
}
