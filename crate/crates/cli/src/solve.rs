use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{ArgGroup, Args, ValueEnum};
use serde_json::json;
use ttround::gmres::{
    build_cookie_surrogate, tt_gmres, GmresConfig, GmresTrace, KroneckerSumOperator, RoundingMode,
};

use crate::{load, print_json, save};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Rounding {
    Deterministic,
    Randomized,
}

#[derive(Args)]
#[command(group(ArgGroup::new("problem").required(true).args(["operator", "surrogate"])))]
pub struct GmresArgs {
    /// Operator JSON, as written by `gen surrogate`.
    #[arg(long, requires = "rhs")]
    operator: Option<PathBuf>,
    /// Right-hand side TT file.
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Build the surrogate problem instead: grid points, parameters and
    /// samples per parameter, e.g. `64,3,8`.
    #[arg(long, value_delimiter = ',', num_args = 1, value_names = ["GRID,PARAMS,SAMPLES"])]
    surrogate: Option<Vec<usize>>,
    /// Parameter range of the surrogate.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0])]
    rho_range: Vec<f64>,
    /// Target relative residual.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = Rounding::Deterministic)]
    rounding: Rounding,
    /// Randomized path: extra sketch columns beyond the expected ranks.
    #[arg(long, default_value_t = 10)]
    oversampling: usize,
    /// Randomized path: largest sketch rank.
    #[arg(long, default_value_t = 1000)]
    max_rank: usize,
    /// Rounding accuracy of the basis vectors (defaults to tol / 10).
    #[arg(long)]
    round_tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the solution.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration CSV trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

pub fn run(a: GmresArgs) -> Result<()> {
    let (op, f) = match (&a.operator, &a.surrogate) {
        (Some(op), _) => {
            let text =
                std::fs::read_to_string(op).with_context(|| format!("reading {}", op.display()))?;
            let rhs = a.rhs.as_ref().expect("clap enforces --rhs");
            (KroneckerSumOperator::from_json(&text)?, load(rhs)?)
        }
        (None, Some(s)) => {
            let [grid, params, samples] = s[..] else {
                anyhow::bail!("--surrogate takes GRID,PARAMS,SAMPLES");
            };
            let [lo, hi] = a.rho_range[..] else {
                anyhow::bail!("--rho-range takes LOW,HIGH");
            };
            build_cookie_surrogate(grid, params, samples, (lo, hi))?
        }
        (None, None) => unreachable!("clap requires one problem source"),
    };
    let rounding = match a.rounding {
        Rounding::Deterministic => RoundingMode::Deterministic,
        Rounding::Randomized => RoundingMode::Randomized {
            oversampling: a.oversampling,
            max_rank: a.max_rank,
        },
    };
    let cfg = GmresConfig {
        max_iter: a.max_iter,
        round_tol: a.round_tol,
        seed: a.seed,
        ..GmresConfig::new(a.tol, rounding)
    };
    let start = Instant::now();
    let out = tt_gmres(&op, &f, &cfg)?;
    let secs = start.elapsed().as_secs_f64();
    if let Some(path) = &a.out {
        save(&out.x, path)?;
    }
    if let Some(path) = &a.trace {
        write_trace(&out.trace, path).with_context(|| format!("writing {}", path.display()))?;
    }
    let t = &out.trace;
    print_json(&json!({
        "rounding": a.rounding.to_possible_value().expect("no skipped variants").get_name(),
        "iterations": t.num_iterations(),
        "converged": t.converged,
        "breakdown": t.breakdown,
        "final_residual": t.final_residual(),
        "true_residual": t.true_residual,
        "solution_ranks": out.x.ranks(),
        "seconds": secs,
    }))
}

/// Columns: `iteration,residual,basis_ranks,operator_ranks,
/// operator_round_secs,gram_schmidt_round_secs`; rank lists are joined
/// with `;`.
fn write_trace(trace: &GmresTrace, path: &PathBuf) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "iteration",
        "residual",
        "basis_ranks",
        "operator_ranks",
        "operator_round_secs",
        "gram_schmidt_round_secs",
    ])?;
    let join = |r: &[usize]| {
        r.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    for r in &trace.iterations {
        w.write_record([
            r.iteration.to_string(),
            r.residual.to_string(),
            join(&r.basis_ranks),
            join(&r.operator_ranks),
            r.operator_round_secs.to_string(),
            r.gram_schmidt_round_secs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
