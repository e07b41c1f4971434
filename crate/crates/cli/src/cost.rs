use anyhow::{bail, Result};
use clap::Args;
use ttround::cost::{beta_grid, speedup_curve, Algorithm, CostModel};

/// Prints `algorithm,coefficient,flops,speedup` for every algorithm, or the
/// `beta,orth_rand,rand_orth,two_sided` speedup curve with `--curve`.
///
/// The coefficient is the cost divided by `(N-2) I R^3` at the given beta;
/// the flop count uses the target rank `round(beta R)`.
#[derive(Args)]
pub struct CostArgs {
    /// Target over input rank, in (0, 1].
    #[arg(long, required_unless_present = "curve")]
    beta: Option<f64>,
    /// Tensor order.
    #[arg(long = "N", default_value_t = 10)]
    order: usize,
    /// Mode size.
    #[arg(long = "I", default_value_t = 100)]
    mode: usize,
    /// Input rank.
    #[arg(long = "R", default_value_t = 100)]
    rank: usize,
    /// Number of summands for the sum variant.
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Emit the predicted speedup curve on this many evenly spaced betas.
    #[arg(long, conflicts_with = "beta")]
    curve: Option<usize>,
}

pub fn run(a: CostArgs) -> Result<()> {
    if let Some(points) = a.curve {
        println!("beta,orth_rand,rand_orth,two_sided");
        for r in speedup_curve(&beta_grid(points)).map_err(anyhow::Error::msg)? {
            println!("{},{},{},{}", r.beta, r.orth_rand, r.rand_orth, r.two_sided);
        }
        return Ok(());
    }
    let beta = a.beta.expect("clap requires --beta without --curve");
    if !(beta > 0.0 && beta <= 1.0) {
        bail!("--beta must lie in (0, 1], got {beta}");
    }
    if a.order < 2 || a.mode == 0 || a.rank == 0 || a.s == 0 {
        bail!("--N must be at least 2 and --I, --R, --s positive");
    }
    let target = ((beta * a.rank as f64).round() as usize).max(1);
    let flops = |alg| {
        CostModel::new(alg, a.order, a.mode, a.rank, target)
            .with_terms(a.s)
            .flops()
    };
    let unit = (a.order - 2) as f64 * a.mode as f64 * (a.rank as f64).powi(3);
    let base = flops(Algorithm::TtRound);
    println!("algorithm,coefficient,flops,speedup");
    for alg in Algorithm::ALL {
        let coef = alg.coefficient(beta).unwrap_or_else(|| flops(alg) / unit);
        let f = flops(alg);
        println!("{},{},{},{}", alg.name(), coef, f, base / f);
    }
    Ok(())
}
