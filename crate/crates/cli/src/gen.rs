use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde_json::json;
use ttround::generators::{hilbert_tt, perturbed_tensor};
use ttround::gmres::build_cookie_surrogate;
use ttround::tt::random_gaussian_tt;
use ttround::{RankProfile, TtTensor};

use crate::{print_json, rank_profile, save};

#[derive(Args)]
pub struct GenArgs {
    #[command(subcommand)]
    kind: Kind,
}

#[derive(Subcommand)]
enum Kind {
    /// Cores filled with `1 / (i1 + i2 + i3 - 1)`.
    Hilbert {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Internal bond ranks.
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gaussian cores.
    Random {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// `X1 + eps X2` with random rank-`rank` tensors `X1`, `X2`.
    Perturbed {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the unperturbed `X1`.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Operator JSON and right-hand side of the parametric diffusion surrogate.
    Surrogate {
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        params: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0])]
        rho_range: Vec<f64>,
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
    },
}

pub fn run(a: GenArgs) -> Result<()> {
    match a.kind {
        Kind::Hilbert { dims, ranks, out } => {
            let x = hilbert_tt(&dims, &profile(&dims, &ranks)?)?;
            written(&x, &out)
        }
        Kind::Random {
            dims,
            ranks,
            seed,
            out,
        } => {
            let x = random_gaussian_tt(&dims, &profile(&dims, &ranks)?, seed)?;
            written(&x, &out)
        }
        Kind::Perturbed {
            dims,
            rank,
            eps,
            seed,
            out,
            base,
        } => {
            let (x, x1) = perturbed_tensor(&dims, rank, eps, seed)?;
            if let Some(p) = &base {
                save(&x1, p)?;
            }
            written(&x, &out)
        }
        Kind::Surrogate {
            grid,
            params,
            samples,
            rho_range,
            operator,
            rhs,
        } => {
            let [lo, hi] = rho_range[..] else {
                bail!("--rho-range takes LOW,HIGH");
            };
            let (op, f) = build_cookie_surrogate(grid, params, samples, (lo, hi))?;
            std::fs::write(&operator, op.to_json()?)
                .with_context(|| format!("writing {}", operator.display()))?;
            save(&f, &rhs)?;
            print_json(&json!({
                "operator": operator,
                "rhs": rhs,
                "dims": op.dims(),
                "terms": op.num_terms(),
            }))
        }
    }
}

fn profile(dims: &[usize], ranks: &[usize]) -> Result<RankProfile> {
    if dims.is_empty() {
        bail!("--dims needs at least one mode");
    }
    rank_profile(dims.len(), ranks)
}

fn written(x: &TtTensor, out: &PathBuf) -> Result<()> {
    save(x, out)?;
    print_json(&json!({
        "path": out,
        "dims": x.dims(),
        "ranks": x.ranks(),
        "norm": x.norm(),
    }))
}
