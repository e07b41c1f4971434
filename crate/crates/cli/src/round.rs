use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde_json::json;
use ttround::det::{tt_round, tt_round_to_ranks};
use ttround::randomized::{
    round_orth_rand, round_rand_orth, round_rand_orth_adaptive, round_sum_rand_orth,
    round_sum_rand_orth_adaptive, round_two_sided, Rounded, RoundingConfig,
};
use ttround::tt::add_many;
use ttround::TtTensor;

use crate::{load, print_json, rank_profile, save};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Alg {
    TtRound,
    OrthRand,
    RandOrth,
    TwoSided,
}

#[derive(Args)]
pub struct RoundArgs {
    #[arg(long, value_enum)]
    alg: Alg,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Target bond ranks, comma separated (one value applies to every bond).
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    /// Relative accuracy. With rand-orth the ranks are the sketch sizes, an
    /// upper bound on the output ranks, and the sketch is truncated to this
    /// accuracy.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Right sketch ranks of the two-sided algorithm (defaults to 1.5x the
    /// target ranks).
    #[arg(long, value_delimiter = ',')]
    oversampled: Option<Vec<usize>>,
}

#[derive(Args)]
pub struct SumRoundArgs {
    /// One summand per flag.
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Sketch ranks, comma separated (one value applies to every bond). With
    /// --tol these are upper bounds on the output ranks.
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    /// Truncate the sketched result to this relative accuracy.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TT-round the assembled sum instead (uses --tol, or --ranks as fixed ranks).
    #[arg(long)]
    deterministic: bool,
}

pub fn run(a: RoundArgs) -> Result<()> {
    let y = load(&a.input)?;
    let start = Instant::now();
    let (x, capped) = match a.alg {
        Alg::TtRound => match (&a.ranks, a.tol) {
            (None, Some(tol)) => (tt_round(&y, tol)?, vec![]),
            (Some(r), None) => (tt_round_to_ranks(&y, &rank_profile(y.order(), r)?)?, vec![]),
            _ => bail!("tt-round needs exactly one of --tol and --ranks"),
        },
        alg => {
            let Some(ranks) = &a.ranks else {
                bail!(
                    "{} needs --ranks",
                    alg.to_possible_value()
                        .expect("no skipped variants")
                        .get_name()
                );
            };
            let target = rank_profile(y.order(), ranks)?;
            if a.oversampled.is_some() && !matches!(alg, Alg::TwoSided) {
                bail!("--oversampled only applies to two-sided");
            }
            let out = match (alg, a.tol) {
                (Alg::RandOrth, Some(tol)) => round_rand_orth_adaptive(&y, &target, tol, a.seed)?,
                (_, Some(_)) => bail!("--tol is only supported by tt-round and rand-orth"),
                (Alg::OrthRand, None) => round_orth_rand(&y, &RoundingConfig::new(target, a.seed))?,
                (Alg::RandOrth, None) => round_rand_orth(&y, &RoundingConfig::new(target, a.seed))?,
                (Alg::TwoSided, None) => {
                    let mut cfg = RoundingConfig::new(target, a.seed);
                    if let Some(rho) = &a.oversampled {
                        cfg = cfg.with_oversampled(rank_profile(y.order(), rho)?);
                    }
                    round_two_sided(&y, &cfg)?
                }
                (Alg::TtRound, None) => unreachable!(),
            };
            split(out)
        }
    };
    let secs = start.elapsed().as_secs_f64();
    save(&x, &a.out)?;
    let name = a.alg.to_possible_value().expect("no skipped variants");
    summary(name.get_name(), &y, &x, &capped, secs)
}

pub fn run_sum(a: SumRoundArgs) -> Result<()> {
    let terms = a
        .inputs
        .iter()
        .map(|p| load(p))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&TtTensor> = terms.iter().collect();
    let order = terms[0].order();
    let start = Instant::now();
    let (x, capped, name) = if a.deterministic {
        let sum = add_many(&refs)?;
        let x = match (&a.ranks, a.tol) {
            (None, Some(tol)) => tt_round(&sum, tol)?,
            (Some(r), None) => tt_round_to_ranks(&sum, &rank_profile(order, r)?)?,
            _ => bail!("--deterministic needs exactly one of --tol and --ranks"),
        };
        (x, vec![], "tt-round")
    } else {
        let Some(ranks) = &a.ranks else {
            bail!("the randomized sum rounding needs --ranks");
        };
        let target = rank_profile(order, ranks)?;
        let out = match a.tol {
            Some(tol) => round_sum_rand_orth_adaptive(&refs, &target, tol, a.seed)?,
            None => round_sum_rand_orth(&refs, &RoundingConfig::new(target, a.seed))?,
        };
        let (x, capped) = split(out);
        (x, capped, "sum-rand-orth")
    };
    let secs = start.elapsed().as_secs_f64();
    save(&x, &a.out)?;
    summary(name, &add_many(&refs)?, &x, &capped, secs)
}

fn split(r: Rounded) -> (TtTensor, Vec<usize>) {
    (r.tensor, r.capped_bonds)
}

fn summary(alg: &str, y: &TtTensor, x: &TtTensor, capped: &[usize], secs: f64) -> Result<()> {
    print_json(&json!({
        "algorithm": alg,
        "input_ranks": y.ranks(),
        "output_ranks": x.ranks(),
        "capped_bonds": capped,
        "relative_error": x.relative_error(y)?,
        "seconds": secs,
    }))
}
