//! `ttround`: round TT-tensors, solve parametric systems with TT-GMRES and
//! run the benchmark experiments.
//!
//! Set `TTROUND_THREADS` to size the worker pool used by `--parallel-seeds`.

mod bench;
mod cost;
mod gen;
mod round;
mod solve;

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, Parser, Subcommand};
use ttround::{RankProfile, TtTensor};

const THREADS_ENV: &str = "TTROUND_THREADS";

#[derive(Parser)]
#[command(
    name = "ttround",
    version,
    about = "Deterministic and randomized rounding of TT-tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Round one TT-tensor.
    Round(round::RoundArgs),
    /// Round a sum of TT-tensors without assembling it.
    SumRound(round::SumRoundArgs),
    /// Solve a Kronecker-sum system with TT-GMRES.
    Gmres(solve::GmresArgs),
    /// Run an experiment and emit its records as CSV.
    Bench(bench::BenchArgs),
    /// Print leading-order flop coefficients and predicted speedups.
    CostModel(cost::CostArgs),
    /// Write a test tensor or the surrogate problem.
    Gen(gen::GenArgs),
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_ENV}={value:?} is not a thread count"))?;
    // 0 keeps rayon's default (one thread per core).
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

/// Like `Cli::parse`, but every usage error also shows the usage line of the
/// subcommand involved (clap omits it for invalid values).
fn parse() -> Cli {
    Cli::try_parse().unwrap_or_else(|e| {
        let rendered = e.render().to_string();
        if !e.use_stderr() || rendered.contains("Usage:") {
            e.exit()
        }
        let mut cmd = Cli::command();
        cmd.build();
        let sub = std::env::args().nth(1);
        let usage = match sub.as_deref().and_then(|s| cmd.find_subcommand_mut(s)) {
            Some(sc) => sc.render_usage(),
            None => cmd.render_usage(),
        };
        eprint!("{rendered}");
        eprintln!("\n{usage}");
        std::process::exit(e.exit_code())
    })
}

fn main() -> Result<()> {
    let cli = parse();
    configure_threads()?;
    match cli.command {
        Command::Round(a) => round::run(a),
        Command::SumRound(a) => round::run_sum(a),
        Command::Gmres(a) => solve::run(a),
        Command::Bench(a) => bench::run(a),
        Command::CostModel(a) => cost::run(a),
        Command::Gen(a) => gen::run(a),
    }
}

/// Target ranks from the command line: one value per bond, or a single value
/// used for every bond.
pub(crate) fn rank_profile(order: usize, ranks: &[usize]) -> Result<RankProfile> {
    let bonds = order.saturating_sub(1);
    let ranks = match ranks {
        [r] => vec![*r; bonds],
        _ if ranks.len() == bonds => ranks.to_vec(),
        _ => bail!(
            "an order-{order} tensor has {bonds} bonds, got {} ranks",
            ranks.len()
        ),
    };
    Ok(RankProfile::new(ranks)?)
}

pub(crate) fn load(path: &Path) -> Result<TtTensor> {
    ttround::tt::io::load(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn save(tt: &TtTensor, path: &Path) -> Result<()> {
    ttround::tt::io::save(tt, path).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}
