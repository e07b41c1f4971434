use rayon::prelude::*;

use super::{cap_ranks, Rounded, RoundingConfig, RIGHT_FAMILY};
use crate::dense::gemm::{gemm, mul, View};
use crate::dense::qr;
use crate::det::{partial_contractions_rl, truncate_left_orthogonal, SketchSet, Truncation};
use crate::tt::{random_gaussian_tt_stream, TtCore};
use crate::{RankProfile, Result, TtError, TtTensor};

/// Per-term right-to-left contractions with `r`, computed in parallel.
///
/// The sketch of the assembled sum at bond `n` is the vertical stack of the
/// per-term sketches, in term order.
pub fn sum_sketches(terms: &[&TtTensor], r: &TtTensor) -> Result<Vec<SketchSet>> {
    terms
        .par_iter()
        .map(|t| partial_contractions_rl(t, r))
        .collect()
}

fn check_terms(terms: &[&TtTensor]) -> Result<()> {
    let first = terms
        .first()
        .ok_or_else(|| TtError::InvalidArgument("empty sum".into()))?;
    if first.order() < 2 {
        return Err(TtError::InvalidArgument(
            "sum rounding needs order >= 2".into(),
        ));
    }
    terms[1..].iter().try_for_each(|t| first.check_same_dims(t))
}

/// Randomize-then-orthogonalize applied to `terms[0] + ... + terms[s-1]`
/// without assembling the sum.
///
/// Each term keeps its own block through the sweep: with `B_j` the current
/// block of term `j` at mode `n`, the sketch is `sum_j V(B_j) W_n^(j)`, and
/// after the QR the block becomes `Q^T V(B_j)` multiplied into the next core
/// of term `j`. Given the same seed this matches [`super::round_rand_orth`]
/// on the assembled sum up to rounding errors.
pub fn round_sum_rand_orth(terms: &[&TtTensor], cfg: &RoundingConfig) -> Result<Rounded> {
    check_terms(terms)?;
    let order = terms[0].order();
    cfg.check(order)?;
    let dims = terms[0].dims();
    let sum_ranks: Vec<usize> = (1..order)
        .map(|n| terms.iter().map(|t| t.ranks()[n]).sum())
        .collect();
    let (l, capped_bonds) = cap_ranks(&cfg.target, &sum_ranks, &dims);
    let r = random_gaussian_tt_stream(&dims, &l, cfg.seed, RIGHT_FAMILY)?;
    let sketches = sum_sketches(terms, &r)?;

    let mut blocks: Vec<TtCore> = terms.iter().map(|t| t.core(0).clone()).collect();
    let mut out = Vec::with_capacity(order);
    for n in 0..order - 1 {
        let (rl, mode) = (blocks[0].r_left(), blocks[0].mode());
        let ln = l.as_slice()[n];
        let mut sketch = vec![0.0; rl * mode * ln];
        for (b, s) in blocks.iter().zip(&sketches) {
            gemm(
                1.0,
                b.v_view(),
                View::of(s.bond(n + 1)),
                1.0,
                &mut sketch,
                rl * mode,
            );
        }
        let q = qr(&crate::Matrix::from_vec(rl * mode, ln, sketch)).q;
        blocks = blocks
            .iter()
            .zip(terms)
            .map(|(b, t)| {
                let m = mul(View::of(&q).t(), b.v_view());
                t.core(n + 1).mul_left(View::of(&m))
            })
            .collect();
        out.push(TtCore::new(rl, mode, q.ncols(), q.as_slice().to_vec())?);
    }
    let mut last = blocks.pop().expect("at least one term");
    for b in &blocks {
        last = add_cores(&last, b);
    }
    out.push(last);
    Ok(Rounded {
        tensor: TtTensor::from_cores_unchecked(out),
        capped_bonds,
    })
}

fn add_cores(a: &TtCore, b: &TtCore) -> TtCore {
    let data = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x + y)
        .collect();
    TtCore::new(a.r_left(), a.mode(), a.r_right(), data).expect("same shape")
}

/// [`round_sum_rand_orth`] at ranks `guess`, then deterministic truncation to
/// relative accuracy `eps0`.
pub fn round_sum_rand_orth_adaptive(
    terms: &[&TtTensor],
    guess: &RankProfile,
    eps0: f64,
    seed: u64,
) -> Result<Rounded> {
    if !(eps0 >= 0.0) {
        return Err(TtError::InvalidArgument(format!(
            "tolerance must be >= 0, got {eps0}"
        )));
    }
    let sketched = round_sum_rand_orth(terms, &RoundingConfig::new(guess.clone(), seed))?;
    let tensor = truncate_left_orthogonal(&sketched.tensor, &Truncation::Tolerance(eps0))?;
    Ok(Rounded {
        tensor,
        capped_bonds: sketched.capped_bonds,
    })
}
