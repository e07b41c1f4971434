//! Deterministic TT algorithms: orthogonalization sweeps, TT-rounding and
//! partial contractions.

use crate::dense::gemm::{mul, View};
use crate::dense::{qr, svd, svd_trunc, LowRankSvd};
use crate::tt::{h_cross, TtCore, TtTensor};
use crate::{Matrix, RankProfile, Result, TtError};

/// How a rounding sweep decides the retained rank at each bond.
#[derive(Debug, Clone, PartialEq)]
pub enum Truncation {
    /// Relative accuracy `eps0`: the result satisfies
    /// `||X - Y|| <= eps0 ||Y||`.
    Tolerance(f64),
    /// Fixed target ranks (capped at what each bond can hold).
    Ranks(RankProfile),
}

/// Which direction a [`SketchSet`] was accumulated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Partial contraction matrices `W_1 .. W_{N-1}` of two TT-tensors.
///
/// * `Side::Right`: `W_n = H(X^{n+1:N}) H(Y^{n+1:N})^T`, `R^X_n x R^Y_n`.
/// * `Side::Left`: `W_n = V(L^{1:n})^T V(X^{1:n})`, `l_n x R^X_n`.
///
/// `mats[n - 1]` holds `W_n`.
#[derive(Debug, Clone)]
pub struct SketchSet {
    pub side: Side,
    pub mats: Vec<Matrix>,
}

impl SketchSet {
    /// `W_n` for `1 <= n <= N-1`.
    pub fn bond(&self, n: usize) -> &Matrix {
        &self.mats[n - 1]
    }
}

/// Column-major transpose of the horizontal-unfolding view of `core`.
fn h_transposed(core: &TtCore) -> Matrix {
    let h = core.h_view();
    Matrix::from_fn(h.cols, h.rows, |c, a| h.data[a + h.rows * c])
}

/// Core with horizontal unfolding `q^T` (`q` is `(mode*r_right) x k`).
fn core_from_q_transposed(q: &Matrix, mode: usize, r_right: usize) -> TtCore {
    let k = q.ncols();
    let mut data = vec![0.0; k * mode * r_right];
    for a in 0..k {
        let col = q.column(a);
        for (c, v) in col.iter().enumerate() {
            data[a + k * c] = *v;
        }
    }
    TtCore::new(k, mode, r_right, data).expect("nonempty factor")
}

/// Right-to-left orthogonalization: the horizontal unfoldings of cores
/// `2..N` of the result have orthonormal rows.
///
/// A bond rank `R_{n-1}` larger than `I_n R_n` shrinks to `I_n R_n`.
pub fn orthogonalize_rl(y: &TtTensor) -> TtTensor {
    let mut cores = y.cores().to_vec();
    for n in (1..cores.len()).rev() {
        let (mode, rr) = (cores[n].mode(), cores[n].r_right());
        let f = qr(&h_transposed(&cores[n]));
        cores[n] = core_from_q_transposed(&f.q, mode, rr);
        cores[n - 1] = cores[n - 1].mul_right(View::of(&f.r).t());
    }
    TtTensor::from_cores_unchecked(cores)
}

/// Left-to-right orthogonalization: the vertical unfoldings of cores
/// `1..N-1` of the result have orthonormal columns.
pub fn orthogonalize_lr(y: &TtTensor) -> TtTensor {
    let mut cores = y.cores().to_vec();
    for n in 0..cores.len().saturating_sub(1) {
        let (rl, mode) = (cores[n].r_left(), cores[n].mode());
        let f = qr(&cores[n].v_unfold());
        cores[n] =
            TtCore::new(rl, mode, f.q.ncols(), f.q.as_slice().to_vec()).expect("nonempty factor");
        cores[n + 1] = cores[n + 1].mul_left(View::of(&f.r));
    }
    TtTensor::from_cores_unchecked(cores)
}

fn truncate(r: &Matrix, rule: &Truncation, eps: f64, bond: usize) -> Result<LowRankSvd> {
    match rule {
        Truncation::Tolerance(_) => svd_trunc(r, eps),
        Truncation::Ranks(ranks) => {
            let full = svd(r);
            let k = ranks.as_slice()[bond].min(full.rank()).max(1);
            Ok(LowRankSvd {
                u: full.u.columns(0, k).into_owned(),
                s: full.s[..k].to_vec(),
                v: full.v.columns(0, k).into_owned(),
                threshold_used: 0.0,
            })
        }
    }
}

fn check_rule(y: &TtTensor, rule: &Truncation) -> Result<()> {
    match rule {
        Truncation::Tolerance(eps0) if !(*eps0 >= 0.0) => Err(TtError::InvalidArgument(format!(
            "tolerance must be >= 0, got {eps0}"
        ))),
        Truncation::Ranks(r) if r.len() + 1 != y.order() => Err(TtError::InvalidArgument(format!(
            "order {} needs {} target ranks, got {}",
            y.order(),
            y.order() - 1,
            r.len()
        ))),
        _ => Ok(()),
    }
}

/// Left-to-right truncation of a right-orthogonal tensor with absolute
/// per-bond budget `eps`.
fn truncate_lr(mut cores: Vec<TtCore>, rule: &Truncation, eps: f64) -> Result<TtTensor> {
    for n in 0..cores.len() - 1 {
        let (rl, mode) = (cores[n].r_left(), cores[n].mode());
        let f = qr(&cores[n].v_unfold());
        let t = truncate(&f.r, rule, eps, n)?;
        let qu = mul(View::of(&f.q), View::of(&t.u));
        cores[n] = TtCore::new(rl, mode, t.rank(), qu.as_slice().to_vec())?;
        cores[n + 1] = cores[n + 1].mul_left(View::of(&t.sigma_vt()));
    }
    Ok(TtTensor::from_cores_unchecked(cores))
}

/// Right-to-left truncation of a left-orthogonal tensor.
fn truncate_rl(mut cores: Vec<TtCore>, rule: &Truncation, eps: f64) -> Result<TtTensor> {
    for n in (1..cores.len()).rev() {
        let (mode, rr) = (cores[n].mode(), cores[n].r_right());
        // H(X^n)^T = Q R and R = U S V^T, so H(X^n) = (V S) (Q U)^T.
        let f = qr(&h_transposed(&cores[n]));
        let t = truncate(&f.r, rule, eps, n - 1)?;
        let qu = mul(View::of(&f.q), View::of(&t.u));
        cores[n] = core_from_q_transposed(&qu, mode, rr);
        let mut vs = t.v.clone();
        for (k, s) in t.s.iter().enumerate() {
            vs.column_mut(k).scale_mut(*s);
        }
        cores[n - 1] = cores[n - 1].mul_right(View::of(&vs));
    }
    Ok(TtTensor::from_cores_unchecked(cores))
}

fn per_bond_budget(norm: f64, rule: &Truncation, order: usize) -> f64 {
    match rule {
        Truncation::Tolerance(eps0) => norm * eps0 / ((order - 1) as f64).sqrt(),
        Truncation::Ranks(_) => 0.0,
    }
}

/// TT-rounding: right-to-left orthogonalization followed by a left-to-right
/// sweep of truncated SVDs with per-bond budget `||Y|| eps0 / sqrt(N-1)`.
pub fn tt_round(y: &TtTensor, eps0: f64) -> Result<TtTensor> {
    tt_round_with(y, &Truncation::Tolerance(eps0))
}

/// TT-rounding to fixed target ranks.
pub fn tt_round_to_ranks(y: &TtTensor, ranks: &RankProfile) -> Result<TtTensor> {
    tt_round_with(y, &Truncation::Ranks(ranks.clone()))
}

pub fn tt_round_with(y: &TtTensor, rule: &Truncation) -> Result<TtTensor> {
    check_rule(y, rule)?;
    if y.order() == 1 {
        return Ok(y.clone());
    }
    let x = orthogonalize_rl(y);
    let eps = per_bond_budget(x.core(0).frobenius_norm(), rule, y.order());
    truncate_lr(x.into_cores(), rule, eps)
}

/// Truncation phase of TT-rounding for a tensor that is already
/// left-orthogonal (for instance the output of randomize-then-orthogonalize):
/// no orthogonalization sweep, truncation runs from the last core.
///
/// The guarantee `||X - Y|| <= eps0 ||Y||` holds when `y` is exactly
/// left-orthogonal.
pub fn truncate_left_orthogonal(y: &TtTensor, rule: &Truncation) -> Result<TtTensor> {
    check_rule(y, rule)?;
    if y.order() == 1 {
        return Ok(y.clone());
    }
    let norm = y.core(y.order() - 1).frobenius_norm();
    let eps = per_bond_budget(norm, rule, y.order());
    truncate_rl(y.cores().to_vec(), rule, eps)
}

/// Right-to-left partial contractions:
/// `W_n = H(X^{n+1:N}) H(Y^{n+1:N})^T` for `n = 1..N-1`.
pub fn partial_contractions_rl(x: &TtTensor, y: &TtTensor) -> Result<SketchSet> {
    x.check_same_dims(y)?;
    let n = x.order();
    let mut mats = vec![Matrix::zeros(0, 0); n.saturating_sub(1)];
    if n >= 2 {
        let mut w = h_cross(x.core(n - 1), y.core(n - 1));
        for k in (1..n - 1).rev() {
            let z = x.core(k).mul_right(View::of(&w));
            let next = h_cross(&z, y.core(k));
            mats[k] = w;
            w = next;
        }
        mats[0] = w;
    }
    Ok(SketchSet {
        side: Side::Right,
        mats,
    })
}

/// Left-to-right partial contractions with a (random) left tensor `l`:
/// `W_n = V(L^{1:n})^T V(X^{1:n})` for `n = 1..N-1`.
pub fn partial_contractions_lr(x: &TtTensor, l: &TtTensor) -> Result<SketchSet> {
    x.check_same_dims(l)?;
    let n = x.order();
    let mut mats = Vec::with_capacity(n.saturating_sub(1));
    if n >= 2 {
        let mut w = mul(l.core(0).v_view().t(), x.core(0).v_view());
        for k in 1..n - 1 {
            let t = x.core(k).mul_left(View::of(&w));
            let next = mul(l.core(k).v_view().t(), t.v_view());
            mats.push(w);
            w = next;
        }
        mats.push(w);
    }
    Ok(SketchSet {
        side: Side::Left,
        mats,
    })
}
