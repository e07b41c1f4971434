use std::fmt;

use crate::dense::gemm::{gemm, mul, View};
use crate::det;
use crate::{Matrix, Result, TtError};

use super::TtCore;

/// Default cap on the number of entries [`TtTensor::full`] will materialize.
pub const DEFAULT_DENSE_CAP: usize = 10_000_000;

/// First broken invariant found by [`TtTensor::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoCores,
    /// Boundary rank of the first (`core == 0`) or last core is not 1.
    BoundaryRank {
        core: usize,
        rank: usize,
    },
    /// `cores[bond-1].r_right != cores[bond].r_left`; bonds are numbered from 1.
    BondMismatch {
        bond: usize,
        left: usize,
        right: usize,
    },
    NonFinite {
        core: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoCores => write!(f, "tensor has no cores"),
            Violation::BoundaryRank { core, rank } => {
                write!(f, "core {core} has boundary rank {rank}, expected 1")
            }
            Violation::BondMismatch { bond, left, right } => {
                write!(
                    f,
                    "bond {bond}: left core has r_right={left}, right core has r_left={right}"
                )
            }
            Violation::NonFinite { core } => write!(f, "core {core} holds a non-finite entry"),
        }
    }
}

/// A tensor in TT format: an ordered chain of order-3 cores with matching
/// bond ranks and boundary ranks 1.
///
/// Values are immutable once built; every operation allocates its result.
#[derive(Debug, Clone, PartialEq)]
pub struct TtTensor {
    cores: Vec<TtCore>,
}

/// Dense N-way array with the first index running fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

impl DenseTensor {
    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.dims)
            .rev()
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl TtTensor {
    /// Builds a tensor and checks every invariant.
    pub fn new(cores: Vec<TtCore>) -> Result<Self> {
        let tt = TtTensor { cores };
        tt.validate().map_err(TtError::Invalid)?;
        Ok(tt)
    }

    /// Skips validation; used to exercise [`TtTensor::validate`] and by
    /// routines whose construction already guarantees the invariants.
    pub fn from_cores_unchecked(cores: Vec<TtCore>) -> Self {
        TtTensor { cores }
    }

    /// Reports the first broken invariant, if any.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.cores.len();
        if n == 0 {
            return Err(Violation::NoCores);
        }
        if self.cores[0].r_left() != 1 {
            return Err(Violation::BoundaryRank {
                core: 0,
                rank: self.cores[0].r_left(),
            });
        }
        for (k, core) in self.cores.iter().enumerate() {
            if !core.is_finite() {
                return Err(Violation::NonFinite { core: k });
            }
            if k + 1 < n && core.r_right() != self.cores[k + 1].r_left() {
                return Err(Violation::BondMismatch {
                    bond: k + 1,
                    left: core.r_right(),
                    right: self.cores[k + 1].r_left(),
                });
            }
        }
        if self.cores[n - 1].r_right() != 1 {
            return Err(Violation::BoundaryRank {
                core: n - 1,
                rank: self.cores[n - 1].r_right(),
            });
        }
        Ok(())
    }

    /// Rank-1 tensor with every core zero.
    pub fn zeros(dims: &[usize]) -> Self {
        TtTensor {
            cores: dims.iter().map(|&d| TtCore::zeros(1, d, 1)).collect(),
        }
    }

    /// Rank-1 tensor of all ones.
    pub fn ones(dims: &[usize]) -> Self {
        TtTensor {
            cores: dims
                .iter()
                .map(|&d| TtCore::from_fn(1, d, 1, |_, _, _| 1.0))
                .collect(),
        }
    }

    /// Rank-1 tensor `v_1 o v_2 o ... o v_N`.
    pub fn rank_one(vectors: &[Vec<f64>]) -> Result<Self> {
        let cores = vectors
            .iter()
            .map(|v| TtCore::new(1, v.len(), 1, v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cores)
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[TtCore] {
        &self.cores
    }

    pub fn core(&self, n: usize) -> &TtCore {
        &self.cores[n]
    }

    pub fn into_cores(self) -> Vec<TtCore> {
        self.cores
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cores.iter().map(TtCore::mode).collect()
    }

    /// All `N + 1` ranks including the boundary ones.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = Vec::with_capacity(self.cores.len() + 1);
        r.push(self.cores.first().map_or(1, TtCore::r_left));
        r.extend(self.cores.iter().map(TtCore::r_right));
        r
    }

    /// The `N - 1` internal bond ranks.
    pub fn internal_ranks(&self) -> Vec<usize> {
        self.cores
            .iter()
            .take(self.cores.len().saturating_sub(1))
            .map(TtCore::r_right)
            .collect()
    }

    pub fn max_rank(&self) -> usize {
        self.ranks().into_iter().max().unwrap_or(1)
    }

    /// Number of stored floating-point values.
    pub fn storage(&self) -> usize {
        self.cores.iter().map(TtCore::len).sum()
    }

    pub fn check_same_dims(&self, other: &TtTensor) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(TtError::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(())
    }

    /// Entry at a 0-based multi-index: the product of the selected slices.
    pub fn entry(&self, idx: &[usize]) -> Result<f64> {
        if idx.len() != self.order() {
            return Err(TtError::IndexOutOfBounds(format!(
                "index has {} components, tensor has order {}",
                idx.len(),
                self.order()
            )));
        }
        let mut row = vec![1.0];
        for (n, (core, &i)) in self.cores.iter().zip(idx).enumerate() {
            if i >= core.mode() {
                return Err(TtError::IndexOutOfBounds(format!(
                    "index {i} in mode {n} exceeds dimension {}",
                    core.mode()
                )));
            }
            let mut next = vec![0.0; core.r_right()];
            for (b, out) in next.iter_mut().enumerate() {
                *out = row
                    .iter()
                    .enumerate()
                    .map(|(a, x)| x * core.get(a, i, b))
                    .sum();
            }
            row = next;
        }
        Ok(row[0])
    }

    /// Materializes the dense tensor; refuses more than `cap` entries.
    pub fn full_with_cap(&self, cap: usize) -> Result<DenseTensor> {
        let dims = self.dims();
        let entries: u128 = dims.iter().map(|&d| d as u128).product();
        if entries > cap as u128 {
            return Err(TtError::DenseCapExceeded { entries, cap });
        }
        // Left-to-right: `acc` is (I_1...I_n) x R_n, column-major.
        let mut acc = Matrix::from_element(1, 1, 1.0);
        for core in &self.cores {
            let rows = acc.nrows();
            let mut next = Matrix::zeros(rows * core.mode(), core.r_right());
            for i in 0..core.mode() {
                let s = core.slice(i);
                let block = &acc * s;
                for b in 0..core.r_right() {
                    for r in 0..rows {
                        next[(r + rows * i, b)] = block[(r, b)];
                    }
                }
            }
            acc = next;
        }
        Ok(DenseTensor {
            dims,
            data: acc.as_slice().to_vec(),
        })
    }

    pub fn full(&self) -> Result<DenseTensor> {
        self.full_with_cap(DEFAULT_DENSE_CAP)
    }

    /// `alpha * self`; the first core absorbs the factor.
    pub fn scale(&self, alpha: f64) -> TtTensor {
        let mut cores = self.cores.clone();
        cores[0] = cores[0].scaled(alpha);
        TtTensor { cores }
    }

    /// Sum with block-diagonal middle cores; internal ranks add up.
    pub fn add(&self, other: &TtTensor) -> Result<TtTensor> {
        self.check_same_dims(other)?;
        add_many(&[self, other])
    }

    /// Frobenius norm, via right-to-left orthogonalization.
    pub fn norm(&self) -> f64 {
        if self.order() == 1 {
            return self.cores[0].frobenius_norm();
        }
        det::orthogonalize_rl(self).core(0).frobenius_norm()
    }

    /// Inner product by a full right-to-left contraction.
    pub fn inner(&self, other: &TtTensor) -> Result<f64> {
        self.check_same_dims(other)?;
        let n = self.order();
        let mut w = Matrix::from_element(1, 1, 1.0);
        for k in (0..n).rev() {
            let z = self.cores[k].mul_right(View::of(&w));
            w = mul(z.h_view(), other.cores[k].h_view().t());
        }
        Ok(w[(0, 0)])
    }

    /// `||self - reference|| / ||reference||`, with the difference norm
    /// computed by orthogonalizing `self - reference` in TT format.
    pub fn relative_error(&self, reference: &TtTensor) -> Result<f64> {
        self.check_same_dims(reference)?;
        let denom = reference.norm();
        if denom == 0.0 {
            return Err(TtError::ZeroNorm);
        }
        let diff = self.add(&reference.scale(-1.0))?;
        Ok(diff.norm() / denom)
    }

    /// Same quantity through `<X,X> - 2<X,Y> + <Y,Y>`, clamped at zero.
    ///
    /// Cheaper, but cancellation limits it to roughly `1e-8` relative: do not
    /// use it to measure errors below that.
    pub fn relative_error_gram(&self, reference: &TtTensor) -> Result<f64> {
        self.check_same_dims(reference)?;
        let yy = reference.inner(reference)?;
        if yy == 0.0 {
            return Err(TtError::ZeroNorm);
        }
        let sq = self.inner(self)? - 2.0 * self.inner(reference)? + yy;
        Ok(sq.max(0.0).sqrt() / yy.sqrt())
    }
}

/// Explicit TT sum of several tensors of equal dimensions.
pub fn add_many(terms: &[&TtTensor]) -> Result<TtTensor> {
    let first = terms
        .first()
        .ok_or_else(|| TtError::InvalidArgument("empty sum".into()))?;
    for t in &terms[1..] {
        first.check_same_dims(t)?;
    }
    let n = first.order();
    if n == 1 {
        let mut data = vec![0.0; first.cores[0].mode()];
        for t in terms {
            for (d, v) in data.iter_mut().zip(t.cores[0].as_slice()) {
                *d += v;
            }
        }
        return Ok(TtTensor {
            cores: vec![TtCore::from_raw(1, data.len(), 1, data)],
        });
    }
    let mut cores = Vec::with_capacity(n);
    for k in 0..n {
        let mode = first.cores[k].mode();
        let first_core = k == 0;
        let last_core = k == n - 1;
        let rl: usize = if first_core {
            1
        } else {
            terms.iter().map(|t| t.cores[k].r_left()).sum()
        };
        let rr: usize = if last_core {
            1
        } else {
            terms.iter().map(|t| t.cores[k].r_right()).sum()
        };
        let mut data = vec![0.0; rl * mode * rr];
        let (mut a0, mut b0) = (0, 0);
        for t in terms {
            let c = &t.cores[k];
            for b in 0..c.r_right() {
                for i in 0..mode {
                    for a in 0..c.r_left() {
                        data[(a0 + a) + rl * (i + mode * (b0 + b))] = c.get(a, i, b);
                    }
                }
            }
            if !first_core {
                a0 += c.r_left();
            }
            if !last_core {
                b0 += c.r_right();
            }
        }
        cores.push(TtCore::from_raw(rl, mode, rr, data));
    }
    Ok(TtTensor { cores })
}

/// Sum of `coeffs[j] * terms[j]`, assembled explicitly.
pub fn linear_combination(terms: &[&TtTensor], coeffs: &[f64]) -> Result<TtTensor> {
    if terms.len() != coeffs.len() {
        return Err(TtError::InvalidArgument(
            "terms and coefficients differ in length".into(),
        ));
    }
    let scaled: Vec<TtTensor> = terms.iter().zip(coeffs).map(|(t, &c)| t.scale(c)).collect();
    add_many(&scaled.iter().collect::<Vec<_>>())
}

/// Horizontal-unfolding product used by the contraction sweeps:
/// `w_out = H(x) * H(y)^T` accumulated into a preallocated buffer.
pub(crate) fn h_cross(x: &TtCore, y: &TtCore) -> Matrix {
    let mut out = vec![0.0; x.r_left() * y.r_left()];
    gemm(
        1.0,
        x.h_view(),
        y.h_view().t(),
        0.0,
        &mut out,
        x.r_left().max(1),
    );
    Matrix::from_vec(x.r_left(), y.r_left(), out)
}
