//! Truncated SVDs.
//!
//! Tall inputs are first reduced by the blocked QR; the small square (or
//! wide) core is handed to faer. nalgebra's bidiagonal SVD is not used: it
//! loses accuracy on some graded triangular matrices, which are exactly the
//! R factors the rounding sweeps produce.

use super::gemm::{mul, View};
use super::qr::qr;
use crate::{Matrix, Result, TtError};

/// Truncated singular value decomposition `A ~ U diag(S) V^T`.
#[derive(Debug, Clone)]
pub struct LowRankSvd {
    /// `m x k`, orthonormal columns.
    pub u: Matrix,
    /// Nonincreasing, nonnegative.
    pub s: Vec<f64>,
    /// `n x k`, orthonormal columns.
    pub v: Matrix,
    /// Absolute root-sum-square budget that selected `k` (0 for fixed rank).
    pub threshold_used: f64,
}

impl LowRankSvd {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// `diag(S) V^T`, the factor pushed into the next core during rounding.
    pub fn sigma_vt(&self) -> Matrix {
        let mut out = self.v.transpose();
        for (i, s) in self.s.iter().enumerate() {
            out.row_mut(i).scale_mut(*s);
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        mul(View::of(&self.u), View::of(&self.sigma_vt()))
    }
}

/// Full thin SVD, singular values sorted nonincreasing.
pub fn svd(a: &Matrix) -> LowRankSvd {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return LowRankSvd {
            u: Matrix::zeros(m, 0),
            s: vec![],
            v: Matrix::zeros(n, 0),
            threshold_used: 0.0,
        };
    }
    if m < n {
        let t = svd(&a.transpose());
        return LowRankSvd {
            u: t.v,
            s: t.s,
            v: t.u,
            threshold_used: 0.0,
        };
    }
    if m > n {
        // A = Q R, R = U_r S V^T  =>  A = (Q U_r) S V^T
        let f = qr(a);
        let inner = svd(&f.r);
        let u = mul(View::of(&f.q), View::of(&inner.u));
        return LowRankSvd { u, ..inner };
    }
    let fm = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let dec = match fm.thin_svd() {
        Ok(d) => d,
        // Only non-finite input fails to converge; let the NaNs propagate.
        Err(_) => {
            let nan = |r, c| Matrix::from_element(r, c, f64::NAN);
            return LowRankSvd {
                u: nan(m, n),
                s: vec![f64::NAN; n],
                v: nan(n, n),
                threshold_used: 0.0,
            };
        }
    };
    let (fu, fs, fv) = (dec.U(), dec.S().column_vector(), dec.V());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| fs[j].total_cmp(&fs[i]));
    let s = order.iter().map(|&i| fs[i].max(0.0)).collect();
    let u = Matrix::from_fn(m, n, |r, c| fu[(r, order[c])]);
    let v = Matrix::from_fn(n, n, |r, c| fv[(r, order[c])]);
    LowRankSvd {
        u,
        s,
        v,
        threshold_used: 0.0,
    }
}

fn keep(full: LowRankSvd, k: usize, threshold_used: f64) -> LowRankSvd {
    LowRankSvd {
        u: full.u.columns(0, k).into_owned(),
        s: full.s[..k].to_vec(),
        v: full.v.columns(0, k).into_owned(),
        threshold_used,
    }
}

/// Smallest rank whose discarded tail has root-sum-square `<= eps`; at least 1.
pub fn truncation_rank(s: &[f64], eps: f64) -> usize {
    let mut tail = 0.0f64;
    let mut k = s.len();
    while k > 1 {
        let next = tail + s[k - 1] * s[k - 1];
        if next.sqrt() > eps {
            break;
        }
        tail = next;
        k -= 1;
    }
    k.max(1).min(s.len().max(1))
}

/// SVD truncated so that the discarded singular values have root-sum-square
/// at most `eps` (absolute). Never returns fewer than one triplet.
pub fn svd_trunc(a: &Matrix, eps: f64) -> Result<LowRankSvd> {
    if !(eps >= 0.0) {
        return Err(TtError::InvalidArgument(format!(
            "truncation threshold must be >= 0, got {eps}"
        )));
    }
    let full = svd(a);
    let k = truncation_rank(&full.s, eps).min(full.s.len());
    Ok(keep(full, k, eps))
}

/// Best rank-`k` approximation in the Frobenius norm.
pub fn svd_trunc_rank(a: &Matrix, k: usize) -> Result<LowRankSvd> {
    let max = a.nrows().min(a.ncols());
    if k == 0 || k > max {
        return Err(TtError::InvalidArgument(format!(
            "rank {k} outside 1..={max}"
        )));
    }
    Ok(keep(svd(a), k, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::gaussian_matrix;

    fn diag321() -> Matrix {
        Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]))
    }

    #[test]
    fn threshold_boundary_drops_inclusively() {
        let t = svd_trunc(&diag321(), 1.0).unwrap();
        assert_eq!(t.rank(), 2);
        assert_eq!(t.threshold_used, 1.0);
    }

    #[test]
    fn zero_threshold_keeps_everything() {
        let a = diag321();
        let t = svd_trunc(&a, 0.0).unwrap();
        assert_eq!(t.rank(), 3);
        assert!((t.reconstruct() - a).norm() < 1e-14);
    }

    #[test]
    fn exact_low_rank_product_is_detected() {
        let a = gaussian_matrix(100, 5, 1.0, 1) * gaussian_matrix(5, 40, 1.0, 2);
        let t = svd_trunc(&a, 1e-12 * a.norm()).unwrap();
        assert_eq!(t.rank(), 5);
        // Absolute threshold as specified, on a matrix of norm ~ 1e2.
        let t = svd_trunc(&a, 1e-12).unwrap();
        assert_eq!(t.rank(), 5);
    }

    #[test]
    fn never_returns_empty_factors() {
        let t = svd_trunc(&Matrix::zeros(4, 3), 1.0).unwrap();
        assert_eq!(t.rank(), 1);
        let t = svd_trunc(&diag321(), 100.0).unwrap();
        assert_eq!(t.rank(), 1);
    }

    #[test]
    fn fixed_rank_on_diagonal() {
        let a = diag321();
        let t = svd_trunc_rank(&a, 2).unwrap();
        assert!(((t.reconstruct() - &a).norm() - 1.0).abs() < 1e-14);
        assert!(svd_trunc_rank(&a, 0).is_err());
        assert!(svd_trunc_rank(&a, 4).is_err());
    }

    #[test]
    fn factors_are_orthonormal_and_sorted() {
        for (m, n) in [(30, 20), (20, 30), (17, 17), (200, 3)] {
            let a = gaussian_matrix(m, n, 1.0, (m * n) as u64);
            let t = svd(&a);
            let k = t.rank();
            assert!(
                (t.u.transpose() * &t.u - Matrix::identity(k, k)).norm()
                    <= 1e-12 * (k as f64).sqrt()
            );
            assert!(
                (t.v.transpose() * &t.v - Matrix::identity(k, k)).norm()
                    <= 1e-12 * (k as f64).sqrt()
            );
            assert!(t.s.windows(2).all(|w| w[0] >= w[1]));
            assert!((t.reconstruct() - &a).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn graded_triangular_factor_is_accurate() {
        // An R factor from a TT-rounding sweep; nalgebra's SVD reconstructs
        // it with an absolute error of 4e-6.
        let r = Matrix::from_column_slice(
            3,
            3,
            &[
                0.24759961639513745,
                0.0,
                0.0,
                1.972205229599644e-7,
                -4.1334203500548445e-5,
                0.0,
                3.498997343590921e-7,
                2.171724843215716e-5,
                -2.9919410953647854e-5,
            ],
        );
        let t = svd(&r);
        assert!(
            (t.reconstruct() - &r).norm() <= 1e-15,
            "{}",
            (t.reconstruct() - &r).norm()
        );
        assert!((t.s[1] - 4.951204928226121e-5).abs() <= 1e-18);
    }

    #[test]
    fn rank_deficient_input_keeps_orthonormal_u() {
        let a = gaussian_matrix(12, 2, 1.0, 4) * gaussian_matrix(2, 6, 1.0, 5);
        let t = svd(&a);
        let k = t.rank();
        assert!(
            (t.u.transpose() * &t.u - Matrix::identity(k, k)).norm() <= 1e-12 * (k as f64).sqrt()
        );
    }
}
