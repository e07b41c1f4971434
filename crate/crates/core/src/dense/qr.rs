//! Blocked Householder QR with an explicitly formed thin Q.
//!
//! Panels of `BLOCK` columns are factored with unblocked reflectors; the
//! trailing matrix and the Q accumulation use the compact WY form
//! `I - V T V^T` so that most of the work runs through `gemm`.

use super::gemm::{gemm, View};
use crate::{Matrix, Result, TtError};

const BLOCK: usize = 32;

/// Thin QR factors `A = Q R`.
#[derive(Debug, Clone)]
pub struct QrFactors {
    /// `m x k` with orthonormal columns, `k = min(m, n)`.
    pub q: Matrix,
    /// `k x n` upper triangular (trapezoidal when `m < n`).
    pub r: Matrix,
}

/// Thin QR of a tall matrix (`m >= n`).
pub fn thin_qr(a: &Matrix) -> Result<QrFactors> {
    if a.nrows() < a.ncols() {
        return Err(TtError::ShapeMismatch(format!(
            "thin QR needs rows >= cols, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(qr(a))
}

/// QR of a matrix of any shape; `Q` is `m x min(m, n)`.
pub fn qr(a: &Matrix) -> QrFactors {
    let (m, n) = a.shape();
    qr_raw(a.as_slice().to_vec(), m, n)
}

/// Only the orthonormal factor; skips extracting R.
pub fn qr_q(a: &Matrix) -> Matrix {
    let (m, n) = a.shape();
    let mut buf = a.as_slice().to_vec();
    let k = m.min(n);
    let mut tau = vec![0.0; k];
    factor(&mut buf, m, n, &mut tau);
    form_q(&buf, m, k, &tau)
}

pub(crate) fn qr_raw(mut buf: Vec<f64>, m: usize, n: usize) -> QrFactors {
    let k = m.min(n);
    let mut tau = vec![0.0; k];
    factor(&mut buf, m, n, &mut tau);
    let mut r = Matrix::zeros(k, n);
    for j in 0..n {
        for i in 0..=j.min(k.saturating_sub(1)) {
            if i < k {
                r[(i, j)] = buf[i + j * m];
            }
        }
    }
    let q = form_q(&buf, m, k, &tau);
    QrFactors { q, r }
}

/// Householder vector for `x` (LAPACK `dlarfg` convention): on return
/// `x[0] = beta`, `x[1..]` holds `v[1..]` with implicit `v[0] = 1`.
fn reflector(x: &mut [f64]) -> f64 {
    if x.len() <= 1 {
        return 0.0;
    }
    let alpha = x[0];
    let xnorm = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    if xnorm == 0.0 {
        return 0.0;
    }
    let beta = -alpha.signum() * alpha.hypot(xnorm);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for v in &mut x[1..] {
        *v *= scale;
    }
    x[0] = beta;
    tau
}

/// Applies `I - tau v v^T` (v stored below the diagonal of column `j`) to
/// columns `cols` of the `m`-row buffer, rows `j..m`.
fn apply_reflector(buf: &mut [f64], m: usize, j: usize, tau: f64, cols: std::ops::Range<usize>) {
    if tau == 0.0 {
        return;
    }
    let (head, tail) = buf.split_at_mut((j + 1) * m);
    let v = &head[j * m + j + 1..(j + 1) * m];
    for c in cols {
        let col = &mut tail[(c - j - 1) * m + j..(c - j) * m];
        let w = col[0] + v.iter().zip(&col[1..]).map(|(a, b)| a * b).sum::<f64>();
        let s = tau * w;
        col[0] -= s;
        for (x, vi) in col[1..].iter_mut().zip(v) {
            *x -= s * vi;
        }
    }
}

fn factor(buf: &mut [f64], m: usize, n: usize, tau: &mut [f64]) {
    let k = m.min(n);
    let mut j0 = 0;
    while j0 < k {
        let nb = BLOCK.min(k - j0);
        let panel_end = j0 + nb;
        for j in j0..panel_end {
            tau[j] = reflector(&mut buf[j * m + j..(j + 1) * m]);
            apply_reflector(buf, m, j, tau[j], j + 1..panel_end);
        }
        if panel_end < n {
            let (v, t) = block_reflector(buf, m, j0, nb, &tau[j0..panel_end]);
            apply_block_transposed(&v, &t, m - j0, nb, buf, m, j0, panel_end..n);
        }
        j0 = panel_end;
    }
}

/// Returns the explicit unit-lower-trapezoidal `V` (`(m - j0) x nb`) and the
/// upper-triangular `T` of the panel starting at column `j0`.
fn block_reflector(
    buf: &[f64],
    m: usize,
    j0: usize,
    nb: usize,
    tau: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let mv = m - j0;
    let mut v = vec![0.0; mv * nb];
    for c in 0..nb {
        let col = &mut v[c * mv..(c + 1) * mv];
        col[c] = 1.0;
        let src = &buf[(j0 + c) * m + j0..(j0 + c + 1) * m];
        col[c + 1..].copy_from_slice(&src[c + 1..]);
    }
    let mut t = vec![0.0; nb * nb];
    let mut z = vec![0.0; nb];
    for i in 0..nb {
        t[i + i * nb] = tau[i];
        if i == 0 || tau[i] == 0.0 {
            continue;
        }
        let vi = &v[i * mv..(i + 1) * mv];
        for (p, zp) in z.iter_mut().enumerate().take(i) {
            let vp = &v[p * mv..(p + 1) * mv];
            *zp = vp[i..].iter().zip(&vi[i..]).map(|(a, b)| a * b).sum();
        }
        for r in 0..i {
            let s: f64 = (r..i).map(|p| t[r + p * nb] * z[p]).sum();
            t[r + i * nb] = -tau[i] * s;
        }
    }
    (v, t)
}

/// `C <- (I - V T V^T)^T C` on rows `row0..` and columns `cols` of `buf`.
#[allow(clippy::too_many_arguments)]
fn apply_block_transposed(
    v: &[f64],
    t: &[f64],
    mv: usize,
    nb: usize,
    buf: &mut [f64],
    m: usize,
    row0: usize,
    cols: std::ops::Range<usize>,
) {
    let nc = cols.len();
    let c_off = cols.start * m + row0;
    let vv = View::col_major(v, mv, nb);
    let tv = View::col_major(t, nb, nb);
    let mut w = vec![0.0; nb * nc];
    {
        let cview = View {
            data: &buf[c_off..],
            rows: mv,
            cols: nc,
            rs: 1,
            cs: m as isize,
        };
        gemm(1.0, vv.t(), cview, 0.0, &mut w, nb);
    }
    let mut w2 = vec![0.0; nb * nc];
    gemm(1.0, tv.t(), View::col_major(&w, nb, nc), 0.0, &mut w2, nb);
    gemm(
        -1.0,
        vv,
        View::col_major(&w2, nb, nc),
        1.0,
        &mut buf[c_off..],
        m,
    );
}

/// `C <- (I - V T V^T) C`, used when accumulating Q.
fn apply_block(v: &[f64], t: &[f64], mv: usize, nb: usize, c: &mut [f64], ldc: usize, nc: usize) {
    let vv = View::col_major(v, mv, nb);
    let tv = View::col_major(t, nb, nb);
    let mut w = vec![0.0; nb * nc];
    {
        let cview = View {
            data: c,
            rows: mv,
            cols: nc,
            rs: 1,
            cs: ldc as isize,
        };
        gemm(1.0, vv.t(), cview, 0.0, &mut w, nb);
    }
    let mut w2 = vec![0.0; nb * nc];
    gemm(1.0, tv, View::col_major(&w, nb, nc), 0.0, &mut w2, nb);
    gemm(-1.0, vv, View::col_major(&w2, nb, nc), 1.0, c, ldc);
}

fn form_q(buf: &[f64], m: usize, k: usize, tau: &[f64]) -> Matrix {
    let mut q = vec![0.0; m * k];
    for j in 0..k {
        q[j + j * m] = 1.0;
    }
    if k == 0 {
        return Matrix::from_vec(m, k, q);
    }
    let mut starts: Vec<usize> = (0..k).step_by(BLOCK).collect();
    starts.reverse();
    for j0 in starts {
        let nb = BLOCK.min(k - j0);
        let (v, t) = block_reflector(buf, m, j0, nb, &tau[j0..j0 + nb]);
        let off = j0 * m + j0;
        apply_block(&v, &t, m - j0, nb, &mut q[off..], m, k - j0);
    }
    Matrix::from_vec(m, k, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::gaussian_matrix;

    fn orth_residual(q: &Matrix) -> f64 {
        (q.transpose() * q - Matrix::identity(q.ncols(), q.ncols())).norm()
    }

    #[test]
    fn identity_factors_to_identity() {
        let f = thin_qr(&Matrix::identity(5, 5)).unwrap();
        assert_eq!(f.q, Matrix::identity(5, 5));
        assert_eq!(f.r, Matrix::identity(5, 5));
    }

    #[test]
    fn random_tall_matrix_has_small_residuals() {
        let a = gaussian_matrix(50, 10, 1.0, 3);
        let f = thin_qr(&a).unwrap();
        assert_eq!(f.q.shape(), (50, 10));
        assert!((&a - &f.q * &f.r).norm() / a.norm() <= 1e-13);
        assert!(orth_residual(&f.q) <= 1e-13);
        for j in 0..10 {
            for i in j + 1..10 {
                assert_eq!(f.r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn multi_panel_matrix_is_backward_stable() {
        // 500x100 crosses several panels; backward error <= 100 u ||A||_F.
        let a = gaussian_matrix(500, 100, 1.0, 11);
        let f = thin_qr(&a).unwrap();
        let u = f64::EPSILON / 2.0;
        assert!((&a - &f.q * &f.r).norm() <= 100.0 * u * a.norm());
        assert!(orth_residual(&f.q) <= 1e-12 * 10.0);
    }

    #[test]
    fn duplicate_columns_are_accepted() {
        let c = gaussian_matrix(20, 1, 1.0, 5);
        let a = Matrix::from_fn(20, 3, |i, _| c[(i, 0)]);
        let f = thin_qr(&a).unwrap();
        assert!((&a - &f.q * &f.r).norm() <= 1e-13 * a.norm());
        assert!(orth_residual(&f.q) <= 1e-13);
        assert!(f.r[(2, 2)].abs() < 1e-12);
    }

    #[test]
    fn wide_input_is_rejected_by_thin_qr() {
        assert!(matches!(
            thin_qr(&Matrix::zeros(2, 3)),
            Err(TtError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn wide_matrix_qr_gives_trapezoidal_r() {
        let a = gaussian_matrix(4, 9, 1.0, 8);
        let f = qr(&a);
        assert_eq!(f.q.shape(), (4, 4));
        assert_eq!(f.r.shape(), (4, 9));
        assert!((&a - &f.q * &f.r).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn zero_matrix_keeps_orthonormal_q() {
        let f = qr(&Matrix::zeros(6, 3));
        assert!(orth_residual(&f.q) == 0.0);
        assert_eq!(f.r.norm(), 0.0);
    }
}
