//! Thin wrappers around `matrixmultiply` for column-major buffers.
//!
//! nalgebra's own products fall back to dot-product loops for transposed
//! operands; every hot product in the rounding sweeps goes through here.

use crate::Matrix;

/// Strided read-only view over a column-major buffer.
#[derive(Clone, Copy)]
pub(crate) struct View<'a> {
    pub data: &'a [f64],
    pub rows: usize,
    pub cols: usize,
    pub rs: isize,
    pub cs: isize,
}

impl<'a> View<'a> {
    /// Column-major `rows x cols` view of `data`.
    pub fn col_major(data: &'a [f64], rows: usize, cols: usize) -> Self {
        debug_assert!(data.len() >= rows * cols);
        View {
            data,
            rows,
            cols,
            rs: 1,
            cs: rows as isize,
        }
    }

    pub fn of(m: &'a Matrix) -> Self {
        Self::col_major(m.as_slice(), m.nrows(), m.ncols())
    }

    pub fn t(self) -> Self {
        View {
            data: self.data,
            rows: self.cols,
            cols: self.rows,
            rs: self.cs,
            cs: self.rs,
        }
    }
}

/// `c = alpha * a * b + beta * c` where `c` is column-major `a.rows x b.cols`
/// with leading dimension `ldc`.
pub(crate) fn gemm(alpha: f64, a: View<'_>, b: View<'_>, beta: f64, c: &mut [f64], ldc: usize) {
    assert_eq!(a.cols, b.rows, "gemm inner dimension");
    let (m, k, n) = (a.rows, a.cols, b.cols);
    if m == 0 || n == 0 {
        return;
    }
    assert!(
        ldc >= m && c.len() >= ldc * (n - 1) + m,
        "gemm output buffer too small"
    );
    if k == 0 {
        for j in 0..n {
            for v in &mut c[j * ldc..j * ldc + m] {
                *v *= beta;
            }
        }
        return;
    }
    // The extent of each strided view must lie inside its slice.
    let reach = |v: &View<'_>| (v.rows as isize - 1) * v.rs + (v.cols as isize - 1) * v.cs;
    assert!((reach(&a) as usize) < a.data.len() && (reach(&b) as usize) < b.data.len());
    // SAFETY: all three views were bounds-checked above and `c` does not
    // alias `a` or `b` (it is a distinct mutable borrow).
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr(),
            a.rs,
            a.cs,
            b.data.as_ptr(),
            b.rs,
            b.cs,
            beta,
            c.as_mut_ptr(),
            1,
            ldc as isize,
        );
    }
}

/// Product of two views into a fresh matrix.
pub(crate) fn mul(a: View<'_>, b: View<'_>) -> Matrix {
    let mut out = vec![0.0; a.rows * b.cols];
    gemm(1.0, a, b, 0.0, &mut out, a.rows.max(1));
    Matrix::from_vec(a.rows, b.cols, out)
}

/// Product of two views into a raw column-major buffer.
pub(crate) fn mul_vec(a: View<'_>, b: View<'_>) -> Vec<f64> {
    let mut out = vec![0.0; a.rows * b.cols];
    gemm(1.0, a, b, 0.0, &mut out, a.rows.max(1));
    out
}

/// `a * b`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    mul(View::of(a), View::of(b))
}

/// `a^T * b`.
pub fn matmul_tn(a: &Matrix, b: &Matrix) -> Matrix {
    mul(View::of(a).t(), View::of(b))
}

/// `a * b^T`.
pub fn matmul_nt(a: &Matrix, b: &Matrix) -> Matrix {
    mul(View::of(a), View::of(b).t())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &Matrix, b: &Matrix) -> Matrix {
        let mut c = Matrix::zeros(a.nrows(), b.ncols());
        for i in 0..a.nrows() {
            for j in 0..b.ncols() {
                c[(i, j)] = (0..a.ncols()).map(|p| a[(i, p)] * b[(p, j)]).sum();
            }
        }
        c
    }

    #[test]
    fn products_match_naive_loops() {
        let a = Matrix::from_fn(7, 5, |i, j| (i as f64 + 1.0) * 0.3 - j as f64 * 0.7);
        let b = Matrix::from_fn(5, 4, |i, j| ((i * 3 + j) % 5) as f64 - 1.5);
        assert!((matmul(&a, &b) - naive(&a, &b)).norm() < 1e-12);
        let at = a.transpose();
        assert!((matmul_tn(&at, &b) - naive(&a, &b)).norm() < 1e-12);
        let bt = b.transpose();
        assert!((matmul_nt(&a, &bt) - naive(&a, &b)).norm() < 1e-12);
    }

    #[test]
    fn empty_inner_dimension_gives_zeros() {
        let a = Matrix::zeros(3, 0);
        let b = Matrix::zeros(0, 2);
        assert_eq!(matmul(&a, &b), Matrix::zeros(3, 2));
    }
}
