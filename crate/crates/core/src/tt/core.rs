use crate::dense::gemm::{gemm, mul_vec, View};
use crate::{Matrix, Result, TtError};

/// One order-3 TT-core of extents `(r_left, mode, r_right)`.
///
/// Entries are stored with `r_left` fastest, then `mode`, then `r_right`:
/// element `(a, i, b)` lives at `a + r_left * (i + mode * b)`. With this
/// ordering the vertical unfolding (`r_left*mode x r_right`) is the buffer
/// read column-major, and so is the horizontal unfolding up to a
/// permutation of its columns, which every contraction here is invariant to.
#[derive(Debug, Clone, PartialEq)]
pub struct TtCore {
    r_left: usize,
    mode: usize,
    r_right: usize,
    data: Vec<f64>,
}

impl TtCore {
    pub fn new(r_left: usize, mode: usize, r_right: usize, data: Vec<f64>) -> Result<Self> {
        if r_left == 0 || mode == 0 || r_right == 0 {
            return Err(TtError::ShapeMismatch(format!(
                "core extents must be positive, got ({r_left}, {mode}, {r_right})"
            )));
        }
        if data.len() != r_left * mode * r_right {
            return Err(TtError::ShapeMismatch(format!(
                "core ({r_left}, {mode}, {r_right}) needs {} entries, got {}",
                r_left * mode * r_right,
                data.len()
            )));
        }
        Ok(TtCore {
            r_left,
            mode,
            r_right,
            data,
        })
    }

    pub fn zeros(r_left: usize, mode: usize, r_right: usize) -> Self {
        Self::new(r_left, mode, r_right, vec![0.0; r_left * mode * r_right])
            .expect("positive extents")
    }

    pub fn from_fn(
        r_left: usize,
        mode: usize,
        r_right: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(r_left * mode * r_right);
        for b in 0..r_right {
            for i in 0..mode {
                for a in 0..r_left {
                    data.push(f(a, i, b));
                }
            }
        }
        Self::new(r_left, mode, r_right, data).expect("positive extents")
    }

    pub fn r_left(&self) -> usize {
        self.r_left
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn r_right(&self) -> usize {
        self.r_right
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.r_left, self.mode, self.r_right)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, b: usize) -> f64 {
        self.data[a + self.r_left * (i + self.mode * b)]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// The `r_left x r_right` slice for mode index `i`.
    pub fn slice(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.r_left, self.r_right, |a, b| self.get(a, i, b))
    }

    /// Horizontal unfolding `r_left x (mode * r_right)`: slices side by side,
    /// columns `[i*r_right, (i+1)*r_right)` hold slice `i`.
    pub fn h_unfold(&self) -> Matrix {
        Matrix::from_fn(self.r_left, self.mode * self.r_right, |a, c| {
            self.get(a, c / self.r_right, c % self.r_right)
        })
    }

    /// Vertical unfolding `(r_left * mode) x r_right`: slices stacked,
    /// rows `[i*r_left, (i+1)*r_left)` hold slice `i`.
    pub fn v_unfold(&self) -> Matrix {
        Matrix::from_column_slice(self.r_left * self.mode, self.r_right, &self.data)
    }

    /// Inverse of [`TtCore::h_unfold`].
    pub fn h_fold(m: &Matrix, mode: usize) -> Result<Self> {
        if mode == 0 || !m.ncols().is_multiple_of(mode) {
            return Err(TtError::ShapeMismatch(format!(
                "cannot fold {}x{} horizontally with mode size {mode}",
                m.nrows(),
                m.ncols()
            )));
        }
        let r_right = m.ncols() / mode;
        if m.nrows() == 0 || r_right == 0 {
            return Err(TtError::ShapeMismatch("empty unfolding".into()));
        }
        Ok(Self::from_fn(m.nrows(), mode, r_right, |a, i, b| {
            m[(a, i * r_right + b)]
        }))
    }

    /// Inverse of [`TtCore::v_unfold`].
    pub fn v_fold(m: &Matrix, mode: usize) -> Result<Self> {
        if mode == 0 || !m.nrows().is_multiple_of(mode) {
            return Err(TtError::ShapeMismatch(format!(
                "cannot fold {}x{} vertically with mode size {mode}",
                m.nrows(),
                m.ncols()
            )));
        }
        Self::new(m.nrows() / mode, mode, m.ncols(), m.as_slice().to_vec())
    }

    /// Vertical unfolding as a zero-copy view.
    pub(crate) fn v_view(&self) -> View<'_> {
        View::col_major(&self.data, self.r_left * self.mode, self.r_right)
    }

    /// Horizontal unfolding with columns ordered `i + mode * b` (zero-copy).
    pub(crate) fn h_view(&self) -> View<'_> {
        View::col_major(&self.data, self.r_left, self.mode * self.r_right)
    }

    /// Core whose vertical unfolding is `V(self) * m` (`m` is `r_right x q`).
    pub(crate) fn mul_right(&self, m: View<'_>) -> TtCore {
        assert_eq!(m.rows, self.r_right);
        let data = mul_vec(self.v_view(), m);
        TtCore {
            r_left: self.r_left,
            mode: self.mode,
            r_right: m.cols,
            data,
        }
    }

    /// Core whose horizontal unfolding is `m * H(self)` (`m` is `p x r_left`).
    pub(crate) fn mul_left(&self, m: View<'_>) -> TtCore {
        assert_eq!(m.cols, self.r_left);
        let data = mul_vec(m, self.h_view());
        TtCore {
            r_left: m.rows,
            mode: self.mode,
            r_right: self.r_right,
            data,
        }
    }

    /// Mode product with `m` along `mode` (1, 2 or 3): the mode-`mode`
    /// unfolding of the result is `m` times that of `self`.
    pub fn mode_mult(&self, m: &Matrix, mode: usize) -> Result<TtCore> {
        let expected = match mode {
            1 => self.r_left,
            2 => self.mode,
            3 => self.r_right,
            _ => {
                return Err(TtError::InvalidArgument(format!(
                    "mode must be 1, 2 or 3, got {mode}"
                )))
            }
        };
        if m.ncols() != expected || m.nrows() == 0 {
            return Err(TtError::ShapeMismatch(format!(
                "mode-{mode} product needs a matrix with {expected} columns, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(match mode {
            1 => self.mul_left(View::of(m)),
            3 => self.mul_right(View::of(m).t()),
            _ => self.mul_mode(View::of(m)),
        })
    }

    /// Mode-2 product: slab `b` of the result is `slab_b(self) * m^T`.
    pub(crate) fn mul_mode(&self, m: View<'_>) -> TtCore {
        assert_eq!(m.cols, self.mode);
        let (rl, j) = (self.r_left, m.rows);
        let mut data = vec![0.0; rl * j * self.r_right];
        for b in 0..self.r_right {
            let slab = View::col_major(
                &self.data[b * rl * self.mode..(b + 1) * rl * self.mode],
                rl,
                self.mode,
            );
            gemm(
                1.0,
                slab,
                m.t(),
                0.0,
                &mut data[b * rl * j..(b + 1) * rl * j],
                rl,
            );
        }
        TtCore {
            r_left: rl,
            mode: j,
            r_right: self.r_right,
            data,
        }
    }

    pub(crate) fn scaled(&self, alpha: f64) -> TtCore {
        TtCore {
            data: self.data.iter().map(|v| v * alpha).collect(),
            ..*self
        }
    }

    /// Builds a core straight from a column-major `(r_left*mode) x r_right` buffer.
    pub(crate) fn from_raw(r_left: usize, mode: usize, r_right: usize, data: Vec<f64>) -> TtCore {
        debug_assert_eq!(data.len(), r_left * mode * r_right);
        TtCore {
            r_left,
            mode,
            r_right,
            data,
        }
    }
}
