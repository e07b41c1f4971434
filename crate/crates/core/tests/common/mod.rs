//! Brute-force dense oracles shared by the integration tests.
#![allow(dead_code)]

use ttround::tt::random_gaussian_tt;
use ttround::{Matrix, RankProfile, TtTensor};

pub fn rand_tt(dims: &[usize], ranks: &[usize], seed: u64) -> TtTensor {
    random_gaussian_tt(dims, &RankProfile::new(ranks.to_vec()).unwrap(), seed).unwrap()
}

/// All multi-indices of `dims`, first index fastest.
pub fn multi_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut k| {
            dims.iter()
                .map(|&d| {
                    let i = k % d;
                    k /= d;
                    i
                })
                .collect()
        })
        .collect()
}

/// `X^(1)(i_1) .. X^(n)(i_n)` as a `1 x R_n` row.
pub fn chain_left(x: &TtTensor, idx: &[usize]) -> Matrix {
    idx.iter()
        .enumerate()
        .fold(Matrix::identity(1, 1), |acc, (k, &i)| {
            acc * x.core(k).slice(i)
        })
}

/// `X^(n+1)(i_{n+1}) .. X^(N)(i_N)` as an `R_n x 1` column, where `idx`
/// holds the trailing indices.
pub fn chain_right(x: &TtTensor, idx: &[usize]) -> Matrix {
    let first = x.order() - idx.len();
    idx.iter()
        .enumerate()
        .rev()
        .fold(Matrix::identity(1, 1), |acc, (k, &i)| {
            x.core(first + k).slice(i) * acc
        })
}

/// Every entry computed as a product of slice matrices.
pub fn dense_of(x: &TtTensor) -> Vec<f64> {
    multi_indices(&x.dims())
        .iter()
        .map(|idx| chain_left(x, idx)[(0, 0)])
        .collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `||a - b|| / ||b||`.
pub fn rel(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    d / norm(b)
}

pub fn rel_mat(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm()
}

/// `||V^T V - I||_F` of every vertical unfolding except the last.
pub fn left_gram_residuals(x: &TtTensor) -> Vec<f64> {
    x.cores()[..x.order() - 1]
        .iter()
        .map(|c| {
            let v = c.v_unfold();
            (v.transpose() * &v - Matrix::identity(v.ncols(), v.ncols())).norm()
        })
        .collect()
}

/// `||H H^T - I||_F` of every horizontal unfolding except the first.
pub fn right_gram_residuals(x: &TtTensor) -> Vec<f64> {
    x.cores()[1..]
        .iter()
        .map(|c| {
            let h = c.h_unfold();
            (&h * h.transpose() - Matrix::identity(h.nrows(), h.nrows())).norm()
        })
        .collect()
}
