//! One-dimensional stand-in for the parametric diffusion ("cookie") problem.
//!
//! `-(sigma u')' = 1` on `(0, 1)` with `u(0) = u(1) = 0`, where
//! `sigma = 1 + rho_i` on the `i`-th of `p` disjoint inclusions and 1
//! elsewhere. Finite differences on `n` interior points are assembled edge
//! by edge, so restricting the edge sum to an inclusion gives the matrix of
//! `-(chi_i u')'`. Every parameter `rho_i` takes `samples` values spread
//! linearly over `rho_range`, one TT mode per parameter.

use super::operator::{KroneckerSumOperator, ModeFactor};
use crate::{Matrix, Result, TtError, TtTensor};

/// Edges `0..=n` of the grid with `n` interior points; edge `e` joins nodes
/// `e - 1` and `e` (nodes `-1` and `n` are the Dirichlet boundary).
fn edge_laplacian(n: usize, edges: std::ops::Range<usize>) -> Matrix {
    let h2 = ((n + 1) as f64).powi(2);
    let mut a = Matrix::zeros(n, n);
    for e in edges {
        let left = e.checked_sub(1);
        let right = (e < n).then_some(e);
        for i in [left, right].into_iter().flatten() {
            a[(i, i)] += h2;
        }
        if let (Some(l), Some(r)) = (left, right) {
            a[(l, r)] -= h2;
            a[(r, l)] -= h2;
        }
    }
    a
}

/// Edge ranges of the `p` inclusions: the `n + 1` edges are cut into
/// `2p + 1` nearly equal segments and the odd ones are the inclusions.
fn inclusion_edges(n: usize, p: usize) -> Result<Vec<std::ops::Range<usize>>> {
    let segments = 2 * p + 1;
    if segments > n + 1 {
        return Err(TtError::InvalidArgument(format!(
            "{p} inclusions need at least {} grid points, got {n}",
            segments - 1
        )));
    }
    let cut = |k: usize| k * (n + 1) / segments;
    Ok((0..p).map(|i| cut(2 * i + 1)..cut(2 * i + 2)).collect())
}

/// Linearly spaced parameter samples (the lower end if `samples == 1`).
pub fn parameter_samples(samples: usize, range: (f64, f64)) -> Vec<f64> {
    if samples == 1 {
        return vec![range.0];
    }
    (0..samples)
        .map(|k| range.0 + (range.1 - range.0) * k as f64 / (samples - 1) as f64)
        .collect()
}

/// Operator and all-ones right-hand side of the surrogate problem, of order
/// `num_params + 1`.
pub fn build_cookie_surrogate(
    grid_points: usize,
    num_params: usize,
    samples_per_param: usize,
    rho_range: (f64, f64),
) -> Result<(KroneckerSumOperator, TtTensor)> {
    if grid_points < 4 {
        return Err(TtError::InvalidArgument(format!(
            "need at least 4 grid points, got {grid_points}"
        )));
    }
    if samples_per_param == 0 {
        return Err(TtError::InvalidArgument(
            "need at least one parameter sample".into(),
        ));
    }
    if !(rho_range.0 >= 0.0 && rho_range.1 >= rho_range.0 && rho_range.1.is_finite()) {
        return Err(TtError::InvalidArgument(format!(
            "invalid parameter range {rho_range:?}"
        )));
    }
    let n = grid_points;
    let blocks = inclusion_edges(n, num_params)?;
    let rho = parameter_samples(samples_per_param, rho_range);
    let order = num_params + 1;
    let mut dims = vec![n];
    dims.extend(std::iter::repeat_n(samples_per_param, num_params));

    let identity_rest = |k: usize| -> Vec<ModeFactor> {
        (1..order)
            .map(|m| {
                if m == k {
                    ModeFactor::Diag(rho.clone())
                } else {
                    ModeFactor::Identity(samples_per_param)
                }
            })
            .collect()
    };
    let mut terms = Vec::with_capacity(order);
    let mut base = vec![ModeFactor::dense(&edge_laplacian(n, 0..n + 1))];
    base.extend(identity_rest(0));
    terms.push(base);
    for (i, edges) in blocks.into_iter().enumerate() {
        let mut term = vec![ModeFactor::dense(&edge_laplacian(n, edges))];
        term.extend(identity_rest(i + 1));
        terms.push(term);
    }
    let op = KroneckerSumOperator::new(terms)?;
    Ok((op, TtTensor::ones(&dims)))
}
