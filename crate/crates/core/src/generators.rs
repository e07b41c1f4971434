//! Test tensors used by the experiments and the CLI `gen` command.

use crate::tt::random_gaussian_tt_stream;
use crate::{RankProfile, Result, TtCore, TtError, TtTensor};

/// Stream families for generated data, disjoint from the ones the rounding
/// routines use for their sketches.
const BASE_FAMILY: u32 = 100;
const PERTURBATION_FAMILY: u32 = 101;
const TERM_FAMILY: u32 = 200;

/// Hilbert-type TT-tensor: every core holds `1 / (i1 + i2 + i3 - 1)` with
/// 1-based indices over its `(r_left, mode, r_right)` extents.
pub fn hilbert_tt(dims: &[usize], ranks: &RankProfile) -> Result<TtTensor> {
    if dims.len() != ranks.len() + 1 {
        return Err(TtError::InvalidArgument(format!(
            "{} dimensions need {} bond ranks, got {}",
            dims.len(),
            dims.len().saturating_sub(1),
            ranks.len()
        )));
    }
    if dims.contains(&0) {
        return Err(TtError::InvalidArgument(
            "mode sizes must be positive".into(),
        ));
    }
    let r = ranks.with_boundary();
    let cores = dims
        .iter()
        .enumerate()
        .map(|(n, &d)| TtCore::from_fn(r[n], d, r[n + 1], |a, i, b| 1.0 / (a + i + b + 2) as f64))
        .collect();
    TtTensor::new(cores)
}

/// The order-10 configuration: dims `6, 8, .., 24`, ranks `4, 5, .., 12`.
pub fn hilbert_reference() -> TtTensor {
    let dims: Vec<usize> = (0..10).map(|k| 6 + 2 * k).collect();
    let ranks = RankProfile::new((4..=12).collect()).expect("positive");
    hilbert_tt(&dims, &ranks).expect("consistent shape")
}

/// `X1 + eps X2` for random Gaussian TT-tensors of rank `rank` on every bond.
///
/// Returns the sum (ranks `2 rank`) and the unperturbed `X1`.
pub fn perturbed_tensor(
    dims: &[usize],
    rank: usize,
    eps: f64,
    seed: u64,
) -> Result<(TtTensor, TtTensor)> {
    let ranks = RankProfile::uniform(dims.len(), rank)?;
    let x1 = random_gaussian_tt_stream(dims, &ranks, seed, BASE_FAMILY)?;
    let x2 = random_gaussian_tt_stream(dims, &ranks, seed, PERTURBATION_FAMILY)?;
    Ok((x1.add(&x2.scale(eps))?, x1))
}

/// `s` independent random Gaussian TT-tensors of uniform rank `rank`.
pub fn random_terms(dims: &[usize], rank: usize, s: usize, seed: u64) -> Result<Vec<TtTensor>> {
    let ranks = RankProfile::uniform(dims.len(), rank)?;
    (0..s)
        .map(|j| random_gaussian_tt_stream(dims, &ranks, seed, TERM_FAMILY + j as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_core_entries() {
        let t = hilbert_tt(&[2, 3], &RankProfile::new(vec![2]).unwrap()).unwrap();
        let c = t.core(0);
        assert_eq!(c.shape(), (1, 2, 2));
        assert_eq!(c.get(0, 0, 0), 0.5);
        assert_eq!(c.get(0, 0, 1), 1.0 / 3.0);
        assert_eq!(c.get(0, 1, 0), 1.0 / 3.0);
        assert_eq!(c.get(0, 1, 1), 0.25);
    }

    #[test]
    fn hilbert_reference_shape() {
        let t = hilbert_reference();
        assert!(t.validate().is_ok());
        assert_eq!(t.dims(), vec![6, 8, 10, 12, 14, 16, 18, 20, 22, 24]);
        assert_eq!(t.ranks(), vec![1, 4, 5, 6, 7, 8, 9, 10, 11, 12, 1]);
    }

    #[test]
    fn hilbert_core_is_symmetric_in_the_bond_indices() {
        let t = hilbert_tt(&[3, 4, 3], &RankProfile::new(vec![3, 3]).unwrap()).unwrap();
        let c = t.core(1);
        for a in 0..3 {
            for i in 0..4 {
                for b in 0..3 {
                    assert_eq!(c.get(a, i, b), c.get(b, i, a));
                }
            }
        }
    }

    #[test]
    fn perturbed_tensor_ranks_add() {
        let (x, x1) = perturbed_tensor(&[5, 5, 5, 5], 3, 1e-6, 1).unwrap();
        assert_eq!(x.internal_ranks(), vec![6, 6, 6]);
        let err = x.relative_error(&x1).unwrap();
        assert!(err > 1e-8 && err < 1e-4, "{err}");
    }
}
