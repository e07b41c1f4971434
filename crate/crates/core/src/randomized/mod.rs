//! Randomized TT-rounding.
//!
//! * [`round_orth_rand`]: orthogonalize, then sketch each bond with a
//!   Gaussian matrix.
//! * [`round_rand_orth`]: sketch with a random Gaussian TT-tensor through the
//!   partial contractions, then orthogonalize the sketches. The output is
//!   left-orthogonal.
//! * [`round_two_sided`]: generalized Nyström with random tensors on both
//!   sides; no orthogonalization at all.
//! * [`round_sum_rand_orth`]: randomize-then-orthogonalize for a sum of
//!   tensors, never forming the block-diagonal cores of the sum.
//!
//! Target ranks include any oversampling. A target larger than what a bond
//! can hold is lowered and reported in [`Rounded::capped_bonds`].

mod one_sided;
mod sum;
mod two_sided;

pub use one_sided::{round_orth_rand, round_rand_orth, round_rand_orth_adaptive};
pub use sum::{round_sum_rand_orth, round_sum_rand_orth_adaptive, sum_sketches};
pub use two_sided::round_two_sided;

use crate::dense::DEFAULT_NYSTROM_CUTOFF;
use crate::{RankProfile, Result, TtError, TtTensor};

/// Stream families, so the sketches of one call never share random numbers.
pub(crate) const RIGHT_FAMILY: u32 = 0;
pub(crate) const LEFT_FAMILY: u32 = 1;
pub(crate) const OMEGA_FAMILY: u32 = 2;

/// Parameters of a randomized rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingConfig {
    /// Target ranks `l_n`, oversampling included.
    pub target: RankProfile,
    /// Ranks `rho_n` of the right random tensor in the two-sided algorithm.
    /// `None` means `ceil(1.5 l_n)`.
    pub oversampled: Option<RankProfile>,
    pub seed: u64,
    /// Relative cutoff for the Nyström pseudoinverse.
    pub nystrom_cutoff: f64,
}

impl RoundingConfig {
    pub fn new(target: RankProfile, seed: u64) -> Self {
        RoundingConfig {
            target,
            oversampled: None,
            seed,
            nystrom_cutoff: DEFAULT_NYSTROM_CUTOFF,
        }
    }

    pub fn with_oversampled(mut self, rho: RankProfile) -> Self {
        self.oversampled = Some(rho);
        self
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.nystrom_cutoff = cutoff;
        self
    }

    fn check(&self, order: usize) -> Result<()> {
        if self.target.len() + 1 != order {
            return Err(TtError::InvalidArgument(format!(
                "order {order} needs {} target ranks, got {}",
                order - 1,
                self.target.len()
            )));
        }
        if let Some(rho) = &self.oversampled {
            if rho.len() != self.target.len() {
                return Err(TtError::InvalidArgument(
                    "oversampled ranks differ in length from target".into(),
                ));
            }
            if rho
                .as_slice()
                .iter()
                .zip(self.target.as_slice())
                .any(|(r, l)| r < l)
            {
                return Err(TtError::InvalidArgument(
                    "oversampled ranks must be >= target ranks".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A rounded tensor together with the bonds (1-based) whose target rank
/// had to be lowered.
#[derive(Debug, Clone)]
pub struct Rounded {
    pub tensor: TtTensor,
    pub capped_bonds: Vec<usize>,
}

impl Rounded {
    pub fn into_tensor(self) -> TtTensor {
        self.tensor
    }
}

/// Lowers each target to the input rank and to what the neighbouring
/// unfoldings can hold: `l_n <= R_n`, `l_n <= l_{n-1} I_n` and
/// `l_n <= I_{n+1} l_{n+1}`.
pub(crate) fn cap_ranks(
    target: &RankProfile,
    input_ranks: &[usize],
    dims: &[usize],
) -> (RankProfile, Vec<usize>) {
    let requested = target.as_slice();
    let mut l: Vec<usize> = requested
        .iter()
        .zip(input_ranks)
        .map(|(&t, &r)| t.min(r))
        .collect();
    let n = l.len();
    let mut prev = 1;
    for k in 0..n {
        l[k] = l[k].min(prev * dims[k]);
        prev = l[k];
    }
    let mut next = 1;
    for k in (0..n).rev() {
        l[k] = l[k].min(dims[k + 1] * next);
        next = l[k];
    }
    let capped = (0..n)
        .filter(|&k| l[k] < requested[k])
        .map(|k| k + 1)
        .collect();
    (RankProfile::new(l).expect("caps stay positive"), capped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_follow_input_ranks_and_unfoldings() {
        let target = RankProfile::new(vec![10, 10, 10]).unwrap();
        let (l, capped) = cap_ranks(&target, &[6, 20, 4], &[3, 5, 5, 2]);
        assert_eq!(l.as_slice(), &[3, 10, 2]);
        assert_eq!(capped, vec![1, 3]);
        let target = RankProfile::new(vec![2, 2]).unwrap();
        let (l, capped) = cap_ranks(&target, &[5, 5], &[4, 4, 4]);
        assert_eq!(l.as_slice(), &[2, 2]);
        assert!(capped.is_empty());
    }

    #[test]
    fn config_validation() {
        let cfg = RoundingConfig::new(RankProfile::new(vec![3, 3]).unwrap(), 0);
        assert!(cfg.check(3).is_ok());
        assert!(cfg.check(4).is_err());
        let bad = cfg
            .clone()
            .with_oversampled(RankProfile::new(vec![2, 5]).unwrap());
        assert!(bad.check(3).is_err());
    }
}
