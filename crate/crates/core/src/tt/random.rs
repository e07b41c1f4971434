use serde::{Deserialize, Serialize};

use crate::dense::{fill_normal, stream_rng};
use crate::{Result, TtError};

use super::{TtCore, TtTensor};

/// Internal bond ranks `l_1 .. l_{N-1}`; the boundary ranks are implicitly 1.
///
/// When used as a rounding target the ranks already include any
/// oversampling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankProfile(Vec<usize>);

impl RankProfile {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        if let Some(pos) = ranks.iter().position(|&r| r == 0) {
            return Err(TtError::InvalidArgument(format!(
                "bond rank {} is zero",
                pos + 1
            )));
        }
        Ok(RankProfile(ranks))
    }

    /// The same rank `r` on all `order - 1` bonds.
    pub fn uniform(order: usize, r: usize) -> Result<Self> {
        Self::new(vec![r; order.saturating_sub(1)])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Ranks with the two boundary ones attached: `[1, l_1, .., l_{N-1}, 1]`.
    pub fn with_boundary(&self) -> Vec<usize> {
        let mut r = Vec::with_capacity(self.0.len() + 2);
        r.push(1);
        r.extend_from_slice(&self.0);
        r.push(1);
        r
    }

    /// `ceil(factor * l_n)` on every bond.
    pub fn scaled_ceil(&self, factor: f64) -> RankProfile {
        RankProfile(
            self.0
                .iter()
                .map(|&r| ((r as f64) * factor).ceil() as usize)
                .collect(),
        )
    }
}

impl std::fmt::Display for RankProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Random Gaussian TT-tensor: core `n` has i.i.d. `N(0, 1/(l_{n-1} I_n l_n))`
/// entries, so that `E ||core||_F^2 = 1`.
///
/// Core `n` is drawn from stream `n` of `seed`, so a core never depends on
/// the shapes of the others.
pub fn random_gaussian_tt(dims: &[usize], ranks: &RankProfile, seed: u64) -> Result<TtTensor> {
    random_gaussian_tt_stream(dims, ranks, seed, 0)
}

/// As [`random_gaussian_tt`], drawing from the stream family `family` so that
/// several independent tensors can come from one seed.
pub fn random_gaussian_tt_stream(
    dims: &[usize],
    ranks: &RankProfile,
    seed: u64,
    family: u32,
) -> Result<TtTensor> {
    if dims.is_empty() || ranks.len() + 1 != dims.len() {
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
        .map(|(n, &d)| {
            let len = r[n] * d * r[n + 1];
            let mut rng = stream_rng(seed, ((family as u64) << 32) | n as u64);
            let data = fill_normal(&mut rng, len, (1.0 / len as f64).sqrt());
            TtCore::new(r[n], d, r[n + 1], data)
        })
        .collect::<Result<Vec<_>>>()?;
    TtTensor::new(cores)
}
