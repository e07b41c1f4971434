use super::{cap_ranks, Rounded, RoundingConfig, LEFT_FAMILY, RIGHT_FAMILY};
use crate::dense::gemm::View;
use crate::dense::pinv_sqrt_factors;
use crate::det::{partial_contractions_lr, partial_contractions_rl};
use crate::tt::random_gaussian_tt_stream;
use crate::{Result, TtError, TtTensor};

/// Two-sided randomization (generalized Nyström).
///
/// The left random tensor has the target ranks `l_n`, the right one the
/// oversampled ranks `rho_n`. Bond `n` of `y` is compressed by the oblique
/// projection `L_n R_n = W^R_n (W^L_n W^R_n)^+ W^L_n`, so the result is not
/// orthogonal.
pub fn round_two_sided(y: &TtTensor, cfg: &RoundingConfig) -> Result<Rounded> {
    cfg.check(y.order())?;
    let dims = y.dims();
    let (l, capped_bonds) = cap_ranks(&cfg.target, &y.internal_ranks(), &dims);
    let rho = match &cfg.oversampled {
        Some(rho) => rho.clone(),
        None => l.scaled_ceil(1.5),
    };
    let left = random_gaussian_tt_stream(&dims, &l, cfg.seed, LEFT_FAMILY)?;
    let right = random_gaussian_tt_stream(&dims, &rho, cfg.seed, RIGHT_FAMILY)?;
    let wl = partial_contractions_lr(y, &left)?;
    let wr = partial_contractions_rl(y, &right)?;
    let factors = (1..y.order())
        .map(|n| {
            pinv_sqrt_factors(wl.bond(n), wr.bond(n), cfg.nystrom_cutoff).map_err(|e| match e {
                TtError::DegenerateSketch { .. } => TtError::DegenerateSketch { bond: n },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cores = y
        .cores()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let mut c = c.clone();
            if n + 1 < y.order() {
                c = c.mul_right(View::of(&factors[n].0));
            }
            if n > 0 {
                c = c.mul_left(View::of(&factors[n - 1].1));
            }
            c
        })
        .collect();
    Ok(Rounded {
        tensor: TtTensor::from_cores_unchecked(cores),
        capped_bonds,
    })
}
