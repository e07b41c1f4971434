use super::{cap_ranks, Rounded, RoundingConfig, OMEGA_FAMILY, RIGHT_FAMILY};
use crate::dense::gemm::{mul, View};
use crate::dense::{fill_normal, qr, stream_rng};
use crate::det::{orthogonalize_rl, partial_contractions_rl, truncate_left_orthogonal, Truncation};
use crate::tt::{random_gaussian_tt_stream, TtCore};
use crate::{Matrix, RankProfile, Result, TtError, TtTensor};

/// Orthogonalize-then-randomize: right-orthogonalize `y`, then move left to
/// right replacing each vertical unfolding by an orthonormal basis of its
/// Gaussian sketch `V(X^n) Omega_n`.
pub fn round_orth_rand(y: &TtTensor, cfg: &RoundingConfig) -> Result<Rounded> {
    cfg.check(y.order())?;
    let x = orthogonalize_rl(y);
    let (l, capped_bonds) = cap_ranks(&cfg.target, &x.internal_ranks(), &x.dims());
    let mut cores = x.into_cores();
    for n in 0..cores.len() - 1 {
        let (rl, mode, rr) = cores[n].shape();
        let mut rng = stream_rng(cfg.seed, ((OMEGA_FAMILY as u64) << 32) | n as u64);
        let ln = l.as_slice()[n];
        let omega = Matrix::from_vec(rr, ln, fill_normal(&mut rng, rr * ln, 1.0));
        let sketch = mul(cores[n].v_view(), View::of(&omega));
        let q = qr(&sketch).q;
        let m = mul(View::of(&q).t(), cores[n].v_view());
        cores[n] = TtCore::new(rl, mode, q.ncols(), q.as_slice().to_vec())?;
        cores[n + 1] = cores[n + 1].mul_left(View::of(&m));
    }
    Ok(Rounded {
        tensor: TtTensor::from_cores_unchecked(cores),
        capped_bonds,
    })
}

/// Randomize-then-orthogonalize. The result is left-orthogonal.
pub fn round_rand_orth(y: &TtTensor, cfg: &RoundingConfig) -> Result<Rounded> {
    cfg.check(y.order())?;
    let (l, capped_bonds) = cap_ranks(&cfg.target, &y.internal_ranks(), &y.dims());
    let r = random_gaussian_tt_stream(&y.dims(), &l, cfg.seed, RIGHT_FAMILY)?;
    let w = partial_contractions_rl(y, &r)?;
    let mut cores = y.cores().to_vec();
    for n in 0..cores.len() - 1 {
        let (rl, mode, _) = cores[n].shape();
        let sketch = mul(cores[n].v_view(), View::of(w.bond(n + 1)));
        let q = qr(&sketch).q;
        let m = mul(View::of(&q).t(), cores[n].v_view());
        cores[n] = TtCore::new(rl, mode, q.ncols(), q.as_slice().to_vec())?;
        cores[n + 1] = cores[n + 1].mul_left(View::of(&m));
    }
    Ok(Rounded {
        tensor: TtTensor::from_cores_unchecked(cores),
        capped_bonds,
    })
}

/// Randomize-then-orthogonalize at generous ranks `guess`, followed by
/// deterministic truncation to relative accuracy `eps0` (which can skip the
/// orthogonalization sweep since the sketch output is left-orthogonal).
///
/// The final error against `y` is the sketch error plus at most
/// `eps0` times the norm of the sketched tensor.
pub fn round_rand_orth_adaptive(
    y: &TtTensor,
    guess: &RankProfile,
    eps0: f64,
    seed: u64,
) -> Result<Rounded> {
    if !(eps0 >= 0.0) {
        return Err(TtError::InvalidArgument(format!(
            "tolerance must be >= 0, got {eps0}"
        )));
    }
    let sketched = round_rand_orth(y, &RoundingConfig::new(guess.clone(), seed))?;
    let tensor = truncate_left_orthogonal(&sketched.tensor, &Truncation::Tolerance(eps0))?;
    Ok(Rounded {
        tensor,
        capped_bonds: sketched.capped_bonds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::orthogonalize_lr;
    use crate::tt::random_gaussian_tt;

    fn profile(r: &[usize]) -> RankProfile {
        RankProfile::new(r.to_vec()).unwrap()
    }

    /// Rank-5 tensor stored with redundant bonds of rank 10.
    fn redundant(seed: u64) -> (TtTensor, TtTensor) {
        let y = random_gaussian_tt(&[6, 7, 6, 5], &profile(&[5, 5, 5]), seed).unwrap();
        let z = random_gaussian_tt(&[6, 7, 6, 5], &profile(&[5, 5, 5]), seed + 1000).unwrap();
        // y + z - z: rank 15 representation of a rank-5 tensor.
        let padded = crate::tt::add_many(&[&y, &z, &z.scale(-1.0)]).unwrap();
        (y, padded)
    }

    #[test]
    fn one_sided_algorithms_recover_exact_rank() {
        for seed in 0..3 {
            let (y, padded) = redundant(seed);
            let cfg = RoundingConfig::new(profile(&[5, 5, 5]), seed);
            for out in [
                round_orth_rand(&padded, &cfg).unwrap(),
                round_rand_orth(&padded, &cfg).unwrap(),
            ] {
                assert_eq!(out.tensor.internal_ranks(), vec![5, 5, 5]);
                assert!(out.capped_bonds.is_empty());
                assert!(out.tensor.relative_error(&y).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn rand_orth_output_is_left_orthogonal() {
        let y = random_gaussian_tt(&[5, 6, 7, 5], &profile(&[6, 8, 6]), 3).unwrap();
        let x = round_rand_orth(&y, &RoundingConfig::new(profile(&[4, 4, 4]), 9))
            .unwrap()
            .tensor;
        for n in 0..3 {
            let v = x.core(n).v_unfold();
            let k = v.ncols();
            assert!((v.transpose() * &v - Matrix::identity(k, k)).norm() <= 1e-12);
        }
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let z = TtTensor::zeros(&[3, 4, 5]);
        let out = round_rand_orth(&z, &RoundingConfig::new(profile(&[3, 3]), 1)).unwrap();
        assert_eq!(out.tensor.internal_ranks(), vec![1, 1]);
        assert_eq!(out.capped_bonds, vec![1, 2]);
        assert_eq!(out.tensor.norm(), 0.0);
    }

    #[test]
    fn seeds_are_bit_reproducible() {
        let y = random_gaussian_tt(&[4, 5, 4], &profile(&[4, 4]), 2).unwrap();
        let cfg = RoundingConfig::new(profile(&[3, 3]), 11);
        assert_eq!(
            round_rand_orth(&y, &cfg).unwrap().tensor,
            round_rand_orth(&y, &cfg).unwrap().tensor
        );
        assert_eq!(
            round_orth_rand(&y, &cfg).unwrap().tensor,
            round_orth_rand(&y, &cfg).unwrap().tensor
        );
    }

    #[test]
    fn adaptive_truncates_to_true_rank() {
        let x1 =
            orthogonalize_lr(&random_gaussian_tt(&[8, 8, 8, 8], &profile(&[4, 4, 4]), 5).unwrap());
        let x2 = random_gaussian_tt(&[8, 8, 8, 8], &profile(&[4, 4, 4]), 6).unwrap();
        let y = x1.add(&x2.scale(1e-8)).unwrap();
        let out = round_rand_orth_adaptive(&y, &profile(&[8, 8, 8]), 1e-4, 3)
            .unwrap()
            .tensor;
        assert_eq!(out.internal_ranks(), vec![4, 4, 4]);
        assert!(out.relative_error(&y).unwrap() <= 1e-4);
        let full = round_rand_orth_adaptive(&y, &profile(&[8, 8, 8]), 1e-12, 3)
            .unwrap()
            .tensor;
        assert!(full.internal_ranks().iter().all(|&r| r <= 8));
        assert!(full.relative_error(&y).unwrap() <= 1e-10);
    }
}
