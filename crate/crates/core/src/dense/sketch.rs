//! Gaussian sketches and generalized Nyström factors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::gemm::{mul, View};
use super::svd::svd;
use crate::{Matrix, Result, TtError};

/// Default relative cutoff applied to the Nyström pseudoinverse.
pub const DEFAULT_NYSTROM_CUTOFF: f64 = 1e-12;

/// Generator for stream `stream` of `seed`.
///
/// Every random object in the crate draws from its own ChaCha stream so that
/// results only depend on the seed and the position of the object, never on
/// call order or thread schedule.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn fill_normal(rng: &mut ChaCha8Rng, len: usize, std_dev: f64) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            z * std_dev
        })
        .collect()
}

/// `m x n` matrix of i.i.d. `N(0, variance)` entries.
///
/// # Panics
/// If `variance` is not positive.
pub fn gaussian_matrix(m: usize, n: usize, variance: f64, seed: u64) -> Matrix {
    assert!(variance > 0.0, "variance must be positive");
    let mut rng = stream_rng(seed, 0);
    Matrix::from_vec(m, n, fill_normal(&mut rng, m * n, variance.sqrt()))
}

/// Left/right factors of the generalized Nyström approximation.
///
/// Given `Wl` (`l x r`) and `Wr` (`r x rho`), with `Wl Wr = U S V^T`, returns
///
/// ```text
/// L  = Wr V (S^+)^{1/2}        (r x k)
/// Rm = (S^+)^{1/2} U^T Wl      (k x r)
/// ```
///
/// with `k = min(l, rho)` so that `L Rm = Wr (Wl Wr)^+ Wl`. Singular values
/// at or below `cutoff * s_max` are treated as zero; their columns of `L`
/// (rows of `Rm`) are zero.
pub fn pinv_sqrt_factors(wl: &Matrix, wr: &Matrix, cutoff: f64) -> Result<(Matrix, Matrix)> {
    if wl.ncols() != wr.nrows() {
        return Err(TtError::ShapeMismatch(format!(
            "left sketch is {}x{}, right sketch is {}x{}",
            wl.nrows(),
            wl.ncols(),
            wr.nrows(),
            wr.ncols()
        )));
    }
    if !(0.0..1.0).contains(&cutoff) {
        return Err(TtError::InvalidArgument(format!(
            "cutoff must lie in [0, 1), got {cutoff}"
        )));
    }
    let core = mul(View::of(wl), View::of(wr));
    let dec = svd(&core);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    if !(smax > 0.0) || !smax.is_finite() {
        return Err(TtError::DegenerateSketch { bond: 0 });
    }
    let inv_sqrt: Vec<f64> = dec
        .s
        .iter()
        .map(|&s| {
            if s > cutoff * smax {
                1.0 / s.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut v = dec.v;
    let mut ut = dec.u.transpose();
    for (k, w) in inv_sqrt.iter().enumerate() {
        v.column_mut(k).scale_mut(*w);
        ut.row_mut(k).scale_mut(*w);
    }
    let left = mul(View::of(wr), View::of(&v));
    let right = mul(View::of(&ut), View::of(wl));
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_variance_matches_target() {
        let g = gaussian_matrix(400, 250, 2.5, 17);
        let n = g.len() as f64;
        let mean = g.sum() / n;
        let var = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / 2.5 - 1.0).abs() < 0.05, "sample variance {var}");
    }

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(gaussian_matrix(3, 4, 1.0, 9), gaussian_matrix(3, 4, 1.0, 9));
        assert_ne!(
            gaussian_matrix(3, 4, 1.0, 9),
            gaussian_matrix(3, 4, 1.0, 10)
        );
        assert_eq!(gaussian_matrix(3, 4, 1.0, 9).shape(), (3, 4));
    }

    #[test]
    fn identity_sketches_give_identity() {
        let i = Matrix::identity(4, 4);
        let (l, r) = pinv_sqrt_factors(&i, &i, DEFAULT_NYSTROM_CUTOFF).unwrap();
        assert!((l * r - Matrix::identity(4, 4)).norm() < 1e-13);
    }

    #[test]
    fn matches_dense_pseudoinverse() {
        let wl = gaussian_matrix(5, 8, 1.0, 1);
        let wr = gaussian_matrix(8, 7, 1.0, 2);
        let (l, r) = pinv_sqrt_factors(&wl, &wr, DEFAULT_NYSTROM_CUTOFF).unwrap();
        assert_eq!(l.shape(), (8, 5));
        assert_eq!(r.shape(), (5, 8));
        let pinv = (&wl * &wr).pseudo_inverse(1e-14).unwrap();
        let expected = &wr * pinv * &wl;
        assert!((l * r - &expected).norm() <= 1e-10 * expected.norm());
    }

    #[test]
    fn cutoff_discards_negligible_directions() {
        // Wl Wr = diag(1, 1e-16): only the first direction is inverted.
        let wl = Matrix::identity(2, 2);
        let wr = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-16]));
        let (l, r) = pinv_sqrt_factors(&wl, &wr, 1e-12).unwrap();
        let lr = l * r;
        let expected = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
        assert!((lr - expected).norm() < 1e-13);
    }

    #[test]
    fn zero_sketch_is_an_error() {
        let z = Matrix::zeros(3, 3);
        assert!(matches!(
            pinv_sqrt_factors(&z, &z, DEFAULT_NYSTROM_CUTOFF),
            Err(TtError::DegenerateSketch { .. })
        ));
    }
}
