use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::operator::{KroneckerSumOperator, MeanPreconditioner};
use crate::det::{truncate_left_orthogonal, tt_round, Truncation};
use crate::randomized::{round_sum_rand_orth, RoundingConfig};
use crate::tt::add_many;
use crate::{RankProfile, Result, TtError, TtTensor};

/// How every TT sum inside the solver is recompressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum RoundingMode {
    /// TT-rounding of the explicitly assembled sum.
    Deterministic,
    /// Structured randomize-then-orthogonalize on the terms, followed by
    /// truncation at the rounding tolerance.
    ///
    /// The sketch rank starts at the largest rank among the inputs plus
    /// `oversampling`, capped at `max_rank`. When the truncation keeps the
    /// whole sketch on some bond the sketch was too small, and it is redone
    /// with twice the rank.
    Randomized {
        oversampling: usize,
        max_rank: usize,
    },
}

impl RoundingMode {
    pub fn randomized() -> Self {
        RoundingMode::Randomized {
            oversampling: 10,
            max_rank: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmresConfig {
    /// Target relative residual.
    pub tol: f64,
    pub max_iter: usize,
    pub rounding: RoundingMode,
    /// Relative rounding tolerance; `None` means `tol / 10`.
    pub round_tol: Option<f64>,
    pub seed: u64,
}

impl GmresConfig {
    pub fn new(tol: f64, rounding: RoundingMode) -> Self {
        GmresConfig {
            tol,
            max_iter: 100,
            rounding,
            round_tol: None,
            seed: 0,
        }
    }

    pub fn rounding_tolerance(&self) -> f64 {
        self.round_tol.unwrap_or(self.tol / 10.0)
    }
}

/// What happened in one Arnoldi step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Least-squares estimate of the relative residual.
    pub residual: f64,
    /// Internal ranks of the new basis vector.
    pub basis_ranks: Vec<usize>,
    /// Internal ranks of the rounded operator application.
    pub operator_ranks: Vec<usize>,
    /// Seconds spent rounding the operator application.
    pub operator_round_secs: f64,
    /// Seconds spent rounding the Gram-Schmidt linear combination.
    pub gram_schmidt_round_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmresTrace {
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    /// Set when the new basis vector vanished before convergence.
    pub breakdown: bool,
    /// `||f - A x|| / ||f||` of the returned solution, computed exactly.
    pub true_residual: f64,
    pub total_secs: f64,
}

impl GmresTrace {
    pub fn num_iterations(&self) -> usize {
        self.iterations.len()
    }

    pub fn final_residual(&self) -> f64 {
        self.iterations.last().map_or(1.0, |r| r.residual)
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutput {
    pub x: TtTensor,
    pub trace: GmresTrace,
    /// Krylov basis `V_1 .. V_{k+1}` (the last one is absent after
    /// convergence or breakdown).
    pub basis: Vec<TtTensor>,
    /// Columns of the `(k+1) x k` Hessenberg matrix.
    pub hessenberg: Vec<Vec<f64>>,
}

struct Rounder {
    mode: RoundingMode,
    eps0: f64,
    seed: u64,
    calls: u64,
}

impl Rounder {
    /// Rounds `sum_j terms[j]`; `hint` are ranks the result is expected to be
    /// close to.
    fn round(&mut self, terms: &[&TtTensor], hint: &[usize]) -> Result<TtTensor> {
        self.calls += 1;
        let order = terms[0].order();
        match self.mode {
            RoundingMode::Randomized {
                oversampling,
                max_rank,
            } if order >= 2 => {
                let available: Vec<usize> = (1..order)
                    .map(|n| terms.iter().map(|t| t.ranks()[n]).sum::<usize>())
                    .collect();
                let mut guess: Vec<usize> = hint
                    .iter()
                    .zip(&available)
                    .map(|(&h, &a)| (h + oversampling).min(max_rank).min(a).max(1))
                    .collect();
                let seed = self
                    .seed
                    .wrapping_add(self.calls.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                loop {
                    let cfg = RoundingConfig::new(RankProfile::new(guess.clone())?, seed);
                    let sketched = round_sum_rand_orth(terms, &cfg)?.tensor;
                    let sketch_ranks = sketched.internal_ranks();
                    let out =
                        truncate_left_orthogonal(&sketched, &Truncation::Tolerance(self.eps0))?;
                    // Only bonds whose sketch was limited by the guess itself
                    // (not by the unfolding sizes) can benefit from a bigger one.
                    let kept = out.internal_ranks();
                    let saturated: Vec<usize> = (0..guess.len())
                        .filter(|&k| {
                            kept[k] >= sketch_ranks[k]
                                && sketch_ranks[k] == guess[k]
                                && guess[k] < max_rank.min(available[k])
                        })
                        .collect();
                    if saturated.is_empty() {
                        return Ok(out);
                    }
                    for k in saturated {
                        guess[k] = (2 * guess[k]).min(max_rank).min(available[k]);
                    }
                }
            }
            _ => tt_round(&add_many(terms)?, self.eps0),
        }
    }
}

fn max_ranks(tensors: &[&TtTensor]) -> Vec<usize> {
    let order = tensors[0].order();
    (1..order)
        .map(|n| tensors.iter().map(|t| t.ranks()[n]).max().unwrap_or(1))
        .collect()
}

/// Inexact right-preconditioned GMRES on TT-tensors.
///
/// Solves `A x = f` with `A` a Kronecker sum and the preconditioner
/// `(sum_i A_{i,1})^{-1}` on the first mode. Each step forms
/// `W = A P V_k` as a sum of `s` terms and rounds it, computes the
/// Gram-Schmidt coefficients from inner products, and rounds
/// `W - sum_j h_jk V_j` as one `(k+1)`-term sum.
pub fn tt_gmres(op: &KroneckerSumOperator, f: &TtTensor, cfg: &GmresConfig) -> Result<GmresOutput> {
    if !(cfg.tol > 0.0) {
        return Err(TtError::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    if f.dims() != op.dims() {
        return Err(TtError::DimensionMismatch(format!(
            "operator dims {:?}, right-hand side {:?}",
            op.dims(),
            f.dims()
        )));
    }
    let start = Instant::now();
    let precond = MeanPreconditioner::new(op)?;
    let mut rounder = Rounder {
        mode: cfg.rounding,
        eps0: cfg.rounding_tolerance(),
        seed: cfg.seed,
        calls: 0,
    };

    let beta = f.norm();
    if beta == 0.0 {
        return Err(TtError::ZeroNorm);
    }
    let mut basis = vec![f.scale(1.0 / beta)];
    // gram[i][j] = <V_i, V_j>, used to turn classical projections into
    // modified Gram-Schmidt ones.
    let mut gram: Vec<Vec<f64>> = vec![vec![1.0]];
    let mut hessenberg: Vec<Vec<f64>> = Vec::new();
    let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut g = vec![1.0];
    let mut iterations = Vec::new();
    let (mut converged, mut breakdown) = (false, false);

    for k in 0..cfg.max_iter {
        let y = precond.apply(&basis[k])?;
        let terms = op.apply_terms(&y)?;
        let t0 = Instant::now();
        let w = rounder.round(&terms.iter().collect::<Vec<_>>(), &max_ranks(&[&basis[k]]))?;
        let operator_round_secs = t0.elapsed().as_secs_f64();

        let raw: Vec<f64> = basis.iter().map(|v| v.inner(&w)).collect::<Result<_>>()?;
        let mut h = vec![0.0; k + 2];
        for j in 0..=k {
            h[j] = raw[j] - (0..j).map(|i| h[i] * gram[j][i]).sum::<f64>();
        }

        let mut coeffs = vec![1.0];
        coeffs.extend(h[..=k].iter().map(|c| -c));
        let scaled_terms: Vec<TtTensor> = std::iter::once(&w)
            .chain(basis.iter())
            .zip(&coeffs)
            .map(|(t, &c)| t.scale(c))
            .collect();
        let t1 = Instant::now();
        let hint = max_ranks(&[&w, &basis[k]]);
        let z = rounder.round(&scaled_terms.iter().collect::<Vec<_>>(), &hint)?;
        let gram_schmidt_round_secs = t1.elapsed().as_secs_f64();
        let hz = z.norm();
        h[k + 1] = hz;
        hessenberg.push(h.clone());

        // Apply the previous rotations, then the one that zeroes h[k+1].
        for i in 0..k {
            let tmp = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = tmp;
        }
        let denom = h[k].hypot(h[k + 1]);
        let (c, s) = if denom == 0.0 {
            (1.0, 0.0)
        } else {
            (h[k] / denom, h[k + 1] / denom)
        };
        cs.push(c);
        sn.push(s);
        g.push(-s * g[k]);
        g[k] *= c;

        let residual = g[k + 1].abs();
        iterations.push(IterationRecord {
            iteration: k + 1,
            residual,
            basis_ranks: z.internal_ranks(),
            operator_ranks: w.internal_ranks(),
            operator_round_secs,
            gram_schmidt_round_secs,
        });
        if residual <= cfg.tol {
            converged = true;
            break;
        }
        if hz <= 1e-14 * w.norm() {
            breakdown = true;
            break;
        }
        let v = z.scale(1.0 / hz);
        let mut row: Vec<f64> = basis.iter().map(|b| b.inner(&v)).collect::<Result<_>>()?;
        row.push(1.0);
        for (i, r) in gram.iter_mut().enumerate() {
            r.push(row[i]);
        }
        gram.push(row);
        basis.push(v);
    }

    let steps = iterations.len();
    let upper = rotated_upper(&hessenberg, &cs, &sn);
    let mut coef = vec![0.0; steps];
    for i in (0..steps).rev() {
        let s: f64 = (i + 1..steps).map(|j| upper[j][i] * coef[j]).sum();
        coef[i] = (g[i] - s) / upper[i][i];
    }
    let scaled: Vec<f64> = coef.iter().map(|c| c * beta).collect();
    let used: Vec<&TtTensor> = basis[..steps].iter().collect();
    let u = rounder.round(
        &used
            .iter()
            .zip(&scaled)
            .map(|(v, &c)| v.scale(c))
            .collect::<Vec<_>>()
            .iter()
            .collect::<Vec<_>>(),
        &max_ranks(&used),
    )?;
    let x = precond.apply(&u)?;

    let ax = op.apply(&x)?;
    let true_residual = ax.relative_error(f)?;
    let trace = GmresTrace {
        iterations,
        converged,
        breakdown,
        true_residual,
        total_secs: start.elapsed().as_secs_f64(),
    };
    Ok(GmresOutput {
        x,
        trace,
        basis,
        hessenberg,
    })
}

/// Upper-triangular factor of the rotated Hessenberg matrix, column-wise.
fn rotated_upper(hessenberg: &[Vec<f64>], cs: &[f64], sn: &[f64]) -> Vec<Vec<f64>> {
    hessenberg
        .iter()
        .enumerate()
        .map(|(k, col)| {
            let mut h = col.clone();
            for i in 0..=k {
                let tmp = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = tmp;
            }
            h.truncate(k + 1);
            h
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmres::{build_cookie_surrogate, ModeFactor};
    use crate::tt::random_gaussian_tt;

    #[test]
    fn identity_converges_in_one_step() {
        let op =
            KroneckerSumOperator::new(vec![vec![ModeFactor::Identity(4), ModeFactor::Identity(3)]])
                .unwrap();
        let f = random_gaussian_tt(&[4, 3], &RankProfile::new(vec![2]).unwrap(), 1).unwrap();
        for mode in [RoundingMode::Deterministic, RoundingMode::randomized()] {
            let out = tt_gmres(&op, &f, &GmresConfig::new(1e-8, mode)).unwrap();
            assert!(out.trace.converged);
            assert_eq!(out.trace.num_iterations(), 1);
            assert!(out.x.relative_error(&f).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn small_surrogate_converges_on_both_paths() {
        let (op, f) = build_cookie_surrogate(12, 2, 4, (1.0, 10.0)).unwrap();
        for mode in [RoundingMode::Deterministic, RoundingMode::randomized()] {
            let out = tt_gmres(&op, &f, &GmresConfig::new(1e-8, mode)).unwrap();
            assert!(out.trace.converged, "{mode:?}");
            assert!(
                out.trace.true_residual <= 1e-7,
                "{mode:?}: {}",
                out.trace.true_residual
            );
            let res: Vec<f64> = out.trace.iterations.iter().map(|r| r.residual).collect();
            assert!(res.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let (op, f) = build_cookie_surrogate(8, 1, 3, (1.0, 10.0)).unwrap();
        assert!(tt_gmres(&op, &f, &GmresConfig::new(0.0, RoundingMode::Deterministic)).is_err());
        let zero = TtTensor::zeros(&f.dims());
        assert!(tt_gmres(
            &op,
            &zero,
            &GmresConfig::new(1e-8, RoundingMode::Deterministic)
        )
        .is_err());
    }
}
