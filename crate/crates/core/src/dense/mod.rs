//! Dense kernels shared by every rounding routine: Householder QR, truncated
//! SVDs, Gaussian sketches and the generalized Nyström factors.

pub(crate) mod gemm;
mod qr;
mod sketch;
mod svd;

pub use gemm::{matmul, matmul_nt, matmul_tn};
pub use qr::{qr, qr_q, thin_qr, QrFactors};
pub(crate) use sketch::fill_normal;
pub use sketch::{gaussian_matrix, pinv_sqrt_factors, stream_rng, DEFAULT_NYSTROM_CUTOFF};
pub use svd::{svd, svd_trunc, svd_trunc_rank, truncation_rank, LowRankSvd};
