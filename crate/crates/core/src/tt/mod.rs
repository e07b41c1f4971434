//! TT-tensors: cores, unfoldings, arithmetic, random generation and file
//! formats.

mod core;
pub mod io;
mod random;
mod tensor;

pub use self::core::TtCore;
pub use random::{random_gaussian_tt, random_gaussian_tt_stream, RankProfile};
pub(crate) use tensor::h_cross;
pub use tensor::{
    add_many, linear_combination, DenseTensor, TtTensor, Violation, DEFAULT_DENSE_CAP,
};
