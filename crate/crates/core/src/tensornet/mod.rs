//! Dense tensors and the matrix-product-state engine.

pub mod gates;
mod mpo;
mod mps;
mod sampling;
mod tensor;

pub use mpo::Mpo;
pub use mps::{MpsState, DEFAULT_CHI_MAX, DEFAULT_SVD_CUTOFF};
pub use sampling::{sample_shots, Sampler};
pub use tensor::{svd_truncated, Tensor, TruncatedSvd};
