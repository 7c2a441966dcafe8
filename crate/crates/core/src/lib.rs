//! Tubal-rank tensor algebra and exact recovery of low-tubal-rank tensors.
//!
//! The crate is organized bottom-up:
//!
//! * [`tensor`], [`fft`], [`tproduct`]: the container, the transform along
//!   the third dimension, and the t-product with its block-circulant
//!   reference.
//! * [`tsvd`]: t-SVD, tubal/average rank, tensor nuclear and spectral norms,
//!   and the nuclear-norm proximal operator.
//! * [`sensing`]: Gaussian measurement maps and Bernoulli sampling masks.
//! * [`solve`]: the two ADMM solvers.
//! * [`lab`]: generators, sample-complexity formulas, incoherence, metrics,
//!   and the experiment drivers.
//! * [`io`]: the `.t3` and `.om` binary formats.

pub mod error;
pub mod fft;
pub mod io;
pub mod lab;
mod linalg;
pub mod rng;
pub mod sensing;
pub mod solve;
pub mod tensor;
pub mod tproduct;
pub mod tsvd;

pub use error::{Error, Result};
pub use fft::{fft_dim3, ifft_dim3, FreqTensor3};
pub use sensing::{make_bernoulli_mask, make_gaussian_map, GaussianMap, SampleMask};
pub use solve::{solve_completion, solve_gaussian, AdmmConfig, Solution, SolverReport};
pub use tensor::{ctranspose, identity, inner, Dims, Matrix2, Norms, Tensor3};
pub use tproduct::{bcirc, tprod, tprod_oracle};
pub use tsvd::{
    avg_rank, spectral_norm, svt, tensor_singular_values, tnn, tsvd, tubal_rank, TSvdFactors,
    TSvdMode,
};
