//! Low-tubal-rank completion of third-order tensors observed under tubal
//! sampling, where each tube `(i, j, :)` is either fully observed or fully
//! missing.
//!
//! Three solvers share one set of t-algebra primitives:
//!
//! - **TNN-ADMM**: ADMM on the tensor nuclear norm, using tensor singular
//!   value thresholding.
//! - **TL12-ADMM**: the same ADMM loop with the nonconvex L1-minus-L2
//!   penalty applied to each Fourier slice's singular values.
//! - **TCCUR**: completion through a t-CUR factorization. Each Fourier
//!   slice is completed independently with iterative CUR completion under
//!   resampled index sets.
//!
//! The runnable programs in `examples/` cover each capability. The
//! `tcomplete` binary wraps the same API for file-based workflows.

pub mod admm;
pub mod cur;
pub mod error;
pub mod experiment;
pub mod inpaint;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod parallel;
pub mod regularizer;
pub mod rng;
pub mod sampling;
pub mod spectral;
pub mod synth;
pub mod talgebra;
pub mod tensor;

#[cfg(test)]
pub(crate) mod testutil;

pub use admm::{solve_admm, AdmmConfig, AdmmState, BUpdate, StopRule};
pub use cur::{icurc_r, tccur, truncate_rank, CurComponents, IcurcConfig, TccurResult};
pub use error::{Error, Result};
pub use experiment::{run_sweep, solve, ExperimentSpec, Method, MetricRow, SolverConfig};
pub use inpaint::{inpaint, Inpainted, Sampling};
pub use io::{load_png, read_t3b, save_png, write_t3b};
pub use metrics::{psnr, relative_error};
pub use regularizer::{prox_l1_minus_l2, spectral_shrink, tl12, tnn, Regularizer};
pub use sampling::{impose, project, random_tubal_mask, TubalMask};
pub use spectral::{fft_mode3, ifft_mode3, SpectralTensor3};
pub use synth::synth_low_tubal_rank;
pub use talgebra::{t_pinv, t_product, t_svd, t_transpose, tubal_rank, MultiRank, TSvd};
pub use tensor::{Dims, Tensor3};
