//! Laplacian-smoothing stochastic gradient Langevin dynamics.
//!
//! LS-SGLD replaces the SGLD update with
//!
//! ```text
//! x_{k+1} = x_k − η A_σ⁻¹ g_k + √(2η/β) A_σ^{-1/2} ε_k
//! ```
//!
//! where `A_σ = I − σL` is the circulant smoothing operator of
//! [`LaplacianOperator`]. The preconditioned drift and noise leave the
//! stationary law `exp(−βf)` unchanged while damping the variance of the
//! mini-batch gradient `g_k`.
//!
//! - [`smoothing`]: `A_σ` and its FFT-based inverse and inverse square root.
//! - [`targets`]: finite-sum targets (Gaussian, Gaussian mixture pairs,
//!   Bayesian logistic regression) and libsvm ingestion.
//! - [`samplers`]: SGLD, LS-SGLD, pSGLD, LS-pSGLD, fine-step references and
//!   random-walk Metropolis.
//! - [`diagnostics`]: autocorrelation time, moment errors, 2-Wasserstein
//!   distance, kernel density grids, gradient-variance profiles.
//! - [`bounds`]: the convex and dissipative error bounds.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod diagnostics;
mod error;
mod linalg;
pub mod rng;
pub mod samplers;
pub mod smoothing;
pub mod targets;

pub use bounds::{convex_bound, nonconvex_bound, BoundBreakdown, BoundInputs};
pub use error::{Error, Result};
pub use samplers::{run_chain, ChainState, SampleChain, SamplerKind, SamplerSpec};
pub use smoothing::LaplacianOperator;
pub use targets::{BlrTarget, GaussianTarget, MixturePairTarget, TargetModel};
