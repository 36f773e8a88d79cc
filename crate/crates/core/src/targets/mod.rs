//! Target densities `π ∝ exp(−β f)` with `f = n⁻¹ Σ_i f_i`, exposed through
//! their component gradients so samplers can form mini-batch estimates.

mod blr;
mod gaussian;
mod libsvm;
mod mixture;

pub(crate) use blr::softplus;
pub use blr::{BlrTarget, GammaPrior, LabeledData, DEFAULT_EPSILON_NORM};
pub use gaussian::GaussianTarget;
pub use libsvm::{load_libsvm, parse_libsvm, write_libsvm, LabelRule, LibsvmOptions};
pub use mixture::{sample_mixture_centers, MixturePairTarget};

use crate::error::{check_dim, Error, Result};
use crate::smoothing::LaplacianOperator;

/// A finite-sum target `f(x) = n⁻¹ Σ_i f_i(x)`.
///
/// Implementations are immutable after construction and shared between
/// concurrently running chains.
pub trait TargetModel: Send + Sync {
    /// Dimension `d` of the parameter.
    fn dim(&self) -> usize;

    /// Number of components `n`.
    fn num_components(&self) -> usize;

    /// Adds `scale · ∇f_i(x)` to `out`.
    fn accumulate_component_grad(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) -> Result<()>;

    fn component_grad(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.accumulate_component_grad(i, x, 1.0, &mut out)?;
        Ok(out)
    }

    /// `∇f(x) = n⁻¹ Σ_i ∇f_i(x)`.
    fn full_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.num_components();
        let mut out = vec![0.0; self.dim()];
        let scale = (n as f64).recip();
        for i in 0..n {
            self.accumulate_component_grad(i, x, scale, &mut out)?;
        }
        Ok(out)
    }

    /// `−f(x)`, the log-density up to an additive constant, when available.
    fn log_density_unnormalized(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

/// Mini-batch gradient `B⁻¹ Σ_{i∈batch} ∇f_i(x)`, optionally smoothed by `A_σ⁻¹`.
pub fn stochastic_gradient(
    model: &dyn TargetModel,
    x: &[f64],
    batch: &[usize],
    op: Option<&LaplacianOperator>,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; model.dim()];
    minibatch_grad_into(model, x, batch, &mut out)?;
    if let Some(op) = op {
        op.apply_inverse_in_place(&mut out)?;
    }
    Ok(out)
}

/// Writes the mini-batch mean gradient into `out`.
pub(crate) fn minibatch_grad_into(model: &dyn TargetModel, x: &[f64], batch: &[usize], out: &mut [f64]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dim(model.dim(), x.len())?;
    check_dim(model.dim(), out.len())?;
    out.fill(0.0);
    let scale = (batch.len() as f64).recip();
    for &i in batch {
        model.accumulate_component_grad(i, x, scale, out)?;
    }
    Ok(())
}

pub(crate) fn check_index(i: usize, n: usize) -> Result<()> {
    if i < n {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, n })
    }
}
