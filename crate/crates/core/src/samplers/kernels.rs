//! Single-step update rules on explicit gradients and noise draws.
//!
//! The stateful step functions draw a batch and noise and then call into
//! these, so tests can pin both and compare against independent oracles.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::smoothing::LaplacianOperator;

/// Where the smoothing operator sits relative to the diagonal preconditioner
/// in LS-pSGLD.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingOrder {
    /// `A⁻¹(G⊙g)` and `A^{-1/2}(√G⊙ε)`.
    #[default]
    SmoothAfterPrecondition,
    /// `G⊙(A⁻¹g)` and `√G⊙(A^{-1/2}ε)`.
    PreconditionAfterSmooth,
}

/// `x ← x − η·drift + √(2η/β)·noise`.
pub fn langevin_update(x: &mut [f64], drift: &[f64], noise: &[f64], eta: f64, beta: f64) {
    let scale = (2.0 * eta / beta).sqrt();
    for ((xi, di), ni) in x.iter_mut().zip(drift).zip(noise) {
        *xi = *xi - eta * di + scale * ni;
    }
}

/// SGLD: `x ← x − η·g + √(2η/β)·ε`.
pub fn sgld_update(x: &mut [f64], grad: &[f64], noise: &[f64], eta: f64, beta: f64) {
    langevin_update(x, grad, noise, eta, beta);
}

/// LS-SGLD: `x ← x − η·A⁻¹g + √(2η/β)·A^{-1/2}ε`.
pub fn ls_sgld_update(
    x: &mut [f64],
    grad: &[f64],
    noise: &[f64],
    eta: f64,
    beta: f64,
    op: &LaplacianOperator,
) -> Result<()> {
    check_dim(op.dim(), x.len())?;
    let drift = op.apply_inverse(grad)?;
    let noise = op.apply_inverse_sqrt(noise)?;
    langevin_update(x, &drift, &noise, eta, beta);
    Ok(())
}

/// RMSProp accumulator update `v ← αv + (1−α)g⊙g`, returning the diagonal
/// preconditioner `G = 1/(ε + √v)`.
pub fn rmsprop_preconditioner(v_acc: &mut [f64], grad: &[f64], alpha: f64, eps: f64) -> Vec<f64> {
    v_acc
        .iter_mut()
        .zip(grad)
        .map(|(v, g)| {
            *v = alpha * *v + (1.0 - alpha) * g * g;
            (eps + v.sqrt()).recip()
        })
        .collect()
}

/// Preconditioned (and optionally smoothed) Langevin step with diagonal `G`:
/// `x ← x − η·G⊙g + √(2η/β)·√G⊙ε`, with `A_σ` inserted according to `order`.
/// The `Γ(x)` curvature correction of the original pSGLD is not included.
#[allow(clippy::too_many_arguments)]
pub fn preconditioned_update(
    x: &mut [f64],
    grad: &[f64],
    noise: &[f64],
    precond: &[f64],
    eta: f64,
    beta: f64,
    op: Option<&LaplacianOperator>,
    order: SmoothingOrder,
) -> Result<()> {
    check_dim(x.len(), precond.len())?;
    let (drift, noise) = match (op, order) {
        (None, _) => (scale_by(precond, grad), scale_by_sqrt(precond, noise)),
        (Some(op), SmoothingOrder::SmoothAfterPrecondition) => (
            op.apply_inverse(&scale_by(precond, grad))?,
            op.apply_inverse_sqrt(&scale_by_sqrt(precond, noise))?,
        ),
        (Some(op), SmoothingOrder::PreconditionAfterSmooth) => (
            scale_by(precond, &op.apply_inverse(grad)?),
            scale_by_sqrt(precond, &op.apply_inverse_sqrt(noise)?),
        ),
    };
    langevin_update(x, &drift, &noise, eta, beta);
    Ok(())
}

fn scale_by(g: &[f64], v: &[f64]) -> Vec<f64> {
    g.iter().zip(v).map(|(a, b)| a * b).collect()
}

fn scale_by_sqrt(g: &[f64], v: &[f64]) -> Vec<f64> {
    g.iter().zip(v).map(|(a, b)| a.sqrt() * b).collect()
}

/// Log of the Metropolis acceptance probability `min(1, π(x*)/π(x))`.
pub fn mh_log_acceptance(log_density_current: f64, log_density_proposal: f64) -> f64 {
    (log_density_proposal - log_density_current).min(0.0)
}
