//! Discrete-time Langevin chains and the Metropolis reference sampler.
//!
//! Every stochastic step draws one mini-batch from the chain's batch stream
//! and one Gaussian vector from its noise stream, in that order, whatever the
//! kind. Chains of different kinds sharing a seed therefore see the same
//! batches and noise.

mod chain;
mod kernels;
mod spec;

pub use chain::SampleChain;
pub use kernels::{
    langevin_update, ls_sgld_update, mh_log_acceptance, preconditioned_update, rmsprop_preconditioner, sgld_update,
    SmoothingOrder,
};
pub use spec::{FieldIssue, SamplerKind, SamplerSpec, REFERENCE_STEP_DIVISOR};

use rand::seq::index;
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::rng::ChainRng;
use crate::smoothing::LaplacianOperator;
use crate::targets::{minibatch_grad_into, TargetModel};

/// The evolving state of one chain.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub x: Vec<f64>,
    /// RMSProp accumulator; present for the preconditioned kinds.
    pub v_acc: Option<Vec<f64>>,
    /// Number of steps taken.
    pub k: usize,
    pub rng: ChainRng,
    log_density: Option<f64>,
    accepted: usize,
}

impl ChainState {
    /// Starts at `spec.x0`, or the origin.
    pub fn new(spec: &SamplerSpec, dim: usize) -> Self {
        Self {
            x: spec.x0.clone().unwrap_or_else(|| vec![0.0; dim]),
            v_acc: spec.kind.is_preconditioned().then(|| vec![0.0; dim]),
            k: 0,
            rng: ChainRng::new(spec.seed),
            log_density: None,
            accepted: 0,
        }
    }

    /// Accepted Metropolis proposals so far.
    pub fn accepted(&self) -> usize {
        self.accepted
    }
}

/// Full gradient for reference kinds and `B = n`; otherwise the mean over a
/// uniform batch drawn without replacement.
fn draw_gradient(state: &mut ChainState, model: &dyn TargetModel, spec: &SamplerSpec) -> Result<Vec<f64>> {
    check_dim(model.dim(), state.x.len())?;
    let n = model.num_components();
    if spec.kind.is_fine_step_reference() || spec.batch_size >= n {
        return model.full_grad(&state.x);
    }
    if spec.batch_size == 0 {
        return Err(Error::EmptyBatch);
    }
    let batch = index::sample(&mut state.rng.batch, n, spec.batch_size).into_vec();
    let mut g = vec![0.0; model.dim()];
    minibatch_grad_into(model, &state.x, &batch, &mut g)?;
    Ok(g)
}

fn draw_noise(state: &mut ChainState) -> Vec<f64> {
    let mut eps = vec![0.0; state.x.len()];
    state.rng.fill_normal(&mut eps);
    eps
}

/// `x ← x − η·g + √(2η/β)·ε`.
pub fn sgld_step(state: &mut ChainState, model: &dyn TargetModel, spec: &SamplerSpec) -> Result<()> {
    let eta = spec.step_size(state.k);
    let g = draw_gradient(state, model, spec)?;
    let eps = draw_noise(state);
    sgld_update(&mut state.x, &g, &eps, eta, spec.beta);
    state.k += 1;
    Ok(())
}

/// `x ← x − η·A⁻¹g + √(2η/β)·A^{-1/2}ε`.
pub fn ls_sgld_step(
    state: &mut ChainState,
    model: &dyn TargetModel,
    spec: &SamplerSpec,
    op: &LaplacianOperator,
) -> Result<()> {
    check_dim(model.dim(), op.dim())?;
    let eta = spec.step_size(state.k);
    let g = draw_gradient(state, model, spec)?;
    let eps = draw_noise(state);
    ls_sgld_update(&mut state.x, &g, &eps, eta, spec.beta, op)?;
    state.k += 1;
    Ok(())
}

/// RMSProp-preconditioned SGLD without the curvature drift term.
pub fn psgld_step(state: &mut ChainState, model: &dyn TargetModel, spec: &SamplerSpec) -> Result<()> {
    preconditioned_step(state, model, spec, None)
}

/// Preconditioned and smoothed SGLD; see [`SmoothingOrder`] for the composition.
pub fn ls_psgld_step(
    state: &mut ChainState,
    model: &dyn TargetModel,
    spec: &SamplerSpec,
    op: &LaplacianOperator,
) -> Result<()> {
    check_dim(model.dim(), op.dim())?;
    preconditioned_step(state, model, spec, Some(op))
}

fn preconditioned_step(
    state: &mut ChainState,
    model: &dyn TargetModel,
    spec: &SamplerSpec,
    op: Option<&LaplacianOperator>,
) -> Result<()> {
    let eta = spec.step_size(state.k);
    let g = draw_gradient(state, model, spec)?;
    let eps = draw_noise(state);
    let dim = state.x.len();
    let v_acc = state.v_acc.get_or_insert_with(|| vec![0.0; dim]);
    check_dim(dim, v_acc.len())?;
    let precond = rmsprop_preconditioner(v_acc, &g, spec.precond_alpha, spec.precond_eps);
    preconditioned_update(
        &mut state.x,
        &g,
        &eps,
        &precond,
        eta,
        spec.beta,
        op,
        spec.smoothing_order,
    )?;
    state.k += 1;
    Ok(())
}

/// Random-walk Metropolis targeting `exp(β·log π̃)` with proposal `x + s·ε`, `s = η`.
pub fn mh_reference_step(state: &mut ChainState, model: &dyn TargetModel, spec: &SamplerSpec) -> Result<()> {
    const MISSING: Error = Error::UnsupportedTarget("an unnormalized log-density");
    check_dim(model.dim(), state.x.len())?;
    let current = match state.log_density {
        Some(v) => v,
        None => model.log_density_unnormalized(&state.x).ok_or(MISSING)?,
    };
    let scale = spec.step_size(state.k);
    let eps = draw_noise(state);
    let proposal: Vec<f64> = state.x.iter().zip(&eps).map(|(x, e)| x + scale * e).collect();
    let candidate = model.log_density_unnormalized(&proposal).ok_or(MISSING)?;
    let u: f64 = state.rng.accept.random();
    let log_alpha = mh_log_acceptance(spec.beta * current, spec.beta * candidate);
    if u.ln() < log_alpha {
        state.x = proposal;
        state.log_density = Some(candidate);
        state.accepted += 1;
    } else {
        state.log_density = Some(current);
    }
    state.k += 1;
    Ok(())
}

/// Advances `state` by one step of `spec.kind`. Smoothed kinds require `op`.
pub fn step(
    state: &mut ChainState,
    model: &dyn TargetModel,
    spec: &SamplerSpec,
    op: Option<&LaplacianOperator>,
) -> Result<()> {
    let need_op = || {
        op.ok_or(Error::InvalidParameter {
            name: "sigma",
            reason: format!("kind {} needs a smoothing operator", spec.kind),
        })
    };
    match spec.kind {
        SamplerKind::Sgld | SamplerKind::LdReference => sgld_step(state, model, spec),
        SamplerKind::LsSgld | SamplerKind::LsLdReference => ls_sgld_step(state, model, spec, need_op()?),
        SamplerKind::Psgld => psgld_step(state, model, spec),
        SamplerKind::LsPsgld => ls_psgld_step(state, model, spec, need_op()?),
        SamplerKind::MhReference => mh_reference_step(state, model, spec),
    }
}

/// Runs `spec.iterations` steps from `x₀` and records the post-burn-in,
/// thinned iterates.
pub fn run_chain(spec: &SamplerSpec, model: &dyn TargetModel) -> Result<SampleChain> {
    run_chain_with_operator(spec, model, None)
}

/// As [`run_chain`], reusing a prebuilt operator for smoothed kinds.
pub fn run_chain_with_operator(
    spec: &SamplerSpec,
    model: &dyn TargetModel,
    op: Option<&LaplacianOperator>,
) -> Result<SampleChain> {
    let dim = model.dim();
    spec.validate(model.num_components(), dim)?;
    let built;
    let op = match (spec.kind.is_smoothed(), op) {
        (false, _) => None,
        (true, Some(op)) => {
            check_dim(dim, op.dim())?;
            Some(op)
        }
        (true, None) => {
            built = LaplacianOperator::build(dim, spec.sigma)?;
            Some(&built)
        }
    };

    let mut state = ChainState::new(spec, dim);
    let capacity = spec.recorded_len();
    let mut samples = Vec::with_capacity(capacity);
    let mut steps = Vec::with_capacity(capacity);
    let mut etas = Vec::with_capacity(capacity);
    for k in 0..spec.iterations {
        step(&mut state, model, spec, op)?;
        let t = k + 1;
        if t > spec.burn_in && (t - spec.burn_in - 1) % spec.thin == 0 {
            samples.push(state.x.clone());
            steps.push(t);
            etas.push(spec.step_size(k));
        }
    }
    Ok(SampleChain {
        spec: spec.clone(),
        dim,
        samples,
        steps,
        etas,
        accepted: (spec.kind == SamplerKind::MhReference).then_some(state.accepted),
    })
}
