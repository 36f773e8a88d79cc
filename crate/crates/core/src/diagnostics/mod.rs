//! Sample-quality measures.

mod act;
mod kde;
mod moments;
mod variance;
mod wasserstein;

pub use act::{autocorrelation_time, autocovariance, chain_act, MIN_ACT_SAMPLES};
pub use kde::{kde_grid, scott_bandwidth, DensityGrid, GridSpec};
pub use moments::{
    covariance_error, empirical_covariance, empirical_mean, mean_error, running_mean, windowed_mean, MomentError,
};
pub use variance::{gradient_variance_profile, nll_accuracy};
pub use wasserstein::{
    min_cost_assignment, wasserstein2, wasserstein2_subsampled, W2Report, MAX_ASSIGNMENT_POINTS, MAX_W2_DIM,
};

use serde::Serialize;

use crate::error::Result;
use crate::samplers::{SampleChain, SamplerKind};

/// Summary of one chain against a known target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub kind: SamplerKind,
    pub seed: u64,
    pub samples: usize,
    /// ACT of the first coordinate.
    pub act: f64,
    pub cov_error: MomentError,
    pub mean_error: MomentError,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w2: Option<W2Report>,
}

impl DiagnosticsReport {
    pub fn for_chain(chain: &SampleChain, true_mean: &[f64], true_cov: &[Vec<f64>]) -> Result<Self> {
        Ok(Self {
            kind: chain.spec.kind,
            seed: chain.seed(),
            samples: chain.len(),
            act: chain_act(chain, |x| x[0])?,
            cov_error: covariance_error(&chain.samples, true_cov)?,
            mean_error: mean_error(&chain.samples, true_mean)?,
            w2: None,
        })
    }

    pub fn with_w2(mut self, w2: W2Report) -> Self {
        self.w2 = Some(w2);
        self
    }
}
