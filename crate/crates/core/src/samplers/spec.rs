use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::kernels::SmoothingOrder;

/// The chain families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Sgld,
    LsSgld,
    Psgld,
    LsPsgld,
    /// Full-batch Euler–Maruyama with step `η/100`.
    LdReference,
    /// Full-batch smoothed Euler–Maruyama with step `η/100`.
    LsLdReference,
    /// Random-walk Metropolis with proposal scale `η`.
    MhReference,
}

/// Step-size reduction applied by the fine-step reference kinds.
pub const REFERENCE_STEP_DIVISOR: f64 = 100.0;

impl SamplerKind {
    pub const ALL: [SamplerKind; 7] = [
        Self::Sgld,
        Self::LsSgld,
        Self::Psgld,
        Self::LsPsgld,
        Self::LdReference,
        Self::LsLdReference,
        Self::MhReference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sgld => "sgld",
            Self::LsSgld => "ls_sgld",
            Self::Psgld => "psgld",
            Self::LsPsgld => "ls_psgld",
            Self::LdReference => "ld_reference",
            Self::LsLdReference => "ls_ld_reference",
            Self::MhReference => "mh_reference",
        }
    }

    /// Uses the Laplacian smoothing operator.
    pub fn is_smoothed(self) -> bool {
        matches!(self, Self::LsSgld | Self::LsPsgld | Self::LsLdReference)
    }

    pub fn is_preconditioned(self) -> bool {
        matches!(self, Self::Psgld | Self::LsPsgld)
    }

    /// Uses the full gradient at a reduced step.
    pub fn is_fine_step_reference(self) -> bool {
        matches!(self, Self::LdReference | Self::LsLdReference)
    }

    /// Draws mini-batches.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Self::Sgld | Self::LsSgld | Self::Psgld | Self::LsPsgld)
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn default_beta() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.99
}
fn default_precond_eps() -> f64 {
    1e-5
}
fn default_thin() -> usize {
    1
}

/// Hyperparameters of one chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    /// Base step size (proposal scale for `mh_reference`).
    pub eta: f64,
    /// Optional per-step step sizes; overrides `eta` and must cover every iteration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    pub batch_size: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "default_alpha")]
    pub precond_alpha: f64,
    #[serde(default = "default_precond_eps")]
    pub precond_eps: f64,
    #[serde(default)]
    pub smoothing_order: SmoothingOrder,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "default_thin")]
    pub thin: usize,
    pub iterations: usize,
    #[serde(default)]
    pub seed: u64,
    /// Starting point; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

/// One violated field constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldIssue {
    pub field: &'static str,
    pub message: String,
}

impl SamplerSpec {
    /// A spec with default `β`, preconditioner settings, no burn-in and no thinning.
    pub fn new(kind: SamplerKind, eta: f64, batch_size: usize, iterations: usize, seed: u64) -> Self {
        Self {
            kind,
            eta,
            schedule: None,
            batch_size,
            beta: default_beta(),
            sigma: 0.0,
            precond_alpha: default_alpha(),
            precond_eps: default_precond_eps(),
            smoothing_order: SmoothingOrder::default(),
            burn_in: 0,
            thin: 1,
            iterations,
            seed,
            x0: None,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_thin(mut self, thin: usize) -> Self {
        self.thin = thin;
        self
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Self {
        self.schedule = Some(schedule);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The step size used at iteration `k`, including the reference reduction.
    pub fn step_size(&self, k: usize) -> f64 {
        let base = self
            .schedule
            .as_ref()
            .and_then(|s| s.get(k).copied())
            .unwrap_or(self.eta);
        if self.kind.is_fine_step_reference() {
            base / REFERENCE_STEP_DIVISOR
        } else {
            base
        }
    }

    /// Every violated constraint. `n` and `dim`, when known, enable the
    /// batch-size and starting-point checks.
    pub fn issues(&self, n: Option<usize>, dim: Option<usize>) -> Vec<FieldIssue> {
        let mut out = Vec::new();
        let mut push = |field: &'static str, message: String| out.push(FieldIssue { field, message });

        if !(self.eta.is_finite() && self.eta > 0.0) {
            push("eta", format!("must be positive and finite, found {}", self.eta));
        }
        if let Some(s) = &self.schedule {
            if s.len() < self.iterations {
                push(
                    "schedule",
                    format!("has {} entries but iterations = {}", s.len(), self.iterations),
                );
            }
            if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                push("schedule", "entries must be positive and finite".into());
            }
        }
        if self.batch_size == 0 {
            push("batch_size", "must be at least 1".into());
        }
        if let Some(n) = n {
            if self.batch_size > n {
                push(
                    "batch_size",
                    format!(
                        "batch_size = {} exceeds the number of components n = {n}",
                        self.batch_size
                    ),
                );
            }
        }
        if !(self.beta > 0.0) || self.beta.is_nan() {
            push("beta", format!("must be positive, found {}", self.beta));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            push("sigma", format!("must be nonnegative and finite, found {}", self.sigma));
        } else if self.sigma > 0.0 && !self.kind.is_smoothed() {
            push(
                "sigma",
                format!(
                    "sigma = {} requires a smoothed kind, but kind = {}",
                    self.sigma, self.kind
                ),
            );
        }
        if !(0.0..=1.0).contains(&self.precond_alpha) {
            push(
                "precond_alpha",
                format!("must lie in [0, 1], found {}", self.precond_alpha),
            );
        }
        if !(self.precond_eps.is_finite() && self.precond_eps > 0.0) {
            push("precond_eps", format!("must be positive, found {}", self.precond_eps));
        }
        if self.iterations == 0 {
            push("iterations", "must be at least 1".into());
        }
        if self.burn_in >= self.iterations.max(1) {
            push(
                "burn_in",
                format!(
                    "burn_in = {} must be below iterations = {}",
                    self.burn_in, self.iterations
                ),
            );
        }
        if self.thin == 0 {
            push("thin", "must be at least 1".into());
        }
        if let (Some(x0), Some(d)) = (&self.x0, dim) {
            if x0.len() != d {
                push("x0", format!("has length {} but the target dimension is {d}", x0.len()));
            }
        }
        out
    }

    /// Checks the spec against a target with `n` components in dimension `dim`,
    /// reporting the first violated constraint.
    pub fn validate(&self, n: usize, dim: usize) -> Result<()> {
        match self.issues(Some(n), Some(dim)).into_iter().next() {
            None => Ok(()),
            Some(FieldIssue { field, message }) => Err(Error::InvalidParameter {
                name: field,
                reason: message,
            }),
        }
    }

    /// Number of samples `run_chain` records.
    pub fn recorded_len(&self) -> usize {
        if self.iterations <= self.burn_in || self.thin == 0 {
            0
        } else {
            (self.iterations - self.burn_in).div_ceil(self.thin)
        }
    }
}
