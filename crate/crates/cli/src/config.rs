//! Experiment configuration documents (TOML) and their validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use lssgld::samplers::{SamplerKind, SamplerSpec, SmoothingOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Gauss2d,
    Mixture,
    Mixing,
    Blr,
    VarianceTable,
    GammaTable,
    BoundsSweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gauss2d => "gauss2d",
            Self::Mixture => "mixture",
            Self::Mixing => "mixing",
            Self::Blr => "blr",
            Self::VarianceTable => "variance_table",
            Self::GammaTable => "gamma_table",
            Self::BoundsSweep => "bounds_sweep",
        }
    }

    /// Two-dimensional experiments read `sigma` in the explicit 2×2 form
    /// `[[1+σ, −σ], [−σ, 1+σ]]`.
    pub fn is_planar(self) -> bool {
        matches!(self, Self::Gauss2d | Self::Mixture | Self::Mixing)
    }

    fn uses_samplers(self) -> bool {
        matches!(self, Self::Gauss2d | Self::Mixture | Self::Mixing | Self::Blr)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One sampler row of an experiment. Unset fields take the experiment's defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerEntry {
    pub kind: SamplerKind,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    /// Multiply the step size of smoothed kinds by `(1 + 4σ)^{1/4}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_multiplier: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing_order: Option<SmoothingOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precond_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precond_eps: Option<f64>,
}

impl SamplerEntry {
    pub fn new(kind: SamplerKind) -> Self {
        Self {
            kind,
            sigma: 0.0,
            eta: None,
            batch_size: None,
            step_multiplier: None,
            smoothing_order: None,
            precond_alpha: None,
            precond_eps: None,
        }
    }

    pub fn sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn batch_size(mut self, b: usize) -> Self {
        self.batch_size = Some(b);
        self
    }

    pub fn step_multiplier(mut self, on: bool) -> Self {
        self.step_multiplier = Some(on);
        self
    }

    /// Row label used in output tables.
    pub fn label(&self) -> String {
        if self.sigma > 0.0 {
            format!("{}_sigma{}", self.kind, self.sigma)
        } else {
            self.kind.to_string()
        }
    }
}

/// Experiment-level values that sampler entries fall back on.
#[derive(Clone, Copy, Debug)]
pub struct SamplerDefaults {
    pub eta: f64,
    pub batch_size: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub step_multiplier: bool,
    /// Ratio of library `σ` to configured `σ` (½ for the planar experiments).
    pub sigma_scale: f64,
}

/// A sampler entry resolved into a runnable spec.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedSampler {
    pub label: String,
    /// `σ` as configured.
    pub sigma: f64,
    pub step_factor: f64,
    /// Spec with seed 0; cells set their own seed.
    pub spec: SamplerSpec,
}

/// `(1 + 4σ)^{1/4}` for the operator strength `sigma_circulant`.
pub fn step_factor(sigma_circulant: f64) -> f64 {
    (1.0 + 4.0 * sigma_circulant).powf(0.25)
}

pub fn resolve_sampler(entry: &SamplerEntry, defaults: &SamplerDefaults) -> ResolvedSampler {
    let sigma_c = entry.sigma * defaults.sigma_scale;
    let multiplier = entry.step_multiplier.unwrap_or(defaults.step_multiplier);
    let factor = if multiplier && entry.kind.is_smoothed() {
        step_factor(sigma_c)
    } else {
        1.0
    };
    let eta = entry.eta.unwrap_or(defaults.eta) * factor;
    let mut spec = SamplerSpec::new(
        entry.kind,
        eta,
        entry.batch_size.unwrap_or(defaults.batch_size),
        defaults.iterations,
        0,
    )
    .with_sigma(sigma_c)
    .with_burn_in(defaults.burn_in);
    if let Some(order) = entry.smoothing_order {
        spec.smoothing_order = order;
    }
    if let Some(a) = entry.precond_alpha {
        spec.precond_alpha = a;
    }
    if let Some(e) = entry.precond_eps {
        spec.precond_eps = e;
    }
    ResolvedSampler {
        label: entry.label(),
        sigma: entry.sigma,
        step_factor: factor,
        spec,
    }
}

/// A libsvm dataset on disk, or the synthetic substitute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetParams {
    /// Training file in libsvm format; synthetic data is generated when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    pub declared_dim: usize,
    /// Raw label value mapped to `+1`.
    pub positive_label: f64,
    pub synthetic_train: usize,
    pub synthetic_test: usize,
    pub synthetic_seed: u64,
}

impl Default for DatasetParams {
    fn default() -> Self {
        Self {
            train: None,
            test: None,
            declared_dim: 122,
            positive_label: 1.0,
            synthetic_train: 3000,
            synthetic_test: 1000,
            synthetic_seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Gauss2dParams {
    pub mean: [f64; 2],
    pub covariance: [[f64; 2]; 2],
    pub iterations: usize,
    pub burn_in: usize,
    pub base_eta: f64,
    pub decay: f64,
    pub grid_size: usize,
    /// Also run every smoothed sampler with the step multiplier.
    pub step_multiplier: bool,
    /// Leading samples exported per sampler at the base step size.
    pub export_samples: usize,
}

impl Default for Gauss2dParams {
    fn default() -> Self {
        Self {
            mean: [0.0, 0.0],
            covariance: [[1.0, 0.9], [0.9, 1.0]],
            iterations: 200_000,
            burn_in: 0,
            base_eta: 0.19,
            decay: 0.8,
            grid_size: 5,
            step_multiplier: true,
            export_samples: 600,
        }
    }
}

impl Gauss2dParams {
    pub fn eta_grid(&self) -> Vec<f64> {
        (0..self.grid_size)
            .map(|k| self.base_eta * self.decay.powi(k as i32))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixtureParams {
    pub n_centers: usize,
    pub center_seed: u64,
    pub iterations: Vec<usize>,
    pub batch_size: usize,
    pub eta: f64,
    pub mh_scale: f64,
    pub mh_iterations: usize,
    pub burn_in_fraction: f64,
    pub w2_points: usize,
    pub kde_nodes: usize,
    pub kde_extent: [f64; 4],
    /// Largest number of evenly strided samples fed to each density estimate.
    pub kde_points: usize,
    /// Stride of exported chain CSVs; 0 disables chain export.
    pub chain_export_stride: usize,
}

impl Default for MixtureParams {
    fn default() -> Self {
        Self {
            n_centers: 500,
            center_seed: 2020,
            iterations: vec![100_000, 500_000, 1_000_000],
            batch_size: 10,
            eta: 0.5,
            mh_scale: 0.5,
            mh_iterations: 100_000,
            burn_in_fraction: 0.1,
            w2_points: 2000,
            kde_nodes: 101,
            kde_extent: [-8.0, 8.0, -8.0, 8.0],
            kde_points: 20_000,
            chain_export_stride: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixingParams {
    pub mean: [f64; 2],
    pub variance: f64,
    pub eta: f64,
    pub iterations: usize,
    pub checkpoints: Vec<usize>,
    pub step_multiplier: bool,
}

impl Default for MixingParams {
    fn default() -> Self {
        Self {
            mean: [1.0, 2.0],
            variance: 4.5,
            eta: 0.1,
            iterations: 200_000,
            checkpoints: vec![1000, 2000, 5000, 10_000, 20_000, 50_000, 100_000, 200_000],
            step_multiplier: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlrParams {
    pub data: DatasetParams,
    pub iterations: usize,
    pub burn_in: usize,
    pub batch_size: usize,
    pub sgld_eta: f64,
    pub psgld_eta: f64,
    pub sigma: f64,
    pub step_multiplier: bool,
    pub trace_every: usize,
    /// Trailing window of the moving average; the cumulative post-burn-in mean when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub average_window: Option<usize>,
}

impl Default for BlrParams {
    fn default() -> Self {
        Self {
            data: DatasetParams::default(),
            iterations: 10_000,
            burn_in: 1000,
            batch_size: 5,
            sgld_eta: 1e-3,
            psgld_eta: 2e-3,
            sigma: 1.0,
            step_multiplier: true,
            trace_every: 100,
            average_window: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VarianceParams {
    pub data: DatasetParams,
    pub sigmas: Vec<f64>,
    pub batch_sizes: Vec<usize>,
    pub repeats: usize,
    pub path_eta: f64,
    pub path_iterations: usize,
    pub path_stride: usize,
}

impl Default for VarianceParams {
    fn default() -> Self {
        Self {
            data: DatasetParams::default(),
            sigmas: vec![0.0, 0.5, 1.0, 2.0],
            batch_sizes: vec![10, 15, 50],
            repeats: 100,
            path_eta: 1e-3,
            path_iterations: 1000,
            path_stride: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GammaParams {
    pub dims: Vec<usize>,
    pub sigmas: Vec<f64>,
}

impl Default for GammaParams {
    fn default() -> Self {
        Self {
            dims: vec![1000, 10_000, 100_000],
            sigmas: vec![1.0, 2.0, 3.0, 4.0, 5.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsParams {
    pub k: usize,
    pub eta: f64,
    pub beta: f64,
    pub d: usize,
    pub omega: f64,
    pub batch_size: usize,
    pub lambda_sobolev: f64,
    pub f0_beta_log_lambda: f64,
    pub b_dissip: f64,
    pub m_smooth: f64,
    pub sigmas: Vec<f64>,
}

impl Default for BoundsParams {
    fn default() -> Self {
        Self {
            k: 1000,
            eta: 1e-3,
            beta: 1.0,
            d: 1000,
            omega: 1.0,
            batch_size: 10,
            lambda_sobolev: 1.0,
            f0_beta_log_lambda: 1.0,
            b_dissip: 4.0,
            m_smooth: 1.0,
            sigmas: vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0],
        }
    }
}

/// A complete experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samplers: Vec<SamplerEntry>,
    #[serde(default)]
    pub gauss2d: Gauss2dParams,
    #[serde(default)]
    pub mixture: MixtureParams,
    #[serde(default)]
    pub mixing: MixingParams,
    #[serde(default)]
    pub blr: BlrParams,
    #[serde(default)]
    pub variance_table: VarianceParams,
    #[serde(default)]
    pub gamma_table: GammaParams,
    #[serde(default)]
    pub bounds_sweep: BoundsParams,
}

impl ExperimentConfig {
    /// A config with every parameter at its default.
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            output_dir: None,
            seeds: None,
            samplers: Vec::new(),
            gauss2d: Gauss2dParams::default(),
            mixture: MixtureParams::default(),
            mixing: MixingParams::default(),
            blr: BlrParams::default(),
            variance_table: VarianceParams::default(),
            gamma_table: GammaParams::default(),
            bounds_sweep: BoundsParams::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: impl AsRef<Path>) -> anyhow::Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| anyhow::anyhow!("cannot parse config {}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    /// Configured seeds, or the experiment's default set.
    pub fn seeds(&self) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| match self.experiment {
            ExperimentKind::Mixing => (1..=10).collect(),
            ExperimentKind::Mixture => (1..=5).collect(),
            _ => vec![1],
        })
    }

    /// Configured samplers, or the experiment's default rows.
    pub fn samplers(&self) -> Vec<SamplerEntry> {
        if !self.samplers.is_empty() {
            return self.samplers.clone();
        }
        use SamplerKind::*;
        match self.experiment {
            ExperimentKind::Gauss2d => vec![
                SamplerEntry::new(Sgld),
                SamplerEntry::new(LsSgld).sigma(0.1),
                SamplerEntry::new(Psgld),
                SamplerEntry::new(LsPsgld).sigma(0.1),
            ],
            ExperimentKind::Mixture => vec![
                SamplerEntry::new(Sgld),
                SamplerEntry::new(Psgld),
                SamplerEntry::new(LsSgld).sigma(1.0),
            ],
            ExperimentKind::Mixing => vec![
                SamplerEntry::new(LdReference),
                SamplerEntry::new(LsLdReference).sigma(1.0),
            ],
            ExperimentKind::Blr => {
                let p = &self.blr;
                vec![
                    SamplerEntry::new(Sgld).eta(p.sgld_eta),
                    SamplerEntry::new(Psgld).eta(p.psgld_eta),
                    SamplerEntry::new(LsSgld).sigma(p.sigma).eta(p.sgld_eta),
                    SamplerEntry::new(LsPsgld).sigma(p.sigma).eta(p.psgld_eta),
                ]
            }
            _ => Vec::new(),
        }
    }

    /// Fallback values for sampler entries, given `n` components.
    pub fn sampler_defaults(&self) -> SamplerDefaults {
        let sigma_scale = if self.experiment.is_planar() { 0.5 } else { 1.0 };
        match self.experiment {
            ExperimentKind::Gauss2d => SamplerDefaults {
                eta: self.gauss2d.base_eta,
                batch_size: 1,
                iterations: self.gauss2d.iterations,
                burn_in: self.gauss2d.burn_in,
                step_multiplier: false,
                sigma_scale,
            },
            ExperimentKind::Mixture => {
                let iterations = self.mixture.iterations.iter().copied().max().unwrap_or(1);
                SamplerDefaults {
                    eta: self.mixture.eta,
                    batch_size: self.mixture.batch_size,
                    iterations,
                    burn_in: burn_in_for(iterations, self.mixture.burn_in_fraction),
                    step_multiplier: false,
                    sigma_scale,
                }
            }
            ExperimentKind::Mixing => SamplerDefaults {
                eta: self.mixing.eta,
                batch_size: 1,
                iterations: self.mixing.iterations,
                burn_in: 0,
                step_multiplier: self.mixing.step_multiplier,
                sigma_scale,
            },
            _ => SamplerDefaults {
                eta: self.blr.sgld_eta,
                batch_size: self.blr.batch_size,
                iterations: self.blr.iterations,
                burn_in: self.blr.burn_in,
                step_multiplier: self.blr.step_multiplier,
                sigma_scale,
            },
        }
    }

    pub fn resolved_samplers(&self) -> Vec<ResolvedSampler> {
        let defaults = self.sampler_defaults();
        self.samplers().iter().map(|e| resolve_sampler(e, &defaults)).collect()
    }
}

/// Post-burn-in length for a run of `iterations` steps.
pub fn burn_in_for(iterations: usize, fraction: f64) -> usize {
    ((iterations as f64 * fraction).floor() as usize).min(iterations.saturating_sub(1))
}

/// One offending field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

/// Every problem found in a config.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration ({} problem(s)):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  {}: {}", e.field, e.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

struct Checker(Vec<FieldError>);

impl Checker {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError {
            field: field.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, field: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.push(field, format!("must be positive and finite, found {v}"));
        }
    }

    fn nonnegative(&mut self, field: &str, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.push(field, format!("must be nonnegative and finite, found {v}"));
        }
    }

    fn at_least(&mut self, field: &str, v: usize, min: usize) {
        if v < min {
            self.push(field, format!("must be at least {min}, found {v}"));
        }
    }

    fn nonempty<T>(&mut self, field: &str, v: &[T]) {
        if v.is_empty() {
            self.push(field, "must not be empty");
        }
    }

    fn dataset(&mut self, prefix: &str, p: &DatasetParams) {
        for (name, path) in [("train", &p.train), ("test", &p.test)] {
            if let Some(path) = path {
                if !path.is_file() {
                    self.push(
                        format!("{prefix}.data.{name}"),
                        format!("file {} does not exist", path.display()),
                    );
                }
            }
        }
        if p.test.is_some() && p.train.is_none() {
            self.push(format!("{prefix}.data.test"), "requires data.train");
        }
        if p.train.is_none() {
            self.at_least(&format!("{prefix}.data.synthetic_train"), p.synthetic_train, 1);
            self.at_least(&format!("{prefix}.data.declared_dim"), p.declared_dim, 14);
        }
    }
}

/// Number of components `n` of the experiment's target, when it can be
/// known without loading large data. Dataset-backed targets are loaded.
fn component_count(cfg: &ExperimentConfig) -> Option<usize> {
    match cfg.experiment {
        ExperimentKind::Gauss2d | ExperimentKind::Mixing => Some(1),
        ExperimentKind::Mixture => Some(cfg.mixture.n_centers),
        ExperimentKind::Blr => crate::experiments::load_data(&cfg.blr.data)
            .ok()
            .map(|(train, _)| train.len()),
        _ => None,
    }
}

/// Checks every field and cross-field invariant, collecting all problems.
pub fn validate_config(cfg: &ExperimentConfig) -> Result<(), ConfigErrors> {
    let mut c = Checker(Vec::new());
    if let Some(seeds) = &cfg.seeds {
        c.nonempty("seeds", seeds);
    }

    match cfg.experiment {
        ExperimentKind::Gauss2d => {
            let p = &cfg.gauss2d;
            c.at_least("gauss2d.iterations", p.iterations, 1);
            c.positive("gauss2d.base_eta", p.base_eta);
            c.positive("gauss2d.decay", p.decay);
            c.at_least("gauss2d.grid_size", p.grid_size, 1);
            if p.burn_in >= p.iterations {
                c.push("gauss2d.burn_in", "must be below gauss2d.iterations");
            }
            let cov: Vec<Vec<f64>> = p.covariance.iter().map(|r| r.to_vec()).collect();
            if lssgld::GaussianTarget::new(p.mean.to_vec(), cov).is_err() {
                c.push("gauss2d.covariance", "must be symmetric positive definite");
            }
        }
        ExperimentKind::Mixture => {
            let p = &cfg.mixture;
            c.at_least("mixture.n_centers", p.n_centers, 1);
            c.nonempty("mixture.iterations", &p.iterations);
            if p.iterations.iter().any(|&k| k < 2) {
                c.push("mixture.iterations", "every entry must be at least 2");
            }
            c.positive("mixture.eta", p.eta);
            c.positive("mixture.mh_scale", p.mh_scale);
            c.at_least("mixture.mh_iterations", p.mh_iterations, 2);
            if !(0.0..1.0).contains(&p.burn_in_fraction) {
                c.push("mixture.burn_in_fraction", "must lie in [0, 1)");
            }
            c.at_least("mixture.w2_points", p.w2_points, 1);
            c.at_least("mixture.kde_nodes", p.kde_nodes, 2);
            c.at_least("mixture.kde_points", p.kde_points, 2);
            let [x0, x1, y0, y1] = p.kde_extent;
            if !(x1 > x0 && y1 > y0) {
                c.push(
                    "mixture.kde_extent",
                    "must be [x_min, x_max, y_min, y_max] with increasing bounds",
                );
            }
        }
        ExperimentKind::Mixing => {
            let p = &cfg.mixing;
            c.positive("mixing.variance", p.variance);
            c.positive("mixing.eta", p.eta);
            c.at_least("mixing.iterations", p.iterations, 1);
            c.nonempty("mixing.checkpoints", &p.checkpoints);
            if p.checkpoints.iter().any(|&k| k == 0 || k > p.iterations) {
                c.push("mixing.checkpoints", "entries must lie in [1, mixing.iterations]");
            }
        }
        ExperimentKind::Blr => {
            let p = &cfg.blr;
            c.dataset("blr", &p.data);
            c.at_least("blr.iterations", p.iterations, 1);
            if p.burn_in >= p.iterations {
                c.push("blr.burn_in", "must be below blr.iterations");
            }
            c.positive("blr.sgld_eta", p.sgld_eta);
            c.positive("blr.psgld_eta", p.psgld_eta);
            c.nonnegative("blr.sigma", p.sigma);
            c.at_least("blr.trace_every", p.trace_every, 1);
            if let Some(w) = p.average_window {
                c.at_least("blr.average_window", w, 1);
            }
        }
        ExperimentKind::VarianceTable => {
            let p = &cfg.variance_table;
            c.dataset("variance_table", &p.data);
            c.nonempty("variance_table.sigmas", &p.sigmas);
            for s in &p.sigmas {
                c.nonnegative("variance_table.sigmas", *s);
            }
            c.nonempty("variance_table.batch_sizes", &p.batch_sizes);
            c.at_least("variance_table.repeats", p.repeats, 2);
            c.positive("variance_table.path_eta", p.path_eta);
            c.at_least("variance_table.path_iterations", p.path_iterations, 1);
            c.at_least("variance_table.path_stride", p.path_stride, 1);
            if p.path_stride > p.path_iterations {
                c.push(
                    "variance_table.path_stride",
                    "must not exceed variance_table.path_iterations",
                );
            }
            if let Ok((train, _)) = crate::experiments::load_data(&p.data) {
                for &b in &p.batch_sizes {
                    if b == 0 || b > train.len() {
                        c.push(
                            "variance_table.batch_sizes",
                            format!(
                                "batch size {b} must lie in [1, n] with n = {} dataset rows",
                                train.len()
                            ),
                        );
                    }
                }
            }
        }
        ExperimentKind::GammaTable => {
            let p = &cfg.gamma_table;
            c.nonempty("gamma_table.dims", &p.dims);
            if p.dims.contains(&0) {
                c.push("gamma_table.dims", "entries must be at least 1");
            }
            c.nonempty("gamma_table.sigmas", &p.sigmas);
            for s in &p.sigmas {
                c.nonnegative("gamma_table.sigmas", *s);
            }
        }
        ExperimentKind::BoundsSweep => {
            let p = &cfg.bounds_sweep;
            c.nonempty("bounds_sweep.sigmas", &p.sigmas);
            for s in &p.sigmas {
                c.nonnegative("bounds_sweep.sigmas", *s);
            }
            let inputs = crate::experiments::bounds_sweep::base_inputs(p);
            if let Err(e) = inputs.validate() {
                c.push("bounds_sweep", e.to_string());
            }
        }
    }

    if cfg.experiment.uses_samplers() {
        let n = component_count(cfg);
        let dim = match cfg.experiment {
            ExperimentKind::Blr => None,
            _ => Some(2),
        };
        let entries = cfg.samplers();
        for (i, r) in cfg.resolved_samplers().iter().enumerate() {
            for issue in r.spec.issues(n, dim) {
                let field = match issue.field {
                    "iterations" | "burn_in" => format!("{}.{}", cfg.experiment, issue.field),
                    f => format!("samplers[{i}].{f}"),
                };
                let message = if issue.field == "batch_size" && n.is_some_and(|n| r.spec.batch_size > n) {
                    format!("{} ({})", issue.message, component_field(cfg.experiment))
                } else if issue.field == "sigma" && r.spec.sigma != entries[i].sigma {
                    // Report the configured value, not the internally rescaled one.
                    issue.message.replacen(
                        &format!("sigma = {}", r.spec.sigma),
                        &format!("sigma = {}", entries[i].sigma),
                        1,
                    )
                } else {
                    issue.message
                };
                c.push(field, message);
            }
            if r.spec.kind == SamplerKind::MhReference && cfg.experiment == ExperimentKind::Blr {
                c.push(
                    format!("samplers[{i}].kind"),
                    "mh_reference is not supported by the blr experiment",
                );
            }
        }
    } else if !cfg.samplers.is_empty() {
        c.push("samplers", format!("not used by the {} experiment", cfg.experiment));
    }

    if c.0.is_empty() {
        Ok(())
    } else {
        Err(ConfigErrors(c.0))
    }
}

/// The config field that determines `n` for an experiment.
fn component_field(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Mixture => "n from mixture.n_centers",
        ExperimentKind::Blr => "n from the blr.data rows",
        _ => "n = 1 for a single Gaussian",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        for kind in [
            ExperimentKind::Gauss2d,
            ExperimentKind::Mixture,
            ExperimentKind::Mixing,
            ExperimentKind::Blr,
            ExperimentKind::VarianceTable,
            ExperimentKind::GammaTable,
            ExperimentKind::BoundsSweep,
        ] {
            let cfg = ExperimentConfig::new(kind);
            let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn minimal_document_parses() {
        let cfg = ExperimentConfig::from_toml("experiment = \"gamma_table\"").unwrap();
        assert_eq!(cfg.gamma_table, GammaParams::default());
        assert!(ExperimentConfig::from_toml("experiment = \"gamma_table\"\nbogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"nope\"").is_err());
    }

    #[test]
    fn planar_sigma_is_halved_and_multiplied() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Gauss2d);
        cfg.samplers = vec![SamplerEntry::new(SamplerKind::LsSgld).sigma(0.1).step_multiplier(true)];
        let r = &cfg.resolved_samplers()[0];
        assert!((r.spec.sigma - 0.05).abs() < 1e-15);
        assert!((r.spec.eta - 0.19 * 1.2f64.powf(0.25)).abs() < 1e-12);
        assert!((r.spec.eta - 0.1989).abs() < 5e-5);
    }

    #[test]
    fn multiplier_ignored_for_plain_kinds() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Mixing);
        cfg.samplers = vec![SamplerEntry::new(SamplerKind::LdReference)];
        assert_eq!(cfg.resolved_samplers()[0].step_factor, 1.0);
    }

    #[test]
    fn burn_in_fraction() {
        assert_eq!(burn_in_for(100_000, 0.1), 10_000);
        assert_eq!(burn_in_for(1, 0.5), 0);
    }
}
