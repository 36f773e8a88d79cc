use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::norm_sq;
use crate::rng::stream;

use super::{check_index, TargetModel};

/// Guard on `‖x‖` in the prior terms; both are singular at the origin where chains start.
pub const DEFAULT_EPSILON_NORM: f64 = 1e-8;

/// Sparse binary-classification data: rows in CSR form, labels in `{−1, +1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledData {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    labels: Vec<f64>,
}

impl LabeledData {
    /// Builds from per-row `(column, value)` lists with 0-based columns.
    pub fn new(dim: usize, rows: Vec<Vec<(usize, f64)>>, labels: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        check_dim(rows.len(), labels.len())?;
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(invalid("labels", format!("must be ±1, found {bad}")));
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if c >= dim {
                    return Err(Error::IndexOutOfRange { index: c, n: dim });
                }
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            dim,
            row_ptr,
            cols,
            vals,
            labels,
        })
    }

    /// An a3a-shaped synthetic dataset: `n` rows of `d` binary features grouped
    /// into 14 one-hot blocks, labels drawn from a logistic model with a hidden
    /// weight vector.
    pub fn synthetic_logistic(n: usize, dim: usize, seed: u64) -> Result<Self> {
        const GROUPS: usize = 14;
        if dim < GROUPS {
            return Err(invalid(
                "dim",
                format!("synthetic data needs at least {GROUPS} features"),
            ));
        }
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut rng = stream(seed, 0);
        let bounds: Vec<usize> = (0..=GROUPS).map(|g| g * dim / GROUPS).collect();
        // Skewed category frequencies within each block.
        let weights: Vec<f64> = (0..dim).map(|_| rng.random::<f64>().powi(3) + 0.02).collect();
        let truth: Vec<f64> = (0..dim).map(|_| 0.9 * rng.sample::<f64, _>(StandardNormal)).collect();

        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row = Vec::with_capacity(GROUPS);
            let mut margin = -0.8;
            for g in 0..GROUPS {
                let block = bounds[g]..bounds[g + 1];
                let total: f64 = weights[block.clone()].iter().sum();
                let mut u = rng.random::<f64>() * total;
                let mut pick = block.end - 1;
                for c in block {
                    u -= weights[c];
                    if u <= 0.0 {
                        pick = c;
                        break;
                    }
                }
                row.push((pick, 1.0));
                margin += truth[pick];
            }
            let p = 1.0 / (1.0 + (-margin).exp());
            labels.push(if rng.random::<f64>() < p { 1.0 } else { -1.0 });
            rows.push(row);
        }
        Self::new(dim, rows, labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rows `0..at` and `at..n` as two datasets.
    pub fn split_at(&self, at: usize) -> Result<(Self, Self)> {
        let rows = |range: std::ops::Range<usize>| -> Vec<Vec<(usize, f64)>> {
            range.map(|i| self.row(i).collect()).collect()
        };
        let at = at.min(self.len());
        let head = Self::new(self.dim, rows(0..at), self.labels[..at].to_vec())?;
        let tail = Self::new(self.dim, rows(at..self.len()), self.labels[at..].to_vec())?;
        Ok((head, tail))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Nonzero `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// `⟨d_i, x⟩`.
    pub fn dot_row(&self, i: usize, x: &[f64]) -> f64 {
        self.row(i).map(|(c, v)| v * x[c]).sum()
    }

    /// Row `i` as a dense vector.
    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (c, v) in self.row(i) {
            out[c] = v;
        }
        out
    }
}

/// Gamma-type prior `p(x) ∝ ‖x‖^{−λ} exp(−θ‖x‖)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaPrior {
    pub lambda: f64,
    pub theta: f64,
}

impl Default for GammaPrior {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            theta: 1e-2,
        }
    }
}

/// Bayesian logistic regression with components
///
/// ```text
/// f_i(x) = n log(1 + exp(−y_i⟨d_i, x⟩)) + λ log‖x‖ + θ‖x‖
/// ```
///
/// so the mini-batch mean of `∇f_i` is unbiased for the gradient of the full
/// negative log-posterior.
#[derive(Clone, Debug)]
pub struct BlrTarget {
    data: LabeledData,
    prior: GammaPrior,
    epsilon_norm: f64,
}

/// `log(1 + eᵗ)`.
pub(crate) fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// `1 / (1 + eᵗ)`, the logistic function at `−t`.
pub(crate) fn logistic_neg(t: f64) -> f64 {
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl BlrTarget {
    pub fn new(data: LabeledData, prior: GammaPrior) -> Self {
        Self {
            data,
            prior,
            epsilon_norm: DEFAULT_EPSILON_NORM,
        }
    }

    pub fn with_epsilon_norm(mut self, eps: f64) -> Self {
        self.epsilon_norm = eps;
        self
    }

    pub fn data(&self) -> &LabeledData {
        &self.data
    }

    pub fn prior(&self) -> GammaPrior {
        self.prior
    }

    pub fn epsilon_norm(&self) -> f64 {
        self.epsilon_norm
    }

    /// `f_i(x)`.
    pub fn component_f(&self, i: usize, x: &[f64]) -> Result<f64> {
        check_index(i, self.data.len())?;
        check_dim(self.data.dim, x.len())?;
        let n = self.data.len() as f64;
        let m = self.data.labels[i] * self.data.dot_row(i, x);
        Ok(n * softplus(-m) + self.prior_value(x))
    }

    fn prior_value(&self, x: &[f64]) -> f64 {
        let r = norm_sq(x).sqrt();
        self.prior.lambda * r.max(self.epsilon_norm).ln() + self.prior.theta * r
    }

    fn add_prior_grad(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        let r2 = norm_sq(x);
        let r = r2.sqrt();
        let eps = self.epsilon_norm;
        let coef = self.prior.lambda / r2.max(eps * eps) + self.prior.theta / r.max(eps);
        for (o, xi) in out.iter_mut().zip(x) {
            *o += scale * coef * xi;
        }
    }

    fn add_likelihood_grad(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        let n = self.data.len() as f64;
        let y = self.data.labels[i];
        let m = y * self.data.dot_row(i, x);
        let coef = -n * y * logistic_neg(m) * scale;
        for (c, v) in self.data.row(i) {
            out[c] += coef * v;
        }
    }
}

impl TargetModel for BlrTarget {
    fn dim(&self) -> usize {
        self.data.dim
    }

    fn num_components(&self) -> usize {
        self.data.len()
    }

    fn accumulate_component_grad(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) -> Result<()> {
        check_index(i, self.data.len())?;
        check_dim(self.data.dim, x.len())?;
        self.add_likelihood_grad(i, x, scale, out);
        self.add_prior_grad(x, scale, out);
        Ok(())
    }

    fn full_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.data.dim, x.len())?;
        let n = self.data.len();
        let mut out = vec![0.0; self.data.dim];
        let scale = (n as f64).recip();
        for i in 0..n {
            self.add_likelihood_grad(i, x, scale, &mut out);
        }
        self.add_prior_grad(x, 1.0, &mut out);
        Ok(out)
    }

    fn log_density_unnormalized(&self, x: &[f64]) -> Option<f64> {
        if x.len() != self.data.dim {
            return None;
        }
        let nll: f64 = (0..self.data.len())
            .map(|i| softplus(-self.data.labels[i] * self.data.dot_row(i, x)))
            .sum();
        Some(-(nll + self.prior_value(x)))
    }
}
