use crate::error::{check_dim, invalid, Result};
use crate::linalg::{dot, matvec, spd_inverse};

use super::{check_index, TargetModel};

/// Multivariate normal target `f(x) = ½ (x−μ)ᵀ Σ⁻¹ (x−μ)` split into `n`
/// identical components.
#[derive(Clone, Debug)]
pub struct GaussianTarget {
    mean: Vec<f64>,
    covariance: Vec<f64>,
    precision: Vec<f64>,
    components: usize,
}

impl GaussianTarget {
    /// Builds the target from its mean and a symmetric positive-definite covariance.
    pub fn new(mean: Vec<f64>, covariance: Vec<Vec<f64>>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(crate::Error::InvalidDimension(0));
        }
        check_dim(d, covariance.len())?;
        for row in &covariance {
            check_dim(d, row.len())?;
        }
        for i in 0..d {
            for j in 0..i {
                if (covariance[i][j] - covariance[j][i]).abs() > 1e-12 {
                    return Err(invalid("covariance", "must be symmetric"));
                }
            }
        }
        let covariance: Vec<f64> = covariance.into_iter().flatten().collect();
        let precision =
            spd_inverse(&covariance, d).ok_or_else(|| invalid("covariance", "must be positive definite"))?;
        Ok(Self {
            mean,
            covariance,
            precision,
            components: 1,
        })
    }

    /// Sets the number of (identical) components reported to samplers.
    pub fn with_components(mut self, n: usize) -> Self {
        self.components = n.max(1);
        self
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Covariance as nested rows.
    pub fn covariance(&self) -> Vec<Vec<f64>> {
        self.covariance
            .chunks_exact(self.mean.len())
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn precision(&self) -> Vec<Vec<f64>> {
        self.precision
            .chunks_exact(self.mean.len())
            .map(<[f64]>::to_vec)
            .collect()
    }

    fn centered(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).map(|(a, m)| a - m).collect()
    }
}

impl TargetModel for GaussianTarget {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn num_components(&self) -> usize {
        self.components
    }

    fn accumulate_component_grad(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) -> Result<()> {
        check_index(i, self.components)?;
        check_dim(self.dim(), x.len())?;
        let g = matvec(&self.precision, self.dim(), &self.centered(x));
        for (o, gi) in out.iter_mut().zip(g) {
            *o += scale * gi;
        }
        Ok(())
    }

    fn full_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(matvec(&self.precision, self.dim(), &self.centered(x)))
    }

    fn log_density_unnormalized(&self, x: &[f64]) -> Option<f64> {
        if x.len() != self.dim() {
            return None;
        }
        let c = self.centered(x);
        Some(-0.5 * dot(&c, &matvec(&self.precision, self.dim(), &c)))
    }
}
