use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Result};

use super::{check_index, TargetModel};

/// Two-dimensional target whose components are the asymmetric Gaussian pairs
///
/// ```text
/// exp(−f_i(x)) = ⅔ exp(−‖x − a_i‖²/2) + ⅓ exp(−‖x + a_i‖²/2)
/// f_i(x)       = ‖x − a_i‖²/2 − log(⅔ + ⅓ exp(−2⟨a_i, x⟩))
/// ∇f_i(x)      = x − a_i + 2a_i / (1 + 2 exp(2⟨a_i, x⟩))
/// ```
///
/// Each `f_i` is dissipative with `m = ½`, `b = ‖a_i‖²/2`.
#[derive(Clone, Debug)]
pub struct MixturePairTarget {
    centers: Vec<[f64; 2]>,
}

impl MixturePairTarget {
    pub fn new(centers: Vec<[f64; 2]>) -> Self {
        Self { centers }
    }

    pub fn centers(&self) -> &[[f64; 2]] {
        &self.centers
    }

    /// `f_i(x)`, finite for any finite `x`.
    pub fn component_logf(&self, i: usize, x: &[f64]) -> Result<f64> {
        check_index(i, self.centers.len())?;
        check_dim(2, x.len())?;
        let a = self.centers[i];
        let dx = x[0] - a[0];
        let dy = x[1] - a[1];
        let u = -2.0 * (a[0] * x[0] + a[1] * x[1]);
        // log(⅔ + ⅓eᵘ), factoring out the larger exponential.
        let mix = if u <= 0.0 {
            (2.0f64 / 3.0).ln() + (0.5 * u.exp()).ln_1p()
        } else {
            u + (1.0f64 / 3.0).ln() + (2.0 * (-u).exp()).ln_1p()
        };
        Ok(0.5 * (dx * dx + dy * dy) - mix)
    }

    /// The dissipativity offset `b_i = ‖a_i‖²/2`.
    pub fn dissipativity_offset(&self, i: usize) -> Result<f64> {
        check_index(i, self.centers.len())?;
        let a = self.centers[i];
        Ok(0.5 * (a[0] * a[0] + a[1] * a[1]))
    }
}

/// `2 / (1 + 2e^{2z})` without overflow.
fn pull_coefficient(z: f64) -> f64 {
    if z > 0.0 {
        let e = (-2.0 * z).exp();
        2.0 * e / (e + 2.0)
    } else {
        2.0 / (1.0 + 2.0 * (2.0 * z).exp())
    }
}

impl TargetModel for MixturePairTarget {
    fn dim(&self) -> usize {
        2
    }

    fn num_components(&self) -> usize {
        self.centers.len()
    }

    fn accumulate_component_grad(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) -> Result<()> {
        check_index(i, self.centers.len())?;
        check_dim(2, x.len())?;
        let a = self.centers[i];
        let c = pull_coefficient(a[0] * x[0] + a[1] * x[1]);
        out[0] += scale * (x[0] - a[0] + c * a[0]);
        out[1] += scale * (x[1] - a[1] + c * a[1]);
        Ok(())
    }

    fn log_density_unnormalized(&self, x: &[f64]) -> Option<f64> {
        let n = self.centers.len();
        let mut total = 0.0;
        for i in 0..n {
            total += self.component_logf(i, x).ok()?;
        }
        Some(-total / n as f64)
    }
}

/// Draws `n` centers from `N((2, 2), 2I)`.
pub fn sample_mixture_centers<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<[f64; 2]> {
    let sd = 2f64.sqrt();
    (0..n)
        .map(|_| {
            let u: f64 = rng.sample(StandardNormal);
            let v: f64 = rng.sample(StandardNormal);
            [2.0 + sd * u, 2.0 + sd * v]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target() -> MixturePairTarget {
        MixturePairTarget::new(vec![[1.5, 2.5], [3.0, -0.5], [0.2, 0.1]])
    }

    #[test]
    fn gradient_at_origin() {
        let t = target();
        for i in 0..3 {
            let a = t.centers()[i];
            let g = t.component_grad(i, &[0.0, 0.0]).unwrap();
            assert!((g[0] + a[0] / 3.0).abs() < 1e-15);
            assert!((g[1] + a[1] / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_saturates_toward_near_center() {
        let t = target();
        let x = [300.0, 500.0];
        let g = t.component_grad(0, &x).unwrap();
        assert_eq!(g, vec![x[0] - 1.5, x[1] - 2.5]);
        let x = [-300.0, -500.0];
        let g = t.component_grad(0, &x).unwrap();
        assert!((g[0] - (x[0] + 1.5)).abs() < 1e-9);
    }

    #[test]
    fn logf_at_origin() {
        let t = target();
        for i in 0..3 {
            let b = t.dissipativity_offset(i).unwrap();
            assert!((t.component_logf(i, &[0.0, 0.0]).unwrap() - b).abs() < 1e-14);
        }
    }

    #[test]
    fn logf_is_finite_at_extreme_inner_products() {
        let t = MixturePairTarget::new(vec![[1.0, 0.0]]);
        for z in [500.0, -500.0] {
            let v = t.component_logf(0, &[z, 0.0]).unwrap();
            assert!(v.is_finite());
            let g = t.component_grad(0, &[z, 0.0]).unwrap();
            assert!(g.iter().all(|v| v.is_finite()));
        }
        // For ⟨a,x⟩ = −500 the mixture term is ≈ 1000 + log ⅓.
        let v = t.component_logf(0, &[-500.0, 0.0]).unwrap();
        let expected = 0.5 * 501.0f64.powi(2) - (1000.0 + (1.0f64 / 3.0).ln());
        assert!((v - expected).abs() < 1e-9 * expected.abs());
    }

    #[test]
    fn out_of_range_index() {
        let t = target();
        assert!(t.component_grad(3, &[0.0, 0.0]).is_err());
        assert!(t.component_logf(3, &[0.0, 0.0]).is_err());
    }
}
