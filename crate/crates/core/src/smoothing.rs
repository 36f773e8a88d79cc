//! The Laplacian smoothing operator `A_σ = I − σL`.
//!
//! `L` is the one-dimensional periodic discrete Laplacian, so `A_σ` is the
//! symmetric circulant matrix with first row `(1+2σ, −σ, 0, …, 0, −σ)`. For
//! `d = 2` both off-diagonal stencil entries land on the same cell, giving
//! `[1+2σ, −2σ]`; for `d = 1` the Laplacian vanishes and `A_σ = I`.
//!
//! Being circulant, `A_σ` is diagonalized by the DFT with real eigenvalues
//!
//! ```text
//! λ_j = 1 + 2σ − 2σ cos(2πj/d) = 1 + 4σ sin²(πj/d),   j = 0..d−1
//! ```
//!
//! so `A_σ⁻¹v` and `A_σ^{-1/2}v` cost one forward and one inverse FFT each.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_dim, invalid, Error, Result};

/// Relative bound on the imaginary part left after an inverse transform.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-10;

/// Largest dimension [`LaplacianOperator::dense_materialize`] will allocate.
pub const DENSE_LIMIT: usize = 4096;

/// `A_σ` together with its cached spectrum and FFT plans.
///
/// Immutable once built; clones share the FFT plans and the operator can be
/// used from many threads at once. Every apply allocates its own scratch.
#[derive(Clone)]
pub struct LaplacianOperator {
    dim: usize,
    sigma: f64,
    spectrum: Vec<f64>,
    inv_spectrum: Vec<f64>,
    inv_sqrt_spectrum: Vec<f64>,
    plans: Option<Plans>,
}

#[derive(Clone)]
struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for LaplacianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaplacianOperator")
            .field("dim", &self.dim)
            .field("sigma", &self.sigma)
            .field("spectral_norm", &self.spectral_norm())
            .finish()
    }
}

impl LaplacianOperator {
    /// Builds `A_σ` for dimension `dim` and smoothing strength `sigma ≥ 0`.
    pub fn build(dim: usize, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(invalid("sigma", format!("must be finite and nonnegative, got {sigma}")));
        }

        // Evaluate the lower half and mirror it so λ_j = λ_{d−j} holds bit-for-bit.
        let mut spectrum = vec![1.0; dim];
        for j in 1..=dim / 2 {
            let s = (PI * j as f64 / dim as f64).sin();
            let lambda = 1.0 + 4.0 * sigma * s * s;
            spectrum[j] = lambda;
            spectrum[dim - j] = lambda;
        }
        let inv_spectrum = spectrum.iter().map(|l| l.recip()).collect();
        let inv_sqrt_spectrum = spectrum.iter().map(|l| l.sqrt().recip()).collect();

        let plans = if sigma == 0.0 || dim == 1 {
            None
        } else {
            let mut planner = FftPlanner::new();
            Some(Plans {
                forward: planner.plan_fft_forward(dim),
                inverse: planner.plan_fft_inverse(dim),
            })
        };

        Ok(Self {
            dim,
            sigma,
            spectrum,
            inv_spectrum,
            inv_sqrt_spectrum,
            plans,
        })
    }

    /// The identity operator of dimension `dim`.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::build(dim, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// True when `A_σ = I` (σ = 0 or d = 1). Applies then return their input unchanged.
    pub fn is_identity(&self) -> bool {
        self.plans.is_none()
    }

    /// Eigenvalues `λ_0, …, λ_{d−1}` in DFT order.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Solves `A_σ u = v`.
    pub fn apply_inverse(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = v.to_vec();
        self.apply_inverse_in_place(&mut out)?;
        Ok(out)
    }

    /// Overwrites `v` with `A_σ⁻¹ v`.
    pub fn apply_inverse_in_place(&self, v: &mut [f64]) -> Result<()> {
        self.apply_spectral(v, &self.inv_spectrum)
    }

    /// Computes `A_σ^{-1/2} v`, the symmetric circulant square root of `A_σ⁻¹`.
    pub fn apply_inverse_sqrt(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = v.to_vec();
        self.apply_inverse_sqrt_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_inverse_sqrt_in_place(&self, v: &mut [f64]) -> Result<()> {
        self.apply_spectral(v, &self.inv_sqrt_spectrum)
    }

    /// Applies `A_σ` itself through the same spectral path.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = v.to_vec();
        self.apply_spectral(&mut out, &self.spectrum)?;
        Ok(out)
    }

    fn apply_spectral(&self, v: &mut [f64], multipliers: &[f64]) -> Result<()> {
        check_dim(self.dim, v.len())?;
        let Some(plans) = &self.plans else {
            return Ok(());
        };

        let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let scratch_len = plans
            .forward
            .get_inplace_scratch_len()
            .max(plans.inverse.get_inplace_scratch_len());
        let mut scratch = vec![Complex::new(0.0, 0.0); scratch_len];

        plans.forward.process_with_scratch(&mut buf, &mut scratch);
        for (c, &m) in buf.iter_mut().zip(multipliers) {
            *c *= m;
        }
        plans.inverse.process_with_scratch(&mut buf, &mut scratch);

        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = (self.dim as f64).recip();
        let residue = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max) * scale;
        let bound = IMAGINARY_RESIDUE_TOLERANCE * norm;
        if residue > bound {
            return Err(Error::ImaginaryResidue { residue, bound });
        }
        for (x, c) in v.iter_mut().zip(&buf) {
            *x = c.re * scale;
        }
        Ok(())
    }

    /// `γ₂ = d⁻¹ Σ_j λ_j⁻¹`, the spectral average that scales the integrator
    /// error in the convergence bounds. Lies in `(0, 1]`.
    pub fn gamma2(&self) -> f64 {
        self.trace_inverse() / self.dim as f64
    }

    /// `d⁻¹ Σ_j λ_j⁻²`, the second spectral moment of `A_σ⁻¹`. Tends to
    /// `(1+2σ)/(1+4σ)^{3/2}` for large `d`, while [`gamma2`](Self::gamma2)
    /// tends to `(1+4σ)^{-1/2}`.
    pub fn inverse_square_mean(&self) -> f64 {
        self.trace_inverse_squared() / self.dim as f64
    }

    /// `tr A_σ⁻¹ = Σ_j λ_j⁻¹ = E‖A_σ^{-1/2} ε‖²` for standard normal `ε`.
    pub fn trace_inverse(&self) -> f64 {
        self.inv_spectrum.iter().sum()
    }

    /// `tr A_σ⁻² = Σ_j λ_j⁻² = E‖A_σ⁻¹ ε‖²` for standard normal `ε`.
    pub fn trace_inverse_squared(&self) -> f64 {
        self.inv_spectrum.iter().map(|x| x * x).sum()
    }

    /// `‖A_σ‖₂ = max_j λ_j`.
    pub fn spectral_norm(&self) -> f64 {
        self.spectrum.iter().copied().fold(f64::MIN, f64::max)
    }

    /// The dense `d × d` matrix, row-major. Test oracle only; refuses `d > 4096`.
    pub fn dense_materialize(&self) -> Result<Vec<Vec<f64>>> {
        if self.dim > DENSE_LIMIT {
            return Err(Error::TooLarge {
                dim: self.dim,
                max: DENSE_LIMIT,
            });
        }
        let d = self.dim;
        let s = self.sigma;
        let mut m = vec![vec![0.0; d]; d];
        for (i, row) in m.iter_mut().enumerate() {
            // Stencil entries accumulate, so small d aliases correctly.
            row[i] += 1.0 + 2.0 * s;
            row[(i + 1) % d] -= s;
            row[(i + d - 1) % d] -= s;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zero_sigma_is_identity() {
        let op = LaplacianOperator::build(7, 0.0).unwrap();
        assert!(op.is_identity());
        assert!(op.spectrum().iter().all(|&l| l == 1.0));
        let v = [1.5, -2.0, 0.25, 3.0, 0.0, -1e-3, 7.0];
        assert_eq!(op.apply_inverse(&v).unwrap(), v);
        assert_eq!(op.apply_inverse_sqrt(&v).unwrap(), v);
        assert_eq!(op.gamma2(), 1.0);
        assert_eq!(op.spectral_norm(), 1.0);
    }

    #[test]
    fn dimension_one_ignores_sigma() {
        let op = LaplacianOperator::build(1, 3.0).unwrap();
        assert!(op.is_identity());
        assert_eq!(op.spectrum(), &[1.0]);
        assert_eq!(op.dense_materialize().unwrap(), vec![vec![1.0]]);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(
            LaplacianOperator::build(0, 1.0),
            Err(Error::InvalidDimension(0))
        ));
        assert!(LaplacianOperator::build(3, -0.1).is_err());
        assert!(LaplacianOperator::build(3, f64::NAN).is_err());
    }

    #[test]
    fn spectrum_d4_sigma1() {
        let op = LaplacianOperator::build(4, 1.0).unwrap();
        let expected = [1.0, 3.0, 5.0, 3.0];
        for (l, e) in op.spectrum().iter().zip(expected) {
            assert!(close(*l, e, 1e-14), "{l} vs {e}");
        }
    }

    #[test]
    fn two_dimensional_convention() {
        let op = LaplacianOperator::build(2, 0.05).unwrap();
        assert_eq!(op.spectrum()[0], 1.0);
        assert!(close(op.spectrum()[1], 1.2, 1e-15));
        let m = op.dense_materialize().unwrap();
        assert!(close(m[0][0], 1.1, 1e-15) && close(m[0][1], -0.1, 1e-15));
        assert!(close(m[1][0], -0.1, 1e-15) && close(m[1][1], 1.1, 1e-15));
    }

    #[test]
    fn spectrum_invariants() {
        for d in [2usize, 3, 5, 8, 17, 122] {
            for sigma in [0.1, 1.0, 5.0] {
                let op = LaplacianOperator::build(d, sigma).unwrap();
                let s = op.spectrum();
                assert_eq!(s[0], 1.0);
                assert!(s.iter().all(|&l| l >= 1.0));
                for j in 1..d {
                    assert_eq!(s[j], s[d - j]);
                }
                if d % 2 == 0 {
                    assert_eq!(op.spectral_norm(), 1.0 + 4.0 * sigma);
                }
            }
        }
    }

    #[test]
    fn inverse_of_unit_vector_d4() {
        let op = LaplacianOperator::build(4, 1.0).unwrap();
        let u = op.apply_inverse(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let expected = [7.0 / 15.0, 0.2, 2.0 / 15.0, 0.2];
        for (a, b) in u.iter().zip(expected) {
            assert!(close(*a, b, 1e-14), "{u:?}");
        }
    }

    #[test]
    fn inverse_sqrt_of_unit_vector_d4() {
        let op = LaplacianOperator::build(4, 1.0).unwrap();
        let u = op.apply_inverse_sqrt(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let expected = 0.25 * (1.0 + 2.0 / 3f64.sqrt() + 1.0 / 5f64.sqrt());
        assert!(close(u[0], expected, 1e-14));
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(LaplacianOperator::build(6, 0.5).unwrap().spectral_norm(), 3.0);
        let op = LaplacianOperator::build(3, 1.0).unwrap();
        assert!(close(op.spectral_norm(), 4.0, 1e-14));
    }

    #[test]
    fn dense_rows_sum_to_one() {
        let op = LaplacianOperator::build(4, 1.0).unwrap();
        let m = op.dense_materialize().unwrap();
        assert_eq!(m[0], vec![3.0, -1.0, 0.0, -1.0]);
        for d in [1usize, 2, 3, 9] {
            let m = LaplacianOperator::build(d, 0.7).unwrap().dense_materialize().unwrap();
            for row in &m {
                assert!(close(row.iter().sum::<f64>(), 1.0, 1e-14));
            }
        }
    }

    #[test]
    fn dense_guard() {
        let op = LaplacianOperator::build(DENSE_LIMIT + 1, 1.0).unwrap();
        assert!(matches!(op.dense_materialize(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn length_mismatch() {
        let op = LaplacianOperator::build(4, 1.0).unwrap();
        assert!(matches!(
            op.apply_inverse(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 4, found: 2 })
        ));
        assert!(op.apply_inverse_sqrt(&[1.0; 5]).is_err());
    }

    #[test]
    fn gamma2_decreases_in_sigma() {
        for d in [2usize, 3, 10, 64] {
            let grid = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0];
            let g: Vec<f64> = grid
                .iter()
                .map(|&s| LaplacianOperator::build(d, s).unwrap().gamma2())
                .collect();
            assert!(g.windows(2).all(|w| w[1] < w[0]), "d={d}: {g:?}");
            assert!(g.iter().all(|&x| x > 0.0 && x <= 1.0));
        }
    }

    #[test]
    fn gamma2_large_d_limit() {
        // d⁻¹Σλ⁻¹ → (1+4σ)^{-1/2} and d⁻¹Σλ⁻² → (1+2σ)(1+4σ)^{-3/2} as d → ∞.
        let op = LaplacianOperator::build(1000, 1.0).unwrap();
        assert!(close(op.gamma2(), 5f64.powf(-0.5), 1e-9));
        assert!(close(op.inverse_square_mean(), 3.0 * 5f64.powf(-1.5), 1e-9));
    }

    #[test]
    fn non_power_of_two_sizes() {
        for d in [3usize, 7, 122, 97] {
            let op = LaplacianOperator::build(d, 2.0).unwrap();
            let v: Vec<f64> = (0..d).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
            let u = op.apply_inverse(&v).unwrap();
            let back = op.apply(&u).unwrap();
            for (a, b) in back.iter().zip(&v) {
                assert!(close(*a, *b, 1e-12));
            }
        }
    }
}
