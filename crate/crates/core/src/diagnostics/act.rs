use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{check_dim, Error, Result};
use crate::samplers::SampleChain;

/// Fewest samples accepted by [`autocorrelation_time`].
pub const MIN_ACT_SAMPLES: usize = 100;

/// Empirical autocovariance `Â(t) = N⁻¹ Σ_{k<N−t} (φ_k − m)(φ_{k+t} − m)` for
/// `t = 0..N−1`, around the given mean.
pub fn autocovariance(values: &[f64], mean: f64) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .map(|v| Complex::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in &mut buf {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = (size as f64 * n as f64).recip();
    buf[..n].iter().map(|c| c.re * scale).collect()
}

/// Integrated autocorrelation time `τ = ½ + Σ_{t≥1} Â(t)/Â(0)`.
///
/// The sum is truncated with Geyer's initial positive sequence: lags are
/// taken in pairs `Â(2m−1) + Â(2m)`, `m = 1, 2, …`, stopping before the first
/// pair that is not positive, so `τ ≥ ½`. With `weights` (per-sample step
/// sizes) the centering mean is `Σ η_k φ_k / Σ η_k`.
pub fn autocorrelation_time(values: &[f64], weights: Option<&[f64]>) -> Result<f64> {
    let n = values.len();
    if n < MIN_ACT_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_ACT_SAMPLES,
            found: n,
        });
    }
    let mean = match weights {
        Some(w) => {
            check_dim(n, w.len())?;
            let total: f64 = w.iter().sum();
            values.iter().zip(w).map(|(v, w)| v * w).sum::<f64>() / total
        }
        None => values.iter().sum::<f64>() / n as f64,
    };
    let acov = autocovariance(values, mean);
    let a0 = acov[0];
    if !(a0 > 0.0) {
        return Err(Error::DegenerateChain);
    }
    let mut tau = 0.5;
    let mut m = 1;
    while 2 * m < n {
        let pair = (acov[2 * m - 1] + acov[2 * m]) / a0;
        if !(pair > 0.0) {
            break;
        }
        tau += pair;
        m += 1;
    }
    Ok(tau)
}

/// ACT of the statistic `phi` along a chain, weighted by the chain's step sizes.
pub fn chain_act(chain: &SampleChain, phi: impl Fn(&[f64]) -> f64) -> Result<f64> {
    let values: Vec<f64> = chain.samples.iter().map(|x| phi(x)).collect();
    autocorrelation_time(&values, Some(&chain.etas))
}
