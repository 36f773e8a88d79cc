use serde::Serialize;

use crate::error::{check_dim, Error, Result};

/// Mean squared and mean absolute elementwise error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentError {
    pub mse: f64,
    pub mae: f64,
}

impl MomentError {
    fn from_diffs(diffs: impl Iterator<Item = f64>) -> Self {
        let (mut sq, mut abs, mut count) = (0.0, 0.0, 0usize);
        for e in diffs {
            sq += e * e;
            abs += e.abs();
            count += 1;
        }
        let n = count.max(1) as f64;
        Self {
            mse: sq / n,
            mae: abs / n,
        }
    }
}

fn sample_dim(samples: &[Vec<f64>], needed: usize) -> Result<usize> {
    if samples.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            found: samples.len(),
        });
    }
    let d = samples[0].len();
    for s in samples {
        check_dim(d, s.len())?;
    }
    Ok(d)
}

pub fn empirical_mean(samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = sample_dim(samples, 1)?;
    let mut m = vec![0.0; d];
    for s in samples {
        for (a, b) in m.iter_mut().zip(s) {
            *a += b;
        }
    }
    let n = samples.len() as f64;
    m.iter_mut().for_each(|a| *a /= n);
    Ok(m)
}

/// Unbiased (`N − 1`) sample covariance.
pub fn empirical_covariance(samples: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = sample_dim(samples, 2)?;
    let m = empirical_mean(samples)?;
    let mut c = vec![vec![0.0; d]; d];
    for s in samples {
        for i in 0..d {
            let di = s[i] - m[i];
            for j in i..d {
                c[i][j] += di * (s[j] - m[j]);
            }
        }
    }
    let denom = (samples.len() - 1) as f64;
    for i in 0..d {
        for j in i..d {
            c[i][j] /= denom;
            c[j][i] = c[i][j];
        }
    }
    Ok(c)
}

/// Elementwise error between the sample covariance and `true_cov`.
pub fn covariance_error(samples: &[Vec<f64>], true_cov: &[Vec<f64>]) -> Result<MomentError> {
    let c = empirical_covariance(samples)?;
    check_dim(c.len(), true_cov.len())?;
    for row in true_cov {
        check_dim(c.len(), row.len())?;
    }
    Ok(MomentError::from_diffs(
        c.iter().flatten().zip(true_cov.iter().flatten()).map(|(a, b)| a - b),
    ))
}

/// Elementwise error between the sample mean and `true_mean`.
pub fn mean_error(samples: &[Vec<f64>], true_mean: &[f64]) -> Result<MomentError> {
    let m = empirical_mean(samples)?;
    check_dim(m.len(), true_mean.len())?;
    Ok(MomentError::from_diffs(m.iter().zip(true_mean).map(|(a, b)| a - b)))
}

/// Cumulative means `(x_1 + … + x_k)/k` for every `k`.
pub fn running_mean(samples: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(samples.len());
    let Some(first) = samples.first() else {
        return out;
    };
    let mut sum = vec![0.0; first.len()];
    for (k, s) in samples.iter().enumerate() {
        for (a, b) in sum.iter_mut().zip(s) {
            *a += b;
        }
        let inv = ((k + 1) as f64).recip();
        out.push(sum.iter().map(|a| a * inv).collect());
    }
    out
}

/// Means over the trailing `window` samples (fewer at the start).
pub fn windowed_mean(samples: &[Vec<f64>], window: usize) -> Vec<Vec<f64>> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(samples.len());
    let Some(first) = samples.first() else {
        return out;
    };
    let mut sum = vec![0.0; first.len()];
    for (k, s) in samples.iter().enumerate() {
        for (a, b) in sum.iter_mut().zip(s) {
            *a += b;
        }
        if k >= window {
            for (a, b) in sum.iter_mut().zip(&samples[k - window]) {
                *a -= b;
            }
        }
        let inv = ((k + 1).min(window) as f64).recip();
        out.push(sum.iter().map(|a| a * inv).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_moments_give_zero_error() {
        // Four points with mean 0 and unbiased covariance diag(4/3, 4/3).
        let s = vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![-1.0, -1.0]];
        let c = covariance_error(&s, &[vec![4.0 / 3.0, 0.0], vec![0.0, 4.0 / 3.0]]).unwrap();
        assert!(c.mse < 1e-30 && c.mae < 1e-15);
        assert_eq!(mean_error(&s, &[0.0, 0.0]).unwrap().mse, 0.0);
    }

    #[test]
    fn single_sample_at_unit_distance() {
        let e = mean_error(&[vec![1.0, 0.0, 0.0]], &[0.0, 0.0, 0.0]).unwrap();
        assert!((e.mse - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.mae - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn covariance_needs_two_samples() {
        assert!(covariance_error(&[vec![0.0]], &[vec![1.0]]).is_err());
        assert!(mean_error(&[], &[0.0]).is_err());
    }

    #[test]
    fn running_and_windowed_means() {
        let s: Vec<Vec<f64>> = (1..=5).map(|k| vec![k as f64]).collect();
        let r = running_mean(&s);
        assert_eq!(r[4], vec![3.0]);
        let w = windowed_mean(&s, 2);
        assert_eq!(
            w.iter().map(|v| v[0]).collect::<Vec<_>>(),
            vec![1.0, 1.5, 2.5, 3.5, 4.5]
        );
        assert_eq!(windowed_mean(&s, 100), r);
    }
}
