use rand::seq::index;

use crate::error::{check_dim, invalid, Error, Result};
use crate::rng::{derive_seed, stream};
use crate::smoothing::LaplacianOperator;
use crate::targets::{minibatch_grad_into, LabeledData, TargetModel};

/// Largest per-coordinate variance of the smoothed mini-batch gradient
/// `A_σ⁻¹ g_B(x)` around the smoothed full gradient `A_σ⁻¹ ∇f(x)`, over all
/// coordinates and all points of `path`.
///
/// Each path point draws `repeats` uniform batches without replacement from
/// a stream derived from `seed` and the point index only, so profiles for
/// different `σ` are computed on identical batches.
pub fn gradient_variance_profile(
    model: &dyn TargetModel,
    path: &[Vec<f64>],
    op: &LaplacianOperator,
    batch_size: usize,
    repeats: usize,
    seed: u64,
) -> Result<f64> {
    let n = model.num_components();
    let d = model.dim();
    check_dim(d, op.dim())?;
    if path.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, found: 0 });
    }
    if repeats < 2 {
        return Err(invalid("repeats", format!("must be at least 2, found {repeats}")));
    }
    if batch_size == 0 {
        return Err(Error::EmptyBatch);
    }
    if batch_size > n {
        return Err(invalid(
            "batch_size",
            format!("batch_size = {batch_size} exceeds the number of components n = {n}"),
        ));
    }

    let mut worst = 0.0f64;
    let mut g = vec![0.0; d];
    let mut acc = vec![0.0; d];
    for (p, x) in path.iter().enumerate() {
        check_dim(d, x.len())?;
        let mean = op.apply_inverse(&model.full_grad(x)?)?;
        if batch_size == n {
            continue;
        }
        let mut rng = stream(derive_seed(seed, p as u64), 0);
        acc.fill(0.0);
        for _ in 0..repeats {
            let batch = index::sample(&mut rng, n, batch_size).into_vec();
            minibatch_grad_into(model, x, &batch, &mut g)?;
            op.apply_inverse_in_place(&mut g)?;
            for ((a, gi), mi) in acc.iter_mut().zip(&g).zip(&mean) {
                *a += (gi - mi) * (gi - mi);
            }
        }
        let inv = (repeats as f64).recip();
        worst = acc.iter().fold(worst, |w, a| w.max(a * inv));
    }
    Ok(worst)
}

/// Mean negative log-likelihood `−log s(y_i⟨d_i, x⟩)` and 0/1 accuracy of
/// `sign⟨d_i, x⟩` over `data`; a zero margin counts as incorrect.
pub fn nll_accuracy(data: &LabeledData, x: &[f64]) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_dim(data.dim(), x.len())?;
    let mut nll = 0.0;
    let mut correct = 0usize;
    for (i, &y) in data.labels().iter().enumerate() {
        let m = y * data.dot_row(i, x);
        nll += crate::targets::softplus(-m);
        if m > 0.0 {
            correct += 1;
        }
    }
    let n = data.len() as f64;
    Ok((nll / n, correct as f64 / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::MixturePairTarget;

    #[test]
    fn full_batch_has_zero_variance() {
        let t = MixturePairTarget::new(vec![[1.0, 2.0], [0.0, 3.0], [2.0, -1.0]]);
        let op = LaplacianOperator::build(2, 0.5).unwrap();
        let v = gradient_variance_profile(&t, &[vec![0.2, 0.1], vec![1.0, 1.0]], &op, 3, 10, 0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn rejects_oversized_batch() {
        let t = MixturePairTarget::new(vec![[1.0, 2.0]]);
        let op = LaplacianOperator::identity(2).unwrap();
        assert!(gradient_variance_profile(&t, &[vec![0.0, 0.0]], &op, 2, 10, 0).is_err());
        assert!(gradient_variance_profile(&t, &[], &op, 1, 10, 0).is_err());
        assert!(gradient_variance_profile(&t, &[vec![0.0, 0.0]], &op, 1, 1, 0).is_err());
    }

    #[test]
    fn origin_gives_log_two_and_zero_accuracy() {
        let data = LabeledData::synthetic_logistic(50, 20, 1).unwrap();
        let (nll, acc) = nll_accuracy(&data, &[0.0; 20]).unwrap();
        assert!((nll - 2f64.ln()).abs() < 1e-15);
        assert_eq!(acc, 0.0);
    }

    #[test]
    fn separable_data_with_large_margin() {
        let data = LabeledData::new(2, vec![vec![(0, 1.0)], vec![(1, 1.0)]], vec![1.0, -1.0]).unwrap();
        let (nll, acc) = nll_accuracy(&data, &[50.0, -50.0]).unwrap();
        assert!(nll < 1e-20);
        assert_eq!(acc, 1.0);
    }
}
