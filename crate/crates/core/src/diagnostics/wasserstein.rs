use rand::seq::index;
use serde::Serialize;

use crate::error::{check_dim, invalid, Error, Result};
use crate::rng::stream;

/// Largest point count solved exactly; bigger sets are subsampled.
pub const MAX_ASSIGNMENT_POINTS: usize = 2000;

/// Largest supported point dimension.
pub const MAX_W2_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct W2Report {
    pub distance: f64,
    /// Points per set after subsampling.
    pub points: usize,
}

/// Minimum-cost perfect matching on an `n × n` row-major cost matrix
/// (shortest augmenting paths with potentials, `O(n³)`). Returns the column
/// assigned to each row.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n × n");
    // 1-based potentials; column 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_slack = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        min_slack.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let costs = &cost[(i0 - 1) * n..i0 * n];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = costs[j - 1] - u[i0] - v[j];
                if cur < min_slack[j] {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    assignment
}

fn check_points(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<usize> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let d = a[0].len();
    if d > MAX_W2_DIM {
        return Err(invalid(
            "dimension",
            format!("{d} exceeds the supported maximum {MAX_W2_DIM}"),
        ));
    }
    for p in a.iter().chain(b) {
        check_dim(d, p.len())?;
    }
    Ok(d)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exact empirical 2-Wasserstein distance between equal-size point sets:
/// `√(min_π n⁻¹ Σ_i ‖a_i − b_{π(i)}‖²)`.
pub fn wasserstein2(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    check_points(a, b)?;
    check_dim(a.len(), b.len())?;
    let n = a.len();
    let cost: Vec<f64> = a.iter().flat_map(|p| b.iter().map(move |q| sq_dist(p, q))).collect();
    let assignment = min_cost_assignment(&cost, n);
    let total: f64 = assignment.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    Ok((total / n as f64).max(0.0).sqrt())
}

/// [`wasserstein2`] after drawing `min(|A|, |B|, max_points)` points uniformly
/// without replacement from each set (all points are kept when they fit).
pub fn wasserstein2_subsampled(a: &[Vec<f64>], b: &[Vec<f64>], max_points: usize, seed: u64) -> Result<W2Report> {
    check_points(a, b)?;
    let m = a.len().min(b.len()).min(max_points.max(1));
    let mut rng = stream(seed, 0x5732);
    let mut pick = |set: &[Vec<f64>]| -> Vec<Vec<f64>> {
        if set.len() == m {
            set.to_vec()
        } else {
            let mut idx = index::sample(&mut rng, set.len(), m).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| set[i].clone()).collect()
        }
    };
    let a = pick(a);
    let b = pick(b);
    Ok(W2Report {
        distance: wasserstein2(&a, &b)?,
        points: m,
    })
}
