use std::f64::consts::PI;
use std::io::Write;

use crate::error::{check_dim, invalid, Error, Result};

/// A rectangular grid of `nx × ny` nodes, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// The bounding box of `samples` padded by `margin` on every side.
    pub fn covering(samples: &[Vec<f64>], margin: f64, nx: usize, ny: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let (mut x_min, mut x_max, mut y_min, mut y_max) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for s in samples {
            check_dim(2, s.len())?;
            x_min = x_min.min(s[0]);
            x_max = x_max.max(s[0]);
            y_min = y_min.min(s[1]);
            y_max = y_max.max(s[1]);
        }
        Ok(Self {
            x_min: x_min - margin,
            x_max: x_max + margin,
            y_min: y_min - margin,
            y_max: y_max + margin,
            nx,
            ny,
        })
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + step * i as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.ny)
    }

    /// Area represented by one node in the Riemann sum.
    pub fn cell_area(&self) -> f64 {
        let dx = (self.x_max - self.x_min) / (self.nx.max(2) - 1) as f64;
        let dy = (self.y_max - self.y_min) / (self.ny.max(2) - 1) as f64;
        dx * dy
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(invalid("grid", "needs at least 2 nodes per axis"));
        }
        if !(self.x_max > self.x_min && self.y_max > self.y_min) {
            return Err(invalid("grid", "bounds must be increasing"));
        }
        Ok(())
    }
}

/// Density values on a grid, `values[iy][ix]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    pub grid: GridSpec,
    pub values: Vec<Vec<f64>>,
}

impl DensityGrid {
    /// Riemann-sum integral of the grid.
    pub fn mass(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.grid.cell_area()
    }

    /// Node coordinates of the largest value.
    pub fn argmax(&self) -> (f64, f64) {
        let (xs, ys) = (self.grid.xs(), self.grid.ys());
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for (iy, row) in self.values.iter().enumerate() {
            for (ix, &v) in row.iter().enumerate() {
                if v > best.0 {
                    best = (v, ix, iy);
                }
            }
        }
        (xs[best.1], ys[best.2])
    }

    /// Dense matrix CSV: the header row holds the x axis after a `y\x`
    /// corner cell, and each data row starts with its y coordinate.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["y\\x".to_string()];
        header.extend(self.grid.xs().iter().map(f64::to_string));
        out.write_record(&header)?;
        for (y, row) in self.grid.ys().iter().zip(&self.values) {
            let mut rec = vec![y.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Scott's rule `h = σ̄ · N^{−1/6}` for two-dimensional samples, with `σ̄`
/// the mean of the two marginal standard deviations.
pub fn scott_bandwidth(samples: &[Vec<f64>]) -> Result<f64> {
    let cov = super::moments::empirical_covariance(samples)?;
    check_dim(2, cov.len())?;
    let sd = 0.5 * (cov[0][0].sqrt() + cov[1][1].sqrt());
    Ok(sd * (samples.len() as f64).powf(-1.0 / 6.0))
}

/// Isotropic Gaussian kernel density estimate of 2D `samples` on `grid`.
pub fn kde_grid(samples: &[Vec<f64>], bandwidth: f64, grid: &GridSpec) -> Result<DensityGrid> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(invalid("bandwidth", format!("must be positive, found {bandwidth}")));
    }
    if samples.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    grid.validate()?;
    let (xs, ys) = (grid.xs(), grid.ys());
    let inv2h2 = 0.5 / (bandwidth * bandwidth);
    let norm = (2.0 * PI * bandwidth * bandwidth * samples.len() as f64).recip();

    let mut values = vec![vec![0.0; grid.nx]; grid.ny];
    let mut kx = vec![0.0; grid.nx];
    for s in samples {
        check_dim(2, s.len())?;
        for (k, x) in kx.iter_mut().zip(&xs) {
            *k = (-(x - s[0]) * (x - s[0]) * inv2h2).exp();
        }
        for (row, y) in values.iter_mut().zip(&ys) {
            let ky = (-(y - s[1]) * (y - s[1]) * inv2h2).exp();
            if ky == 0.0 {
                continue;
            }
            for (v, k) in row.iter_mut().zip(&kx) {
                *v += ky * k;
            }
        }
    }
    values.iter_mut().flatten().for_each(|v| *v *= norm);
    Ok(DensityGrid { grid: *grid, values })
}
