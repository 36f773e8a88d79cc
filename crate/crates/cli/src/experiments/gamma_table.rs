//! Spectral averages of `A_σ⁻¹` over a grid of `σ` and dimensions.

use anyhow::Result;
use serde::Serialize;

use lssgld::LaplacianOperator;

use crate::config::GammaParams;
use crate::output::{fmt_f64, ArtifactWriter};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaRow {
    pub sigma: f64,
    pub d: usize,
    /// `d⁻¹ Σ λ_j⁻²`.
    pub inverse_square_mean: f64,
    /// `d⁻¹ Σ λ_j⁻¹`.
    pub gamma2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaResult {
    pub sigmas: Vec<f64>,
    pub dims: Vec<usize>,
    /// Row-major over `(σ, d)`.
    pub rows: Vec<GammaRow>,
}

impl GammaResult {
    pub fn get(&self, sigma: f64, d: usize) -> Option<&GammaRow> {
        self.rows.iter().find(|r| r.sigma == sigma && r.d == d)
    }
}

pub fn compute(p: &GammaParams) -> Result<GammaResult> {
    let mut rows = Vec::with_capacity(p.sigmas.len() * p.dims.len());
    for &sigma in &p.sigmas {
        for &d in &p.dims {
            let op = LaplacianOperator::build(d, sigma)?;
            rows.push(GammaRow {
                sigma,
                d,
                inverse_square_mean: op.inverse_square_mean(),
                gamma2: op.gamma2(),
            });
        }
    }
    Ok(GammaResult {
        sigmas: p.sigmas.clone(),
        dims: p.dims.clone(),
        rows,
    })
}

/// The wide table (`inverse_square_mean`, one column per `d`).
pub fn wide_table(r: &GammaResult) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["sigma".to_string()];
    header.extend(r.dims.iter().map(|d| format!("d={d}")));
    let rows = r
        .rows
        .chunks(r.dims.len())
        .map(|chunk| {
            let mut rec = vec![fmt_f64(chunk[0].sigma)];
            rec.extend(chunk.iter().map(|g| format!("{:.3}", g.inverse_square_mean)));
            rec
        })
        .collect();
    (header, rows)
}

pub fn write(r: &GammaResult, out: &mut ArtifactWriter) -> Result<()> {
    let (header, rows) = wide_table(r);
    out.write_table("gamma_table.csv", &header, &rows)?;
    out.write_rows("gamma_long.csv", &r.rows)?;
    Ok(())
}
