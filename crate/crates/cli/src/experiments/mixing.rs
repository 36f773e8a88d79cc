//! Mean-estimate MSE against sample count for the Langevin references.

use anyhow::Result;
use serde::Serialize;

use lssgld::diagnostics::mean_error;
use lssgld::{run_chain, GaussianTarget};

use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, ArtifactWriter};

use super::par_cells;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingRow {
    pub label: String,
    pub seed: u64,
    pub samples: usize,
    pub mse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingMeanRow {
    pub label: String,
    pub samples: usize,
    pub mean_mse: f64,
}

#[derive(Debug)]
pub struct MixingResult {
    pub labels: Vec<String>,
    pub checkpoints: Vec<usize>,
    pub rows: Vec<MixingRow>,
    /// `mean_mse[label][checkpoint]`, averaged over seeds.
    pub mean_mse: Vec<Vec<f64>>,
}

impl MixingResult {
    pub fn mean_rows(&self) -> Vec<MixingMeanRow> {
        let mut out = Vec::new();
        for (label, row) in self.labels.iter().zip(&self.mean_mse) {
            for (&k, &m) in self.checkpoints.iter().zip(row) {
                out.push(MixingMeanRow {
                    label: label.clone(),
                    samples: k,
                    mean_mse: m,
                });
            }
        }
        out
    }
}

pub fn target(cfg: &ExperimentConfig) -> Result<GaussianTarget> {
    let p = &cfg.mixing;
    let v = p.variance;
    Ok(GaussianTarget::new(p.mean.to_vec(), vec![vec![v, 0.0], vec![0.0, v]])?)
}

pub fn compute(cfg: &ExperimentConfig) -> Result<MixingResult> {
    let p = &cfg.mixing;
    let target = target(cfg)?;
    let samplers = cfg.resolved_samplers();
    let seeds = cfg.seeds();
    let cells: Vec<(usize, u64)> = (0..samplers.len())
        .flat_map(|i| seeds.iter().map(move |&seed| (i, seed)))
        .collect();

    let curves = par_cells(&cells, |&(i, seed)| {
        let chain = run_chain(&samplers[i].spec.clone().with_seed(seed), &target)?;
        let mut prefix = vec![[0.0; 2]; chain.len() + 1];
        for (t, x) in chain.samples.iter().enumerate() {
            prefix[t + 1] = [prefix[t][0] + x[0], prefix[t][1] + x[1]];
        }
        p.checkpoints
            .iter()
            .map(|&k| {
                let n = k as f64;
                Ok(mean_error(&[vec![prefix[k][0] / n, prefix[k][1] / n]], &p.mean)?.mse)
            })
            .collect::<Result<Vec<f64>>>()
    })?;

    let mut rows = Vec::new();
    let mut mean_mse = vec![vec![0.0; p.checkpoints.len()]; samplers.len()];
    for (&(i, seed), curve) in cells.iter().zip(&curves) {
        for ((&k, &m), acc) in p.checkpoints.iter().zip(curve).zip(&mut mean_mse[i]) {
            rows.push(MixingRow {
                label: samplers[i].label.clone(),
                seed,
                samples: k,
                mse: m,
            });
            *acc += m / seeds.len() as f64;
        }
    }
    Ok(MixingResult {
        labels: samplers.iter().map(|s| s.label.clone()).collect(),
        checkpoints: p.checkpoints.clone(),
        rows,
        mean_mse,
    })
}

pub fn write(r: &MixingResult, out: &mut ArtifactWriter) -> Result<()> {
    out.write_rows("mse_curves.csv", &r.rows)?;
    let mut header = vec!["samples".to_string()];
    header.extend(r.labels.iter().cloned());
    let table: Vec<Vec<String>> = r
        .checkpoints
        .iter()
        .enumerate()
        .map(|(c, k)| {
            let mut row = vec![k.to_string()];
            row.extend(r.mean_mse.iter().map(|m| fmt_f64(m[c])));
            row
        })
        .collect();
    out.write_table("mse_mean.csv", &header, &table)?;
    Ok(())
}
