//! Correlated 2D Gaussian: autocorrelation time against covariance error over
//! a step-size grid.

use anyhow::Result;
use serde::Serialize;

use lssgld::diagnostics::{chain_act, covariance_error, mean_error};
use lssgld::{run_chain, GaussianTarget, SampleChain};

use crate::config::{resolve_sampler, ExperimentConfig, SamplerDefaults};
use crate::output::ArtifactWriter;

use super::par_cells;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gauss2dRow {
    pub label: String,
    pub kind: String,
    pub sigma: f64,
    pub step_factor: f64,
    /// Grid step size before the multiplier.
    pub base_eta: f64,
    pub eta: f64,
    pub seed: u64,
    pub act: f64,
    pub cov_mse: f64,
    pub cov_mae: f64,
    pub mean_mse: f64,
}

#[derive(Debug)]
pub struct Gauss2dResult {
    pub rows: Vec<Gauss2dRow>,
    /// Leading samples of each row label at the first grid step and seed.
    pub samples: Vec<(String, SampleChain)>,
}

struct Cell {
    label: String,
    defaults: SamplerDefaults,
    entry: crate::config::SamplerEntry,
    grid_index: usize,
    seed: u64,
}

pub fn target(cfg: &ExperimentConfig) -> Result<GaussianTarget> {
    let p = &cfg.gauss2d;
    Ok(GaussianTarget::new(
        p.mean.to_vec(),
        p.covariance.iter().map(|r| r.to_vec()).collect(),
    )?)
}

pub fn compute(cfg: &ExperimentConfig) -> Result<Gauss2dResult> {
    let p = &cfg.gauss2d;
    let target = target(cfg)?;
    let base = cfg.sampler_defaults();
    let seeds = cfg.seeds();

    let mut cells = Vec::new();
    for entry in cfg.samplers() {
        let variants: Vec<bool> = match entry.step_multiplier {
            Some(on) => vec![on],
            None if entry.kind.is_smoothed() && p.step_multiplier => vec![false, true],
            None => vec![false],
        };
        for on in variants {
            let label = if on && entry.kind.is_smoothed() {
                format!("{}_mult", entry.label())
            } else {
                entry.label()
            };
            let grid_base = entry.eta.unwrap_or(p.base_eta);
            for (grid_index, k) in (0..p.grid_size).enumerate() {
                let mut e = entry.clone();
                e.eta = Some(grid_base * p.decay.powi(k as i32));
                e.step_multiplier = Some(on);
                for &seed in &seeds {
                    cells.push(Cell {
                        label: label.clone(),
                        defaults: base,
                        entry: e.clone(),
                        grid_index,
                        seed,
                    });
                }
            }
        }
    }

    let mean = target.mean().to_vec();
    let cov = target.covariance();
    let results = par_cells(&cells, |c| {
        let r = resolve_sampler(&c.entry, &c.defaults);
        let spec = r.spec.with_seed(c.seed);
        let chain = run_chain(&spec, &target)?;
        let ce = covariance_error(&chain.samples, &cov)?;
        let me = mean_error(&chain.samples, &mean)?;
        let row = Gauss2dRow {
            label: c.label.clone(),
            kind: spec.kind.to_string(),
            sigma: r.sigma,
            step_factor: r.step_factor,
            base_eta: c.entry.eta.unwrap_or(p.base_eta),
            eta: spec.eta,
            seed: c.seed,
            act: chain_act(&chain, |x| x[0])?,
            cov_mse: ce.mse,
            cov_mae: ce.mae,
            mean_mse: me.mse,
        };
        let keep = (c.grid_index == 0 && c.seed == seeds[0]).then(|| {
            let mut head = chain;
            let n = p.export_samples.min(head.len());
            head.samples.truncate(n);
            head.steps.truncate(n);
            head.etas.truncate(n);
            (c.label.clone(), head)
        });
        Ok((row, keep))
    })?;

    let mut rows = Vec::with_capacity(results.len());
    let mut samples = Vec::new();
    for (row, keep) in results {
        rows.push(row);
        samples.extend(keep);
    }
    Ok(Gauss2dResult { rows, samples })
}

pub fn write(r: &Gauss2dResult, out: &mut ArtifactWriter) -> Result<()> {
    out.write_rows("act_vs_error.csv", &r.rows)?;
    for (label, chain) in &r.samples {
        out.write_with(&format!("samples_{label}.csv"), |buf| Ok(chain.write_csv(buf)?))?;
    }
    Ok(())
}
