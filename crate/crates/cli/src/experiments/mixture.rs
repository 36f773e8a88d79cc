//! Gaussian-mixture-pair target: W2 to a Metropolis reference, density grids
//! and thinned chains.

use anyhow::Result;
use serde::Serialize;

use lssgld::diagnostics::{kde_grid, scott_bandwidth, wasserstein2_subsampled, DensityGrid, GridSpec};
use lssgld::rng::{derive_seed, stream};
use lssgld::samplers::SamplerKind;
use lssgld::targets::sample_mixture_centers;
use lssgld::{run_chain, MixturePairTarget, SampleChain, SamplerSpec};

use crate::config::{burn_in_for, ExperimentConfig, MixtureParams};
use crate::output::{fmt_f64, ArtifactWriter};

use super::par_cells;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct W2Row {
    pub label: String,
    pub kind: String,
    pub sigma: f64,
    pub eta: f64,
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub points: usize,
    pub w2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub seed: u64,
    pub acceptance_rate: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixtureSummary {
    pub w2: Vec<W2Row>,
    pub reference: Vec<ReferenceRow>,
}

#[derive(Debug)]
pub struct MixtureResult {
    pub centers: Vec<[f64; 2]>,
    pub labels: Vec<String>,
    pub iterations: Vec<usize>,
    pub rows: Vec<W2Row>,
    /// `mean_w2[label][iterations]`, averaged over seeds.
    pub mean_w2: Vec<Vec<f64>>,
    pub reference: Vec<ReferenceRow>,
    /// Density grids at the longest run and the first seed, reference first.
    pub kde: Vec<(String, DensityGrid)>,
    /// Thinned chains at the longest run.
    pub chains: Vec<(String, u64, SampleChain)>,
}

impl MixtureResult {
    pub fn summary(&self) -> MixtureSummary {
        MixtureSummary {
            w2: self.rows.clone(),
            reference: self.reference.clone(),
        }
    }
}

pub fn target(p: &MixtureParams) -> MixturePairTarget {
    let mut rng = stream(p.center_seed, 0);
    MixturePairTarget::new(sample_mixture_centers(&mut rng, p.n_centers))
}

fn kde_input(samples: &[Vec<f64>], max_points: usize) -> Vec<Vec<f64>> {
    let stride = samples.len().div_ceil(max_points).max(1);
    samples.iter().step_by(stride).cloned().collect()
}

fn density(samples: &[Vec<f64>], p: &MixtureParams) -> Result<DensityGrid> {
    let pts = kde_input(samples, p.kde_points);
    let [x_min, x_max, y_min, y_max] = p.kde_extent;
    let grid = GridSpec {
        x_min,
        x_max,
        y_min,
        y_max,
        nx: p.kde_nodes,
        ny: p.kde_nodes,
    };
    Ok(kde_grid(&pts, scott_bandwidth(&pts)?, &grid)?)
}

/// Every `stride`-th sample after dropping the first `burn_in`.
fn thinned(chain: &SampleChain, burn_in: usize, stride: usize) -> SampleChain {
    SampleChain {
        spec: SamplerSpec {
            burn_in,
            thin: stride,
            ..chain.spec.clone()
        },
        dim: chain.dim,
        samples: chain.samples[burn_in..].iter().step_by(stride).cloned().collect(),
        steps: chain.steps[burn_in..].iter().step_by(stride).copied().collect(),
        etas: chain.etas[burn_in..].iter().step_by(stride).copied().collect(),
        accepted: chain.accepted,
    }
}

/// Post-burn-in samples of the first `k` iterations of a chain recorded
/// from step 1 without thinning.
fn window(chain: &SampleChain, k: usize, fraction: f64) -> &[Vec<f64>] {
    &chain.samples[burn_in_for(k, fraction)..k]
}

pub fn compute(cfg: &ExperimentConfig) -> Result<MixtureResult> {
    let p = &cfg.mixture;
    let target = target(p);
    let n = target.centers().len();
    let samplers = cfg.resolved_samplers();
    let seeds = cfg.seeds();
    let k_max = p.iterations.iter().copied().max().unwrap_or(1);

    // One Metropolis reference per seed, sharing that seed with the samplers.
    let references = par_cells(&seeds, |&seed| {
        let spec = SamplerSpec::new(SamplerKind::MhReference, p.mh_scale, n, p.mh_iterations, seed)
            .with_burn_in(burn_in_for(p.mh_iterations, p.burn_in_fraction));
        Ok(run_chain(&spec, &target)?)
    })?;

    let cells: Vec<(usize, usize)> = (0..samplers.len())
        .flat_map(|i| (0..seeds.len()).map(move |s| (i, s)))
        .collect();
    let outputs = par_cells(&cells, |&(i, s)| {
        let r = &samplers[i];
        let seed = seeds[s];
        // Recorded from step 1 so every prefix run can be read off one chain.
        let spec = SamplerSpec {
            burn_in: 0,
            iterations: k_max,
            ..r.spec.clone()
        }
        .with_seed(seed);
        let chain = run_chain(&spec, &target)?;
        let mut rows = Vec::with_capacity(p.iterations.len());
        for &k in &p.iterations {
            let w = wasserstein2_subsampled(
                window(&chain, k, p.burn_in_fraction),
                &references[s].samples,
                p.w2_points,
                derive_seed(seed, k as u64),
            )?;
            rows.push(W2Row {
                label: r.label.clone(),
                kind: spec.kind.to_string(),
                sigma: r.sigma,
                eta: spec.eta,
                seed,
                iterations: k,
                burn_in: burn_in_for(k, p.burn_in_fraction),
                points: w.points,
                w2: w.distance,
            });
        }
        let post = window(&chain, k_max, p.burn_in_fraction);
        let kde = if s == 0 { Some(density(post, p)?) } else { None };
        let export = (p.chain_export_stride > 0)
            .then(|| thinned(&chain, burn_in_for(k_max, p.burn_in_fraction), p.chain_export_stride));
        Ok((rows, kde, export))
    })?;

    let mut rows = Vec::new();
    let mut mean_w2 = vec![vec![0.0; p.iterations.len()]; samplers.len()];
    let mut kde = vec![("mh_reference".to_string(), density(&references[0].samples, p)?)];
    let mut chains = Vec::new();
    for (&(i, s), (cell_rows, cell_kde, export)) in cells.iter().zip(outputs) {
        for (acc, row) in mean_w2[i].iter_mut().zip(&cell_rows) {
            *acc += row.w2 / seeds.len() as f64;
        }
        rows.extend(cell_rows);
        if let Some(g) = cell_kde {
            kde.push((samplers[i].label.clone(), g));
        }
        if let Some(c) = export {
            chains.push((samplers[i].label.clone(), seeds[s], c));
        }
    }
    let reference = seeds
        .iter()
        .zip(&references)
        .map(|(&seed, c)| ReferenceRow {
            seed,
            acceptance_rate: c.acceptance_rate().unwrap_or(0.0),
            samples: c.len(),
        })
        .collect();
    Ok(MixtureResult {
        centers: target.centers().to_vec(),
        labels: samplers.iter().map(|s| s.label.clone()).collect(),
        iterations: p.iterations.clone(),
        rows,
        mean_w2,
        reference,
        kde,
        chains,
    })
}

pub fn write(r: &MixtureResult, out: &mut ArtifactWriter) -> Result<()> {
    let centers: Vec<Vec<String>> = r.centers.iter().map(|c| vec![fmt_f64(c[0]), fmt_f64(c[1])]).collect();
    out.write_table("centers.csv", &["a_0".into(), "a_1".into()], &centers)?;
    out.write_rows("w2.csv", &r.rows)?;
    let mut header = vec!["sampler".to_string()];
    header.extend(r.iterations.iter().map(|k| format!("iterations={k}")));
    let table: Vec<Vec<String>> = r
        .labels
        .iter()
        .zip(&r.mean_w2)
        .map(|(l, row)| {
            let mut rec = vec![l.clone()];
            rec.extend(row.iter().map(|&v| fmt_f64(v)));
            rec
        })
        .collect();
    out.write_table("w2_table.csv", &header, &table)?;
    for (label, grid) in &r.kde {
        out.write_with(&format!("kde_{label}.csv"), |buf| Ok(grid.write_csv(buf)?))?;
    }
    for (label, seed, chain) in &r.chains {
        out.write_with(
            &format!("chain_{label}_seed{seed}.csv"),
            |buf| Ok(chain.write_csv(buf)?),
        )?;
    }
    Ok(())
}
