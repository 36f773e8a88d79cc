//! Maximum smoothed stochastic-gradient variance over a grid of `σ` and batch
//! sizes, along one full-batch SGLD path.

use anyhow::Result;
use serde::Serialize;

use lssgld::diagnostics::gradient_variance_profile;
use lssgld::rng::derive_seed;
use lssgld::samplers::SamplerKind;
use lssgld::targets::{GammaPrior, LabeledData};
use lssgld::{run_chain, BlrTarget, LaplacianOperator, SamplerSpec, TargetModel};

use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, ArtifactWriter};

use super::{load_data, par_cells};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceResult {
    pub sigmas: Vec<f64>,
    pub batch_sizes: Vec<usize>,
    /// `values[σ][B]`.
    pub values: Vec<Vec<f64>>,
    pub path_points: usize,
}

pub fn compute(cfg: &ExperimentConfig) -> Result<VarianceResult> {
    let (train, _) = load_data(&cfg.variance_table.data)?;
    compute_on(cfg, train)
}

pub fn compute_on(cfg: &ExperimentConfig, train: LabeledData) -> Result<VarianceResult> {
    let p = &cfg.variance_table;
    let seed = cfg.seeds()[0];
    let target = BlrTarget::new(train, GammaPrior::default());
    let n = target.num_components();

    let spec = SamplerSpec::new(SamplerKind::Sgld, p.path_eta, n, p.path_iterations, seed);
    let chain = run_chain(&spec, &target)?;
    let path: Vec<Vec<f64>> = chain
        .samples
        .into_iter()
        .skip(p.path_stride - 1)
        .step_by(p.path_stride)
        .collect();

    let cells: Vec<(usize, usize)> = (0..p.sigmas.len())
        .flat_map(|i| (0..p.batch_sizes.len()).map(move |j| (i, j)))
        .collect();
    let flat = par_cells(&cells, |&(i, j)| {
        let op = LaplacianOperator::build(target.dim(), p.sigmas[i])?;
        Ok(gradient_variance_profile(
            &target,
            &path,
            &op,
            p.batch_sizes[j],
            p.repeats,
            derive_seed(seed, 1),
        )?)
    })?;
    let values = flat.chunks(p.batch_sizes.len()).map(<[f64]>::to_vec).collect();
    Ok(VarianceResult {
        sigmas: p.sigmas.clone(),
        batch_sizes: p.batch_sizes.clone(),
        values,
        path_points: path.len(),
    })
}

pub fn write(r: &VarianceResult, out: &mut ArtifactWriter) -> Result<()> {
    let mut header = vec!["sigma".to_string()];
    header.extend(r.batch_sizes.iter().map(|b| format!("B={b}")));
    let rows: Vec<Vec<String>> = r
        .sigmas
        .iter()
        .zip(&r.values)
        .map(|(s, row)| {
            let mut rec = vec![fmt_f64(*s)];
            rec.extend(row.iter().map(|&v| format!("{v:.6e}")));
            rec
        })
        .collect();
    out.write_table("variance_table.csv", &header, &rows)?;
    Ok(())
}
