//! Bayesian logistic regression: negative log-likelihood and accuracy of the
//! moving-average parameter along each chain.

use anyhow::Result;
use serde::Serialize;

use lssgld::diagnostics::{nll_accuracy, running_mean, windowed_mean};
use lssgld::targets::{GammaPrior, LabeledData};
use lssgld::{run_chain, BlrTarget};

use crate::config::ExperimentConfig;
use crate::output::ArtifactWriter;

use super::{load_data, par_cells};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub label: String,
    pub kind: String,
    pub sigma: f64,
    pub eta: f64,
    pub seed: u64,
    pub iteration: usize,
    pub train_nll: f64,
    pub train_accuracy: f64,
    pub test_nll: Option<f64>,
    pub test_accuracy: Option<f64>,
}

#[derive(Debug)]
pub struct BlrResult {
    pub n_train: usize,
    pub n_test: Option<usize>,
    pub rows: Vec<TraceRow>,
}

impl BlrResult {
    /// The last trace row of every (sampler, seed) cell.
    pub fn final_rows(&self) -> Vec<TraceRow> {
        let mut out: Vec<TraceRow> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some(last) if last.label == r.label && last.seed == r.seed => *last = r.clone(),
                _ => out.push(r.clone()),
            }
        }
        out
    }
}

pub fn compute(cfg: &ExperimentConfig) -> Result<BlrResult> {
    let p = &cfg.blr;
    let (train, test) = load_data(&p.data)?;
    compute_on(cfg, train, test)
}

/// As [`compute`], on already loaded data.
pub fn compute_on(cfg: &ExperimentConfig, train: LabeledData, test: Option<LabeledData>) -> Result<BlrResult> {
    let p = &cfg.blr;
    let n_train = train.len();
    let n_test = test.as_ref().map(LabeledData::len);
    let target = BlrTarget::new(train, GammaPrior::default());
    let samplers = cfg.resolved_samplers();
    let seeds = cfg.seeds();
    let cells: Vec<(usize, u64)> = (0..samplers.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();

    let traces = par_cells(&cells, |&(i, seed)| {
        let r = &samplers[i];
        let spec = r.spec.clone().with_seed(seed);
        let chain = run_chain(&spec, &target)?;
        let averages = match p.average_window {
            Some(w) => windowed_mean(&chain.samples, w),
            None => running_mean(&chain.samples),
        };
        let mut rows = Vec::new();
        for (j, (avg, &t)) in averages.iter().zip(&chain.steps).enumerate() {
            if (j + 1) % p.trace_every != 0 && j + 1 != averages.len() {
                continue;
            }
            let (train_nll, train_accuracy) = nll_accuracy(target.data(), avg)?;
            let test_eval = test.as_ref().map(|d| nll_accuracy(d, avg)).transpose()?;
            rows.push(TraceRow {
                label: r.label.clone(),
                kind: spec.kind.to_string(),
                sigma: r.sigma,
                eta: spec.eta,
                seed,
                iteration: t,
                train_nll,
                train_accuracy,
                test_nll: test_eval.map(|e| e.0),
                test_accuracy: test_eval.map(|e| e.1),
            });
        }
        Ok(rows)
    })?;
    Ok(BlrResult {
        n_train,
        n_test,
        rows: traces.into_iter().flatten().collect(),
    })
}

pub fn write(r: &BlrResult, out: &mut ArtifactWriter) -> Result<()> {
    out.write_rows("trace.csv", &r.rows)?;
    Ok(())
}
