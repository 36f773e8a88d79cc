//! Experiment runners. Each module exposes a `compute` function returning
//! plain result structs and a `write` function turning them into artifacts.

pub mod blr;
pub mod bounds_sweep;
pub mod gamma_table;
pub mod gauss2d;
pub mod mixing;
pub mod mixture;
pub mod variance_table;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use lssgld::targets::{parse_libsvm, LabelRule, LabeledData, LibsvmOptions};

use crate::config::{validate_config, DatasetParams, ExperimentConfig, ExperimentKind};
use crate::output::ArtifactWriter;

/// Outcome of [`run_experiment`].
#[derive(Debug)]
pub struct RunReport {
    pub experiment: ExperimentKind,
    pub output_dir: PathBuf,
    /// Artifact paths relative to `output_dir`, `summary.toml` last.
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Summary<'a, R: Serialize> {
    experiment: ExperimentKind,
    seeds: Vec<u64>,
    files: Vec<String>,
    results: &'a R,
    config: &'a ExperimentConfig,
}

/// Validates `cfg`, runs it and writes every artifact plus `summary.toml`
/// under `output_dir`. Identical configs give byte-identical files.
pub fn run_experiment(cfg: &ExperimentConfig, output_dir: &Path) -> Result<RunReport> {
    validate_config(cfg)?;
    let mut out = ArtifactWriter::create(output_dir)?;
    match cfg.experiment {
        ExperimentKind::Gauss2d => {
            let r = gauss2d::compute(cfg)?;
            gauss2d::write(&r, &mut out)?;
            write_summary(cfg, &r.rows, &mut out)?;
        }
        ExperimentKind::Mixture => {
            let r = mixture::compute(cfg)?;
            mixture::write(&r, &mut out)?;
            write_summary(cfg, &r.summary(), &mut out)?;
        }
        ExperimentKind::Mixing => {
            let r = mixing::compute(cfg)?;
            mixing::write(&r, &mut out)?;
            write_summary(cfg, &r.mean_rows(), &mut out)?;
        }
        ExperimentKind::Blr => {
            let r = blr::compute(cfg)?;
            blr::write(&r, &mut out)?;
            write_summary(cfg, &r.final_rows(), &mut out)?;
        }
        ExperimentKind::VarianceTable => {
            let r = variance_table::compute(cfg)?;
            variance_table::write(&r, &mut out)?;
            write_summary(cfg, &r, &mut out)?;
        }
        ExperimentKind::GammaTable => {
            let r = gamma_table::compute(&cfg.gamma_table)?;
            gamma_table::write(&r, &mut out)?;
            write_summary(cfg, &r.rows, &mut out)?;
        }
        ExperimentKind::BoundsSweep => {
            let r = bounds_sweep::compute(&cfg.bounds_sweep)?;
            bounds_sweep::write(&r, &mut out)?;
            write_summary(cfg, &r, &mut out)?;
        }
    }
    Ok(RunReport {
        experiment: cfg.experiment,
        output_dir: out.root().to_path_buf(),
        files: out.files().to_vec(),
    })
}

#[derive(Serialize)]
struct Rows<'a, R: Serialize> {
    rows: &'a R,
}

fn write_summary<R: Serialize>(cfg: &ExperimentConfig, results: &R, out: &mut ArtifactWriter) -> Result<()> {
    let mut files: Vec<String> = out.files().iter().map(|p| p.display().to_string()).collect();
    files.push("summary.toml".into());
    let summary = Summary {
        experiment: cfg.experiment,
        seeds: cfg.seeds(),
        files,
        results: &Rows { rows: results },
        config: cfg,
    };
    let text = toml::to_string(&summary).context("cannot serialize run summary")?;
    out.write_bytes("summary.toml", text.as_bytes())?;
    Ok(())
}

/// Runs `f` over `cells` on the rayon pool, keeping input order.
pub(crate) fn par_cells<T: Sync, R: Send>(cells: &[T], f: impl Fn(&T) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    cells.par_iter().map(f).collect()
}

/// Loads the training set and the optional test set. Without a training
/// file, a seeded synthetic logistic dataset is generated and split.
pub fn load_data(p: &DatasetParams) -> Result<(LabeledData, Option<LabeledData>)> {
    let opts = LibsvmOptions {
        declared_dim: Some(p.declared_dim),
        label_rule: LabelRule {
            positive: p.positive_label,
        },
        ..Default::default()
    };
    let read = |path: &Path| -> Result<LabeledData> {
        let f = File::open(path).with_context(|| format!("cannot open dataset {}", path.display()))?;
        parse_libsvm(BufReader::new(f), &opts).with_context(|| format!("cannot parse dataset {}", path.display()))
    };
    match &p.train {
        Some(train) => {
            let train = read(train)?;
            let test = p.test.as_deref().map(read).transpose()?;
            Ok((train, test))
        }
        None => {
            let all = LabeledData::synthetic_logistic(
                p.synthetic_train + p.synthetic_test,
                p.declared_dim,
                p.synthetic_seed,
            )?;
            if p.synthetic_test == 0 {
                return Ok((all, None));
            }
            let (train, test) = all.split_at(p.synthetic_train)?;
            Ok((train, Some(test)))
        }
    }
}
