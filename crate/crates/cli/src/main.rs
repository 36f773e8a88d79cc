use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use lssgld_cli::config::{BoundsParams, GammaParams};
use lssgld_cli::experiments::{bounds_sweep, gamma_table};
use lssgld_cli::{run_experiment, validate_config, ConfigErrors, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lssgld", version, about = "Laplacian-smoothing SGLD experiments")]
struct Cli {
    /// Worker threads for experiment cells (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Run a single seed instead of the configured list.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config file and list every invalid field.
    Validate { config: PathBuf },
    /// Print the spectral-average table as CSV.
    GammaTable {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        sigmas: Option<Vec<f64>>,
        /// Also print `d⁻¹ Σ λ⁻¹` in long form.
        #[arg(long)]
        long: bool,
    },
    /// Print bound breakdowns over a sweep of σ as CSV.
    Bounds {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        sigmas: Option<Vec<f64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(errs) = e.downcast_ref::<ConfigErrors>() {
                eprint!("error: {errs}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|e| match e.kind() {
                csv::ErrorKind::Io(io) => io.kind() == std::io::ErrorKind::BrokenPipe,
                _ => false,
            })
    })
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let stdout = std::io::stdout();
    match cli.command {
        Command::Run {
            config,
            output_dir,
            seed,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seeds = Some(vec![seed]);
            }
            let dir = output_dir
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("results").join(cfg.experiment.name()));
            let report = run_experiment(&cfg, &dir)?;
            let mut out = stdout.lock();
            writeln!(out, "{} -> {}", report.experiment, report.output_dir.display())?;
            for f in &report.files {
                writeln!(out, "  {}", f.display())?;
            }
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            validate_config(&cfg)?;
            writeln!(stdout.lock(), "{}: ok ({})", config.display(), cfg.experiment)?;
        }
        Command::GammaTable { dims, sigmas, long } => {
            let defaults = GammaParams::default();
            let p = GammaParams {
                dims: dims.unwrap_or(defaults.dims),
                sigmas: sigmas.unwrap_or(defaults.sigmas),
            };
            let mut cfg = ExperimentConfig::new(lssgld_cli::ExperimentKind::GammaTable);
            cfg.gamma_table = p.clone();
            validate_config(&cfg)?;
            let r = gamma_table::compute(&p)?;
            let mut w = csv::Writer::from_writer(stdout.lock());
            if long {
                for row in &r.rows {
                    w.serialize(row)?;
                }
            } else {
                let (header, rows) = gamma_table::wide_table(&r);
                w.write_record(&header)?;
                for row in rows {
                    w.write_record(&row)?;
                }
            }
            w.flush()?;
        }
        Command::Bounds {
            k,
            eta,
            beta,
            d,
            omega,
            batch_size,
            sigmas,
        } => {
            let defaults = BoundsParams::default();
            let p = BoundsParams {
                k: k.unwrap_or(defaults.k),
                eta: eta.unwrap_or(defaults.eta),
                beta: beta.unwrap_or(defaults.beta),
                d: d.unwrap_or(defaults.d),
                omega: omega.unwrap_or(defaults.omega),
                batch_size: batch_size.unwrap_or(defaults.batch_size),
                sigmas: sigmas.unwrap_or(defaults.sigmas.clone()),
                ..defaults
            };
            let mut cfg = ExperimentConfig::new(lssgld_cli::ExperimentKind::BoundsSweep);
            cfg.bounds_sweep = p.clone();
            validate_config(&cfg)?;
            let r = bounds_sweep::compute(&p)?;
            let mut w = csv::Writer::from_writer(stdout.lock());
            for row in &r.rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
