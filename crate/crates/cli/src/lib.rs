//! Configuration-driven experiment runner for the `lssgld` samplers.
//!
//! A run is described by one TOML document (see [`config::ExperimentConfig`])
//! and writes CSV artifacts plus a `summary.toml` into an output directory.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{validate_config, ConfigErrors, ExperimentConfig, ExperimentKind, FieldError, SamplerEntry};
pub use experiments::{run_experiment, RunReport};
