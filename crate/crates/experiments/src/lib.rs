//! Experiment harness: seeded multi-trial scenarios for the inverse
//! filtering solvers, with plot-ready CSV output.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod config;
pub mod custom;
pub mod denoise;
pub mod error;
pub mod fig1;
pub mod output;
pub mod runner;
pub mod signals;
pub mod time_varying;

pub use aggregate::{MethodAggregate, TrialAggregate};
pub use config::{Overrides, Scenario, ScenarioConfig, SnrReference};
pub use error::{ExpError, Result};

/// Runs the configured scenario. The denoising scenario reads `cfg.points`
/// when set and otherwise synthesizes its dataset.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<TrialAggregate> {
    match cfg.scenario {
        Scenario::Fig1 => fig1::run_fig1(cfg),
        Scenario::Denoise => denoise::run_denoise(cfg, &denoise::Dataset::for_config(cfg)?),
        Scenario::TimeVarying => time_varying::run_time_varying(cfg),
        Scenario::Custom => custom::run_custom(cfg),
    }
}
