//! Denoising a scalar field sampled at scattered locations with the
//! Tikhonov filter `I + αL_sym` on a k-nearest-neighbor graph.

use std::sync::Arc;

use rayon::prelude::*;
use sdn_inverse::design::denoise_filter;
use sdn_inverse::io::{open, read_points};
use sdn_inverse::seed::derive_seed;
use sdn_inverse::solver::snr_db;
use sdn_inverse::{direct_solve_oracle, filter::norm2, Graph, Point, Signal};

use crate::aggregate::{aggregate, settles_within, Metric, TrialAggregate, TrialResult, TrialSeeds};
use crate::config::{Scenario, ScenarioConfig, SnrReference};
use crate::error::{ExpError, Result};
use crate::runner::{run_instance, RunOptions};
use crate::signals::{add_uniform_noise, synthetic_field, uniform_points};

/// Distance in dB from the limit SNR that counts as converged.
pub const SNR_SETTLE_DB: f64 = 0.1;

/// Locations with clean per-location values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    /// `"synthetic"` or the source file name.
    pub source: String,
}

impl Dataset {
    /// `n` uniform locations carrying [`synthetic_field`].
    pub fn synthetic(n: usize, seed: u64) -> Dataset {
        let points = uniform_points(n, seed);
        let values = points.iter().map(|&p| synthetic_field(p)).collect();
        Dataset {
            points,
            values,
            source: "synthetic".into(),
        }
    }

    /// Reads `id,x,y,value`.
    pub fn from_csv(path: &std::path::Path) -> Result<Dataset> {
        let table = read_points(open(path)?)?;
        let values = table.values.ok_or_else(|| {
            ExpError::Core(sdn_inverse::Error::Parse {
                line: 1,
                message: "denoising needs a 'value' column".into(),
            })
        })?;
        Ok(Dataset {
            points: table.points,
            values,
            source: path.display().to_string(),
        })
    }

    /// The configured points file, or a synthetic dataset of `cfg.n` points.
    pub fn for_config(cfg: &ScenarioConfig) -> Result<Dataset> {
        match &cfg.points {
            Some(p) => Dataset::from_csv(p),
            None => Ok(Dataset::synthetic(cfg.n, derive_seed(cfg.master_seed, 0, "dataset"))),
        }
    }
}

pub fn run_denoise(cfg: &ScenarioConfig, data: &Dataset) -> Result<TrialAggregate> {
    if cfg.scenario != Scenario::Denoise {
        return Err(ExpError::config("run_denoise needs scenario denoise"));
    }
    if data.points.len() <= cfg.k {
        return Err(ExpError::config(format!(
            "{} locations cannot support k = {}",
            data.points.len(),
            cfg.k
        )));
    }
    let graph = Arc::new(Graph::knn(&data.points, cfg.k)?);
    let h = denoise_filter(&graph, cfg.alpha)?;
    let clean = Signal::new(Arc::clone(&graph), data.values.clone())?;

    let outcomes: Vec<_> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<_> {
            let noise_seed = derive_seed(cfg.master_seed, trial as u64, "noise");
            let b = add_uniform_noise(&clean, cfg.eta, noise_seed)?;
            let oracle = direct_solve_oracle(&h, &b)?;
            let mut r = vec![0.0; h.n()];
            h.apply_to(oracle.values(), &mut r);
            r.iter_mut().zip(b.values()).for_each(|(ri, bi)| *ri -= bi);
            let oracle_residual = norm2(&r) / b.norm2();
            let reference = match cfg.snr_reference {
                SnrReference::Clean => &clean,
                SnrReference::Oracle => &oracle,
            };
            let diff: Vec<f64> = oracle
                .values()
                .iter()
                .zip(reference.values())
                .map(|(a, b)| a - b)
                .collect();
            let limit = snr_db(norm2(&diff) / reference.norm2());
            let opts = RunOptions {
                methods: &cfg.methods,
                iterations: cfg.m,
                exact_spectra: cfg.exact_spectra,
                distributed: cfg.distributed,
                record_messages: cfg.distributed && trial == 0,
                epoch: 0,
            };
            let run = run_instance(&h, &b, reference, &opts)?;
            let seeds = TrialSeeds {
                trial,
                graph: 0,
                graph_accepted: None,
                filter: 0,
                signal: noise_seed,
            };
            Ok((
                TrialResult {
                    seeds,
                    condition_number: run.spectrum.map(|s| s.condition_number()),
                    runs: run.runs,
                },
                limit,
                oracle_residual,
                run.log,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let limit = outcomes.iter().map(|o| o.1).sum::<f64>() / outcomes.len() as f64;
    let worst_residual = outcomes.iter().map(|o| o.2).fold(0.0, f64::max);
    let mut logs = Vec::new();
    let results: Vec<TrialResult> = outcomes
        .into_iter()
        .map(|(r, _, _, log)| {
            logs.push(log);
            r
        })
        .collect();
    let rule = format!("first m after which mean SNR(m) stays within {SNR_SETTLE_DB} dB of the limit");
    let mut agg = aggregate(
        cfg,
        Metric::Snr,
        &results,
        |c| settles_within(c, limit, SNR_SETTLE_DB),
        &rule,
    );
    agg.extra.insert("limit_snr_db".into(), limit.into());
    agg.extra
        .insert("oracle_relative_residual".into(), worst_residual.into());
    agg.extra.insert("dataset".into(), data.source.clone().into());
    agg.extra.insert("vertices".into(), graph.n().into());
    agg.extra.insert("edges".into(), graph.edge_count().into());
    if cfg.distributed {
        let messages: usize = logs.iter().flatten().map(|l| l.total_messages()).sum();
        agg.extra.insert("total_messages".into(), messages.into());
        agg.roundlog = logs.into_iter().next().flatten();
    }
    Ok(agg)
}
