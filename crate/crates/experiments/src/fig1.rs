//! Convergence study on random geometric graphs with the Gaussian-kernel
//! filter `H_o + L_sym²`.

use std::sync::Arc;

use rayon::prelude::*;
use sdn_inverse::design::fig1_filter;
use sdn_inverse::seed::derive_seed;
use sdn_inverse::{direct_solve_oracle, Graph, GraphFilter, Signal};

use crate::aggregate::{aggregate, first_at_or_below, Metric, TrialAggregate, TrialResult, TrialSeeds};
use crate::config::{Scenario, ScenarioConfig};
use crate::error::{ExpError, Result};
use crate::runner::{run_instance, RunOptions};
use crate::signals::{add_uniform_noise, blockwise_polynomial};

/// Relative-error level whose first crossing is reported per method.
pub const ERROR_MILESTONE: f64 = 0.05;

/// One random instance: graph, filter, clean signal plus noise, and `y = Hx`.
pub struct Fig1Instance {
    pub graph: Arc<Graph>,
    pub filter: GraphFilter,
    pub x: Signal,
    pub y: Signal,
    pub seeds: TrialSeeds,
}

pub fn fig1_instance(cfg: &ScenarioConfig, trial: usize) -> Result<Fig1Instance> {
    let t = trial as u64;
    let seeds = TrialSeeds {
        trial,
        graph: derive_seed(cfg.master_seed, t, "graph"),
        graph_accepted: None,
        filter: derive_seed(cfg.master_seed, t, "filter"),
        signal: derive_seed(cfg.master_seed, t, "signal"),
    };
    let graph = Arc::new(Graph::random_geometric(cfg.n, cfg.radius, seeds.graph)?);
    let seeds = TrialSeeds {
        graph_accepted: graph.accepted_seed(),
        ..seeds
    };
    let filter = fig1_filter(&graph, cfg.gamma, seeds.filter)?;
    let x = add_uniform_noise(&blockwise_polynomial(&graph)?, cfg.eta, seeds.signal)?;
    let y = filter.apply(&x)?;
    Ok(Fig1Instance {
        graph,
        filter,
        x,
        y,
        seeds,
    })
}

pub fn run_fig1(cfg: &ScenarioConfig) -> Result<TrialAggregate> {
    if cfg.scenario != Scenario::Fig1 {
        return Err(ExpError::config("run_fig1 needs scenario fig1"));
    }
    let outcomes: Vec<_> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let inst = fig1_instance(cfg, trial)?;
            let reference = direct_solve_oracle(&inst.filter, &inst.y)?;
            let opts = RunOptions {
                methods: &cfg.methods,
                iterations: cfg.m,
                exact_spectra: cfg.exact_spectra,
                distributed: cfg.distributed,
                record_messages: cfg.distributed && trial == 0,
                epoch: 0,
            };
            let run = run_instance(&inst.filter, &inst.y, &reference, &opts)?;
            Ok((
                TrialResult {
                    seeds: inst.seeds,
                    condition_number: run.spectrum.map(|s| s.condition_number()),
                    runs: run.runs,
                },
                run.log,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut logs = Vec::new();
    let results: Vec<TrialResult> = outcomes
        .into_iter()
        .map(|(r, log)| {
            logs.push(log);
            r
        })
        .collect();
    let mut agg = aggregate(
        cfg,
        Metric::E2,
        &results,
        |c| first_at_or_below(c, ERROR_MILESTONE),
        "first m with mean E2(m) <= 0.05",
    );
    if cfg.distributed {
        let messages: usize = logs.iter().flatten().map(|l| l.total_messages()).sum();
        agg.extra.insert("total_messages".into(), messages.into());
        agg.roundlog = logs.into_iter().next().flatten();
    }
    Ok(agg)
}
