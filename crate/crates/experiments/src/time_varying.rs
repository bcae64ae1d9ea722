//! Inverse filtering of a filter that changes between epochs on a fixed
//! network. Every epoch the agents rebuild their preconditioner from the new
//! local entries before iterating.

use std::sync::Arc;

use sdn_inverse::design::fig1_filter;
use sdn_inverse::sdn::RoundLog;
use sdn_inverse::seed::derive_seed;
use sdn_inverse::{direct_solve_oracle, Graph};

use crate::aggregate::{aggregate, first_at_or_below, EpochRow, Metric, TrialAggregate, TrialResult, TrialSeeds};
use crate::config::{Scenario, ScenarioConfig};
use crate::error::{ExpError, Result};
use crate::fig1::ERROR_MILESTONE;
use crate::runner::{renumber, run_instance, RunOptions};
use crate::signals::{add_uniform_noise, blockwise_polynomial};

pub fn run_time_varying(cfg: &ScenarioConfig) -> Result<TrialAggregate> {
    if cfg.scenario != Scenario::TimeVarying {
        return Err(ExpError::config("run_time_varying needs scenario time_varying"));
    }
    let graph_seed = derive_seed(cfg.master_seed, 0, "graph");
    let signal_seed = derive_seed(cfg.master_seed, 0, "signal");
    let graph = Arc::new(Graph::random_geometric(cfg.n, cfg.radius, graph_seed)?);
    let x = add_uniform_noise(&blockwise_polynomial(&graph)?, cfg.eta, signal_seed)?;

    let mut results = Vec::with_capacity(cfg.epochs);
    let mut rows = Vec::new();
    let mut log: Option<RoundLog> = None;
    for epoch in 0..cfg.epochs {
        let filter_seed = derive_seed(cfg.master_seed, epoch as u64, "filter");
        let h = fig1_filter(&graph, cfg.gamma, filter_seed)?;
        let y = h.apply(&x)?;
        let reference = direct_solve_oracle(&h, &y)?;
        let opts = RunOptions {
            methods: &cfg.methods,
            iterations: cfg.m,
            exact_spectra: cfg.exact_spectra,
            distributed: true,
            record_messages: cfg.distributed,
            epoch,
        };
        let run = run_instance(&h, &y, &reference, &opts)?;
        for r in &run.runs {
            let (messages, rounds) = r.traffic.expect("network runs report traffic");
            rows.push(EpochRow {
                epoch,
                method: r.method,
                final_relative_error: r
                    .trace
                    .records
                    .last()
                    .and_then(|x| x.relative_error)
                    .unwrap_or(f64::NAN),
                radius: r.radius,
                messages,
                rounds,
            });
        }
        let epoch_log = run.log.expect("network runs produce a log");
        log = Some(match log {
            Some(mut acc) => {
                let base = acc.rounds.len();
                acc.rounds.extend(renumber(epoch_log, base).rounds);
                acc
            }
            None => epoch_log,
        });
        results.push(TrialResult {
            seeds: TrialSeeds {
                trial: epoch,
                graph: graph_seed,
                graph_accepted: graph.accepted_seed(),
                filter: filter_seed,
                signal: signal_seed,
            },
            condition_number: run.spectrum.map(|s| s.condition_number()),
            runs: run.runs,
        });
    }
    let mut agg = aggregate(
        cfg,
        Metric::E2,
        &results,
        |c| first_at_or_below(c, ERROR_MILESTONE),
        "first m with mean E2(m) <= 0.05 over epochs",
    );
    let log = log.expect("at least one epoch");
    agg.extra.insert("total_messages".into(), log.total_messages().into());
    agg.extra.insert("total_rounds".into(), log.rounds.len().into());
    agg.extra.insert("vertices".into(), graph.n().into());
    agg.epochs = rows;
    if cfg.distributed {
        agg.roundlog = Some(log);
    }
    Ok(agg)
}
