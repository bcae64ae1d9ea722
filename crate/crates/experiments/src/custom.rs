//! A user-supplied graph, filter and observation.

use std::sync::Arc;

use sdn_inverse::io::{open, read_edges, read_filter, read_signal_values};
use sdn_inverse::{direct_solve_oracle, Graph, Signal};

use crate::aggregate::{aggregate, first_at_or_below, Metric, TrialAggregate, TrialResult, TrialSeeds};
use crate::config::{Scenario, ScenarioConfig};
use crate::error::{ExpError, Result};
use crate::fig1::ERROR_MILESTONE;
use crate::runner::{run_instance, RunOptions};

pub fn run_custom(cfg: &ScenarioConfig) -> Result<TrialAggregate> {
    if cfg.scenario != Scenario::Custom {
        return Err(ExpError::config("run_custom needs scenario custom"));
    }
    let need = |p: &Option<std::path::PathBuf>, key: &str| {
        p.clone()
            .ok_or_else(|| ExpError::config(format!("custom scenario needs '{key}'")))
    };
    let (edges, filter, signal) = (
        need(&cfg.edges, "edges")?,
        need(&cfg.filter, "filter")?,
        need(&cfg.signal, "signal")?,
    );
    let y_values = read_signal_values(open(&signal)?)?;
    let graph = Arc::new(Graph::from_edges(y_values.len(), read_edges(open(&edges)?)?, None)?);
    let h = read_filter(&graph, open(&filter)?)?;
    let y = Signal::new(Arc::clone(&graph), y_values)?;
    let reference = direct_solve_oracle(&h, &y)?;
    let opts = RunOptions {
        methods: &cfg.methods,
        iterations: cfg.m,
        exact_spectra: cfg.exact_spectra,
        distributed: cfg.distributed,
        record_messages: cfg.distributed,
        epoch: 0,
    };
    let run = run_instance(&h, &y, &reference, &opts)?;
    let result = TrialResult {
        seeds: TrialSeeds {
            trial: 0,
            graph: 0,
            graph_accepted: None,
            filter: 0,
            signal: 0,
        },
        condition_number: run.spectrum.map(|s| s.condition_number()),
        runs: run.runs,
    };
    let mut agg = aggregate(
        cfg,
        Metric::E2,
        std::slice::from_ref(&result),
        |c| first_at_or_below(c, ERROR_MILESTONE),
        "first m with E2(m) <= 0.05",
    );
    agg.extra.insert("vertices".into(), graph.n().into());
    agg.extra.insert("width".into(), h.width().into());
    if let Some(log) = run.log {
        agg.extra.insert("total_messages".into(), log.total_messages().into());
        agg.roundlog = Some(log);
    }
    Ok(agg)
}
