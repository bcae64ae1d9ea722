//! Cross-trial statistics.

use sdn_inverse::sdn::RoundLog;
use sdn_inverse::Method;
use serde::Serialize;

use crate::config::{Scenario, ScenarioConfig};
use crate::runner::MethodRun;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Relative error `E₂(m)`.
    E2,
    /// `SNR(m)` in dB.
    Snr,
}

/// Seeds used by one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSeeds {
    pub trial: usize,
    pub graph: u64,
    /// Sub-seed under which a connected graph was accepted.
    pub graph_accepted: Option<u64>,
    pub filter: u64,
    pub signal: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodAggregate {
    #[serde(serialize_with = "ser_method")]
    pub method: Method,
    pub completed: usize,
    pub diverged: usize,
    /// Mean metric per iteration over completed trials.
    #[serde(skip)]
    pub mean_curve: Vec<Option<f64>>,
    pub mean_radius: Option<f64>,
    #[serde(skip)]
    pub radii: Vec<f64>,
    /// First iteration meeting the scenario's milestone rule on the mean curve.
    pub milestone: Option<usize>,
    /// Mean of the per-trial weighted-norm envelopes on `E₂(m)`.
    #[serde(skip)]
    pub mean_envelope: Option<Vec<f64>>,
    /// Whether the mean curve stays below the mean envelope.
    pub envelope_holds: Option<bool>,
}

fn ser_method<S: serde::Serializer>(m: &Method, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(m.as_str())
}

#[derive(Debug, Clone)]
pub struct TrialAggregate {
    pub scenario: Scenario,
    pub metric: Metric,
    pub milestone_rule: String,
    pub trials: usize,
    pub iterations: usize,
    pub methods: Vec<MethodAggregate>,
    pub seeds: Vec<TrialSeeds>,
    pub condition_numbers: Vec<f64>,
    /// Scenario-specific summary fields.
    pub extra: serde_json::Map<String, serde_json::Value>,
    pub roundlog: Option<RoundLog>,
    pub roundlog_values: bool,
    /// Per-epoch results (time-varying scenario only).
    pub epochs: Vec<EpochRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRow {
    pub epoch: usize,
    #[serde(serialize_with = "ser_method")]
    pub method: Method,
    pub final_relative_error: f64,
    pub radius: Option<f64>,
    pub messages: usize,
    pub rounds: usize,
}

impl TrialAggregate {
    pub fn method(&self, m: Method) -> Option<&MethodAggregate> {
        self.methods.iter().find(|a| a.method == m)
    }

    /// Fraction of condition numbers inside `[lo, hi]`.
    pub fn condition_fraction(&self, lo: f64, hi: f64) -> Option<f64> {
        if self.condition_numbers.is_empty() {
            return None;
        }
        let inside = self.condition_numbers.iter().filter(|c| (lo..=hi).contains(*c)).count();
        Some(inside as f64 / self.condition_numbers.len() as f64)
    }
}

/// Per-trial values fed to the accumulator, in trial order.
pub struct TrialResult {
    pub seeds: TrialSeeds,
    pub condition_number: Option<f64>,
    pub runs: Vec<MethodRun>,
}

/// Metric curve of one run.
pub fn curve(run: &MethodRun, metric: Metric) -> Vec<f64> {
    run.trace
        .records
        .iter()
        .map(|r| match metric {
            Metric::E2 => r.relative_error.expect("reference given"),
            Metric::Snr => r.snr.expect("reference given"),
        })
        .collect()
}

/// Aggregates trials; sums run in trial order so results do not depend on
/// how trials were scheduled.
pub fn aggregate(
    cfg: &ScenarioConfig,
    metric: Metric,
    results: &[TrialResult],
    milestone: impl Fn(&[Option<f64>]) -> Option<usize>,
    milestone_rule: &str,
) -> TrialAggregate {
    let len = cfg.m + 1;
    let methods = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let mut sums = vec![0.0; len];
            let mut env_sums = vec![0.0; len];
            let mut has_env = false;
            let mut completed = 0;
            let mut diverged = 0;
            let mut radii = Vec::new();
            for t in results {
                let run = &t.runs[k];
                debug_assert_eq!(run.method, method);
                if let Some(r) = run.radius {
                    radii.push(r);
                }
                if run.diverged() {
                    diverged += 1;
                    continue;
                }
                completed += 1;
                for (s, v) in sums.iter_mut().zip(curve(run, metric)) {
                    *s += v;
                }
                if let Some(env) = &run.envelope {
                    has_env = true;
                    for (s, v) in env_sums.iter_mut().zip(env) {
                        *s += v;
                    }
                }
            }
            let mean_curve: Vec<Option<f64>> = sums
                .iter()
                .map(|s| (completed > 0).then(|| s / completed as f64))
                .collect();
            let mean_envelope =
                (has_env && completed > 0).then(|| env_sums.iter().map(|s| s / completed as f64).collect::<Vec<_>>());
            let envelope_holds = mean_envelope.as_ref().filter(|_| metric == Metric::E2).map(|env| {
                mean_curve
                    .iter()
                    .zip(env)
                    .all(|(c, e)| c.is_none_or(|c| c <= e * (1.0 + 1e-8)))
            });
            let mean_radius = (!radii.is_empty()).then(|| radii.iter().sum::<f64>() / radii.len() as f64);
            MethodAggregate {
                method,
                completed,
                diverged,
                milestone: milestone(&mean_curve),
                mean_curve,
                mean_radius,
                radii,
                mean_envelope,
                envelope_holds,
            }
        })
        .collect();
    TrialAggregate {
        scenario: cfg.scenario,
        metric,
        milestone_rule: milestone_rule.to_string(),
        trials: results.len(),
        iterations: cfg.m,
        methods,
        seeds: results.iter().map(|t| t.seeds.clone()).collect(),
        condition_numbers: results.iter().filter_map(|t| t.condition_number).collect(),
        extra: serde_json::Map::new(),
        roundlog: None,
        roundlog_values: cfg.roundlog_values,
        epochs: Vec::new(),
    }
}

/// First `m` with `curve[m] <= level`.
pub fn first_at_or_below(curve: &[Option<f64>], level: f64) -> Option<usize> {
    curve.iter().position(|c| c.is_some_and(|c| c <= level))
}

/// First `m` from which every later value stays within `tol` of `limit`.
pub fn settles_within(curve: &[Option<f64>], limit: f64, tol: f64) -> Option<usize> {
    let mut start = None;
    for (m, c) in curve.iter().enumerate() {
        match c {
            Some(c) if (c - limit).abs() <= tol => {
                start.get_or_insert(m);
            }
            _ => start = None,
        }
    }
    start
}
