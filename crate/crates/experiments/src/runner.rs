//! Runs a set of methods on one instance and records traces, spectral
//! radii and error envelopes.

use std::sync::Arc;

use sdn_inverse::dense;
use sdn_inverse::sdn::{gather, AgentState, Network, RoundLog};
use sdn_inverse::solver::{
    measure, optimal_step_from, solve_with, trace_from_records, IterationParams, SolveStatus, DEFAULT_DIVERGENCE_FACTOR,
};
use sdn_inverse::{iteration_matrix, GraphFilter, Method, PowerConfig, Signal, SolveTrace, SolverConfig};

use crate::error::Result;

/// Extreme singular values of `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpectrum {
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl FilterSpectrum {
    /// Dense route; uses the symmetric eigensolver when `H = Hᵀ`.
    pub fn exact(h: &GraphFilter) -> FilterSpectrum {
        let m = dense::to_matrix(h);
        let sv: Vec<f64> = if h.worst_asymmetry().is_none() {
            let mut a: Vec<f64> = dense::symmetric_eigenvalues(&m).into_iter().map(f64::abs).collect();
            a.sort_by(|x, y| y.total_cmp(x));
            a
        } else {
            dense::singular_values(&m)
        };
        FilterSpectrum {
            sigma_max: sv[0],
            sigma_min: *sv.last().expect("non-empty filter"),
        }
    }

    pub fn estimated(h: &GraphFilter, power: &PowerConfig) -> FilterSpectrum {
        let sv = sdn_inverse::extreme_singular_values(h, power);
        FilterSpectrum {
            sigma_max: sv.max,
            sigma_min: sv.min,
        }
    }

    pub fn condition_number(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }
}

/// One method's result on one instance.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub trace: SolveTrace,
    pub x: Vec<f64>,
    /// Spectral radius of the error-propagation operator.
    pub radius: Option<f64>,
    /// Per-iteration upper bound on `E₂(m)` implied by the radius in the
    /// method's weighted norm (PGDA and SPGDA only).
    pub envelope: Option<Vec<f64>>,
    /// `(messages, rounds)` when run on the network simulator.
    pub traffic: Option<(usize, usize)>,
}

impl MethodRun {
    pub fn diverged(&self) -> bool {
        self.trace.status == SolveStatus::Diverged
    }
}

pub struct RunOptions<'a> {
    pub methods: &'a [Method],
    pub iterations: usize,
    pub exact_spectra: bool,
    pub distributed: bool,
    /// Record individual messages in the returned log.
    pub record_messages: bool,
    /// Epoch stamped on logged rounds.
    pub epoch: usize,
}

pub struct InstanceRun {
    pub spectrum: Option<FilterSpectrum>,
    pub runs: Vec<MethodRun>,
    pub log: Option<RoundLog>,
}

/// Solves `H x = y` with every requested method from a zero start.
pub fn run_instance(h: &GraphFilter, y: &Signal, reference: &Signal, opts: &RunOptions) -> Result<InstanceRun> {
    let power = PowerConfig::default();
    let spectrum = if opts.exact_spectra {
        Some(FilterSpectrum::exact(h))
    } else if opts.methods.contains(&Method::Opgd) {
        Some(FilterSpectrum::estimated(h, &power))
    } else {
        None
    };
    let mut log: Option<RoundLog> = None;
    let mut runs = Vec::with_capacity(opts.methods.len());
    for &method in opts.methods {
        let step = match (method, spectrum) {
            (Method::Opgd, Some(s)) => Some(optimal_step_from(s.sigma_max, s.sigma_min)?),
            _ => None,
        };
        let params = IterationParams::prepare(h, method, step, &power)?;
        let radius = opts
            .exact_spectra
            .then(|| iteration_matrix(h, &params).dense_spectral_radius());
        let weight = params.error_weight();
        let cfg = SolverConfig::new(method, opts.iterations);
        let (trace, x, traffic) = if opts.distributed && matches!(method, Method::Pgda | Method::Spgda) {
            let (trace, x, l) = run_on_network(h, y, reference, method, opts, weight.as_deref())?;
            let traffic = (l.total_messages(), l.rounds.len());
            match &mut log {
                Some(acc) => acc.rounds.extend(renumber(l, acc.rounds.len()).rounds),
                None => log = Some(l),
            }
            (trace, x, Some(traffic))
        } else {
            let sol = solve_with(h, y, &cfg, &params, Some(reference))?;
            (sol.trace, sol.x.into_values(), None)
        };
        let envelope = match (radius, &weight) {
            (Some(r), Some(w)) => {
                let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
                let scale = trace.records[0].weighted_error.expect("reference given") / (wmin * reference.norm2());
                Some((0..=opts.iterations).map(|m| r.powi(m as i32) * scale).collect())
            }
            _ => None,
        };
        runs.push(MethodRun {
            method,
            trace,
            x,
            radius,
            envelope,
            traffic,
        });
    }
    Ok(InstanceRun { spectrum, runs, log })
}

pub(crate) fn renumber(mut log: RoundLog, offset: usize) -> RoundLog {
    for r in &mut log.rounds {
        r.index += offset;
    }
    log
}

/// Runs PGDA or SPGDA through the simulator one iteration at a time so the
/// observer can record the same metrics as the centralized solver.
fn run_on_network(
    h: &GraphFilter,
    y: &Signal,
    reference: &Signal,
    method: Method,
    opts: &RunOptions,
    weight: Option<&[f64]>,
) -> Result<(SolveTrace, Vec<f64>, RoundLog)> {
    let mut net = Network::new(Arc::clone(h.graph()), h.width().max(1))?.with_message_recording(opts.record_messages);
    net.set_epoch(opts.epoch);
    let mut agents: Vec<AgentState> = net.distribute(h, y)?;
    match method {
        Method::Pgda => net.distributed_preconditioner(&mut agents)?,
        _ => net.distributed_spgda_setup(&mut agents)?,
    }
    let yv = y.values();
    let mut x = gather(&agents);
    let first = measure(0, h, &x, yv, Some(reference), weight);
    let r0 = first.residual;
    let mut records = vec![first];
    let mut status = SolveStatus::MaxIter;
    for m in 1..=opts.iterations {
        match method {
            Method::Pgda => net.run_distributed_pgda(&mut agents, 1)?,
            _ => net.run_distributed_spgda(&mut agents, 1)?,
        }
        x = gather(&agents);
        let rec = measure(m, h, &x, yv, Some(reference), weight);
        if !rec.residual.is_finite() {
            return Err(sdn_inverse::Error::NonFinite { iteration: m }.into());
        }
        let r = rec.residual;
        records.push(rec);
        if r0 > 0.0 && r > DEFAULT_DIVERGENCE_FACTOR * r0 {
            status = SolveStatus::Diverged;
            break;
        }
    }
    Ok((trace_from_records(method, records, status), x, net.log().clone()))
}
