//! Centralized inverse-filtering iterations.
//!
//! All four methods are instances of the quasi-Newton template
//! `x⁽ᵐ⁾ = x⁽ᵐ⁻¹⁾ - G (H x⁽ᵐ⁻¹⁾ - y)`:
//!
//! | method | `G`            |
//! |--------|----------------|
//! | PGDA   | `P_H⁻² Hᵀ`     |
//! | SPGDA  | `P_sym⁻¹`      |
//! | OpGD   | `β_op Hᵀ`      |
//! | IMIA   | `D̃`            |
//!
//! PGDA and SPGDA are evaluated in exactly the arithmetic order used by the
//! vertex-level implementation in [`crate::sdn`], so the two agree bit for bit.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::dense;
use crate::error::{Error, Result};
use crate::filter::{norm2, GraphFilter, Signal};
use crate::precond::{build_pgda_preconditioner, build_spgda_preconditioner, pgda_weight, DiagonalPreconditioner};
use crate::spectral::{extreme_singular_values, LinearOperator, PowerConfig};

/// Default abort threshold: residual growth relative to the initial residual.
pub const DEFAULT_DIVERGENCE_FACTOR: f64 = 1e6;

/// SNR values are reported no higher than this.
pub const SNR_CAP_DB: f64 = 300.0;

/// Direct solves must reproduce `y` to this relative residual.
pub const ORACLE_RESIDUAL_TOL: f64 = 1e-8;

/// Below this `σ_min / σ_max` the optimal step is refused.
pub const NEAR_SINGULAR_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Pgda,
    Spgda,
    Opgd,
    Imia,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pgda, Method::Spgda, Method::Opgd, Method::Imia];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pgda => "pgda",
            Method::Spgda => "spgda",
            Method::Opgd => "opgd",
            Method::Imia => "imia",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pgda" => Ok(Method::Pgda),
            "spgda" => Ok(Method::Spgda),
            "opgd" => Ok(Method::Opgd),
            "imia" => Ok(Method::Imia),
            other => Err(Error::arg(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Iteration count `M`.
    pub max_iter: usize,
    /// Stop early once `‖Hx - y‖₂ <= residual_tol · ‖y‖₂`.
    pub residual_tol: Option<f64>,
    pub divergence_factor: f64,
    /// Starting iterate; zero when `None`.
    pub initial: Option<Vec<f64>>,
    /// OpGD step length; computed from the extreme singular values when `None`.
    pub step: Option<f64>,
    /// Power-iteration settings used when the step has to be estimated.
    pub power: PowerConfig,
}

impl SolverConfig {
    pub fn new(method: Method, max_iter: usize) -> Self {
        SolverConfig {
            method,
            max_iter,
            residual_tol: None,
            divergence_factor: DEFAULT_DIVERGENCE_FACTOR,
            initial: None,
            step: None,
            power: PowerConfig::default(),
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn with_initial(mut self, x0: Vec<f64>) -> Self {
        self.initial = Some(x0);
        self
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = Some(tol);
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::arg("max_iter must be at least 1"));
        }
        if !(self.divergence_factor > 1.0) {
            return Err(Error::arg("divergence_factor must exceed 1"));
        }
        if let Some(x0) = &self.initial {
            if x0.len() != n {
                return Err(Error::arg("initial iterate has the wrong length"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub m: usize,
    /// `‖H x⁽ᵐ⁾ - y‖₂`.
    pub residual: f64,
    /// `E₂(m) = ‖x⁽ᵐ⁾ - x*‖₂ / ‖x*‖₂`.
    pub relative_error: Option<f64>,
    /// `‖W (x⁽ᵐ⁾ - x*)‖₂` with the method's weight `W`.
    pub weighted_error: Option<f64>,
    /// `-20 log₁₀ E₂(m)`, capped at [`SNR_CAP_DB`].
    pub snr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Diverged,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub method: Method,
    /// Records for `m = 0, 1, ...`; at most `M + 1` entries.
    pub records: Vec<IterationRecord>,
    pub status: SolveStatus,
    /// Geometric-mean contraction over the last few iterations, measured on
    /// weighted errors when a reference is known and on residuals otherwise.
    pub estimated_rate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Signal,
    pub trace: SolveTrace,
}

pub fn snr_db(relative_error: f64) -> f64 {
    if relative_error <= 0.0 {
        SNR_CAP_DB
    } else {
        (-20.0 * relative_error.log10()).min(SNR_CAP_DB)
    }
}

/// Method-specific data needed to run an iteration or form its error
/// propagation operator.
#[derive(Debug, Clone)]
pub enum IterationParams {
    Pgda(DiagonalPreconditioner),
    Spgda(DiagonalPreconditioner),
    Opgd { step: f64 },
    Imia { diag: Vec<f64> },
}

impl IterationParams {
    pub fn prepare(h: &GraphFilter, method: Method, step: Option<f64>, power: &PowerConfig) -> Result<Self> {
        Ok(match method {
            Method::Pgda => IterationParams::Pgda(build_pgda_preconditioner(h)?),
            Method::Spgda => IterationParams::Spgda(build_spgda_preconditioner(h)?),
            Method::Opgd => IterationParams::Opgd {
                step: match step {
                    Some(s) => s,
                    None => optimal_step(h, power)?,
                },
            },
            Method::Imia => IterationParams::Imia {
                diag: imia_diagonal(h)?,
            },
        })
    }

    pub fn method(&self) -> Method {
        match self {
            IterationParams::Pgda(_) => Method::Pgda,
            IterationParams::Spgda(_) => Method::Spgda,
            IterationParams::Opgd { .. } => Method::Opgd,
            IterationParams::Imia { .. } => Method::Imia,
        }
    }

    /// Diagonal weight of the error norm in which the method contracts.
    pub fn error_weight(&self) -> Option<Vec<f64>> {
        match self {
            IterationParams::Pgda(p) => Some(p.values().to_vec()),
            IterationParams::Spgda(p) => Some(p.values().iter().map(|v| v.sqrt()).collect()),
            _ => None,
        }
    }
}

/// `β_op = 2 / (σ_max² + σ_min²)`.
pub fn optimal_step_from(sigma_max: f64, sigma_min: f64) -> Result<f64> {
    if !(sigma_max > 0.0) || sigma_min / sigma_max < NEAR_SINGULAR_RATIO {
        return Err(Error::Singular(format!(
            "filter is near singular (σ_min = {sigma_min:e}, σ_max = {sigma_max:e})"
        )));
    }
    Ok(2.0 / (sigma_max * sigma_max + sigma_min * sigma_min))
}

pub fn optimal_step(h: &GraphFilter, power: &PowerConfig) -> Result<f64> {
    let sv = extreme_singular_values(h, power);
    optimal_step_from(sv.max, sv.min)
}

/// `D̃(i,i) = H(i,i) / Σ_{j ∈ B(i,ω)} |H(i,j)|²`.
pub fn imia_diagonal(h: &GraphFilter) -> Result<Vec<f64>> {
    (0..h.n())
        .map(|i| {
            let hii = h.get(i, i);
            if hii == 0.0 {
                return Err(Error::Singular(format!("zero diagonal entry at vertex {i}")));
            }
            let ss = h.row(i).1.iter().fold(0.0, |acc, v| acc + v * v);
            Ok(hii / ss)
        })
        .collect()
}

/// Dense LU solve of `H x = y`, checked by its residual.
pub fn direct_solve_oracle(h: &GraphFilter, y: &Signal) -> Result<Signal> {
    y.check_graph(h.graph())?;
    let x = dense::lu_solve(&dense::to_matrix(h), y.values())?;
    let mut r = vec![0.0; h.n()];
    h.apply_to(&x, &mut r);
    r.iter_mut().zip(y.values()).for_each(|(ri, yi)| *ri -= yi);
    let (res, ny) = (norm2(&r), y.norm2());
    if !(res <= ORACLE_RESIDUAL_TOL * ny) {
        return Err(Error::Singular(format!(
            "direct solve residual {res:e} exceeds {ORACLE_RESIDUAL_TOL:e}·‖y‖ = {:e}",
            ORACLE_RESIDUAL_TOL * ny
        )));
    }
    Signal::new(Arc::clone(h.graph()), x)
}

/// Error-propagation operator `w_m = T w_{m-1}` of a method:
/// PGDA `I - P⁻¹HᵀHP⁻¹`, SPGDA `I - Ĥ`, OpGD `I - βHᵀH`, IMIA `I - D̃H`.
pub struct IterationOperator<'a> {
    h: &'a GraphFilter,
    ht: GraphFilter,
    params: &'a IterationParams,
}

pub fn iteration_matrix<'a>(h: &'a GraphFilter, params: &'a IterationParams) -> IterationOperator<'a> {
    IterationOperator {
        h,
        ht: h.transpose(),
        params,
    }
}

impl LinearOperator for IterationOperator<'_> {
    fn dim(&self) -> usize {
        self.h.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let mut tmp = vec![0.0; n];
        match self.params {
            IterationParams::Pgda(p) => {
                let scaled: Vec<f64> = x.iter().zip(p.values()).map(|(v, d)| v / d).collect();
                self.h.apply_to(&scaled, &mut tmp);
                self.ht.apply_to(&tmp, out);
                for ((o, xi), d) in out.iter_mut().zip(x).zip(p.values()) {
                    *o = xi - *o / d;
                }
            }
            IterationParams::Spgda(p) => {
                let s: Vec<f64> = p.values().iter().map(|v| v.sqrt()).collect();
                let scaled: Vec<f64> = x.iter().zip(&s).map(|(v, d)| v / d).collect();
                self.h.apply_to(&scaled, out);
                for ((o, xi), d) in out.iter_mut().zip(x).zip(&s) {
                    *o = xi - *o / d;
                }
            }
            IterationParams::Opgd { step } => {
                self.h.apply_to(x, &mut tmp);
                self.ht.apply_to(&tmp, out);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi - step * *o;
                }
            }
            IterationParams::Imia { diag } => {
                self.h.apply_to(x, out);
                for ((o, xi), d) in out.iter_mut().zip(x).zip(diag) {
                    *o = xi - d * *o;
                }
            }
        }
    }
}

impl IterationOperator<'_> {
    /// Dense form; symmetric whenever the method admits a symmetric
    /// similarity form for this filter.
    pub fn to_dense(&self) -> (DMatrix<f64>, bool) {
        let n = self.dim();
        let hm = dense::to_matrix(self.h);
        let eye = DMatrix::<f64>::identity(n, n);
        match self.params {
            IterationParams::Pgda(p) => {
                let mut m = hm;
                for (j, d) in p.values().iter().enumerate() {
                    m.column_mut(j).scale_mut(1.0 / d);
                }
                (eye - m.transpose() * m, true)
            }
            IterationParams::Spgda(p) => {
                let s: Vec<f64> = p.values().iter().map(|v| v.sqrt()).collect();
                let m = DMatrix::from_fn(n, n, |i, j| hm[(i, j)] / (s[i] * s[j]));
                let sym = self.h.worst_asymmetry().is_none();
                (eye - m, sym)
            }
            IterationParams::Opgd { step } => (eye - (hm.transpose() * &hm) * *step, true),
            IterationParams::Imia { diag } => {
                let sym = self.h.worst_asymmetry().is_none() && diag.iter().all(|d| *d > 0.0);
                if sym {
                    let s: Vec<f64> = diag.iter().map(|d| d.sqrt()).collect();
                    (eye - DMatrix::from_fn(n, n, |i, j| s[i] * hm[(i, j)] * s[j]), true)
                } else {
                    (eye - DMatrix::from_fn(n, n, |i, j| diag[i] * hm[(i, j)]), false)
                }
            }
        }
    }

    /// Spectral radius from a dense eigen-decomposition.
    pub fn dense_spectral_radius(&self) -> f64 {
        match self.to_dense() {
            (m, true) => dense::symmetric_spectral_radius(&m),
            (m, false) => dense::spectral_radius(&m),
        }
    }
}

/// Prepared per-iteration kernel.
enum Kernel {
    Pgda {
        /// Row `i` holds `H(j,i) / P(i,i)²` for `j` ascending.
        weights: GraphFilter,
    },
    Spgda {
        /// Row `i` holds `H(i,j) / P_sym(i,i)`.
        rows: GraphFilter,
        y_tilde: Vec<f64>,
    },
    Opgd {
        step: f64,
        ht: GraphFilter,
    },
    Imia {
        diag: Vec<f64>,
    },
}

/// `H(i,j) / P(i,i)` and `y(i) / P(i,i)`.
pub(crate) fn spgda_row_scaling(h: &GraphFilter, p: &[f64], y: &[f64]) -> (GraphFilter, Vec<f64>) {
    let rows = GraphFilter::from_triplets(Arc::clone(h.graph()), h.triplets().map(|(i, j, v)| (i, j, v / p[i])))
        .expect("row scaling of a valid filter");
    let y_tilde = y.iter().zip(p).map(|(yi, pi)| yi / pi).collect();
    (rows, y_tilde)
}

pub(crate) fn pgda_weights(h: &GraphFilter, p: &[f64]) -> GraphFilter {
    let triplets: Vec<_> = h.triplets().map(|(j, i, v)| (i, j, pgda_weight(v, p[i]))).collect();
    GraphFilter::from_triplets(Arc::clone(h.graph()), triplets).expect("transpose of a valid filter")
}

impl Kernel {
    fn new(h: &GraphFilter, params: &IterationParams, y: &[f64]) -> Kernel {
        match params {
            IterationParams::Pgda(p) => Kernel::Pgda {
                weights: pgda_weights(h, p.values()),
            },
            IterationParams::Spgda(p) => {
                let (rows, y_tilde) = spgda_row_scaling(h, p.values(), y);
                Kernel::Spgda { rows, y_tilde }
            }
            IterationParams::Opgd { step } => Kernel::Opgd {
                step: *step,
                ht: h.transpose(),
            },
            IterationParams::Imia { diag } => Kernel::Imia { diag: diag.clone() },
        }
    }

    fn step(&self, h: &GraphFilter, y: &[f64], x: &[f64], next: &mut [f64], scratch: &mut [f64]) {
        match self {
            Kernel::Pgda { weights } => {
                // v(j) = y(j) - Σ_k H(j,k) x(k)
                for (j, v) in scratch.iter_mut().enumerate() {
                    *v = y[j] - h.row_dot(j, x);
                }
                for (i, nx) in next.iter_mut().enumerate() {
                    *nx = x[i] + weights.row_dot(i, scratch);
                }
            }
            Kernel::Spgda { rows, y_tilde } => {
                for (i, nx) in next.iter_mut().enumerate() {
                    *nx = x[i] + y_tilde[i] - rows.row_dot(i, x);
                }
            }
            Kernel::Opgd { step, ht } => {
                for (j, e) in scratch.iter_mut().enumerate() {
                    *e = h.row_dot(j, x) - y[j];
                }
                for (i, nx) in next.iter_mut().enumerate() {
                    *nx = x[i] - step * ht.row_dot(i, scratch);
                }
            }
            Kernel::Imia { diag } => {
                for (i, nx) in next.iter_mut().enumerate() {
                    *nx = x[i] - diag[i] * (h.row_dot(i, x) - y[i]);
                }
            }
        }
    }
}

fn residual_norm(h: &GraphFilter, x: &[f64], y: &[f64]) -> f64 {
    (0..h.n())
        .map(|i| {
            let r = h.row_dot(i, x) - y[i];
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

fn record(
    m: usize,
    h: &GraphFilter,
    x: &[f64],
    y: &[f64],
    reference: Option<(&[f64], f64)>,
    weight: Option<&[f64]>,
) -> IterationRecord {
    let residual = residual_norm(h, x, y);
    let (relative_error, weighted_error, snr) = match reference {
        Some((xs, xs_norm)) => {
            let err = x.iter().zip(xs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let weighted = match weight {
                Some(w) => x
                    .iter()
                    .zip(xs)
                    .zip(w)
                    .map(|((a, b), w)| {
                        let d = w * (a - b);
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt(),
                None => err,
            };
            let rel = err / xs_norm;
            (Some(rel), Some(weighted), Some(snr_db(rel)))
        }
        None => (None, None, None),
    };
    IterationRecord {
        m,
        residual,
        relative_error,
        weighted_error,
        snr,
    }
}

fn estimate_rate(records: &[IterationRecord]) -> Option<f64> {
    let series: Vec<f64> = records.iter().map(|r| r.weighted_error.unwrap_or(r.residual)).collect();
    let last = series.len().checked_sub(1)?;
    let span = last.min(10);
    if span == 0 {
        return None;
    }
    let (a, b) = (series[last - span], series[last]);
    (a > 0.0 && b > 0.0).then(|| (b / a).powf(1.0 / span as f64))
}

/// Runs the configured iteration from `cfg.initial` (zero by default).
pub fn solve(h: &GraphFilter, y: &Signal, cfg: &SolverConfig, reference: Option<&Signal>) -> Result<Solution> {
    let params = IterationParams::prepare(h, cfg.method, cfg.step, &cfg.power)?;
    solve_with(h, y, cfg, &params, reference)
}

/// Metrics of the iterate `x` at step `m`, as recorded by [`solve`].
pub fn measure(
    m: usize,
    h: &GraphFilter,
    x: &[f64],
    y: &[f64],
    reference: Option<&Signal>,
    weight: Option<&[f64]>,
) -> IterationRecord {
    record(m, h, x, y, reference.map(|r| (r.values(), r.norm2())), weight)
}

/// Assembles a trace from externally produced records.
pub fn trace_from_records(method: Method, records: Vec<IterationRecord>, status: SolveStatus) -> SolveTrace {
    let estimated_rate = estimate_rate(&records);
    SolveTrace {
        method,
        records,
        status,
        estimated_rate,
    }
}

/// [`solve`] with precomputed method parameters.
pub fn solve_with(
    h: &GraphFilter,
    y: &Signal,
    cfg: &SolverConfig,
    params: &IterationParams,
    reference: Option<&Signal>,
) -> Result<Solution> {
    let n = h.n();
    y.check_graph(h.graph())?;
    if let Some(r) = reference {
        r.check_graph(h.graph())?;
    }
    cfg.validate(n)?;
    if params.method() != cfg.method {
        return Err(Error::arg("iteration parameters do not match the configured method"));
    }
    let yv = y.values();
    let kernel = Kernel::new(h, params, yv);
    let weight = params.error_weight();
    let reference = reference.map(|r| (r.values(), r.norm2()));

    let mut x = cfg.initial.clone().unwrap_or_else(|| vec![0.0; n]);
    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let first = record(0, h, &x, yv, reference, weight.as_deref());
    let r0 = first.residual;
    let target = cfg.residual_tol.map(|t| t * y.norm2());
    let mut records = Vec::with_capacity(cfg.max_iter + 1);
    records.push(first);
    let mut status = SolveStatus::MaxIter;
    if target.is_some_and(|t| r0 <= t) {
        status = SolveStatus::Converged;
    } else {
        for m in 1..=cfg.max_iter {
            kernel.step(h, yv, &x, &mut next, &mut scratch);
            std::mem::swap(&mut x, &mut next);
            let rec = record(m, h, &x, yv, reference, weight.as_deref());
            if !rec.residual.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { iteration: m });
            }
            let residual = rec.residual;
            records.push(rec);
            if r0 > 0.0 && residual > cfg.divergence_factor * r0 {
                status = SolveStatus::Diverged;
                break;
            }
            if target.is_some_and(|t| residual <= t) {
                status = SolveStatus::Converged;
                break;
            }
        }
    }
    let estimated_rate = estimate_rate(&records);
    Ok(Solution {
        x: Signal::new(Arc::clone(h.graph()), x)?,
        trace: SolveTrace {
            method: cfg.method,
            records,
            status,
            estimated_rate,
        },
    })
}
