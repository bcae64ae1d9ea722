//! Diagonal preconditioners computable from `ω(H)`-hop local data.
//!
//! * `P_H(i,i) = max_{k ∈ B(i,ω)} max(Σ_j |H(j,k)|, Σ_j |H(k,j)|)` dominates
//!   `HᵀH` in the sense `HᵀH ⪯ P_H²`.
//! * `P_sym(i,i) = Σ_j |H(i,j)|` satisfies `H ⪯ P_sym ⪯ P_H` for symmetric
//!   positive definite `H`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::filter::{same_graph, GraphFilter};
use crate::graph::Graph;
use crate::spectral::{min_eigenvalue_shifted, FnOperator, LinearOperator, NormalOperator, PowerConfig};

/// Entrywise symmetry tolerance for inputs to the symmetric preconditioner.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A dominance check passes when its minimum is at least this.
pub const DOMINANCE_TOL: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreconditionerKind {
    Pgda,
    Spgda,
    Degree,
}

impl fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreconditionerKind::Pgda => "pgda",
            PreconditionerKind::Spgda => "spgda",
            PreconditionerKind::Degree => "degree",
        })
    }
}

impl std::str::FromStr for PreconditionerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgda" => Ok(PreconditionerKind::Pgda),
            "spgda" => Ok(PreconditionerKind::Spgda),
            "degree" => Ok(PreconditionerKind::Degree),
            other => Err(Error::arg(format!("unknown preconditioner kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPreconditioner {
    graph: Arc<Graph>,
    diag: Vec<f64>,
    kind: PreconditionerKind,
    source_width: usize,
}

impl DiagonalPreconditioner {
    /// Wraps a precomputed diagonal. Every entry must be positive and finite.
    pub fn from_parts(
        graph: Arc<Graph>,
        diag: Vec<f64>,
        kind: PreconditionerKind,
        source_width: usize,
    ) -> Result<Self> {
        if diag.len() != graph.n() {
            return Err(Error::arg("preconditioner length does not match vertex count"));
        }
        if let Some(i) = diag.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Singular(format!(
                "{kind} preconditioner entry at vertex {i} is {}",
                diag[i]
            )));
        }
        Ok(DiagonalPreconditioner {
            graph,
            diag,
            kind,
            source_width,
        })
    }

    /// Degree matrix `D_G`.
    pub fn degree(graph: Arc<Graph>) -> Result<Self> {
        let diag = (0..graph.n()).map(|i| graph.degree(i) as f64).collect();
        DiagonalPreconditioner::from_parts(graph, diag, PreconditionerKind::Degree, 1)
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn values(&self) -> &[f64] {
        &self.diag
    }

    pub fn get(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    pub fn source_width(&self) -> usize {
        self.source_width
    }

    pub fn min(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.diag.iter().copied().fold(0.0, f64::max)
    }
}

/// `d(i) = max(Σ_j |H(i,j)|, Σ_j |H(j,i)|)` for every vertex.
pub fn local_dominance(h: &GraphFilter) -> Vec<f64> {
    h.abs_row_sums()
        .into_iter()
        .zip(h.abs_col_sums())
        .map(|(r, c)| r.max(c))
        .collect()
}

/// Weight `H(j,i) / P(i,i)²` applied to the residual received from `j`.
#[inline]
pub fn pgda_weight(h_ji: f64, p_i: f64) -> f64 {
    h_ji / (p_i * p_i)
}

pub fn build_pgda_preconditioner(h: &GraphFilter) -> Result<DiagonalPreconditioner> {
    if h.nnz() == 0 {
        return Err(Error::Singular("filter is identically zero".into()));
    }
    let g = h.graph();
    let w = h.width();
    let d = local_dominance(h);
    let diag = (0..g.n())
        .map(|i| g.ball(i, w).unwrap().members.iter().map(|&k| d[k]).fold(0.0, f64::max))
        .collect();
    DiagonalPreconditioner::from_parts(Arc::clone(g), diag, PreconditionerKind::Pgda, w)
}

pub fn build_spgda_preconditioner(h: &GraphFilter) -> Result<DiagonalPreconditioner> {
    h.check_symmetric(SYMMETRY_TOL)?;
    DiagonalPreconditioner::from_parts(
        Arc::clone(h.graph()),
        h.abs_row_sums(),
        PreconditionerKind::Spgda,
        h.width(),
    )
}

/// `Ĥ = P_sym^{-1/2} H P_sym^{-1/2}`.
pub fn normalized_filter(h: &GraphFilter, p: &DiagonalPreconditioner) -> Result<GraphFilter> {
    if !same_graph(h.graph(), p.graph()) {
        return Err(Error::GraphMismatch);
    }
    if p.kind() != PreconditionerKind::Spgda {
        return Err(Error::arg(format!(
            "normalized filter needs an spgda preconditioner, got {}",
            p.kind()
        )));
    }
    let triplets: Vec<_> = h
        .triplets()
        .map(|(i, j, v)| (i, j, v / (p.get(i) * p.get(j)).sqrt()))
        .collect();
    GraphFilter::from_triplets(Arc::clone(h.graph()), triplets)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceMode {
    /// `λ_min(P² - HᵀH)`.
    Pgda,
    /// `λ_min(P - H)`, symmetric `H` only.
    Spgda,
    /// `min_i P_H(i,i) - P_sym(i,i)`; `p` must be the pgda preconditioner.
    DiagChain,
    /// `min_i ‖H‖_S - P(i,i)`.
    Schur,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceReport {
    /// Smallest eigenvalue (matrix modes) or smallest entrywise gap.
    pub min_value: f64,
    pub pass: bool,
    pub converged: bool,
}

pub fn check_dominance(
    h: &GraphFilter,
    p: &DiagonalPreconditioner,
    mode: DominanceMode,
    cfg: &PowerConfig,
) -> Result<DominanceReport> {
    if !same_graph(h.graph(), p.graph()) {
        return Err(Error::GraphMismatch);
    }
    let pv = p.values();
    let (min_value, converged) = match mode {
        DominanceMode::Pgda => {
            let normal = NormalOperator::new(h);
            let op = FnOperator::new(h.n(), |x: &[f64], out: &mut [f64]| {
                normal.apply(x, out);
                for ((o, xi), pi) in out.iter_mut().zip(x).zip(pv) {
                    *o = pi * pi * xi - *o;
                }
            });
            let upper = pv.iter().map(|v| v * v).fold(0.0, f64::max);
            let est = min_eigenvalue_shifted(&op, upper, cfg);
            (est.value, est.converged)
        }
        DominanceMode::Spgda => {
            h.check_symmetric(SYMMETRY_TOL)?;
            let op = FnOperator::new(h.n(), |x: &[f64], out: &mut [f64]| {
                h.apply_to(x, out);
                for ((o, xi), pi) in out.iter_mut().zip(x).zip(pv) {
                    *o = pi * xi - *o;
                }
            });
            let upper = p.max() + h.schur_norm();
            let est = min_eigenvalue_shifted(&op, upper, cfg);
            (est.value, est.converged)
        }
        DominanceMode::DiagChain => {
            if p.kind() != PreconditionerKind::Pgda {
                return Err(Error::arg("diag_chain mode compares against the pgda preconditioner"));
            }
            h.check_symmetric(SYMMETRY_TOL)?;
            let gap = h
                .abs_row_sums()
                .iter()
                .zip(pv)
                .map(|(s, p)| p - s)
                .fold(f64::INFINITY, f64::min);
            (gap, true)
        }
        DominanceMode::Schur => {
            let s = h.schur_norm();
            (pv.iter().map(|p| s - p).fold(f64::INFINITY, f64::min), true)
        }
    };
    Ok(DominanceReport {
        min_value,
        pass: min_value >= DOMINANCE_TOL,
        converged,
    })
}
