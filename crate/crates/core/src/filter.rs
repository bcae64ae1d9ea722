//! Sparse graph filters and graph signals.
//!
//! Filters are stored row-major (CSR) with ascending column ids. Every
//! row-times-vector product sums in that order, starting from `0.0`, so
//! a vertex-level implementation that sums its neighborhood in ascending id
//! order reproduces the centralized result bit for bit.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Magnitude below which products in [`GraphFilter::compose`] are dropped.
pub const COMPOSE_DROP_TOLERANCE: f64 = 1e-14;

pub(crate) fn same_graph(a: &Arc<Graph>, b: &Arc<Graph>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Vertex-indexed vector `x = (x(i))`.
#[derive(Debug, Clone)]
pub struct Signal {
    graph: Arc<Graph>,
    values: Vec<f64>,
}

impl PartialEq for Signal {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && same_graph(&self.graph, &other.graph)
    }
}

impl Signal {
    pub fn new(graph: Arc<Graph>, values: Vec<f64>) -> Result<Signal> {
        if values.len() != graph.n() {
            return Err(Error::arg(format!(
                "signal has {} values for a graph with {} vertices",
                values.len(),
                graph.n()
            )));
        }
        Ok(Signal { graph, values })
    }

    pub fn zeros(graph: Arc<Graph>) -> Signal {
        let n = graph.n();
        Signal {
            graph,
            values: vec![0.0; n],
        }
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.values)
    }

    pub(crate) fn check_graph(&self, g: &Arc<Graph>) -> Result<()> {
        if same_graph(&self.graph, g) {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sparse filter `H` on a graph, carrying its geodesic-width `ω(H)`.
#[derive(Debug, Clone)]
pub struct GraphFilter {
    graph: Arc<Graph>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    width: usize,
}

impl PartialEq for GraphFilter {
    fn eq(&self, other: &Self) -> bool {
        self.row_ptr == other.row_ptr
            && self.cols == other.cols
            && self.vals == other.vals
            && same_graph(&self.graph, &other.graph)
    }
}

/// `ω` of a set of nonzero positions: the largest geodesic distance between
/// the row and column vertex of any entry (0 when only diagonal entries).
pub fn geodesic_width(graph: &Graph, entries: impl IntoIterator<Item = (usize, usize)>) -> Result<usize> {
    let n = graph.n();
    let mut by_row: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in entries {
        graph.check_vertex(i)?;
        graph.check_vertex(j)?;
        if i != j {
            by_row[i].push(j);
        }
    }
    let mut width = 0;
    for (i, targets) in by_row.iter().enumerate() {
        if targets.is_empty() {
            continue;
        }
        let dist = graph.bfs(i, usize::MAX);
        for &j in targets {
            match dist[j] {
                Some(d) => width = width.max(d),
                None => {
                    return Err(Error::Construction(format!(
                        "entry ({i},{j}) joins disconnected vertices"
                    )))
                }
            }
        }
    }
    Ok(width)
}

impl GraphFilter {
    /// Builds a filter from sorted, zero-free rows.
    fn from_sorted_rows(graph: Arc<Graph>, rows: Vec<Vec<(usize, f64)>>) -> Result<GraphFilter> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for row in &rows {
            for &(j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        let width = geodesic_width(
            &graph,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().map(move |&(j, _)| (i, j))),
        )?;
        Ok(GraphFilter {
            graph,
            row_ptr,
            cols,
            vals,
            width,
        })
    }

    /// Builds a filter from `(i, j, value)` triplets. Repeated positions are
    /// summed in input order; exact zeros are not stored.
    pub fn from_triplets(
        graph: Arc<Graph>,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<GraphFilter> {
        let n = graph.n();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            graph.check_vertex(i)?;
            graph.check_vertex(j)?;
            if !v.is_finite() {
                return Err(Error::arg(format!("non-finite filter entry at ({i},{j})")));
            }
            rows[i].push((j, v));
        }
        for row in &mut rows {
            row.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(j, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            *row = merged;
        }
        GraphFilter::from_sorted_rows(graph, rows)
    }

    /// Filter from a dense row-major matrix; zeros are skipped.
    pub fn from_dense(graph: Arc<Graph>, dense: &[Vec<f64>]) -> Result<GraphFilter> {
        let n = graph.n();
        if dense.len() != n || dense.iter().any(|r| r.len() != n) {
            return Err(Error::arg(format!("dense matrix must be {n}x{n}")));
        }
        let triplets = dense
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)));
        GraphFilter::from_triplets(graph, triplets)
    }

    pub fn identity(graph: Arc<Graph>) -> GraphFilter {
        let n = graph.n();
        GraphFilter::diagonal(graph, &vec![1.0; n]).unwrap()
    }

    pub fn diagonal(graph: Arc<Graph>, diag: &[f64]) -> Result<GraphFilter> {
        if diag.len() != graph.n() {
            return Err(Error::arg("diagonal length does not match vertex count"));
        }
        GraphFilter::from_triplets(graph, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Adjacency matrix of the graph.
    pub fn adjacency(graph: Arc<Graph>) -> GraphFilter {
        let triplets: Vec<_> = (0..graph.n())
            .flat_map(|i| graph.neighbors(i).iter().map(move |&j| (i, j, 1.0)))
            .collect();
        GraphFilter::from_triplets(graph, triplets).unwrap()
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Geodesic-width `ω(H)`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column ids and values of row `i`, ascending by column.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (c, v) = self.row(i);
        c.iter().copied().zip(v.iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |i| self.row_entries(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        c.binary_search(&j).map(|k| v[k]).unwrap_or(0.0)
    }

    pub fn diagonal_values(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.get(i, i)).collect()
    }

    /// `Σ_j H(i,j) x(j)` over stored entries in ascending column order.
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (c, v) = self.row(i);
        c.iter().zip(v).fold(0.0, |acc, (&j, &h)| acc + h * x[j])
    }

    /// `out = H x` on raw slices.
    pub fn apply_to(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n());
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row_dot(i, x);
        }
    }

    /// `y(i) = Σ_{ρ(j,i) <= ω(H)} H(i,j) x(j)`.
    pub fn apply(&self, x: &Signal) -> Result<Signal> {
        x.check_graph(&self.graph)?;
        let mut out = vec![0.0; self.n()];
        self.apply_to(x.values(), &mut out);
        Ok(Signal {
            graph: Arc::clone(&self.graph),
            values: out,
        })
    }

    pub fn transpose(&self) -> GraphFilter {
        let n = self.n();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, v) in self.triplets() {
            rows[j].push((i, v));
        }
        GraphFilter {
            graph: Arc::clone(&self.graph),
            row_ptr: prefix(&rows),
            cols: rows.iter().flatten().map(|e| e.0).collect(),
            vals: rows.iter().flatten().map(|e| e.1).collect(),
            width: self.width,
        }
    }

    /// Absolute row sums `Σ_j |H(i,j)|`, ascending column order.
    pub fn abs_row_sums(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.row(i).1.iter().fold(0.0, |acc, v| acc + v.abs()))
            .collect()
    }

    /// Absolute column sums `Σ_j |H(j,i)|`, ascending row order.
    pub fn abs_col_sums(&self) -> Vec<f64> {
        self.transpose().abs_row_sums()
    }

    /// `max(max row abs sum, max column abs sum)`.
    pub fn schur_norm(&self) -> f64 {
        let r = self.abs_row_sums().into_iter().fold(0.0, f64::max);
        let c = self.abs_col_sums().into_iter().fold(0.0, f64::max);
        r.max(c)
    }

    pub fn scale(&self, alpha: f64) -> GraphFilter {
        if alpha == 0.0 {
            return GraphFilter::from_triplets(Arc::clone(&self.graph), std::iter::empty()).unwrap();
        }
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// Entrywise sum `a + b`.
    pub fn add(&self, other: &GraphFilter) -> Result<GraphFilter> {
        if !same_graph(&self.graph, &other.graph) {
            return Err(Error::GraphMismatch);
        }
        GraphFilter::from_triplets(Arc::clone(&self.graph), self.triplets().chain(other.triplets()))
    }

    /// Sparse product `a · b`; entries smaller than
    /// [`COMPOSE_DROP_TOLERANCE`] in magnitude are dropped.
    pub fn compose(&self, other: &GraphFilter) -> Result<GraphFilter> {
        if !same_graph(&self.graph, &other.graph) {
            return Err(Error::GraphMismatch);
        }
        let n = self.n();
        let mut acc = vec![0.0; n];
        let mut touched = vec![false; n];
        let mut pattern: Vec<usize> = Vec::new();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            for (k, a) in self.row_entries(i) {
                for (j, b) in other.row_entries(k) {
                    if !touched[j] {
                        touched[j] = true;
                        pattern.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            pattern.sort_unstable();
            let row: Vec<(usize, f64)> = pattern
                .iter()
                .filter(|&&j| acc[j].abs() >= COMPOSE_DROP_TOLERANCE)
                .map(|&j| (j, acc[j]))
                .collect();
            for &j in &pattern {
                acc[j] = 0.0;
                touched[j] = false;
            }
            pattern.clear();
            rows.push(row);
        }
        GraphFilter::from_sorted_rows(Arc::clone(&self.graph), rows)
    }

    /// `D_l · H · D_r` for diagonal scalings given as vectors.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> GraphFilter {
        let mut out = self.clone();
        for (i, l) in left.iter().enumerate().take(self.n()) {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.vals[k] = self.vals[k] * l * right[self.cols[k]];
            }
        }
        out
    }

    /// Largest `|H(i,j) - H(j,i)|` with its position, or `None` if exactly
    /// symmetric.
    pub fn worst_asymmetry(&self) -> Option<(usize, usize, f64)> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for (i, j, v) in self.triplets() {
            let gap = (v - self.get(j, i)).abs();
            if gap > 0.0 && worst.is_none_or(|w| gap > w.2) {
                worst = Some((i, j, gap));
            }
        }
        worst
    }

    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        match self.worst_asymmetry() {
            Some((i, j, gap)) if gap > tol => Err(Error::Asymmetric { i, j, gap }),
            _ => Ok(()),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut d = vec![vec![0.0; n]; n];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }
}

fn prefix(rows: &[Vec<(usize, f64)>]) -> Vec<usize> {
    let mut p = Vec::with_capacity(rows.len() + 1);
    p.push(0);
    for r in rows {
        p.push(p.last().unwrap() + r.len());
    }
    p
}
