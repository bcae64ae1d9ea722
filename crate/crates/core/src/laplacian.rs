use std::sync::Arc;

use crate::error::{Error, Result};
use crate::filter::GraphFilter;
use crate::graph::Graph;

/// Combinatorial and normalized Laplacians of a graph with the degree vector.
#[derive(Debug, Clone)]
pub struct Laplacians {
    /// `L = D - A`.
    pub combinatorial: GraphFilter,
    /// `L_sym = D^{-1/2} L D^{-1/2}`.
    pub normalized: GraphFilter,
    pub degrees: Vec<f64>,
}

impl Laplacians {
    pub fn of(graph: &Arc<Graph>) -> Result<Laplacians> {
        let n = graph.n();
        let degrees: Vec<f64> = (0..n).map(|i| graph.degree(i) as f64).collect();
        if let Some(i) = degrees.iter().position(|&d| d == 0.0) {
            return Err(Error::Construction(format!("vertex {i} is isolated")));
        }
        let mut lap = Vec::new();
        let mut sym = Vec::new();
        for i in 0..n {
            lap.push((i, i, degrees[i]));
            sym.push((i, i, 1.0));
            for &j in graph.neighbors(i) {
                lap.push((i, j, -1.0));
                sym.push((i, j, -1.0 / (degrees[i] * degrees[j]).sqrt()));
            }
        }
        Ok(Laplacians {
            combinatorial: GraphFilter::from_triplets(Arc::clone(graph), lap)?,
            normalized: GraphFilter::from_triplets(Arc::clone(graph), sym)?,
            degrees,
        })
    }
}
