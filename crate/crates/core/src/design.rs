//! Filters used by the convergence and denoising scenarios.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::filter::GraphFilter;
use crate::graph::Graph;
use crate::laplacian::Laplacians;
use crate::seed::rng_from_seed;

/// Support radius of the Gaussian-kernel part of [`fig1_filter`].
pub const FIG1_SUPPORT: usize = 2;

/// `H = H_o + L_sym²` where, for `ρ(i,j) ≤ 2`,
/// `H_o(i,j) = exp(-2n‖p_i - p_j‖² - ‖p_i + p_j‖²/2) + (γ_ij + γ_ji)/2`
/// with `γ_ij ~ U[-γ, γ]` drawn per ordered pair, row-major over the
/// 2-hop balls in ascending order.
pub fn fig1_filter(graph: &Arc<Graph>, gamma: f64, seed: u64) -> Result<GraphFilter> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::arg(format!(
            "gamma must be finite and non-negative, got {gamma}"
        )));
    }
    let points = graph
        .coordinates()
        .ok_or_else(|| Error::arg("the fig1 filter needs vertex coordinates"))?;
    let n = graph.n();
    let balls = graph.balls(FIG1_SUPPORT);

    let mut rng = rng_from_seed(seed);
    let noise: Vec<Vec<f64>> = balls
        .iter()
        .map(|b| {
            b.members
                .iter()
                .map(|_| {
                    if gamma > 0.0 {
                        rng.gen_range(-gamma..=gamma)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let gamma_at = |i: usize, j: usize| {
        let k = balls[i].members.binary_search(&j).expect("support is symmetric");
        noise[i][k]
    };

    let scale = 2.0 * n as f64;
    let mut triplets = Vec::new();
    for (i, b) in balls.iter().enumerate() {
        let pi = points[i];
        for &j in &b.members {
            let pj = points[j];
            let sx = pi.x + pj.x;
            let sy = pi.y + pj.y;
            let kernel = (-scale * pi.dist2(&pj) - (sx * sx + sy * sy) / 2.0).exp();
            triplets.push((i, j, kernel + (gamma_at(i, j) + gamma_at(j, i)) / 2.0));
        }
    }
    let h_o = GraphFilter::from_triplets(Arc::clone(graph), triplets)?;
    let l_sym = Laplacians::of(graph)?.normalized;
    h_o.add(&l_sym.compose(&l_sym)?)
}

/// `I + α L_sym`.
pub fn denoise_filter(graph: &Arc<Graph>, alpha: f64) -> Result<GraphFilter> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::arg(format!(
            "alpha must be finite and non-negative, got {alpha}"
        )));
    }
    let l_sym = Laplacians::of(graph)?.normalized;
    GraphFilter::identity(Arc::clone(graph)).add(&l_sym.scale(alpha))
}
