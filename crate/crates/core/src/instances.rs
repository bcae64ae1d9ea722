//! Seeded random graphs and filters for property checks and benchmarks.

use std::sync::Arc;

use rand::Rng;

use crate::dense;
use crate::error::Result;
use crate::filter::GraphFilter;
use crate::graph::Graph;
use crate::seed::rng_from_seed;

/// Random spanning tree plus up to `extra` random chords; always connected.
pub fn random_connected_graph(n: usize, extra: usize, seed: u64) -> Result<Graph> {
    let mut rng = rng_from_seed(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    Graph::from_edges(n, edges, None)
}

/// Pairs `(i, j)` with `ρ(i,j) ≤ width`, row-major and ascending.
fn support(g: &Graph, width: usize) -> Vec<(usize, usize, usize)> {
    (0..g.n())
        .flat_map(|i| {
            g.bfs(i, width)
                .into_iter()
                .enumerate()
                .filter_map(move |(j, d)| d.map(|d| (i, j, d)))
        })
        .collect()
}

/// Nonzero diagonal plus entries `U[-1,1]` on each pair within `width` hops
/// with probability `density`. One pair at distance exactly `width` is
/// always kept when one exists, so `ω(H) = min(width, diameter)`.
pub fn random_filter(g: &Arc<Graph>, width: usize, density: f64, seed: u64) -> Result<GraphFilter> {
    let mut rng = rng_from_seed(seed);
    let pairs = support(g, width);
    let far: Vec<usize> = (0..pairs.len()).filter(|&k| pairs[k].2 == width).collect();
    let forced = (!far.is_empty()).then(|| far[rng.gen_range(0..far.len())]);
    let mut t = Vec::new();
    for (k, &(i, j, _)) in pairs.iter().enumerate() {
        if i == j || Some(k) == forced || rng.gen_bool(density) {
            t.push((i, j, nonzero(&mut rng)));
        }
    }
    GraphFilter::from_triplets(Arc::clone(g), t)
}

fn nonzero(rng: &mut impl Rng) -> f64 {
    let v: f64 = rng.gen_range(0.05..1.0);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Symmetric counterpart of [`random_filter`].
pub fn random_symmetric_filter(g: &Arc<Graph>, width: usize, density: f64, seed: u64) -> Result<GraphFilter> {
    let mut rng = rng_from_seed(seed);
    let pairs: Vec<_> = support(g, width).into_iter().filter(|p| p.0 <= p.1).collect();
    let far: Vec<usize> = (0..pairs.len()).filter(|&k| pairs[k].2 == width).collect();
    let forced = (!far.is_empty()).then(|| far[rng.gen_range(0..far.len())]);
    let mut t = Vec::new();
    for (k, &(i, j, _)) in pairs.iter().enumerate() {
        if i == j || Some(k) == forced || rng.gen_bool(density) {
            let v = nonzero(&mut rng);
            t.push((i, j, v));
            if i != j {
                t.push((j, i, v));
            }
        }
    }
    GraphFilter::from_triplets(Arc::clone(g), t)
}

/// Random symmetric filter shifted so that its smallest eigenvalue is
/// `min_eig > 0`. The shift is computed with a dense eigensolver.
pub fn random_spd_filter(g: &Arc<Graph>, width: usize, density: f64, min_eig: f64, seed: u64) -> Result<GraphFilter> {
    let b = random_symmetric_filter(g, width, density, seed)?;
    let lo = dense::symmetric_eigenvalues(&dense::to_matrix(&b))[0];
    let shift = vec![min_eig - lo; g.n()];
    b.add(&GraphFilter::diagonal(Arc::clone(g), &shift)?)
}

/// `2I + B / ‖B‖_S` for a random symmetric `B`: eigenvalues in `[1, 3]`.
pub fn well_conditioned_filter(g: &Arc<Graph>, width: usize, seed: u64) -> Result<GraphFilter> {
    let b = random_symmetric_filter(g, width, 0.5, seed)?;
    let s = b.schur_norm();
    GraphFilter::identity(Arc::clone(g)).scale(2.0).add(&b.scale(1.0 / s))
}
