//! Power-iteration spectral estimates for sparse operators.
//!
//! Every iteration matrix in this crate is similar to a symmetric matrix, so
//! its eigenvalues are real. The spectral radius is estimated by power
//! iteration on `A²`, whose dominant eigenvalue `r(A)²` is unique even when
//! `A` has both `r` and `-r` in its spectrum.

use rand::Rng;

use crate::filter::GraphFilter;
use crate::seed::{derive_seed, rng_from_seed};

/// A square linear map on vertex-indexed vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

impl LinearOperator for GraphFilter {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.apply_to(x, out)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply(x, out)
    }
}

/// Operator defined by a closure.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnOperator { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

/// `HᵀH` without forming the product.
pub struct NormalOperator<'a> {
    h: &'a GraphFilter,
    ht: GraphFilter,
}

impl<'a> NormalOperator<'a> {
    pub fn new(h: &'a GraphFilter) -> Self {
        NormalOperator { h, ht: h.transpose() }
    }
}

impl LinearOperator for NormalOperator<'_> {
    fn dim(&self) -> usize {
        self.h.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; self.dim()];
        self.h.apply_to(x, &mut tmp);
        self.ht.apply_to(&tmp, out);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    /// Stop when successive estimates differ by less than this.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl PowerConfig {
    pub fn new(tol: f64, max_iter: usize, seed: u64) -> Self {
        PowerConfig { tol, max_iter, seed }
    }
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig::new(1e-12, 100_000, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn random_unit(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = crate::filter::norm2(&v);
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Power iteration with Rayleigh-quotient estimates for `step`, which maps
/// the current unit vector to its image. `finish` converts the quotient into
/// the reported quantity.
fn power_loop(
    dim: usize,
    cfg: &PowerConfig,
    mut step: impl FnMut(&[f64], &mut [f64]),
    finish: impl Fn(f64) -> f64,
) -> SpectralEstimate {
    if dim == 0 {
        return SpectralEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut x = random_unit(dim, derive_seed(cfg.seed, 0, "power"));
    let mut y = vec![0.0; dim];
    let mut restarted = false;
    let mut prev = f64::NAN;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        step(&x, &mut y);
        let ny = crate::filter::norm2(&y);
        if ny == 0.0 {
            if restarted {
                return SpectralEstimate {
                    value: 0.0,
                    iterations,
                    converged: true,
                };
            }
            restarted = true;
            x = random_unit(dim, derive_seed(cfg.seed, 1, "power"));
            prev = f64::NAN;
            continue;
        }
        let est = finish(dot(&x, &y));
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        if (est - prev).abs() < cfg.tol {
            return SpectralEstimate {
                value: est,
                iterations,
                converged: true,
            };
        }
        prev = est;
    }
    SpectralEstimate {
        value: prev,
        iterations,
        converged: false,
    }
}

/// Estimate of `r(A)` for an operator similar to a symmetric matrix.
pub fn power_spectral_radius(op: &impl LinearOperator, cfg: &PowerConfig) -> SpectralEstimate {
    let n = op.dim();
    let mut tmp = vec![0.0; n];
    power_loop(
        n,
        cfg,
        |x, y| {
            op.apply(x, &mut tmp);
            op.apply(&tmp, y);
        },
        |q| q.max(0.0).sqrt(),
    )
}

/// Largest eigenvalue of an operator similar to a positive semidefinite
/// matrix.
pub fn dominant_eigenvalue(op: &impl LinearOperator, cfg: &PowerConfig) -> SpectralEstimate {
    power_loop(op.dim(), cfg, |x, y| op.apply(x, y), |q| q)
}

/// Smallest eigenvalue of a symmetric operator whose spectrum lies below
/// `upper`, via power iteration on `upper·I - A`.
pub fn min_eigenvalue_shifted(op: &impl LinearOperator, upper: f64, cfg: &PowerConfig) -> SpectralEstimate {
    let shifted = FnOperator::new(op.dim(), |x: &[f64], out: &mut [f64]| {
        op.apply(x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = upper * xi - *o;
        }
    });
    let top = dominant_eigenvalue(&shifted, cfg);
    SpectralEstimate {
        value: upper - top.value,
        ..top
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularValues {
    pub max: f64,
    pub min: f64,
    pub converged: bool,
}

impl SingularValues {
    pub fn condition_number(&self) -> f64 {
        self.max / self.min
    }
}

/// `σ_max` and `σ_min` of `H` without inversion: `σ_max²` is the dominant
/// eigenvalue of `HᵀH`, and `σ_min² = σ_max² - λ_max(σ_max² I - HᵀH)`.
pub fn extreme_singular_values(h: &GraphFilter, cfg: &PowerConfig) -> SingularValues {
    let normal = NormalOperator::new(h);
    let top = dominant_eigenvalue(&normal, cfg);
    let smax2 = top.value.max(0.0);
    let bottom = min_eigenvalue_shifted(&normal, smax2, cfg);
    SingularValues {
        max: smax2.sqrt(),
        min: bottom.value.max(0.0).sqrt(),
        converged: top.converged && bottom.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use std::sync::Arc;

    fn edge() -> Arc<Graph> {
        Arc::new(Graph::path(2).unwrap())
    }

    fn cfg() -> PowerConfig {
        PowerConfig::new(1e-15, 100_000, 9)
    }

    #[test]
    fn zero_operator() {
        let op = FnOperator::new(4, |_: &[f64], out: &mut [f64]| out.fill(0.0));
        let est = power_spectral_radius(&op, &cfg());
        assert_eq!(est.value, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn spgda_iteration_matrix_example() {
        // I - P^{-1} H, H = [[2,1],[1,2]], P = 3I: eigenvalues 0 and 2/3
        let op = FnOperator::new(2, |x: &[f64], out: &mut [f64]| {
            out[0] = x[0] - (2.0 * x[0] + x[1]) / 3.0;
            out[1] = x[1] - (x[0] + 2.0 * x[1]) / 3.0;
        });
        let est = power_spectral_radius(&op, &cfg());
        assert!((est.value - 2.0 / 3.0).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn pgda_iteration_matrix_example() {
        // I - HᵀH/9 with HᵀH = [[5,4],[4,5]]: eigenvalues 0 and 8/9
        let op = FnOperator::new(2, |x: &[f64], out: &mut [f64]| {
            out[0] = x[0] - (5.0 * x[0] + 4.0 * x[1]) / 9.0;
            out[1] = x[1] - (4.0 * x[0] + 5.0 * x[1]) / 9.0;
        });
        let est = power_spectral_radius(&op, &cfg());
        assert!((est.value - 8.0 / 9.0).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn opposite_sign_pair() {
        // eigenvalues ±0.8 defeat a plain Rayleigh quotient on A
        let op = FnOperator::new(2, |x: &[f64], out: &mut [f64]| {
            out[0] = 0.8 * x[1];
            out[1] = 0.8 * x[0];
        });
        let est = power_spectral_radius(&op, &cfg());
        assert!((est.value - 0.8).abs() < 1e-12);
    }

    #[test]
    fn unconverged_is_flagged() {
        let g = Arc::new(Graph::path(30).unwrap());
        let lap = crate::laplacian::Laplacians::of(&g).unwrap().combinatorial;
        let est = power_spectral_radius(&lap, &PowerConfig::new(0.0, 5, 1));
        assert!(!est.converged);
        assert_eq!(est.iterations, 5);
    }

    #[test]
    fn singular_value_examples() {
        let g = edge();
        let c = PowerConfig::new(1e-15, 200_000, 3);
        let sv = extreme_singular_values(&GraphFilter::identity(g.clone()), &c);
        assert!((sv.max - 1.0).abs() < 1e-12 && (sv.min - 1.0).abs() < 1e-8);

        let h = GraphFilter::from_dense(g.clone(), &[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let sv = extreme_singular_values(&h, &c);
        assert!((sv.max - 3.0).abs() < 1e-10 && (sv.min - 1.0).abs() < 1e-8, "{sv:?}");

        let d = GraphFilter::diagonal(g, &[5.0, 2.0]).unwrap();
        let sv = extreme_singular_values(&d, &c);
        assert!((sv.max - 5.0).abs() < 1e-10 && (sv.min - 2.0).abs() < 1e-8, "{sv:?}");
    }
}
