//! Test signals, noise and the synthetic denoising dataset.

use std::sync::Arc;

use rand::Rng;
use sdn_inverse::seed::rng_from_seed;
use sdn_inverse::{Error, Graph, Point, Result, Signal};

/// Index of the anti-diagonal band of width 1/2 containing `p`, clamped to 3.
pub fn strip(p: Point) -> usize {
    ((2.0 * (p.x + p.y)).floor().max(0.0) as usize).min(3)
}

/// `0.5 - 2x` on strips 0 and 2, `0.5 + x² + y²` on strips 1 and 3.
pub fn blockwise_value(p: Point) -> f64 {
    if strip(p).is_multiple_of(2) {
        0.5 - 2.0 * p.x
    } else {
        0.5 + p.x * p.x + p.y * p.y
    }
}

pub fn blockwise_polynomial(g: &Arc<Graph>) -> Result<Signal> {
    let pts = g
        .coordinates()
        .ok_or_else(|| Error::Argument("blockwise polynomial needs vertex coordinates".into()))?;
    Signal::new(Arc::clone(g), pts.iter().map(|&p| blockwise_value(p)).collect())
}

/// `x + u` with `u(i) ~ U[-η, η]` independent.
pub fn add_uniform_noise(x: &Signal, eta: f64, seed: u64) -> Result<Signal> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::Argument(format!(
            "eta must be finite and non-negative, got {eta}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let vals = x
        .values()
        .iter()
        .map(|v| if eta > 0.0 { v + rng.gen_range(-eta..=eta) } else { *v })
        .collect();
    Signal::new(Arc::clone(x.graph()), vals)
}

/// `n` i.i.d. uniform points on the unit square.
pub fn uniform_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| {
            let x = rng.gen::<f64>();
            let y = rng.gen::<f64>();
            Point::new(x, y)
        })
        .collect()
}

/// Smooth field standing in for station temperatures:
/// `60 + 15 sin(3x) + 10 cos(2y)`.
pub fn synthetic_field(p: Point) -> f64 {
    60.0 + 15.0 * (3.0 * p.x).sin() + 10.0 * (2.0 * p.y).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blockwise_examples() {
        assert_eq!(blockwise_value(Point::new(0.0, 0.0)), 0.5);
        let v = blockwise_value(Point::new(0.4, 0.4));
        assert_eq!(strip(Point::new(0.4, 0.4)), 1);
        assert!((v - 0.82).abs() < 1e-15);
        assert_eq!(strip(Point::new(1.0, 1.0)), 3);
        assert_eq!(blockwise_value(Point::new(1.0, 1.0)), 2.5);
        assert_eq!(strip(Point::new(0.6, 0.5)), 2);
        assert_eq!(blockwise_value(Point::new(0.6, 0.5)), 0.5 - 1.2);
    }

    #[test]
    fn noise_bounds_and_variance() {
        let g = Arc::new(Graph::path(2).unwrap());
        let x = Signal::new(g, vec![1.0, -1.0]).unwrap();
        assert_eq!(add_uniform_noise(&x, 0.0, 3).unwrap(), x);

        let n = 100_000;
        let big = Arc::new(Graph::path(n).unwrap());
        let z = Signal::zeros(big);
        let eta = 0.2;
        let u = add_uniform_noise(&z, eta, 11).unwrap();
        assert!(u.values().iter().all(|v| v.abs() <= eta));
        let mean = u.values().iter().sum::<f64>() / n as f64;
        let var = u.values().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let expected = eta * eta / 3.0;
        assert!((var - expected).abs() <= 0.05 * expected, "{var} vs {expected}");
    }
}
