//! Dense linear-algebra helpers for small and desk-scale problems.
//!
//! These back the direct-solve oracle and the exact spectral quantities the
//! experiment harness reports; the iterative code paths never use them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::filter::GraphFilter;

pub fn to_matrix(h: &GraphFilter) -> DMatrix<f64> {
    let n = h.n();
    let mut m = DMatrix::zeros(n, n);
    for (i, j, v) in h.triplets() {
        m[(i, j)] = v;
    }
    m
}

pub fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let cols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest eigenvalue modulus of a general square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn symmetric_spectral_radius(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m).into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// Singular values, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// Returns the index of the first pivot column that is numerically zero.
pub fn lu_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::arg("lu_solve needs a square system"));
    }
    let mut m = a.clone();
    let mut rhs = DVector::from_column_slice(b);
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let eps = f64::EPSILON * n as f64 * scale;
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|r| (r, m[(r, k)].abs()))
            .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if !(pivot > eps) {
            return Err(Error::Singular(format!("zero pivot in column {k}")));
        }
        if p != k {
            m.swap_rows(p, k);
            rhs.swap_rows(p, k);
        }
        let d = m[(k, k)];
        for r in (k + 1)..n {
            let f = m[(r, k)] / d;
            if f == 0.0 {
                continue;
            }
            for c in k..n {
                let v = m[(k, c)];
                m[(r, c)] -= f * v;
            }
            rhs[r] -= f * rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|c| m[(k, c)] * x[c]).sum();
        x[k] = (rhs[k] - s) / m[(k, k)];
    }
    Ok(x)
}
