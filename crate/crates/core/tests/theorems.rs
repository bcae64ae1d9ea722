//! Dominance and contraction properties of the preconditioners, checked
//! against a dense eigensolver.

use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use sdn_inverse::dense;
use sdn_inverse::instances::{random_connected_graph, random_filter, random_spd_filter};
use sdn_inverse::precond::DOMINANCE_TOL;
use sdn_inverse::solver::{iteration_matrix, solve_with, IterationParams};
use sdn_inverse::*;

fn graph(n: usize, seed: u64) -> Arc<Graph> {
    Arc::new(random_connected_graph(n, n / 3, seed).unwrap())
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn pgda_preconditioner_dominates_normal_matrix(n in 3usize..40, w in 1usize..=3, seed: u64) {
        let g = graph(n, seed);
        let h = random_filter(&g, w, 0.4, seed ^ 1).unwrap();
        let p = build_pgda_preconditioner(&h).unwrap();
        let hm = dense::to_matrix(&h);
        let pm = diag(p.values());
        let gap = &pm * &pm - hm.transpose() * &hm;
        let lo = dense::symmetric_eigenvalues(&gap)[0];
        prop_assert!(lo >= DOMINANCE_TOL, "lambda_min = {lo}");

        let schur = check_dominance(&h, &p, DominanceMode::Schur, &PowerConfig::default()).unwrap();
        prop_assert!(schur.pass);
    }

    #[test]
    fn symmetric_chain(n in 3usize..40, w in 1usize..=3, seed: u64) {
        let g = graph(n, seed);
        let h = random_spd_filter(&g, w, 0.4, 0.05, seed ^ 2).unwrap();
        let ps = build_spgda_preconditioner(&h).unwrap();
        let pp = build_pgda_preconditioner(&h).unwrap();
        let gap = diag(ps.values()) - dense::to_matrix(&h);
        prop_assert!(dense::symmetric_eigenvalues(&gap)[0] >= DOMINANCE_TOL);
        for (a, b) in ps.values().iter().zip(pp.values()) {
            prop_assert!(a <= b);
        }
        let chain = check_dominance(&h, &pp, DominanceMode::DiagChain, &PowerConfig::default()).unwrap();
        prop_assert!(chain.pass);
    }

    #[test]
    fn weighted_errors_follow_envelope(n in 3usize..30, w in 1usize..=2, seed: u64) {
        let g = graph(n, seed);
        let h = random_spd_filter(&g, w, 0.4, 0.3, seed ^ 3).unwrap();
        let x: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.7 + seed as f64 * 1e-9).cos()).collect();
        let y = h.apply(&Signal::new(g.clone(), x).unwrap()).unwrap();
        let reference = direct_solve_oracle(&h, &y).unwrap();
        for method in [Method::Pgda, Method::Spgda] {
            let params = IterationParams::prepare(&h, method, None, &PowerConfig::default()).unwrap();
            let r = iteration_matrix(&h, &params).dense_spectral_radius();
            prop_assert!(r < 1.0);
            let cfg = SolverConfig::new(method, 60);
            let sol = solve_with(&h, &y, &cfg, &params, Some(&reference)).unwrap();
            let e0 = sol.trace.records[0].weighted_error.unwrap();
            for rec in &sol.trace.records {
                let bound = r.powi(rec.m as i32) * e0 * (1.0 + 1e-8);
                let e = rec.weighted_error.unwrap();
                // past the round-off floor of the reference the bound is vacuous
                if bound > 1e-9 * e0 {
                    prop_assert!(e <= bound, "{method} m={} e={e} bound={bound}", rec.m);
                }
            }
        }
    }
}

#[test]
fn power_and_dense_radii_agree() {
    for seed in 0..10 {
        let g = graph(25, seed);
        let h = random_spd_filter(&g, 2, 0.4, 0.2, seed).unwrap();
        for method in Method::ALL {
            let params = IterationParams::prepare(&h, method, None, &PowerConfig::default()).unwrap();
            let op = iteration_matrix(&h, &params);
            let exact = op.dense_spectral_radius();
            let est = power_spectral_radius(&op, &PowerConfig::new(1e-14, 200_000, seed));
            if exact < 0.999 {
                assert!((est.value - exact).abs() < 1e-6, "{method}: {} vs {exact}", est.value);
            }
        }
    }
}
