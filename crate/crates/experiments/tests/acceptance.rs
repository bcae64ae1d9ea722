//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use sdn_experiments::config::{Scenario, ScenarioConfig};
use sdn_experiments::denoise::{run_denoise, Dataset};
use sdn_experiments::fig1::run_fig1;
use sdn_experiments::TrialAggregate;
use sdn_inverse::dense;
use sdn_inverse::instances::{random_connected_graph, random_filter, random_spd_filter, well_conditioned_filter};
use sdn_inverse::precond::DOMINANCE_TOL;
use sdn_inverse::sdn::{exchange_size, gather};
use sdn_inverse::seed::{derive_seed, rng_from_seed};
use sdn_inverse::solver::{iteration_matrix, solve_with, IterationParams};
use sdn_inverse::*;

const MASTER: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Draws `(graph, width)` for instance `k` of a suite: n in 3..=40, width 1..=3.
fn random_instance(tag: &str, k: u64) -> (Arc<Graph>, usize, u64) {
    let seed = derive_seed(MASTER, k, tag);
    let mut rng = rng_from_seed(seed);
    let n = rng.gen_range(3..=40);
    let w = rng.gen_range(1..=3);
    let g = Arc::new(random_connected_graph(n, n / 3, seed).unwrap());
    (g, w, seed)
}

fn observation(g: &Arc<Graph>, seed: u64) -> Signal {
    let mut rng = rng_from_seed(seed);
    Signal::new(g.clone(), (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for k in 0..200 {
        let (g, w, seed) = random_instance("c1", k);
        let h = random_filter(&g, w, 0.4, seed).unwrap();
        let p = build_pgda_preconditioner(&h).unwrap();
        let pm = dense::to_matrix(&GraphFilter::diagonal(g.clone(), p.values()).unwrap());
        let hm = dense::to_matrix(&h);
        let gap = &pm * &pm - hm.transpose() * &hm;
        worst = worst.min(dense::symmetric_eigenvalues(&gap)[0]);
    }
    let t = start.elapsed();
    outcome(
        worst >= DOMINANCE_TOL && t < Duration::from_secs(30),
        format!(
            "200 filters, min lambda_min(P^2 - H^T H) = {worst:.3e}, {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut chain_ok = true;
    for k in 0..200 {
        let (g, w, seed) = random_instance("c2", k);
        let h = random_spd_filter(&g, w, 0.4, 0.05, seed).unwrap();
        let ps = build_spgda_preconditioner(&h).unwrap();
        let pp = build_pgda_preconditioner(&h).unwrap();
        let gap = dense::to_matrix(&GraphFilter::diagonal(g.clone(), ps.values()).unwrap()) - dense::to_matrix(&h);
        worst = worst.min(dense::symmetric_eigenvalues(&gap)[0]);
        chain_ok &= ps.values().iter().zip(pp.values()).all(|(a, b)| a <= b);
    }
    let t = start.elapsed();
    outcome(
        worst >= DOMINANCE_TOL && chain_ok && t < Duration::from_secs(30),
        format!(
            "200 SPD filters, min lambda_min(P_sym - H) = {worst:.3e}, P_sym <= P_H: {chain_ok}, {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    let g = Arc::new(Graph::path(2).unwrap());
    let h = GraphFilter::from_dense(g, &[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let expected = [
        (Method::Pgda, 8.0 / 9.0),
        (Method::Spgda, 2.0 / 3.0),
        (Method::Opgd, 0.8),
        (Method::Imia, 0.6),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (method, want) in expected {
        let params = IterationParams::prepare(&h, method, None, &PowerConfig::default()).unwrap();
        let r = iteration_matrix(&h, &params).dense_spectral_radius();
        pass &= (r - want).abs() <= 1e-10;
        parts.push(format!("{method} {r:.12}"));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_4() -> Outcome {
    let mut checked = 0usize;
    let mut worst_ratio = 0.0f64;
    for k in 0..50 {
        let (g, w, seed) = random_instance("c4", k);
        let h = random_spd_filter(&g, w, 0.4, 0.3, seed).unwrap();
        let y = observation(&g, seed ^ 1);
        let reference = direct_solve_oracle(&h, &y).unwrap();
        for method in [Method::Pgda, Method::Spgda] {
            let params = IterationParams::prepare(&h, method, None, &PowerConfig::default()).unwrap();
            let r = iteration_matrix(&h, &params).dense_spectral_radius();
            let sol = solve_with(&h, &y, &SolverConfig::new(method, 100), &params, Some(&reference)).unwrap();
            let e0 = sol.trace.records[0].weighted_error.unwrap();
            for rec in &sol.trace.records {
                let bound = r.powi(rec.m as i32) * e0;
                // below the reference's round-off floor the bound is not observable
                if bound > 1e-9 * e0 {
                    checked += 1;
                    worst_ratio = worst_ratio.max(rec.weighted_error.unwrap() / bound);
                }
            }
        }
    }
    outcome(
        worst_ratio <= 1.0 + 1e-8,
        format!("50 instances, {checked} iterates checked, max e(m)/bound = {worst_ratio:.12}"),
    )
}

fn criterion_5() -> Outcome {
    let mut mismatches = 0usize;
    let mut range_violations = 0usize;
    let mut count_errors = 0usize;
    for k in 0..50 {
        let (g, w, seed) = random_instance("c5", k);
        let m = rng_from_seed(seed ^ 5).gen_range(1..=100);
        let y = observation(&g, seed ^ 2);

        let h = random_filter(&g, w, 0.4, seed).unwrap();
        let range = h.width();
        let mut net = Network::new(g.clone(), range).unwrap().with_message_recording(true);
        let mut agents = net.distribute(&h, &y).unwrap();
        net.distributed_preconditioner(&mut agents).unwrap();
        net.run_distributed_pgda(&mut agents, m).unwrap();
        let central = solve(&h, &y, &SolverConfig::new(Method::Pgda, m), None).unwrap();
        mismatches += bit_mismatches(&gather(&agents), central.x.values());
        count_errors += usize::from(net.log().total_messages() != exchange_size(&g, range) * (1 + 2 * m));
        range_violations += violations(&g, net.log(), range);

        let hs = random_spd_filter(&g, w, 0.4, 0.1, seed ^ 3).unwrap();
        let range = hs.width();
        let mut net = Network::new(g.clone(), range).unwrap().with_message_recording(true);
        let mut agents = net.distribute(&hs, &y).unwrap();
        net.distributed_spgda_setup(&mut agents).unwrap();
        net.run_distributed_spgda(&mut agents, m).unwrap();
        let central = solve(&hs, &y, &SolverConfig::new(Method::Spgda, m), None).unwrap();
        mismatches += bit_mismatches(&gather(&agents), central.x.values());
        count_errors += usize::from(net.log().total_messages() != exchange_size(&g, range) * m);
        range_violations += violations(&g, net.log(), range);
    }
    outcome(
        mismatches == 0 && range_violations == 0 && count_errors == 0,
        format!("50 instances x 2 methods: {mismatches} bit mismatches, {range_violations} range violations, {count_errors} count errors"),
    )
}

fn bit_mismatches(a: &[f64], b: &[f64]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x.to_bits() != y.to_bits()).count()
}

fn violations(g: &Graph, log: &sdn_inverse::sdn::RoundLog, range: usize) -> usize {
    log.messages()
        .filter(|(_, msg)| {
            let d = g.geodesic_distance(msg.from, msg.to).unwrap().unwrap();
            d == 0 || d > range
        })
        .count()
}

fn fig1_config() -> ScenarioConfig {
    ScenarioConfig::defaults(Scenario::Fig1)
}

fn criterion_6(agg: &TrialAggregate, elapsed: Duration) -> Outcome {
    let targets = [
        (Method::Spgda, 0.9786),
        (Method::Pgda, 0.9996),
        (Method::Opgd, 0.9993),
        (Method::Imia, 0.9566),
    ];
    let mut pass = elapsed < Duration::from_secs(600);
    let mut parts = Vec::new();
    for (method, want) in targets {
        let a = agg.method(method).unwrap();
        let r = a.mean_radius.unwrap_or(f64::NAN);
        pass &= (r - want).abs() <= 0.02;
        parts.push(format!("{method} radius {r:.4}"));
    }
    let hit = |m: Method| agg.method(m).unwrap().milestone;
    let imia = hit(Method::Imia);
    let spgda = hit(Method::Spgda);
    pass &= imia.is_some_and(|m| (40..=80).contains(&m));
    pass &= spgda.is_some_and(|m| (90..=150).contains(&m));
    pass &= hit(Method::Pgda).is_none() && hit(Method::Opgd).is_none();
    parts.push(format!(
        "5% at imia {imia:?}, spgda {spgda:?}, pgda {:?}, opgd {:?}",
        hit(Method::Pgda),
        hit(Method::Opgd)
    ));
    parts.push(format!("{:.1} s", elapsed.as_secs_f64()));
    outcome(pass, parts.join(", "))
}

fn criterion_7(agg: &TrialAggregate) -> Outcome {
    let frac = agg.condition_fraction(60.0, 180.0).unwrap_or(0.0);
    let mut c = agg.condition_numbers.clone();
    c.sort_by(f64::total_cmp);
    outcome(
        frac >= 0.9,
        format!(
            "{:.0}% of {} trials in [60, 180] (min {:.1}, median {:.1}, max {:.1})",
            100.0 * frac,
            c.len(),
            c[0],
            c[c.len() / 2],
            c[c.len() - 1]
        ),
    )
}

fn criterion_8() -> Outcome {
    let cfg = ScenarioConfig::defaults(Scenario::Denoise);
    let data = Dataset::for_config(&cfg).unwrap();
    let agg = run_denoise(&cfg, &data).unwrap();
    let residual = agg.extra["oracle_relative_residual"].as_f64().unwrap();
    let limit = agg.extra["limit_snr_db"].as_f64().unwrap();
    let mut pass = residual <= 1e-8;
    let mut parts = vec![format!("oracle residual {residual:.2e}, limit {limit:.3} dB")];
    for (method, max) in [(Method::Spgda, 15), (Method::Opgd, 20), (Method::Pgda, 60)] {
        let hit = agg.method(method).unwrap().milestone;
        pass &= hit.is_some_and(|m| m <= max);
        parts.push(format!("{method} {hit:?} (<= {max})"));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..20 {
        let (g, w, seed) = random_instance("c9", k);
        let h = well_conditioned_filter(&g, w, seed).unwrap();
        let y = observation(&g, seed ^ 4);
        let x_star = direct_solve_oracle(&h, &y).unwrap();
        for method in Method::ALL {
            let sol = solve(&h, &y, &SolverConfig::new(method, 500), Some(&x_star)).unwrap();
            worst = worst.max(sol.trace.records.last().unwrap().relative_error.unwrap());
        }
    }
    outcome(
        worst <= 1e-6,
        format!("20 filters x 4 methods at M=500, worst relative error {worst:.2e}"),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(
        &config,
        r#"{"scenario": "fig1", "n": 128, "trials": 3, "M": 60, "distributed": true}"#,
    )
    .unwrap();
    let run = |out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_sdnfilter"))
            .args(["run", "--config"])
            .arg(&config)
            .args(["--seed", "17", "--out"])
            .arg(out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    };
    // the output directory is echoed into the summary, so both runs share it
    let out = dir.path().join("out");
    let snapshot = |out: &Path| {
        let mut files: Vec<_> = std::fs::read_dir(out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    run(&out);
    let first = snapshot(&out);
    std::fs::remove_dir_all(&out).unwrap();
    run(&out);
    let second = snapshot(&out);
    let names: Vec<_> = first.iter().map(|(n, _)| n.clone()).collect();
    let differing: Vec<_> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.clone())
        .collect();
    outcome(
        differing.is_empty() && first.len() == second.len() && !first.is_empty(),
        format!("{} files compared {names:?}, differing: {differing:?}", first.len()),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    })
}

fn main() {
    let mut failed = Vec::new();
    let mut report = |k: usize, o: Outcome| {
        println!(
            "criterion {k:>2}: {}  {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(k);
        }
    };
    report(1, guarded(criterion_1));
    report(2, guarded(criterion_2));
    report(3, guarded(criterion_3));
    report(4, guarded(criterion_4));
    report(5, guarded(criterion_5));

    let start = Instant::now();
    let fig1 = catch_unwind(|| run_fig1(&fig1_config()).unwrap());
    let elapsed = start.elapsed();
    match &fig1 {
        Ok(agg) => {
            report(6, guarded(|| criterion_6(agg, elapsed)));
            report(7, guarded(|| criterion_7(agg)));
        }
        Err(_) => {
            report(6, outcome(false, "fig1 run panicked"));
            report(7, outcome(false, "fig1 run panicked"));
        }
    }
    report(8, guarded(criterion_8));
    report(9, guarded(criterion_9));
    report(10, guarded(criterion_10));

    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
