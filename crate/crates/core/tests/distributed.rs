//! The vertex-level simulator reproduces the centralized solvers bit for bit
//! and never communicates beyond the range.

use std::sync::Arc;

use proptest::prelude::*;
use sdn_inverse::instances::{random_connected_graph, random_filter, random_spd_filter};
use sdn_inverse::sdn::{exchange_size, gather, PayloadKind};
use sdn_inverse::*;

fn instance(n: usize, seed: u64) -> Arc<Graph> {
    Arc::new(random_connected_graph(n, n / 4, seed).unwrap())
}

fn observation(g: &Arc<Graph>, seed: u64) -> Signal {
    let vals = (0..g.n())
        .map(|i| ((i as u64 ^ seed) % 97) as f64 / 13.0 - 3.0)
        .collect();
    Signal::new(g.clone(), vals).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pgda_bit_exact(n in 2usize..40, w in 1usize..=3, extra in 0usize..2, m in 1usize..100, seed: u64) {
        let g = instance(n, seed);
        let h = random_filter(&g, w, 0.4, seed ^ 7).unwrap();
        let y = observation(&g, seed);
        let range = h.width() + extra;
        let mut net = Network::new(g.clone(), range).unwrap().with_message_recording(true);
        let mut agents = net.distribute(&h, &y).unwrap();
        net.distributed_preconditioner(&mut agents).unwrap();
        net.run_distributed_pgda(&mut agents, m).unwrap();
        let central = solve(&h, &y, &SolverConfig::new(Method::Pgda, m), None).unwrap();
        let xd = gather(&agents);
        prop_assert!(xd.iter().zip(central.x.values()).all(|(a, b)| a.to_bits() == b.to_bits()));

        let per_exchange = exchange_size(&g, h.width());
        prop_assert_eq!(net.log().total_messages(), per_exchange * (1 + 2 * m));
        for (_, msg) in net.log().messages() {
            let d = g.geodesic_distance(msg.from, msg.to).unwrap().unwrap();
            prop_assert!(d >= 1 && d <= range);
        }
        let p = build_pgda_preconditioner(&h).unwrap();
        for a in &agents {
            prop_assert_eq!(a.p_value().unwrap(), p.get(a.id));
        }
    }

    #[test]
    fn spgda_bit_exact(n in 2usize..40, w in 1usize..=3, m in 1usize..100, seed: u64) {
        let g = instance(n, seed);
        let h = random_spd_filter(&g, w, 0.4, 0.1, seed ^ 9).unwrap();
        let y = observation(&g, seed);
        let mut net = Network::new(g.clone(), w).unwrap();
        let mut agents = net.distribute(&h, &y).unwrap();
        net.distributed_spgda_setup(&mut agents).unwrap();
        net.run_distributed_spgda(&mut agents, m).unwrap();
        let central = solve(&h, &y, &SolverConfig::new(Method::Spgda, m), None).unwrap();
        let xd = gather(&agents);
        prop_assert!(xd.iter().zip(central.x.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(net.log().total_messages(), m * exchange_size(&g, h.width()));
        prop_assert!(net.log().rounds.iter().all(|r| r.kind == PayloadKind::X));
    }
}

/// Changing `y` at one vertex changes `x⁽ᵐ⁾` only within the dependency cone
/// of radius `2·m·ω(H)` for PGDA.
#[test]
fn perturbation_stays_in_cone() {
    let g = Arc::new(Graph::path(40).unwrap());
    let h = random_filter(&g, 1, 0.8, 3).unwrap();
    let y = observation(&g, 1);
    let mut y2 = y.values().to_vec();
    y2[20] += 1.0;
    let y2 = Signal::new(g.clone(), y2).unwrap();
    let m = 4;
    let run = |y: &Signal| {
        let mut net = Network::new(g.clone(), 1).unwrap();
        let mut agents = net.distribute(&h, y).unwrap();
        net.distributed_preconditioner(&mut agents).unwrap();
        net.run_distributed_pgda(&mut agents, m).unwrap();
        gather(&agents)
    };
    let (a, b) = (run(&y), run(&y2));
    for i in 0..40 {
        let dist = (i as i64 - 20).unsigned_abs() as usize;
        if dist > 2 * m {
            assert_eq!(a[i].to_bits(), b[i].to_bits(), "vertex {i}");
        }
    }
    assert_ne!(a[20], b[20]);
}

#[test]
fn parallel_and_repeat_runs_identical() {
    let g = instance(35, 5);
    let h = random_filter(&g, 2, 0.5, 5).unwrap();
    let y = observation(&g, 5);
    let run = || {
        let mut net = Network::new(g.clone(), 2).unwrap().with_message_recording(true);
        let mut agents = net.distribute(&h, &y).unwrap();
        net.distributed_preconditioner(&mut agents).unwrap();
        net.run_distributed_pgda(&mut agents, 20).unwrap();
        (gather(&agents), net.log().clone())
    };
    assert_eq!(run(), run());
}
