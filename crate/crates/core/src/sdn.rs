//! Bulk-synchronous simulation of a spatially distributed network.
//!
//! Each vertex hosts an agent that stores only the filter entries `H(i,j)`
//! and `H(j,i)` for `j ∈ B(i, ω(H))`, its own observation, and values it has
//! received from agents within its neighborhood. Execution proceeds in
//! rounds: every agent computes from its local state, then one exchange
//! delivers messages. Every message is checked against the communication
//! range `L` before delivery.
//!
//! Agents sum over their neighborhoods in ascending vertex order, the same
//! order the centralized solvers use, so gathered iterates are bit-identical
//! to [`crate::solver::solve`].

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter::{same_graph, GraphFilter, Signal};
use crate::graph::Graph;
use crate::precond::{pgda_weight, SYMMETRY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PayloadKind {
    /// Local dominance value `d(i)` (preconditioner construction).
    D,
    /// Residual `v⁽ᵐ⁾(i)`.
    V,
    /// Iterate `x⁽ᵐ⁾(i)`.
    X,
    /// Preconditioner entry.
    P,
}

impl fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PayloadKind::D => "d",
            PayloadKind::V => "v",
            PayloadKind::X => "x",
            PayloadKind::P => "p",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub from: usize,
    pub to: usize,
    pub kind: PayloadKind,
    pub value: f64,
}

/// One exchange step.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub epoch: usize,
    pub index: usize,
    pub kind: PayloadKind,
    pub message_count: usize,
    /// Largest hop distance spanned by a message in this round.
    pub max_distance: usize,
    /// Individual messages; empty unless message recording is enabled.
    pub messages: Vec<Message>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoundLog {
    pub record_messages: bool,
    pub rounds: Vec<Round>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogSummary {
    pub rounds: usize,
    pub messages: usize,
    pub max_distance: usize,
}

impl RoundLog {
    pub fn total_messages(&self) -> usize {
        self.rounds.iter().map(|r| r.message_count).sum()
    }

    pub fn summary(&self) -> LogSummary {
        LogSummary {
            rounds: self.rounds.len(),
            messages: self.total_messages(),
            max_distance: self.rounds.iter().map(|r| r.max_distance).max().unwrap_or(0),
        }
    }

    pub fn messages(&self) -> impl Iterator<Item = (&Round, &Message)> {
        self.rounds.iter().flat_map(|r| r.messages.iter().map(move |m| (r, m)))
    }
}

/// Local storage of the agent at one vertex.
#[derive(Debug, Clone)]
pub struct AgentState {
    pub id: usize,
    /// `B(i, ω(H))`, ascending.
    neighborhood: Vec<usize>,
    /// `(position in neighborhood, H(i,j))`, ascending `j`, nonzero only.
    local_rows: Vec<(usize, f64)>,
    /// `(position in neighborhood, H(j,i))`, ascending `j`, nonzero only.
    local_cols: Vec<(usize, f64)>,
    y: f64,
    d_value: f64,
    p_value: Option<f64>,
    /// `H(j,i) / P(i,i)²` aligned with `local_cols`.
    pgda_weights: Vec<(usize, f64)>,
    p_sym: Option<f64>,
    /// `H(i,j) / P_sym(i,i)` aligned with `local_rows`.
    rows_tilde: Vec<(usize, f64)>,
    y_tilde: f64,
    /// Last known `x(j)` for every neighborhood member.
    x_local: Vec<f64>,
    /// Last received `v(j)` (or `d(j)` during setup) per neighborhood member.
    received: Vec<f64>,
    self_pos: usize,
}

impl AgentState {
    pub fn neighborhood(&self) -> &[usize] {
        &self.neighborhood
    }

    pub fn local_rows(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.local_rows.iter().map(|&(p, v)| (self.neighborhood[p], v))
    }

    pub fn local_cols(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.local_cols.iter().map(|&(p, v)| (self.neighborhood[p], v))
    }

    pub fn p_value(&self) -> Option<f64> {
        self.p_value
    }

    pub fn p_sym(&self) -> Option<f64> {
        self.p_sym
    }

    pub fn y_tilde(&self) -> f64 {
        self.y_tilde
    }

    /// Normalized row `H(i,j) / P_sym(i,i)` after SPGDA setup.
    pub fn rows_tilde(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows_tilde.iter().map(|&(p, v)| (self.neighborhood[p], v))
    }

    /// The agent's own iterate.
    pub fn x(&self) -> f64 {
        self.x_local[self.self_pos]
    }

    /// The agent's view `(j, x(j))` of its neighborhood.
    pub fn x_neighborhood(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.neighborhood.iter().copied().zip(self.x_local.iter().copied())
    }

    fn position(&self, v: usize) -> Option<usize> {
        self.neighborhood.binary_search(&v).ok()
    }
}

/// Gathers every agent's own iterate into a global vector.
pub fn gather(agents: &[AgentState]) -> Vec<f64> {
    agents.iter().map(AgentState::x).collect()
}

/// Per-epoch output of a time-varying run.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochOutput {
    pub epoch: usize,
    pub x: Vec<f64>,
    pub p_values: Vec<f64>,
    pub messages: usize,
    pub rounds: usize,
}

/// The simulated network: topology, communication range and round log.
#[derive(Debug, Clone)]
pub struct Network {
    graph: Arc<Graph>,
    range: usize,
    /// `(vertex, hop distance)` for every vertex within range, ascending.
    reach: Vec<Vec<(usize, usize)>>,
    log: RoundLog,
    epoch: usize,
}

impl Network {
    pub fn new(graph: Arc<Graph>, range: usize) -> Result<Network> {
        if range < 1 {
            return Err(Error::arg("communication range must be at least 1"));
        }
        let reach = (0..graph.n())
            .map(|i| {
                graph
                    .bfs(i, range)
                    .into_iter()
                    .enumerate()
                    .filter_map(|(v, d)| d.map(|d| (v, d)))
                    .collect()
            })
            .collect();
        Ok(Network {
            graph,
            range,
            reach,
            log: RoundLog::default(),
            epoch: 0,
        })
    }

    pub fn with_message_recording(mut self, on: bool) -> Self {
        self.log.record_messages = on;
        self
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn log(&self) -> &RoundLog {
        &self.log
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn set_epoch(&mut self, epoch: usize) {
        self.epoch = epoch;
    }

    fn hop_distance(&self, from: usize, to: usize) -> Option<usize> {
        let r = &self.reach[from];
        r.binary_search_by_key(&to, |e| e.0).ok().map(|k| r[k].1)
    }

    /// Hands each agent its rows and columns of `h` and its observation.
    /// Fails before any communication when `ω(H) > L`.
    pub fn distribute(&self, h: &GraphFilter, y: &Signal) -> Result<Vec<AgentState>> {
        self.distribute_from(h, y, None)
    }

    /// [`Network::distribute`] with a starting iterate known to every agent
    /// for its own neighborhood.
    pub fn distribute_from(&self, h: &GraphFilter, y: &Signal, initial: Option<&[f64]>) -> Result<Vec<AgentState>> {
        if !same_graph(h.graph(), &self.graph) {
            return Err(Error::GraphMismatch);
        }
        y.check_graph(&self.graph)?;
        let w = h.width();
        if w > self.range {
            return Err(Error::RangeTooSmall {
                range: self.range,
                width: w,
            });
        }
        if let Some(x0) = initial {
            if x0.len() != self.graph.n() {
                return Err(Error::arg("initial iterate has the wrong length"));
            }
        }
        let ht = h.transpose();
        let agents = (0..self.graph.n())
            .map(|i| {
                let neighborhood = self.graph.ball(i, w).unwrap().members;
                let pos = |j: usize| neighborhood.binary_search(&j).expect("entry within ω(H)");
                let local_rows: Vec<_> = h.row_entries(i).map(|(j, v)| (pos(j), v)).collect();
                let local_cols: Vec<_> = ht.row_entries(i).map(|(j, v)| (pos(j), v)).collect();
                let x_local = match initial {
                    Some(x0) => neighborhood.iter().map(|&j| x0[j]).collect(),
                    None => vec![0.0; neighborhood.len()],
                };
                let k = neighborhood.len();
                let self_pos = pos(i);
                AgentState {
                    id: i,
                    neighborhood,
                    local_rows,
                    local_cols,
                    y: y.values()[i],
                    d_value: 0.0,
                    p_value: None,
                    pgda_weights: Vec::new(),
                    p_sym: None,
                    rows_tilde: Vec::new(),
                    y_tilde: 0.0,
                    x_local,
                    received: vec![0.0; k],
                    self_pos,
                }
            })
            .collect();
        Ok(agents)
    }

    /// Every agent sends `value(agent)` to each other member of its
    /// neighborhood; recipients store it with `store`.
    fn exchange(
        &mut self,
        agents: &mut [AgentState],
        kind: PayloadKind,
        value: impl Fn(&AgentState) -> f64,
        store: impl Fn(&mut AgentState, usize, f64),
    ) -> Result<()> {
        let outgoing: Vec<f64> = agents.iter().map(&value).collect();
        let mut count = 0;
        let mut max_distance = 0;
        let mut messages = Vec::new();
        for from in 0..agents.len() {
            let targets: Vec<usize> = {
                let a = &agents[from];
                a.neighborhood.iter().copied().filter(|&j| j != a.id).collect()
            };
            for to in targets {
                let distance = match self.hop_distance(from, to) {
                    Some(d) => d,
                    None => {
                        let distance = self.graph.bfs(from, usize::MAX)[to].unwrap_or(usize::MAX);
                        return Err(Error::RangeViolation {
                            from,
                            to,
                            distance,
                            range: self.range,
                        });
                    }
                };
                let recipient = &mut agents[to];
                let slot = recipient
                    .position(from)
                    .expect("neighborhoods of equal radius are symmetric");
                store(recipient, slot, outgoing[from]);
                count += 1;
                max_distance = max_distance.max(distance);
                if self.log.record_messages {
                    messages.push(Message {
                        from,
                        to,
                        kind,
                        value: outgoing[from],
                    });
                }
            }
        }
        let index = self.log.rounds.len();
        self.log.rounds.push(Round {
            epoch: self.epoch,
            index,
            kind,
            message_count: count,
            max_distance,
            messages,
        });
        Ok(())
    }

    /// Vertex-level construction of `P_H`: local `d(i)`, one exchange, local max.
    pub fn distributed_preconditioner(&mut self, agents: &mut [AgentState]) -> Result<()> {
        agents.par_iter_mut().for_each(|a| {
            let rows = a.local_rows.iter().fold(0.0, |acc: f64, e| acc + e.1.abs());
            let cols = a.local_cols.iter().fold(0.0, |acc: f64, e| acc + e.1.abs());
            a.d_value = rows.max(cols);
            let sp = a.self_pos;
            a.received[sp] = a.d_value;
        });
        self.exchange(agents, PayloadKind::D, |a| a.d_value, |a, slot, v| a.received[slot] = v)?;
        for a in agents.iter() {
            let p = a.received.iter().copied().fold(0.0, f64::max);
            if !(p > 0.0) {
                return Err(Error::Singular(format!(
                    "preconditioner entry at vertex {} is zero",
                    a.id
                )));
            }
        }
        agents.par_iter_mut().for_each(|a| {
            let p = a.received.iter().copied().fold(0.0, f64::max);
            a.p_value = Some(p);
            a.pgda_weights = a
                .local_cols
                .iter()
                .map(|&(pos, h_ji)| (pos, pgda_weight(h_ji, p)))
                .filter(|e| e.1 != 0.0)
                .collect();
        });
        Ok(())
    }

    /// Purely local SPGDA setup: `P_sym(i,i)`, `H̃(i,·)` and `ỹ(i)`.
    pub fn distributed_spgda_setup(&mut self, agents: &mut [AgentState]) -> Result<()> {
        for a in agents.iter() {
            // each agent holds its row and its column, so symmetry is checkable locally
            for (&(pr, hr), &(pc, hc)) in a.local_rows.iter().zip(&a.local_cols) {
                if pr != pc || (hr - hc).abs() > SYMMETRY_TOL {
                    let j = a.neighborhood[pr.min(pc)];
                    let gap = if pr == pc {
                        (hr - hc).abs()
                    } else {
                        hr.abs().max(hc.abs())
                    };
                    return Err(Error::Asymmetric { i: a.id, j, gap });
                }
            }
            if a.local_rows.len() != a.local_cols.len() {
                return Err(Error::Asymmetric {
                    i: a.id,
                    j: a.id,
                    gap: f64::NAN,
                });
            }
            if a.local_rows.is_empty() {
                return Err(Error::Singular(format!("row {} of the filter is zero", a.id)));
            }
        }
        agents.par_iter_mut().for_each(|a| {
            let p = a.local_rows.iter().fold(0.0, |acc: f64, e| acc + e.1.abs());
            a.p_sym = Some(p);
            a.rows_tilde = a
                .local_rows
                .iter()
                .map(|&(pos, h)| (pos, h / p))
                .filter(|e| e.1 != 0.0)
                .collect();
            a.y_tilde = a.y / p;
        });
        Ok(())
    }

    /// `M` PGDA iterations; each has a residual exchange and an iterate
    /// exchange.
    pub fn run_distributed_pgda(&mut self, agents: &mut [AgentState], iterations: usize) -> Result<()> {
        if let Some(a) = agents.iter().find(|a| a.p_value.is_none()) {
            return Err(Error::arg(format!("agent {} has no preconditioner value", a.id)));
        }
        for _ in 0..iterations {
            agents.par_iter_mut().for_each(|a| {
                let s = a.local_rows.iter().fold(0.0, |acc, &(pos, h)| acc + h * a.x_local[pos]);
                let sp = a.self_pos;
                a.received[sp] = a.y - s;
            });
            self.exchange(
                agents,
                PayloadKind::V,
                |a| a.received[a.self_pos],
                |a, slot, v| a.received[slot] = v,
            )?;
            agents.par_iter_mut().for_each(|a| {
                let s = a
                    .pgda_weights
                    .iter()
                    .fold(0.0, |acc, &(pos, w)| acc + w * a.received[pos]);
                let sp = a.self_pos;
                a.x_local[sp] += s;
            });
            self.exchange(agents, PayloadKind::X, AgentState::x, |a, slot, v| a.x_local[slot] = v)?;
        }
        Ok(())
    }

    /// `M` SPGDA iterations; one iterate exchange each.
    pub fn run_distributed_spgda(&mut self, agents: &mut [AgentState], iterations: usize) -> Result<()> {
        if let Some(a) = agents.iter().find(|a| a.p_sym.is_none()) {
            return Err(Error::arg(format!("agent {} has not run the symmetric setup", a.id)));
        }
        for _ in 0..iterations {
            agents.par_iter_mut().for_each(|a| {
                let s = a.rows_tilde.iter().fold(0.0, |acc, &(pos, h)| acc + h * a.x_local[pos]);
                let sp = a.self_pos;
                // stage in `received` so the update reads only previous-round iterates
                a.received[sp] = a.x_local[sp] + a.y_tilde - s;
            });
            agents.par_iter_mut().for_each(|a| {
                let sp = a.self_pos;
                a.x_local[sp] = a.received[sp];
            });
            self.exchange(agents, PayloadKind::X, AgentState::x, |a, slot, v| a.x_local[slot] = v)?;
        }
        Ok(())
    }

    /// Self-adaptive inverse filtering of a time-varying filter: for each
    /// epoch the agents receive only their local entries of `H_t`, rebuild the
    /// preconditioner at vertex level and run `M` PGDA iterations.
    pub fn run_time_varying(
        &mut self,
        filters: &[GraphFilter],
        observations: &[Signal],
        iterations: usize,
    ) -> Result<Vec<EpochOutput>> {
        if filters.len() != observations.len() {
            return Err(Error::arg("one observation is needed per filter epoch"));
        }
        let mut out = Vec::with_capacity(filters.len());
        for (t, (h, y)) in filters.iter().zip(observations).enumerate() {
            if h.width() > self.range {
                return Err(Error::EpochRange {
                    epoch: t,
                    range: self.range,
                    width: h.width(),
                });
            }
            self.epoch = t;
            let before = self.log.summary();
            let mut agents = self.distribute(h, y)?;
            self.distributed_preconditioner(&mut agents)?;
            self.run_distributed_pgda(&mut agents, iterations)?;
            let after = self.log.summary();
            out.push(EpochOutput {
                epoch: t,
                x: gather(&agents),
                p_values: agents.iter().map(|a| a.p_value.unwrap()).collect(),
                messages: after.messages - before.messages,
                rounds: after.rounds - before.rounds,
            });
        }
        Ok(out)
    }
}

/// `Σ_i (|B(i,ω)| - 1)`: messages in one neighborhood-wide exchange.
pub fn exchange_size(graph: &Graph, width: usize) -> usize {
    graph.balls(width).iter().map(|b| b.len() - 1).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplacian::Laplacians;
    use crate::precond::build_pgda_preconditioner;
    use crate::solver::{solve, Method, SolverConfig};

    fn path(n: usize) -> Arc<Graph> {
        Arc::new(Graph::path(n).unwrap())
    }

    #[test]
    fn identity_preconditioner_no_messages() {
        let g = path(5);
        let h = GraphFilter::identity(g.clone());
        let mut net = Network::new(g.clone(), 1).unwrap();
        let mut agents = net.distribute(&h, &Signal::zeros(g)).unwrap();
        net.distributed_preconditioner(&mut agents).unwrap();
        assert!(agents.iter().all(|a| a.p_value() == Some(1.0)));
        assert_eq!(net.log().total_messages(), 0);
    }

    #[test]
    fn path_laplacian_preconditioner() {
        let g = path(3);
        let lap = Laplacians::of(&g).unwrap().combinatorial;
        let mut net = Network::new(g.clone(), 1).unwrap().with_message_recording(true);
        let mut agents = net.distribute(&lap, &Signal::zeros(g)).unwrap();
        net.distributed_preconditioner(&mut agents).unwrap();
        let p: Vec<f64> = agents.iter().map(|a| a.p_value().unwrap()).collect();
        assert_eq!(p, vec![4.0, 4.0, 4.0]);
        assert_eq!(net.log().total_messages(), 4);
        let from_middle = net.log().messages().filter(|(_, m)| m.from == 1).count();
        assert_eq!(from_middle, 2);
        assert_eq!(p, build_pgda_preconditioner(&lap).unwrap().values());
    }

    #[test]
    fn range_checked_before_sending() {
        let g = path(4);
        let a = GraphFilter::adjacency(g.clone());
        let a2 = a.compose(&a).unwrap();
        let net = Network::new(g.clone(), 1).unwrap();
        assert!(matches!(
            net.distribute(&a2, &Signal::zeros(g)),
            Err(Error::RangeTooSmall { range: 1, width: 2 })
        ));
        assert_eq!(net.log().total_messages(), 0);
    }

    #[test]
    fn spgda_setup_is_local() {
        let g = path(3);
        let lap = Laplacians::of(&g).unwrap().combinatorial;
        let mut net = Network::new(g.clone(), 1).unwrap();
        let y = Signal::new(g, vec![1.0, 2.0, 3.0]).unwrap();
        let mut agents = net.distribute(&lap, &y).unwrap();
        net.distributed_spgda_setup(&mut agents).unwrap();
        assert_eq!(net.log().total_messages(), 0);
        assert_eq!(agents[1].p_sym(), Some(4.0));
        let row: Vec<_> = agents[1].rows_tilde().collect();
        assert_eq!(row, vec![(0, -0.25), (1, 0.5), (2, -0.25)]);
        assert_eq!(agents[1].y_tilde(), 0.5);
    }

    #[test]
    fn spgda_setup_rejects_asymmetric() {
        let g = path(2);
        let h = GraphFilter::from_dense(g.clone(), &[vec![2.0, 1.0], vec![0.5, 2.0]]).unwrap();
        let mut net = Network::new(g.clone(), 1).unwrap();
        let mut agents = net.distribute(&h, &Signal::zeros(g)).unwrap();
        assert!(matches!(
            net.distributed_spgda_setup(&mut agents),
            Err(Error::Asymmetric { .. })
        ));
    }

    #[test]
    fn identity_runs() {
        let g = path(4);
        let h = GraphFilter::identity(g.clone());
        let y = Signal::new(g.clone(), vec![1.0, -2.0, 0.5, 4.0]).unwrap();
        let mut net = Network::new(g.clone(), 1).unwrap();
        let mut agents = net.distribute(&h, &y).unwrap();
        net.distributed_preconditioner(&mut agents).unwrap();
        net.run_distributed_pgda(&mut agents, 1).unwrap();
        assert_eq!(gather(&agents), y.values());

        let mut net = Network::new(g.clone(), 1).unwrap();
        let mut agents = net.distribute(&h, &y).unwrap();
        net.distributed_spgda_setup(&mut agents).unwrap();
        net.run_distributed_spgda(&mut agents, 1).unwrap();
        assert_eq!(gather(&agents), y.values());
        assert_eq!(net.log().total_messages(), 0);
    }

    #[test]
    fn edge_pgda_matches_centralized() {
        let g = path(2);
        let h = GraphFilter::from_dense(g.clone(), &[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let y = Signal::new(g.clone(), vec![1.0, 1.0]).unwrap();
        let mut net = Network::new(g.clone(), 1).unwrap();
        let mut agents = net.distribute(&h, &y).unwrap();
        net.distributed_preconditioner(&mut agents).unwrap();
        net.run_distributed_pgda(&mut agents, 2).unwrap();
        let central = solve(&h, &y, &SolverConfig::new(Method::Pgda, 2), None).unwrap();
        assert_eq!(gather(&agents), central.x.values());
        // every agent also knows its neighbor's final value
        for a in &agents {
            for (j, xj) in a.x_neighborhood() {
                assert_eq!(xj, central.x.values()[j]);
            }
        }
        assert_eq!(net.log().total_messages(), 2 + 2 * 2 * exchange_size(&g, 1));
    }

    #[test]
    fn spgda_on_path_matches_centralized() {
        let g = path(9);
        let lap = Laplacians::of(&g).unwrap().combinatorial;
        let h = GraphFilter::identity(g.clone()).add(&lap).unwrap();
        let y = Signal::new(g.clone(), (0..9).map(|i| (i as f64).sin()).collect()).unwrap();
        let mut net = Network::new(g.clone(), 1).unwrap();
        let mut agents = net.distribute(&h, &y).unwrap();
        net.distributed_spgda_setup(&mut agents).unwrap();
        net.run_distributed_spgda(&mut agents, 50).unwrap();
        let central = solve(&h, &y, &SolverConfig::new(Method::Spgda, 50), None).unwrap();
        assert_eq!(gather(&agents), central.x.values());
        assert_eq!(net.log().total_messages(), 50 * exchange_size(&g, 1));
    }

    #[test]
    fn time_varying_homogeneity() {
        let g = path(6);
        let lap = Laplacians::of(&g).unwrap().combinatorial;
        let h = GraphFilter::identity(g.clone()).scale(3.0).add(&lap).unwrap();
        let y = Signal::new(g.clone(), vec![1.0, 0.0, 2.0, -1.0, 0.5, 0.0]).unwrap();
        let mut net = Network::new(g.clone(), 1).unwrap();
        let out = net
            .run_time_varying(
                &[h.clone(), h.scale(2.0), h.clone()],
                &[y.clone(), y.clone(), y.clone()],
                30,
            )
            .unwrap();
        for (a, b) in out[0].p_values.iter().zip(&out[1].p_values) {
            assert_eq!(2.0 * a, *b);
        }
        assert_eq!(out[0].x, out[2].x);
        assert_eq!(out[0].messages, out[1].messages);
        assert_eq!(out[1].epoch, 1);
    }

    #[test]
    fn time_varying_range_error_names_epoch() {
        let g = path(4);
        let a = GraphFilter::adjacency(g.clone());
        let wide = GraphFilter::identity(g.clone())
            .scale(4.0)
            .add(&a.compose(&a).unwrap())
            .unwrap();
        let narrow = GraphFilter::identity(g.clone()).scale(4.0).add(&a).unwrap();
        let y = Signal::zeros(g.clone());
        let mut net = Network::new(g, 1).unwrap();
        match net.run_time_varying(&[narrow, wide], &[y.clone(), y], 3) {
            Err(Error::EpochRange {
                epoch: 1,
                range: 1,
                width: 2,
            }) => {}
            other => panic!("{other:?}"),
        }
    }
}
