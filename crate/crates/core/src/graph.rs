//! Undirected unweighted graphs, geodesic distances and hop neighborhoods.
//!
//! A [`Graph`] is immutable after construction and is always connected.
//! Neighbor lists are kept sorted so that breadth-first search visits
//! vertices in a reproducible order.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};

/// Number of derived sub-seeds tried by the random generators before giving up.
pub const MAX_GENERATION_ATTEMPTS: usize = 10_000;

/// Position of an agent in the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Connected, undirected, unweighted graph without self-loops.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    coordinates: Option<Vec<Point>>,
    accepted_seed: Option<u64>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adjacency == other.adjacency && self.coordinates == other.coordinates
    }
}

/// The set `B(center, radius)` of vertices within `radius` hops of `center`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopNeighborhood {
    pub center: usize,
    pub radius: usize,
    /// Sorted ascending; always contains `center`.
    pub members: Vec<usize>,
}

impl HopNeighborhood {
    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members other than the center.
    pub fn others(&self) -> impl Iterator<Item = usize> + '_ {
        let c = self.center;
        self.members.iter().copied().filter(move |&v| v != c)
    }
}

impl Graph {
    /// Builds a graph from an undirected edge list. Duplicate edges (in
    /// either orientation) are merged; self-loops and disconnected inputs
    /// are rejected.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        coordinates: Option<Vec<Point>>,
    ) -> Result<Graph> {
        if n == 0 {
            return Err(Error::Construction("graph must have at least one vertex".into()));
        }
        if let Some(c) = &coordinates {
            if c.len() != n {
                return Err(Error::Construction(format!(
                    "{} coordinates supplied for {n} vertices",
                    c.len()
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n {
                return Err(Error::InvalidVertex { vertex: i, n });
            }
            if j >= n {
                return Err(Error::InvalidVertex { vertex: j, n });
            }
            if i == j {
                return Err(Error::Construction(format!("self-loop at vertex {i}")));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let g = Graph {
            adjacency,
            coordinates,
            accepted_seed: None,
        };
        let reached = g.bfs(0, usize::MAX).iter().filter(|d| d.is_some()).count();
        if reached != n {
            return Err(Error::Construction(format!(
                "graph is disconnected: {reached} of {n} vertices reachable from vertex 0"
            )));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, ordered lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn coordinates(&self) -> Option<&[Point]> {
        self.coordinates.as_deref()
    }

    /// Seed that produced this graph when it came from a random generator.
    pub fn accepted_seed(&self) -> Option<u64> {
        self.accepted_seed
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.n() as f64
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, n: self.n() })
        }
    }

    /// Hop distances from `source`, truncated at `max_depth`. Vertices farther
    /// than `max_depth` (or unreachable) are `None`.
    pub fn bfs(&self, source: usize, max_depth: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du == max_depth {
                continue;
            }
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Number of edges on a shortest path between `i` and `j`, or `None`
    /// when no path exists.
    pub fn geodesic_distance(&self, i: usize, j: usize) -> Result<Option<usize>> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i == j {
            return Ok(Some(0));
        }
        Ok(self.bfs(i, usize::MAX)[j])
    }

    /// `B(i, s) = { j : ρ(i, j) <= s }`.
    pub fn ball(&self, i: usize, s: usize) -> Result<HopNeighborhood> {
        self.check_vertex(i)?;
        let members = self
            .bfs(i, s)
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.map(|_| v))
            .collect();
        Ok(HopNeighborhood {
            center: i,
            radius: s,
            members,
        })
    }

    /// `B(i, s)` for every vertex.
    pub fn balls(&self, s: usize) -> Vec<HopNeighborhood> {
        (0..self.n()).map(|i| self.ball(i, s).unwrap()).collect()
    }

    /// Random geometric graph on `n` uniform points in `[0,1]²`, with an edge
    /// whenever the Euclidean distance is at most `radius`. Disconnected
    /// draws are retried with derived sub-seeds, up to
    /// [`MAX_GENERATION_ATTEMPTS`] times.
    pub fn random_geometric(n: usize, radius: f64, seed: u64) -> Result<Graph> {
        Graph::random_geometric_with_budget(n, radius, seed, MAX_GENERATION_ATTEMPTS)
    }

    pub fn random_geometric_with_budget(n: usize, radius: f64, seed: u64, max_attempts: usize) -> Result<Graph> {
        if n < 2 {
            return Err(Error::arg(format!("random geometric graph needs n >= 2, got {n}")));
        }
        if !(radius > 0.0) {
            return Err(Error::arg(format!("radius must be positive, got {radius}")));
        }
        let r2 = radius * radius;
        for attempt in 0..max_attempts {
            let sub_seed = derive_seed(seed, attempt as u64, "rgg");
            let mut rng = rng_from_seed(sub_seed);
            let points: Vec<Point> = (0..n)
                .map(|_| {
                    let x = rng.gen::<f64>();
                    let y = rng.gen::<f64>();
                    Point::new(x, y)
                })
                .collect();
            let mut edges = Vec::new();
            let mut components = UnionFind::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if points[i].dist2(&points[j]) <= r2 {
                        edges.push((i, j));
                        components.union(i, j);
                    }
                }
            }
            if components.count > 1 {
                continue;
            }
            let mut g = Graph::from_edges(n, edges, Some(points))?;
            g.accepted_seed = Some(sub_seed);
            return Ok(g);
        }
        Err(Error::Generation {
            attempts: max_attempts,
            reason: format!("no connected random geometric graph with n={n}, radius={radius}"),
        })
    }

    /// Symmetrized k-nearest-neighbor graph: `i ~ j` when either lists the
    /// other among its `k` nearest points. Distance ties go to the lower id.
    pub fn knn(points: &[Point], k: usize) -> Result<Graph> {
        let n = points.len();
        if k == 0 {
            return Err(Error::arg("k must be at least 1"));
        }
        if n < k + 1 {
            return Err(Error::arg(format!(
                "k-NN with k={k} needs at least {} points, got {n}",
                k + 1
            )));
        }
        let mut edges = Vec::with_capacity(n * k);
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
        for i in 0..n {
            order.clear();
            order.extend((0..n).filter(|&j| j != i).map(|j| (points[i].dist2(&points[j]), j)));
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            edges.extend(order.iter().take(k).map(|&(_, j)| (i, j)));
        }
        Graph::from_edges(n, edges, Some(points.to_vec()))
    }

    /// Path graph `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Graph> {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i)), None)
    }

    pub fn complete(n: usize) -> Result<Graph> {
        let edges = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)));
        Graph::from_edges(n, edges, None)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            count: n,
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.count -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn path_distances() {
        let g = Graph::path(3).unwrap();
        assert_eq!(g.geodesic_distance(0, 2).unwrap(), Some(2));
        assert_eq!(g.geodesic_distance(0, 1).unwrap(), Some(1));
        assert_eq!(g.geodesic_distance(1, 1).unwrap(), Some(0));
        assert!(matches!(
            g.geodesic_distance(0, 3),
            Err(Error::InvalidVertex { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn path_balls() {
        let g = Graph::path(3).unwrap();
        assert_eq!(g.ball(0, 1).unwrap().members, vec![0, 1]);
        assert_eq!(g.ball(1, 1).unwrap().members, vec![0, 1, 2]);
        assert_eq!(g.ball(2, 0).unwrap().members, vec![2]);
        assert!(g.ball(5, 1).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Graph::from_edges(3, [(0, 1)], None).is_err());
        assert!(Graph::from_edges(2, [(0, 0)], None).is_err());
        assert!(Graph::from_edges(2, [(0, 2)], None).is_err());
        let g = Graph::from_edges(2, [(0, 1), (1, 0), (0, 1)], None).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rgg_two_points_large_radius() {
        let g = Graph::random_geometric(2, 2.0, 11).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(g.accepted_seed().is_some());
    }

    #[test]
    fn rgg_reports_exhausted_retries() {
        let err = Graph::random_geometric_with_budget(50, 1e-6, 3, 64).unwrap_err();
        assert!(matches!(err, Error::Generation { attempts: 64, .. }));
    }

    #[test]
    fn rgg_mean_degree() {
        let n = 512;
        let r = (2.0 / n as f64).sqrt();
        let expected = n as f64 * std::f64::consts::PI * r * r;
        for seed in 0..5 {
            let g = Graph::random_geometric(n, r, seed).unwrap();
            assert!((g.mean_degree() - expected).abs() <= 2.0, "{}", g.mean_degree());
        }
    }

    #[test]
    fn knn_collinear() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(3.0, 0.0)];
        let g = Graph::knn(&pts, 1).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn knn_square_is_cycle() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let g = Graph::knn(&pts, 2).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
    }

    #[test]
    fn knn_full_is_complete() {
        let pts: Vec<Point> = (0..6)
            .map(|i| Point::new(i as f64 * 0.1, (i * i) as f64 * 0.01))
            .collect();
        let g = Graph::knn(&pts, 5).unwrap();
        assert_eq!(g.edge_count(), 15);
        assert!(Graph::knn(&pts, 6).is_err());
        assert!(Graph::knn(&pts, 0).is_err());
    }

    fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
        let mut rng = rng_from_seed(seed);
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n, edges, None).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn distance_symmetric_and_triangle(n in 2usize..30, extra in 0usize..40, seed in any::<u64>()) {
            let g = random_connected(n, extra, seed);
            let d: Vec<Vec<usize>> = (0..n)
                .map(|i| g.bfs(i, usize::MAX).into_iter().map(Option::unwrap).collect())
                .collect();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(d[i][j], d[j][i]);
                    for k in 0..n {
                        prop_assert!(d[i][j] <= d[i][k] + d[k][j]);
                    }
                }
            }
        }

        #[test]
        fn ball_matches_brute_force(n in 2usize..50, extra in 0usize..60, seed in any::<u64>(), s in 0usize..5) {
            let g = random_connected(n, extra, seed);
            for i in 0..n {
                let brute: Vec<usize> = (0..n)
                    .filter(|&j| g.geodesic_distance(i, j).unwrap().unwrap() <= s)
                    .collect();
                let b = g.ball(i, s).unwrap();
                prop_assert_eq!(&b.members, &brute);
                let bigger = g.ball(i, s + 1).unwrap();
                prop_assert!(b.members.iter().all(|v| bigger.contains(*v)));
            }
        }

        #[test]
        fn rgg_deterministic(seed in any::<u64>()) {
            let a = Graph::random_geometric(40, 0.35, seed).unwrap();
            let b = Graph::random_geometric(40, 0.35, seed).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.accepted_seed(), b.accepted_seed());
        }
    }
}
