//! Graph construction for cluster states: hypercubic lattices, rings, and
//! seeded long-range graphs, plus preparation of the corresponding cluster
//! state (`|+>` everywhere, controlled-Z on every edge).
//!
//! Edges are stored normalized (`a < b`, sorted, duplicates rejected), and a
//! graph serializes to JSON as `{"n": .., "edges": [[a, b], ..], "coords": ..}`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim::{QsimError, Statevector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge ({a}, {b}) out of range for {n} vertices")]
    EdgeOutOfRange { a: usize, b: usize, n: usize },
    #[error("self-loop on vertex {vertex} is not allowed")]
    SelfLoop { vertex: usize },
    #[error("duplicate edge ({a}, {b})")]
    DuplicateEdge { a: usize, b: usize },
    #[error("lattice must have at least one dimension")]
    NoDimensions,
    #[error("lattice side length of axis {axis} must be at least 1")]
    ZeroSide { axis: usize },
    #[error("ring needs at least 3 vertices, got {n}")]
    RingTooSmall { n: usize },
    #[error("long-range decay exponent must be finite and non-negative, got {alpha}")]
    BadExponent { alpha: f64 },
    #[error("long-range base probability must lie in [0, 1], got {p0}")]
    BadProbability { p0: f64 },
    #[error("graph JSON is malformed: {0}")]
    Parse(String),
    #[error(transparent)]
    State(#[from] QsimError),
}

/// Boundary handling for hypercubic lattices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// A d-dimensional hypercubic lattice: side lengths per axis plus boundary
/// conditions.  Vertices are indexed row-major, last axis fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dims: Vec<usize>,
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(dims: Vec<usize>, boundary: Boundary) -> Result<Self, GraphError> {
        if dims.is_empty() {
            return Err(GraphError::NoDimensions);
        }
        for (axis, &side) in dims.iter().enumerate() {
            if side == 0 {
                return Err(GraphError::ZeroSide { axis });
            }
        }
        Ok(Self { dims, boundary })
    }

    pub fn n_vertices(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major vertex index of a coordinate tuple (last axis fastest).
    pub fn index_of(&self, coord: &[usize]) -> usize {
        coord
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &side)| acc * side + c)
    }

    /// Coordinate tuple of a vertex index.
    pub fn coord_of(&self, mut index: usize) -> Vec<usize> {
        let mut coord = vec![0; self.dims.len()];
        for axis in (0..self.dims.len()).rev() {
            coord[axis] = index % self.dims[axis];
            index /= self.dims[axis];
        }
        coord
    }
}

/// Simple undirected graph with optional integer lattice coordinates per
/// vertex.  Edges are kept sorted with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    coords: Option<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<Vec<i64>>>,
}

impl Graph {
    /// Builds a graph, normalizing each edge to `a < b` and rejecting
    /// self-loops, duplicates, and out-of-range endpoints.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::EdgeOutOfRange { a, b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop { vertex: a });
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        for pair in normalized.windows(2) {
            if pair[0] == pair[1] {
                return Err(GraphError::DuplicateEdge {
                    a: pair[0].0,
                    b: pair[0].1,
                });
            }
        }
        Ok(Self {
            n,
            edges: normalized,
            coords: None,
        })
    }

    pub fn with_coords(mut self, coords: Vec<Vec<i64>>) -> Self {
        self.coords = Some(coords);
        self
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// Edges in normalized sorted order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn coords(&self) -> Option<&[Vec<i64>]> {
        self.coords.as_deref()
    }

    /// Vertex degrees.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Adjacency lists (sorted neighbours per vertex).
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nbrs = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        nbrs
    }

    /// True when every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        let nbrs = self.neighbors();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &nbrs[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    pub fn to_json(&self) -> String {
        let wire = GraphWire {
            n: self.n,
            edges: self.edges.clone(),
            coords: self.coords.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("graph serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self, GraphError> {
        let wire: GraphWire =
            serde_json::from_str(json).map_err(|e| GraphError::Parse(e.to_string()))?;
        let graph = Graph::new(wire.n, wire.edges)?;
        Ok(match wire.coords {
            Some(coords) => graph.with_coords(coords),
            None => graph,
        })
    }
}

/// Nearest-neighbour hypercubic lattice.  Periodic wrap edges are added per
/// axis only for side lengths >= 3, so no duplicate bonds arise at length 2.
pub fn build_lattice(spec: &LatticeSpec) -> Result<Graph, GraphError> {
    let n = spec.n_vertices();
    let d = spec.dims.len();
    let mut edges = Vec::new();
    for v in 0..n {
        let coord = spec.coord_of(v);
        for axis in 0..d {
            let side = spec.dims[axis];
            if coord[axis] + 1 < side {
                let mut next = coord.clone();
                next[axis] += 1;
                edges.push((v, spec.index_of(&next)));
            } else if spec.boundary == Boundary::Periodic && side >= 3 {
                let mut wrapped = coord.clone();
                wrapped[axis] = 0;
                edges.push((v, spec.index_of(&wrapped)));
            }
        }
    }
    let coords = (0..n)
        .map(|v| spec.coord_of(v).into_iter().map(|c| c as i64).collect())
        .collect();
    Ok(Graph::new(n, edges)?.with_coords(coords))
}

/// Cycle graph 0-1-..-(n-1)-0.
pub fn build_ring(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::RingTooSmall { n });
    }
    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|v| (v, v + 1)).collect();
    edges.push((0, n - 1));
    let coords = (0..n).map(|v| vec![v as i64]).collect();
    Ok(Graph::new(n, edges)?.with_coords(coords))
}

/// Open chain 0-1-..-(n-1).
pub fn build_path(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let edges = (0..n.saturating_sub(1)).map(|v| (v, v + 1)).collect();
    let coords = (0..n).map(|v| vec![v as i64]).collect();
    Ok(Graph::new(n, edges)?.with_coords(coords))
}

/// One-dimensional chain with algebraically decaying long-range bonds.
///
/// Nearest-neighbour edges are always present; every other pair `(i, j)`
/// receives an edge independently with probability `min(1, p0 * |i-j|^-alpha)`.
/// Pairs are visited in sorted order with a ChaCha stream, so a seed fully
/// determines the graph.
pub fn build_long_range(n: usize, alpha: f64, p0: f64, seed: u64) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(GraphError::BadExponent { alpha });
    }
    if !(0.0..=1.0).contains(&p0) || !p0.is_finite() {
        return Err(GraphError::BadProbability { p0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let r = (j - i) as f64;
            if j == i + 1 {
                edges.push((i, j));
            } else {
                let p = (p0 * r.powf(-alpha)).min(1.0);
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
    }
    let coords = (0..n).map(|v| vec![v as i64]).collect();
    Ok(Graph::new(n, edges)?.with_coords(coords))
}

/// Prepares the cluster state of a graph: `|+>` on every vertex, then a
/// controlled-Z across every edge (order irrelevant, bit-exactly).
pub fn prepare_cluster(graph: &Graph) -> Result<Statevector, GraphError> {
    let mut state = Statevector::plus_state(graph.n_vertices())?;
    for &(a, b) in graph.edges() {
        state.apply_cz(a, b)?;
    }
    Ok(state)
}

/// Cluster state with an arbitrary input injected on one vertex before the
/// entangling step.  The input replaces that vertex's `|+>`.
pub fn prepare_cluster_with_input(
    graph: &Graph,
    input: [num_complex::Complex64; 2],
) -> Result<Statevector, GraphError> {
    let mut state = Statevector::plus_state_with_input(graph.n_vertices(), input)?;
    for &(a, b) in graph.edges() {
        state.apply_cz(a, b)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn graph_normalizes_and_validates_edges() {
        let g = Graph::new(4, vec![(3, 1), (0, 1), (2, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 3)]);
        assert_eq!(
            Graph::new(3, vec![(1, 1)]),
            Err(GraphError::SelfLoop { vertex: 1 })
        );
        assert_eq!(
            Graph::new(3, vec![(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge { a: 0, b: 1 })
        );
        assert_eq!(
            Graph::new(3, vec![(0, 3)]),
            Err(GraphError::EdgeOutOfRange { a: 0, b: 3, n: 3 })
        );
    }

    #[test]
    fn open_lattice_edge_count() {
        // 4x4 open grid: 16 vertices, 2 * 4 * 3 = 24 edges.
        let spec = LatticeSpec::new(vec![4, 4], Boundary::Open).unwrap();
        let g = build_lattice(&spec).unwrap();
        assert_eq!(g.n_vertices(), 16);
        assert_eq!(g.edge_count(), 24);
        assert!(g.is_connected());
    }

    #[test]
    fn periodic_lattice_edge_count() {
        // L x L periodic with L >= 3 has 2 L^2 bonds.
        for side in [3usize, 4, 5] {
            let spec = LatticeSpec::new(vec![side, side], Boundary::Periodic).unwrap();
            let g = build_lattice(&spec).unwrap();
            assert_eq!(g.edge_count(), 2 * side * side);
            let degrees = g.degrees();
            assert!(degrees.iter().all(|&d| d == 4));
        }
        // L = 2 wrap bonds would duplicate the open bonds and are skipped.
        let spec = LatticeSpec::new(vec![2, 2], Boundary::Periodic).unwrap();
        assert_eq!(build_lattice(&spec).unwrap().edge_count(), 4);
    }

    #[test]
    fn lattice_rejects_zero_sides() {
        assert_eq!(
            LatticeSpec::new(vec![], Boundary::Open),
            Err(GraphError::NoDimensions)
        );
        assert_eq!(
            LatticeSpec::new(vec![3, 0], Boundary::Open),
            Err(GraphError::ZeroSide { axis: 1 })
        );
    }

    #[test]
    fn ring_and_path_shapes() {
        let ring = build_ring(5).unwrap();
        assert_eq!(ring.edge_count(), 5);
        assert!(ring.degrees().iter().all(|&d| d == 2));
        assert_eq!(build_ring(2), Err(GraphError::RingTooSmall { n: 2 }));

        let path = build_path(4).unwrap();
        assert_eq!(path.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(path.degrees(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn long_range_is_seed_reproducible_and_keeps_chain() {
        let a = build_long_range(40, 2.0, 0.8, 1234).unwrap();
        let b = build_long_range(40, 2.0, 0.8, 1234).unwrap();
        assert_eq!(a, b);
        let other = build_long_range(40, 2.0, 0.8, 1235).unwrap();
        assert_ne!(a, other);
        // Nearest-neighbour backbone always present.
        for v in 0..39 {
            assert!(a.edges().binary_search(&(v, v + 1)).is_ok());
        }
    }

    #[test]
    fn long_range_mean_edge_count_matches_expectation() {
        // Expected number of long-range (r >= 2) edges is
        // sum_{r=2}^{n-1} (n - r) * p0 * r^-alpha; compare the empirical mean
        // over many seeds within three standard errors.
        let (n, alpha, p0) = (200usize, 2.0, 0.6);
        let mut expected = 0.0;
        let mut variance = 0.0;
        for r in 2..n {
            let p = (p0 * (r as f64).powf(-alpha)).min(1.0);
            let pairs = (n - r) as f64;
            expected += pairs * p;
            variance += pairs * p * (1.0 - p);
        }
        let trials = 400;
        let mut total = 0usize;
        for seed in 0..trials {
            let g = build_long_range(n, alpha, p0, seed).unwrap();
            total += g.edge_count() - (n - 1);
        }
        let mean = total as f64 / trials as f64;
        let se = (variance / trials as f64).sqrt();
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "mean {mean} vs expected {expected} (se {se})"
        );
    }

    #[test]
    fn cluster_state_of_single_edge() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let state = prepare_cluster(&g).unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn cluster_amplitudes_follow_edge_parity() {
        // Graph-state amplitude: 2^(-n/2) * (-1)^(number of edges inside the
        // set bits of z).  Check an asymmetric 5-vertex graph.
        let g = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        let state = prepare_cluster(&g).unwrap();
        let base = 1.0 / 32f64.sqrt();
        for (z, amp) in state.amplitudes().iter().enumerate() {
            let mut sign = 1.0;
            for &(a, b) in g.edges() {
                if z & (1 << a) != 0 && z & (1 << b) != 0 {
                    sign = -sign;
                }
            }
            assert_abs_diff_eq!(amp.re, sign * base, epsilon = 1e-14);
            assert_eq!(amp.im, 0.0);
        }
    }

    #[test]
    fn graph_json_round_trip() {
        let g = build_ring(4).unwrap();
        let json = g.to_json();
        assert!(json.contains("\"n\": 4"));
        let back = Graph::from_json(&json).unwrap();
        assert_eq!(g, back);
    }
}
