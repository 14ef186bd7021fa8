//! Simple undirected graphs, hop-count distances and the constrained
//! Erdős–Rényi generator used for stimulus graphs.

use std::collections::VecDeque;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// A simple undirected graph that is not required to be connected.
///
/// Edge lists are normalized to `(lo, hi)` pairs and kept in lexicographic
/// order, so two graphs with the same edge set compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for n={n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &normalized {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: normalized,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a].binary_search(&b).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        bfs(&self.adj, 0).iter().all(|d| d.is_some())
    }
}

impl AsRef<SimpleGraph> for SimpleGraph {
    fn as_ref(&self) -> &SimpleGraph {
        self
    }
}

fn bfs(adj: &[Vec<usize>], source: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let next = dist[u].map(|d| d + 1);
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Hop-count distances between every pair of nodes, one BFS per source.
///
/// Returns a row-major `n × n` matrix.
pub fn all_pairs_shortest_paths(graph: &SimpleGraph) -> Result<Vec<u32>> {
    let n = graph.n();
    let mut out = Vec::with_capacity(n * n);
    for source in 0..n {
        for (target, d) in bfs(&graph.adj, source).into_iter().enumerate() {
            out.push(d.ok_or(Error::Disconnected(source, target))?);
        }
    }
    Ok(out)
}

/// A connected simple graph with its all-pairs hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    structure: SimpleGraph,
    dist: Vec<u32>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_structure(SimpleGraph::new(n, edges)?)
    }

    pub fn from_structure(structure: SimpleGraph) -> Result<Self> {
        let dist = all_pairs_shortest_paths(&structure)?;
        Ok(Self { structure, dist })
    }

    /// Builds a graph from its JSON form and enforces the stimulus density
    /// constraint `m < 2n`.
    pub fn ingest(spec: &GraphSpec) -> Result<Self> {
        let graph = Self::try_from(spec)?;
        if graph.m() >= 2 * graph.n() {
            return Err(Error::InvalidGraph(format!(
                "m={} violates m < 2n for n={}",
                graph.m(),
                graph.n()
            )));
        }
        Ok(graph)
    }

    pub fn structure(&self) -> &SimpleGraph {
        &self.structure
    }

    pub fn n(&self) -> usize {
        self.structure.n
    }

    pub fn m(&self) -> usize {
        self.structure.m()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.structure.edges()
    }

    pub fn dist(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.n() + j]
    }

    /// Row-major distance matrix.
    pub fn dist_matrix(&self) -> &[u32] {
        &self.dist
    }

    pub fn spec(&self) -> GraphSpec {
        GraphSpec {
            n: self.n(),
            edges: self.edges().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl AsRef<SimpleGraph> for Graph {
    fn as_ref(&self) -> &SimpleGraph {
        &self.structure
    }
}

/// Graph JSON: `{"n": int, "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<&GraphSpec> for Graph {
    type Error = Error;

    fn try_from(spec: &GraphSpec) -> Result<Self> {
        Graph::new(spec.n, spec.edges.iter().map(|e| (e[0], e[1])))
    }
}

/// Default Erdős–Rényi edge probability: mean degree 3.5, capped at 1.
///
/// Mean degree has to sit near `ln n` for connected samples to be common at
/// n = 50 while staying under the `m < 2n` ceiling (mean degree 4).
pub fn default_edge_probability(n: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    (3.5 / (n - 1) as f64).min(1.0)
}

pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

/// Rejection sampler for connected G(n, p) graphs with fewer than `2n` edges.
#[derive(Debug, Clone, Copy)]
pub struct GraphGenerator {
    pub max_attempts: usize,
}

impl Default for GraphGenerator {
    fn default() -> Self {
        Self {
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

impl GraphGenerator {
    pub fn generate(&self, n: usize, edge_probability: f64, seed: u64) -> Result<Graph> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("need n >= 2, got {n}")));
        }
        if !(edge_probability > 0.0 && edge_probability <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "edge probability must be in (0, 1], got {edge_probability}"
            )));
        }
        let mut rng = rng::rng_from_seed(seed);
        for _ in 0..self.max_attempts {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < edge_probability {
                        edges.push((i, j));
                    }
                }
            }
            if edges.len() >= 2 * n || edges.len() < n - 1 {
                continue;
            }
            let structure = SimpleGraph::new(n, edges)?;
            if structure.is_connected() {
                return Graph::from_structure(structure);
            }
        }
        Err(Error::GenerationExhausted {
            n,
            p: edge_probability,
            attempts: self.max_attempts,
        })
    }
}

pub fn generate_graph(n: usize, edge_probability: f64, seed: u64) -> Result<Graph> {
    GraphGenerator::default().generate(n, edge_probability, seed)
}
