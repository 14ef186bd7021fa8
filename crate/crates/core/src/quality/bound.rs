//! Upper bound on the number of crossings any straight-line drawing of a
//! graph can have: all edge pairs, minus pairs that share an endpoint, minus
//! exclusions from triangles and from 4-cycles.

use serde::{Deserialize, Serialize};

use crate::graph::SimpleGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingBound {
    pub c_all: u64,
    pub c_deg: u64,
    pub c_tri: u64,
    pub c_4cyc: u64,
}

impl CrossingBound {
    pub fn of(graph: impl AsRef<SimpleGraph>) -> Self {
        let g = graph.as_ref();
        let m = g.m() as u64;
        Self {
            c_all: m * m.saturating_sub(1) / 2,
            c_deg: c_deg(g),
            c_tri: c_tri(g),
            c_4cyc: c_4cyc(g),
        }
    }

    /// `c_all - c_deg - c_tri - c_4cyc`, possibly negative when the triangle
    /// and 4-cycle exclusions overlap (e.g. K4).
    pub fn raw(&self) -> i64 {
        self.c_all as i64 - self.c_deg as i64 - self.c_tri as i64 - self.c_4cyc as i64
    }

    /// The bound, saturated at zero.
    pub fn c_mx(&self) -> u64 {
        self.raw().max(0) as u64
    }

    /// Bound using only the adjacency exclusion.
    pub fn c_mx_degree_only(&self) -> u64 {
        self.c_all - self.c_deg
    }
}

/// Edge pairs that share an endpoint: `½ Σ deg(v)(deg(v) - 1)`.
pub fn c_deg(graph: &SimpleGraph) -> u64 {
    (0..graph.n())
        .map(|v| {
            let d = graph.degree(v) as u64;
            d * d.saturating_sub(1)
        })
        .sum::<u64>()
        / 2
}

/// Triangles as sorted node triples.
pub fn triangles(graph: &SimpleGraph) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for &(a, b) in graph.edges() {
        for &c in graph.neighbors(b) {
            if c > b && graph.has_edge(a, c) {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Triangle exclusions.
///
/// Every triangle gains one per edge that neither belongs to nor touches any
/// triangle of the graph; every pair of triangles gains 1 if they share an
/// edge, 2 if they share only a node, 3 if they are disjoint.
pub fn c_tri(graph: &SimpleGraph) -> u64 {
    let tris = triangles(graph);
    if tris.is_empty() {
        return 0;
    }
    let mut in_triangle = vec![false; graph.n()];
    for t in &tris {
        for &v in t {
            in_triangle[v] = true;
        }
    }
    let lone_edges = graph
        .edges()
        .iter()
        .filter(|&&(a, b)| !in_triangle[a] && !in_triangle[b])
        .count() as u64;

    let mut total = tris.len() as u64 * lone_edges;
    for (k, t) in tris.iter().enumerate() {
        for u in &tris[k + 1..] {
            let shared = t.iter().filter(|v| u.contains(v)).count();
            total += match shared {
                2 => 1,
                1 => 2,
                0 => 3,
                _ => unreachable!("distinct triangles share at most two nodes"),
            };
        }
    }
    total
}

/// Distinct simple 4-cycles. Each cycle has two diagonals, and each diagonal
/// pair `{u, w}` with `c` common neighbours closes `C(c, 2)` cycles.
pub fn c_4cyc(graph: &SimpleGraph) -> u64 {
    let n = graph.n();
    let mut common = vec![0u64; n];
    let mut twice = 0;
    for u in 0..n {
        common.iter_mut().for_each(|c| *c = 0);
        for &v in graph.neighbors(u) {
            for &w in graph.neighbors(v) {
                if w > u {
                    common[w] += 1;
                }
            }
        }
        twice += common.iter().map(|&c| c * c.saturating_sub(1) / 2).sum::<u64>();
    }
    twice / 2
}
