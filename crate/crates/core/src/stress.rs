//! Metric stress, Kruskal non-metric stress and the Kruskal Stress Metric.
//!
//! Kruskal stress-1 compares each drawn distance with its disparity: the
//! isotonic regression of drawn distances on the ordering of graph distances
//! (the Shepard diagram). Graph distances are integers and tie heavily; ties
//! are resolved with Kruskal's primary approach, i.e. within a block of equal
//! graph distance the pairs are ordered by drawn distance ascending and may
//! receive different fitted values.

use crate::drawing::{Drawing, Point};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::isotonic::{isotonic_fit, Disparities, Pava};

/// Two nodes closer than this count as coincident for the degeneracy check.
pub const COINCIDENT_EPS: f64 = 1e-12;

/// One node pair in the Shepard diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShepardPoint {
    pub drawn: f64,
    pub input: u32,
    pub i: usize,
    pub j: usize,
}

/// All `C(n, 2)` Shepard points, sorted by graph distance, then drawn
/// distance, then node indices.
pub fn shepard_points(drawing: &Drawing) -> Vec<ShepardPoint> {
    let graph = drawing.graph();
    let pos = drawing.pos();
    let n = pos.len();
    let mut points = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            points.push(ShepardPoint {
                drawn: pos[i].dist(pos[j]),
                input: graph.dist(i, j),
                i,
                j,
            });
        }
    }
    points.sort_by(|a, b| {
        a.input
            .cmp(&b.input)
            .then(a.drawn.total_cmp(&b.drawn))
            .then((a.i, a.j).cmp(&(b.i, b.j)))
    });
    points
}

/// Disparities for a drawing's sorted Shepard points.
pub fn disparities(points: &[ShepardPoint]) -> Result<Disparities> {
    let drawn: Vec<f64> = points.iter().map(|p| p.drawn).collect();
    isotonic_fit(&drawn)
}

/// Sum over pairs of `(drawn - d)^2 / d^2` with `d` the hop distance.
pub fn metric_stress(drawing: &Drawing) -> f64 {
    let graph = drawing.graph();
    let pos = drawing.pos();
    let mut total = 0.0;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            let d = graph.dist(i, j) as f64;
            let r = pos[i].dist(pos[j]) - d;
            total += r * r / (d * d);
        }
    }
    total
}

/// The uniform scale `s > 0` minimizing metric stress of the scaled drawing.
pub fn optimal_scale(drawing: &Drawing) -> Result<f64> {
    let graph = drawing.graph();
    let pos = drawing.pos();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            let d = graph.dist(i, j) as f64;
            let x = pos[i].dist(pos[j]);
            num += x / d;
            den += x * x / (d * d);
        }
    }
    if den <= 0.0 || !den.is_normal() {
        return Err(Error::DegenerateDrawing);
    }
    Ok(num / den)
}

/// Metric stress at [`optimal_scale`], divided by the total weight
/// `Σ w d² = C(n, 2)`. Independent of both the drawing's scale and the
/// number of node pairs.
pub fn normalized_metric_stress(drawing: &Drawing) -> Result<f64> {
    let s = optimal_scale(drawing)?;
    let graph = drawing.graph();
    let pos = drawing.pos();
    let mut total = 0.0;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            let d = graph.dist(i, j) as f64;
            let r = s * pos[i].dist(pos[j]) - d;
            total += r * r / (d * d);
        }
    }
    let pairs = pos.len() * (pos.len() - 1) / 2;
    Ok(total / pairs as f64)
}

pub fn kruskal_stress(drawing: &Drawing) -> Result<f64> {
    StressEvaluator::new(drawing.graph()).kruskal_stress(drawing.pos())
}

/// Kruskal Stress Metric: `1 - kruskal_stress`, so 1 means zero stress.
pub fn ksm(drawing: &Drawing) -> Result<f64> {
    kruskal_stress(drawing).map(|s| 1.0 - s)
}

/// Kruskal stress evaluator with node pairs pre-grouped by graph distance.
///
/// Reuses its buffers across calls, which matters in the hill climber where
/// every candidate move is scored from scratch.
#[derive(Debug, Clone)]
pub struct StressEvaluator {
    pairs: Vec<(u32, u32)>,
    /// `groups[k]..groups[k + 1]` indexes the pairs at the k-th distinct
    /// graph distance, in increasing order of distance.
    groups: Vec<usize>,
    drawn: Vec<f64>,
    fitted: Vec<f64>,
    pava: Pava,
}

impl StressEvaluator {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.n();
        let mut keyed: Vec<(u32, u32, u32)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                keyed.push((graph.dist(i, j), i as u32, j as u32));
            }
        }
        keyed.sort_unstable();
        let mut groups = vec![0];
        for k in 1..keyed.len() {
            if keyed[k].0 != keyed[k - 1].0 {
                groups.push(k);
            }
        }
        groups.push(keyed.len());
        let len = keyed.len();
        Self {
            pairs: keyed.into_iter().map(|(_, i, j)| (i, j)).collect(),
            groups,
            drawn: Vec::with_capacity(len),
            fitted: Vec::with_capacity(len),
            pava: Pava::new(),
        }
    }

    pub fn kruskal_stress(&mut self, pos: &[Point]) -> Result<f64> {
        self.drawn.clear();
        self.drawn.extend(
            self.pairs
                .iter()
                .map(|&(i, j)| pos[i as usize].dist(pos[j as usize])),
        );
        if self.drawn.iter().all(|&d| d < COINCIDENT_EPS) {
            return Err(Error::DegenerateDrawing);
        }
        for w in self.groups.windows(2) {
            self.drawn[w[0]..w[1]].sort_unstable_by(f64::total_cmp);
        }
        self.pava.fit_into(&self.drawn, &mut self.fitted);
        let (mut num, mut den) = (0.0, 0.0);
        for (&x, &dhat) in self.drawn.iter().zip(&self.fitted) {
            num += (x - dhat) * (x - dhat);
            den += x * x;
        }
        Ok((num / den).sqrt())
    }

    pub fn ksm(&mut self, pos: &[Point]) -> Result<f64> {
        self.kruskal_stress(pos).map(|s| 1.0 - s)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn path(n: usize) -> Arc<Graph> {
        Arc::new(Graph::new(n, (0..n - 1).map(|i| (i, i + 1))).unwrap())
    }

    fn on_line(g: Arc<Graph>, spacing: f64) -> Drawing {
        let n = g.n();
        Drawing::new(g, (0..n).map(|i| Point::new(i as f64 * spacing, 0.0)).collect()).unwrap()
    }

    #[test]
    fn metric_stress_exact_and_stretched_p2() {
        assert_eq!(metric_stress(&on_line(path(2), 1.0)), 0.0);
        assert_eq!(metric_stress(&on_line(path(2), 2.0)), 1.0);
    }

    #[test]
    fn metric_stress_zero_for_unit_spaced_path() {
        assert_eq!(metric_stress(&on_line(path(6), 1.0)), 0.0);
    }

    #[test]
    fn monotone_drawing_has_zero_kruskal_stress() {
        let d = on_line(path(6), 0.13);
        assert_eq!(kruskal_stress(&d).unwrap(), 0.0);
        assert_eq!(ksm(&d).unwrap(), 1.0);
    }

    #[test]
    fn coincident_nodes_are_degenerate() {
        let g = path(3);
        let d = Drawing::new(g, vec![Point::new(0.2, 0.2); 3]).unwrap();
        assert!(matches!(kruskal_stress(&d), Err(Error::DegenerateDrawing)));
        assert!(matches!(normalized_metric_stress(&d), Err(Error::DegenerateDrawing)));
    }

    #[test]
    fn single_zero_distance_is_legal() {
        let g = path(3);
        let d = Drawing::new(
            g,
            vec![Point::new(0.0, 0.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
        )
        .unwrap();
        let s = kruskal_stress(&d).unwrap();
        assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn shepard_points_cover_all_pairs_in_order() {
        let d = on_line(path(5), 0.1);
        let pts = shepard_points(&d);
        assert_eq!(pts.len(), 10);
        assert!(pts.windows(2).all(|w| w[0].input <= w[1].input));
        assert!(pts.iter().all(|p| p.input >= 1 && p.i < p.j));
    }

    #[test]
    fn perfect_drawing_has_unit_optimal_scale() {
        let d = on_line(path(4), 1.0);
        assert!((optimal_scale(&d).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(normalized_metric_stress(&d).unwrap(), 0.0);
    }

    #[test]
    fn ties_sorted_by_drawn_distance() {
        // Star: all leaf-leaf pairs tie at distance 2, so pre-sorting by
        // drawn distance lets them keep distinct disparities.
        let g = Arc::new(Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap());
        let d = Drawing::new(
            g,
            vec![
                Point::new(0.0, 0.0),
                Point::new(0.1, 0.0),
                Point::new(0.0, 0.3),
                Point::new(-0.5, 0.0),
            ],
        )
        .unwrap();
        let pts = shepard_points(&d);
        let dh = disparities(&pts).unwrap();
        assert!(dh.dhat.windows(2).all(|w| w[0] <= w[1]));
        let leaf_block: Vec<f64> = pts.iter().zip(&dh.dhat).filter(|(p, _)| p.input == 2).map(|(_, v)| *v).collect();
        assert!(leaf_block.first() < leaf_block.last());
    }
}
