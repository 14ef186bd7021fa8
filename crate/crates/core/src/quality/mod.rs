//! Layout-quality metrics beyond stress.

pub mod bound;
pub mod correlation;
pub mod crossings;
pub mod uniformity;

use serde::{Deserialize, Serialize};

use crate::drawing::Drawing;
use crate::error::{Error, Result};
use crate::stress;

pub use bound::{c_4cyc, c_deg, c_tri, CrossingBound};
pub use correlation::{correlation_matrix, pearson, CorrelationMatrix};
pub use crossings::count_crossings;
pub use uniformity::{node_uniformity, node_uniformity_in, Frame};

/// `1 - c / c_mx` when the bound is positive, else 1; clamped into `[0, 1]`.
pub fn edge_crossing_metric(drawing: &Drawing) -> f64 {
    let bound = CrossingBound::of(drawing.graph());
    let c_mx = bound.c_mx();
    if c_mx == 0 {
        return 1.0;
    }
    (1.0 - count_crossings(drawing) as f64 / c_mx as f64).max(0.0)
}

pub fn average_edge_length(drawing: &Drawing) -> Result<f64> {
    let edges = drawing.graph().edges();
    if edges.is_empty() {
        return Err(Error::NoEdges);
    }
    let pos = drawing.pos();
    let total: f64 = edges.iter().map(|&(a, b)| pos[a].dist(pos[b])).sum();
    Ok(total / edges.len() as f64)
}

pub fn average_node_distance(drawing: &Drawing) -> Result<f64> {
    let pos = drawing.pos();
    let n = pos.len();
    if n < 2 {
        return Err(Error::InvalidDrawing("need at least two nodes".into()));
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += pos[i].dist(pos[j]);
        }
    }
    Ok(total / (n * (n - 1) / 2) as f64)
}

/// One row of the metric report file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub drawing_id: String,
    pub ksm: f64,
    pub kruskal_stress: f64,
    pub metric_stress: f64,
    pub normalized_metric_stress: f64,
    pub crossings: u64,
    pub crossing_bound: u64,
    pub edge_crossing: f64,
    pub node_uniformity: f64,
    pub avg_edge_length: f64,
    pub avg_node_distance: f64,
}

impl MetricReport {
    pub fn compute(drawing_id: impl Into<String>, drawing: &Drawing) -> Result<Self> {
        let kruskal = stress::kruskal_stress(drawing)?;
        Ok(Self {
            drawing_id: drawing_id.into(),
            ksm: 1.0 - kruskal,
            kruskal_stress: kruskal,
            metric_stress: stress::metric_stress(drawing),
            normalized_metric_stress: stress::normalized_metric_stress(drawing)?,
            crossings: count_crossings(drawing),
            crossing_bound: CrossingBound::of(drawing.graph()).c_mx(),
            edge_crossing: edge_crossing_metric(drawing),
            node_uniformity: node_uniformity(drawing)?,
            avg_edge_length: average_edge_length(drawing)?,
            avg_node_distance: average_node_distance(drawing)?,
        })
    }

    /// Columns used for the correlation analysis, in report order.
    pub const CORRELATED: [&'static str; 5] = [
        "ksm",
        "avg_node_distance",
        "node_uniformity",
        "edge_crossing",
        "avg_edge_length",
    ];

    pub fn column(&self, name: &str) -> Option<f64> {
        Some(match name {
            "ksm" => self.ksm,
            "kruskal_stress" => self.kruskal_stress,
            "metric_stress" => self.metric_stress,
            "normalized_metric_stress" => self.normalized_metric_stress,
            "crossings" => self.crossings as f64,
            "edge_crossing" => self.edge_crossing,
            "node_uniformity" => self.node_uniformity,
            "avg_edge_length" => self.avg_edge_length,
            "avg_node_distance" => self.avg_node_distance,
            _ => return None,
        })
    }
}
