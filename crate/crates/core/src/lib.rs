//! Graph-drawing stress and layout-quality metrics, hill-climbing stimulus
//! synthesis, and scheduling and analysis for two-alternative stress
//! perception experiments.

pub mod drawing;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod isotonic;
pub mod quality;
pub mod rng;
pub mod stimulus;
pub mod stress;
pub mod svg;

pub use drawing::{euclidean_distance_matrix, BoundingBox, Drawing, DrawingRecord, Point};
pub use error::{Error, Result};
pub use graph::{generate_graph, Graph, GraphGenerator, GraphSpec, SimpleGraph};
pub use stress::{kruskal_stress, ksm, metric_stress, normalized_metric_stress, StressEvaluator};
