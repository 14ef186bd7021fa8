//! Node-position assignments for a [`Graph`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// A straight-line drawing of a graph.
///
/// Coordinates are unitless. Generated stimuli live in the unit square, but
/// any finite coordinates are accepted so metric behaviour under scaling and
/// rotation can be exercised.
#[derive(Debug, Clone)]
pub struct Drawing {
    graph: Arc<Graph>,
    pos: Vec<Point>,
    ksm: Option<f64>,
}

impl Drawing {
    /// Checks node count and finiteness. Coincident nodes are allowed here;
    /// use [`Drawing::ingest`] for stored stimuli.
    pub fn new(graph: Arc<Graph>, pos: Vec<Point>) -> Result<Self> {
        if pos.len() != graph.n() {
            return Err(Error::InvalidDrawing(format!(
                "{} positions for a graph with {} nodes",
                pos.len(),
                graph.n()
            )));
        }
        if let Some(i) = pos.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidDrawing(format!("node {i} has a non-finite coordinate")));
        }
        Ok(Self {
            graph,
            pos,
            ksm: None,
        })
    }

    /// Stricter constructor for drawings read from disk: additionally rejects
    /// two nodes at exactly the same coordinate.
    pub fn ingest(graph: Arc<Graph>, record: &DrawingRecord) -> Result<Self> {
        let mut drawing = Self::new(graph, record.pos.clone())?;
        let mut sorted: Vec<(f64, f64, usize)> = drawing
            .pos
            .iter()
            .enumerate()
            .map(|(i, p)| (p.x, p.y, i))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        if let Some(w) = sorted
            .windows(2)
            .find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1)
        {
            return Err(Error::InvalidDrawing(format!(
                "nodes {} and {} share a position",
                w[0].2, w[1].2
            )));
        }
        drawing.ksm = record.ksm;
        Ok(drawing)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn pos(&self) -> &[Point] {
        &self.pos
    }

    pub fn n(&self) -> usize {
        self.pos.len()
    }

    /// The cached KSM, if one was computed or loaded.
    pub fn cached_ksm(&self) -> Option<f64> {
        self.ksm
    }

    pub fn with_cached_ksm(mut self, ksm: f64) -> Self {
        self.ksm = Some(ksm);
        self
    }

    /// Applies `f` to every position. The cached KSM is dropped.
    pub fn map_positions(&self, f: impl Fn(Point) -> Point) -> Result<Self> {
        Self::new(self.graph.clone(), self.pos.iter().copied().map(f).collect())
    }

    pub fn centroid(&self) -> Point {
        let n = self.pos.len() as f64;
        let (sx, sy) = self
            .pos
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point::new(sx / n, sy / n)
    }

    pub fn rotated(&self, angle: f64, about: Point) -> Result<Self> {
        let (sin, cos) = angle.sin_cos();
        self.map_positions(|p| {
            let (dx, dy) = (p.x - about.x, p.y - about.y);
            Point::new(about.x + cos * dx - sin * dy, about.y + sin * dx + cos * dy)
        })
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.map_positions(|p| Point::new(p.x * factor, p.y * factor))
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Result<Self> {
        self.map_positions(|p| Point::new(p.x + dx, p.y + dy))
    }

    /// Uniformly rescales and translates the drawing so its bounding box fits
    /// the unit square, anchored at the origin.
    pub fn normalized(&self) -> Result<Self> {
        let bbox = BoundingBox::of(&self.pos);
        let extent = bbox.width().max(bbox.height());
        if extent == 0.0 {
            return Err(Error::DegenerateDrawing);
        }
        self.map_positions(|p| Point::new((p.x - bbox.min.x) / extent, (p.y - bbox.min.y) / extent))
    }

    pub fn record(&self, graph_id: &str) -> DrawingRecord {
        DrawingRecord {
            graph_id: graph_id.to_owned(),
            pos: self.pos.clone(),
            ksm: self.ksm,
        }
    }
}

/// Drawing JSON: `{"graph_id": str, "pos": [[x, y], ...], "ksm": float|null}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawingRecord {
    pub graph_id: String,
    pub pos: Vec<Point>,
    pub ksm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub const UNIT: BoundingBox = BoundingBox {
        min: Point::new(0.0, 0.0),
        max: Point::new(1.0, 1.0),
    };

    pub fn of(points: &[Point]) -> Self {
        points.iter().fold(
            BoundingBox {
                min: Point::new(f64::INFINITY, f64::INFINITY),
                max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            },
            |b, p| b.including(*p),
        )
    }

    pub fn including(self, p: Point) -> Self {
        BoundingBox {
            min: Point::new(self.min.x.min(p.x), self.min.y.min(p.y)),
            max: Point::new(self.max.x.max(p.x), self.max.y.max(p.y)),
        }
    }

    pub fn union(self, other: BoundingBox) -> Self {
        self.including(other.min).including(other.max)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Symmetric `n × n` matrix of Euclidean distances, row-major.
pub fn euclidean_distance_matrix(drawing: &Drawing) -> Vec<f64> {
    let pos = drawing.pos();
    let n = pos.len();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = pos[i].dist(pos[j]);
            out[i * n + j] = d;
            out[j * n + i] = d;
        }
    }
    out
}
