//! Node uniformity: how evenly nodes fill a ⌈√n⌉ × ⌈√n⌉ grid over the
//! drawing's frame, as one minus the normalized total-variation distance
//! between the cell histogram and the uniform one.

use crate::drawing::{BoundingBox, Drawing, Point};
use crate::error::{Error, Result};

/// Margin added to a zero-width or zero-height frame before binning.
pub const DEGENERATE_MARGIN: f64 = 1e-6;

/// Region that the uniformity grid partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// The unit-square canvas, grown to include any node outside it.
    #[default]
    Canvas,
    /// The tight bounding box of the node positions.
    BoundingBox,
}

impl Frame {
    pub fn resolve(self, pos: &[Point]) -> BoundingBox {
        let tight = BoundingBox::of(pos);
        let mut frame = match self {
            Frame::Canvas => tight.union(BoundingBox::UNIT),
            Frame::BoundingBox => tight,
        };
        if frame.width() == 0.0 {
            frame.min.x -= DEGENERATE_MARGIN;
            frame.max.x += DEGENERATE_MARGIN;
        }
        if frame.height() == 0.0 {
            frame.min.y -= DEGENERATE_MARGIN;
            frame.max.y += DEGENERATE_MARGIN;
        }
        frame
    }
}

fn cell(v: f64, lo: f64, span: f64, k: usize) -> usize {
    (((v - lo) / span * k as f64).floor().max(0.0) as usize).min(k - 1)
}

pub fn node_uniformity_in(drawing: &Drawing, frame: Frame) -> Result<f64> {
    let pos = drawing.pos();
    let n = pos.len();
    if n < 2 {
        return Err(Error::InvalidDrawing("node uniformity needs at least two nodes".into()));
    }
    let k = (n as f64).sqrt().ceil() as usize;
    let bbox = frame.resolve(pos);
    let mut counts = vec![0usize; k * k];
    for p in pos {
        let cx = cell(p.x, bbox.min.x, bbox.width(), k);
        let cy = cell(p.y, bbox.min.y, bbox.height(), k);
        counts[cy * k + cx] += 1;
    }
    let cells = (k * k) as f64;
    let expected = n as f64 / cells;
    let tv = 0.5 * counts.iter().map(|&c| (c as f64 - expected).abs()).sum::<f64>();
    let worst = n as f64 * (1.0 - 1.0 / cells);
    Ok((1.0 - tv / worst).clamp(0.0, 1.0))
}

pub fn node_uniformity(drawing: &Drawing) -> Result<f64> {
    node_uniformity_in(drawing, Frame::Canvas)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::Graph;

    fn star4(pos: [(f64, f64); 4]) -> Drawing {
        let g = Arc::new(Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap());
        Drawing::new(g, pos.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn one_node_per_cell_is_uniform() {
        let d = star4([(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]);
        assert_eq!(node_uniformity(&d).unwrap(), 1.0);
    }

    #[test]
    fn all_nodes_in_one_cell() {
        let d = star4([(0.1, 0.1), (0.2, 0.1), (0.1, 0.2), (0.3, 0.3)]);
        assert_eq!(node_uniformity(&d).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_bounding_box_is_expanded() {
        let d = star4([(0.5, 0.1), (0.5, 0.2), (0.5, 0.3), (0.5, 0.9)]);
        let v = node_uniformity_in(&d, Frame::BoundingBox).unwrap();
        assert!((0.0..=1.0).contains(&v));
        // Centre column: the x coordinate sits on the cell boundary.
        assert!(v < 1.0);
    }
}
