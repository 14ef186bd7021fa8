//! Straight-line edge crossings.

use robust::{orient2d, Coord};

use crate::drawing::{Drawing, Point};

fn coord(p: Point) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Sign of the orientation of `c` relative to the directed line `a -> b`,
/// computed with adaptive exact arithmetic.
fn orientation(a: Point, b: Point, c: Point) -> i8 {
    let v = orient2d(coord(a), coord(b), coord(c));
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// `c` is collinear with `a`-`b`; is it within the segment's extent?
fn within(a: Point, b: Point, c: Point) -> bool {
    c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
}

/// True when the closed segments `p1-p2` and `q1-q2` share at least one point.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within(p1, p2, q1))
        || (o2 == 0 && within(p1, p2, q2))
        || (o3 == 0 && within(q1, q2, p1))
        || (o4 == 0 && within(q1, q2, p2))
}

/// Number of unordered edge pairs whose segments meet. Pairs sharing a graph
/// endpoint are skipped; touching and collinear overlap each count once.
pub fn count_crossings(drawing: &Drawing) -> u64 {
    let edges = drawing.graph().edges();
    let pos = drawing.pos();
    let mut count = 0;
    for (k, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[k + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_intersect(pos[a], pos[b], pos[c], pos[d]) {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::Graph;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn k4_square_with_diagonals() {
        let g = Arc::new(Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]).unwrap());
        let d = Drawing::new(g, vec![pt(0., 0.), pt(1., 0.), pt(1., 1.), pt(0., 1.)]).unwrap();
        assert_eq!(count_crossings(&d), 1);
    }

    #[test]
    fn path_on_a_line_has_no_crossings() {
        let g = Arc::new(Graph::new(5, (0..4).map(|i| (i, i + 1))).unwrap());
        let d = Drawing::new(g, (0..5).map(|i| pt(i as f64 * 0.2, 0.3)).collect()).unwrap();
        assert_eq!(count_crossings(&d), 0);
    }

    #[test]
    fn touching_and_overlap_count() {
        // T junction: endpoint of one segment on the interior of the other.
        assert!(segments_intersect(pt(0., 0.), pt(2., 0.), pt(1., 0.), pt(1., 1.)));
        // Collinear overlap.
        assert!(segments_intersect(pt(0., 0.), pt(2., 0.), pt(1., 0.), pt(3., 0.)));
        // Collinear, disjoint.
        assert!(!segments_intersect(pt(0., 0.), pt(1., 0.), pt(2., 0.), pt(3., 0.)));
        // Parallel.
        assert!(!segments_intersect(pt(0., 0.), pt(1., 0.), pt(0., 1.), pt(1., 1.)));
    }
}
