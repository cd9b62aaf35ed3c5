//! Planar predicates over straight-line drawings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A vertex position in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Sense of traversal of a closed polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Turning {
    Clockwise,
    Counterclockwise,
}

impl Turning {
    pub fn reversed(self) -> Turning {
        match self {
            Turning::Clockwise => Turning::Counterclockwise,
            Turning::Counterclockwise => Turning::Clockwise,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
}

/// Shoelace signed area; positive iff the polygon is traversed counterclockwise.
pub fn signed_area(polygon: &[Point]) -> Result<f64, GeometryError> {
    if polygon.len() < 3 {
        return Err(GeometryError::TooFewVertices(polygon.len()));
    }
    Ok(walk_area(polygon))
}

/// Shoelace area without the length check. Closed walks that retrace bridges
/// contribute zero for the retraced part.
pub(crate) fn walk_area(polygon: &[Point]) -> f64 {
    let n = polygon.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = polygon[i];
        let q = polygon[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    twice / 2.0
}

/// Cross product of (b - a) and (c - a).
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn within_box(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// True when `p` lies on the closed segment `ab`.
pub fn on_segment(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == 0.0 && within_box(a, b, p)
}

/// Closed-segment intersection test, including touching and collinear overlap.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && within_box(c, d, a))
        || (d2 == 0.0 && within_box(c, d, b))
        || (d3 == 0.0 && within_box(a, b, c))
        || (d4 == 0.0 && within_box(a, b, d))
}

/// Even-odd ray casting. Points exactly on the boundary are unspecified;
/// callers only query points known to lie off the polygon.
pub fn point_in_polygon(polygon: &[Point], p: Point) -> bool {
    let n = polygon.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]
    }

    #[test]
    fn unit_square_area_sign() {
        assert_eq!(signed_area(&square()).unwrap(), 1.0);
        let mut rev = square();
        rev.reverse();
        assert_eq!(signed_area(&rev).unwrap(), -1.0);
    }

    #[test]
    fn degenerate_polygon_rejected() {
        let two = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert_eq!(signed_area(&two), Err(GeometryError::TooFewVertices(2)));
    }

    #[test]
    fn crossing_and_touching_segments() {
        let o = Point::new(0.0, 0.0);
        let a = Point::new(2.0, 2.0);
        let b = Point::new(0.0, 2.0);
        let c = Point::new(2.0, 0.0);
        assert!(segments_intersect(o, a, b, c));
        assert!(segments_intersect(o, c, c, a));
        assert!(!segments_intersect(o, b, c, a));
        // collinear overlap
        assert!(segments_intersect(o, c, Point::new(1.0, 0.0), Point::new(3.0, 0.0)));
        assert!(!segments_intersect(o, Point::new(1.0, 0.0), Point::new(2.0, 0.0), Point::new(3.0, 0.0)));
    }

    #[test]
    fn ray_casting() {
        let sq = square();
        assert!(point_in_polygon(&sq, Point::new(0.5, 0.5)));
        assert!(!point_in_polygon(&sq, Point::new(1.5, 0.5)));
        assert!(!point_in_polygon(&sq, Point::new(0.5, -0.1)));
    }
}
