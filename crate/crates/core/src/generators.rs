//! Constructors for the named board families, with canonical coordinates.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::board::Board;
use crate::geometry::Point;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{family}: {detail}")]
pub struct GeneratorError {
    pub family: &'static str,
    pub detail: String,
}

fn out_of_range(family: &'static str, detail: impl Into<String>) -> GeneratorError {
    GeneratorError { family, detail: detail.into() }
}

fn build(points: Vec<Point>, edges: Vec<(usize, usize)>) -> Board {
    Board::new(points, edges).expect("generated boards are valid by construction")
}

/// Regular polygon of circumradius 1, vertex 0 at the top, counterclockwise.
fn polygon(n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let t = FRAC_PI_2 + TAU * i as f64 / n as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect()
}

fn ring(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

/// A triangle with its center joined to all three corners.
pub fn k4() -> Board {
    let mut pts = vec![Point::new(0.0, 0.0)];
    pts.extend(polygon(3));
    build(pts, vec![(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)])
}

pub fn cycle(n: usize) -> Result<Board, GeneratorError> {
    if n < 3 {
        return Err(out_of_range("cycle", format!("need n >= 3, got {n}")));
    }
    Ok(build(polygon(n), ring(n)))
}

/// `C_n` with a chord from vertex 0 to vertex `split`, giving cells with
/// `split + 1` and `n - split + 1` edges.
pub fn cycle_chord(n: usize, split: usize) -> Result<Board, GeneratorError> {
    if n < 4 {
        return Err(out_of_range("cycle-chord", format!("need n >= 4, got {n}")));
    }
    if split < 2 || split > n - 2 {
        return Err(out_of_range("cycle-chord", format!("need 2 <= split <= {}, got {split}", n - 2)));
    }
    let mut edges = ring(n);
    edges.push((0, split));
    Ok(build(polygon(n), edges))
}

/// `C_n` with an extra inner vertex joined to the adjacent vertices 0 and 1.
pub fn cycle_flap(n: usize) -> Result<Board, GeneratorError> {
    if n < 3 {
        return Err(out_of_range("cycle-flap", format!("need n >= 3, got {n}")));
    }
    let mut pts = polygon(n);
    let apex = pts[0].midpoint(pts[1]);
    pts.push(Point::new(apex.x * 0.5, apex.y * 0.5));
    let mut edges = ring(n);
    edges.extend([(n, 0), (n, 1)]);
    Ok(build(pts, edges))
}

/// `rows x cols` unit squares; vertex `(c, r)` has id `r * (cols + 1) + c`.
/// Horizontal edges come first, row by row, then vertical ones.
pub fn grid(rows: usize, cols: usize) -> Result<Board, GeneratorError> {
    if rows == 0 || cols == 0 {
        return Err(out_of_range("grid", format!("need rows, cols >= 1, got {rows}x{cols}")));
    }
    let id = |r: usize, c: usize| r * (cols + 1) + c;
    let mut pts = Vec::new();
    for r in 0..=rows {
        for c in 0..=cols {
            pts.push(Point::new(c as f64, r as f64));
        }
    }
    let mut edges = Vec::new();
    for r in 0..=rows {
        for c in 0..cols {
            edges.push((id(r, c), id(r, c + 1)));
        }
    }
    for r in 0..rows {
        for c in 0..=cols {
            edges.push((id(r, c), id(r + 1, c)));
        }
    }
    Ok(build(pts, edges))
}

/// An `a`-gon and a `b`-gon sharing two adjacent edges: `a + b - 3`
/// vertices, `a + b - 2` edges, 2 cells.
pub fn two_cell(a: usize, b: usize) -> Result<Board, GeneratorError> {
    if a < 4 || b < 4 {
        return Err(out_of_range("two-cell", format!("need a, b >= 4, got ({a}, {b})")));
    }
    // shared path 0-1-2 runs down the y axis
    let mut pts = vec![Point::new(0.0, 1.0), Point::new(0.0, 0.0), Point::new(0.0, -1.0)];
    let mut edges = vec![(0, 1), (1, 2)];
    for (sides, sign) in [(a, -1.0), (b, 1.0)] {
        let extra = sides - 3;
        let mut prev = 2;
        for k in 1..=extra {
            // from the bottom round to the top on this side
            let t = PI * k as f64 / (extra + 1) as f64;
            pts.push(Point::new(sign * t.sin(), -t.cos()));
            let id = pts.len() - 1;
            edges.push((prev, id));
            prev = id;
        }
        edges.push((prev, 0));
    }
    Ok(build(pts, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let b = k4();
        assert_eq!((b.vertex_count(), b.edge_count(), b.cell_count()), (4, 6, 3));
        for n in 3..=9 {
            let b = cycle(n).unwrap();
            assert_eq!((b.edge_count(), b.cell_count()), (n, 1));
            let b = cycle_flap(n).unwrap();
            assert_eq!((b.edge_count(), b.cell_count()), (n + 2, 2));
        }
        for n in 4..=9 {
            for split in 2..=n - 2 {
                let b = cycle_chord(n, split).unwrap();
                assert_eq!((b.edge_count(), b.cell_count()), (n + 1, 2));
                let mut sizes: Vec<usize> = b.cells().iter().map(|c| c.darts.len()).collect();
                sizes.sort();
                let mut want = vec![split + 1, n - split + 1];
                want.sort();
                assert_eq!(sizes, want);
            }
        }
        let g = grid(2, 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), g.cell_count()), (9, 12, 4));
        let g = grid(1, 3).unwrap();
        assert_eq!(g.edge_count(), 2 * 3 + 4);
    }

    #[test]
    fn two_cell_shape() {
        let b = two_cell(7, 5).unwrap();
        assert_eq!((b.vertex_count(), b.edge_count(), b.cell_count()), (9, 10, 2));
        let mut sizes: Vec<usize> = b.cells().iter().map(|c| c.darts.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![5, 7]);
        let b = two_cell(4, 4).unwrap();
        assert_eq!((b.vertex_count(), b.edge_count(), b.cell_count()), (5, 6, 2));
    }

    #[test]
    fn ranges() {
        assert!(cycle(2).is_err());
        assert!(cycle_chord(4, 1).is_err());
        assert!(cycle_chord(6, 5).is_err());
        assert!(cycle_chord(3, 2).is_err());
        assert!(grid(0, 3).is_err());
        assert!(two_cell(3, 5).is_err());
    }
}
