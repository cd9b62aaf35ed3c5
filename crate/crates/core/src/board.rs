//! Immutable game boards: a simple connected plane graph drawn with straight
//! edges, its rotation system, and the bounded faces (cells) it encloses.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, on_segment, segments_intersect, walk_area, Point};

macro_rules! dense_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

dense_id!(
    /// Index of a vertex, in input order.
    VertexId
);
dense_id!(
    /// Index of an edge, in input order.
    EdgeId
);
dense_id!(
    /// Index of a bounded cell, in extraction order.
    CellId
);

/// One side of an edge, traversed from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dart {
    pub edge: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
}

/// A bounded face. `darts` is the closed boundary walk with the cell on its
/// left, so the walk runs counterclockwise around the cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub darts: Vec<Dart>,
}

impl Cell {
    /// Boundary vertices in walk order (tails of the darts).
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.darts.iter().map(|d| d.from)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.darts.iter().map(|d| d.edge)
    }

    /// A cell whose walk uses some edge twice (a dangling tree or a bridge to
    /// a hole) can never be encircled by arrows.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.darts.iter().all(|d| seen.insert(d.edge))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BoardError {
    #[error("malformed board document: {0}")]
    Malformed(String),
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: usize },
    #[error("{kind} ids must be dense from 0; id {missing} is missing")]
    SparseIds { kind: &'static str, missing: usize },
    #[error("board has no vertices")]
    Empty,
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(VertexId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: EdgeId, vertex: usize },
    #[error("edge {0} is a loop")]
    Loop(EdgeId),
    #[error("edges {0} and {1} join the same pair of vertices")]
    ParallelEdges(EdgeId, EdgeId),
    #[error("vertices {0} and {1} share the same position")]
    CoincidentVertices(VertexId, VertexId),
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(VertexId),
    #[error("edges {0} and {1} cross")]
    Crossing(EdgeId, EdgeId),
    #[error("vertex {vertex} lies on the interior of edge {edge}")]
    VertexOnEdge { vertex: VertexId, edge: EdgeId },
    #[error("edges leave vertex {0} in the same direction")]
    AngleTie(VertexId),
    #[error("face count {found} disagrees with Euler's formula ({expected})")]
    EulerMismatch { found: usize, expected: usize },
}

/// A validated board. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Board {
    points: Vec<Point>,
    edges: Vec<[VertexId; 2]>,
    rotation: Vec<Vec<EdgeId>>,
    cells: Vec<Cell>,
    edge_cells: Vec<Vec<CellId>>,
    outer_walk: Vec<Dart>,
}

impl Board {
    /// Validates a drawing and derives its rotation system and cells.
    pub fn new(points: Vec<Point>, edges: Vec<(usize, usize)>) -> Result<Board, BoardError> {
        if points.is_empty() {
            return Err(BoardError::Empty);
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(BoardError::NonFinite(VertexId(i)));
            }
        }
        let n = points.len();
        let mut edge_list = Vec::with_capacity(edges.len());
        let mut seen_pairs: HashMap<(usize, usize), EdgeId> = HashMap::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            let e = EdgeId(i);
            for w in [u, v] {
                if w >= n {
                    return Err(BoardError::UnknownVertex { edge: e, vertex: w });
                }
            }
            if u == v {
                return Err(BoardError::Loop(e));
            }
            let key = (u.min(v), u.max(v));
            if let Some(&prev) = seen_pairs.get(&key) {
                return Err(BoardError::ParallelEdges(prev, e));
            }
            seen_pairs.insert(key, e);
            edge_list.push([VertexId(u), VertexId(v)]);
        }

        check_coincident(&points)?;
        check_connected(n, &edge_list)?;
        check_planar(&points, &edge_list)?;

        let rotation = rotation_system(&points, &edge_list)?;
        let (cells, outer_walk) = extract_cells(&points, &edge_list, &rotation);

        let expected = edge_list.len() + 1 - n;
        if cells.len() != expected {
            return Err(BoardError::EulerMismatch { found: cells.len(), expected });
        }

        let mut edge_cells = vec![Vec::new(); edge_list.len()];
        for (c, cell) in cells.iter().enumerate() {
            for d in &cell.darts {
                let list: &mut Vec<CellId> = &mut edge_cells[d.edge.0];
                if !list.contains(&CellId(c)) {
                    list.push(CellId(c));
                }
            }
        }

        Ok(Board { points, edges: edge_list, rotation, cells, edge_cells, outer_walk })
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.points.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.cells.len()).map(CellId)
    }

    pub fn point(&self, v: VertexId) -> Point {
        self.points[v.0]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e.0]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.edges[e.0];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v.0].len()
    }

    /// Incident edges of `v` in counterclockwise angular order.
    pub fn rotation(&self, v: VertexId) -> &[EdgeId] {
        &self.rotation[v.0]
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.rotation[u.0].iter().copied().find(|&e| self.other_end(e, u) == v)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, c: CellId) -> &Cell {
        &self.cells[c.0]
    }

    /// Bounded cells on either side of `e` (0, 1 or 2 of them).
    pub fn cells_of_edge(&self, e: EdgeId) -> &[CellId] {
        &self.edge_cells[e.0]
    }

    /// Boundary walk of the unbounded face (clockwise).
    pub fn outer_walk(&self) -> &[Dart] {
        &self.outer_walk
    }

    pub fn cell_polygon(&self, c: CellId) -> Vec<Point> {
        self.cells[c.0].vertices().map(|v| self.point(v)).collect()
    }

    /// Signed area of a vertex cycle of this board.
    pub fn signed_area(&self, cycle: &[VertexId]) -> Result<f64, geometry::GeometryError> {
        let pts: Vec<Point> = cycle.iter().map(|&v| self.point(v)).collect();
        geometry::signed_area(&pts)
    }
}

fn check_coincident(points: &[Point]) -> Result<(), BoardError> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)));
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(BoardError::CoincidentVertices(VertexId(a), VertexId(b)));
        }
    }
    Ok(())
}

fn check_connected(n: usize, edges: &[[VertexId; 2]]) -> Result<(), BoardError> {
    let mut adj = vec![Vec::new(); n];
    for &[u, v] in edges {
        adj[u.0].push(v.0);
        adj[v.0].push(u.0);
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(v) => Err(BoardError::Disconnected(VertexId(v))),
        None => Ok(()),
    }
}

// Pairwise O(E^2) test; boards are small.
fn check_planar(points: &[Point], edges: &[[VertexId; 2]]) -> Result<(), BoardError> {
    for (i, &[a, b]) in edges.iter().enumerate() {
        let (pa, pb) = (points[a.0], points[b.0]);
        for (v, &p) in points.iter().enumerate() {
            if v != a.0 && v != b.0 && on_segment(pa, pb, p) {
                return Err(BoardError::VertexOnEdge { vertex: VertexId(v), edge: EdgeId(i) });
            }
        }
        for (j, &[c, d]) in edges.iter().enumerate().skip(i + 1) {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_intersect(pa, pb, points[c.0], points[d.0]) {
                return Err(BoardError::Crossing(EdgeId(i), EdgeId(j)));
            }
        }
    }
    Ok(())
}

fn rotation_system(points: &[Point], edges: &[[VertexId; 2]]) -> Result<Vec<Vec<EdgeId>>, BoardError> {
    let mut around: Vec<Vec<(f64, EdgeId)>> = vec![Vec::new(); points.len()];
    for (i, &[u, v]) in edges.iter().enumerate() {
        for (from, to) in [(u, v), (v, u)] {
            let (p, q) = (points[from.0], points[to.0]);
            around[from.0].push(((q.y - p.y).atan2(q.x - p.x), EdgeId(i)));
        }
    }
    around
        .into_iter()
        .enumerate()
        .map(|(v, mut list)| {
            list.sort_by(|a, b| a.0.total_cmp(&b.0));
            if list.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(BoardError::AngleTie(VertexId(v)));
            }
            Ok(list.into_iter().map(|(_, e)| e).collect())
        })
        .collect()
}

/// Face traversal over darts. The successor of dart (u, v) is (v, w) where
/// `w` follows `u` clockwise around `v`; every face is then walked with its
/// interior on the left. The unbounded face is the walk of least signed area
/// and is returned separately.
pub fn extract_cells(points: &[Point], edges: &[[VertexId; 2]], rotation: &[Vec<EdgeId>]) -> (Vec<Cell>, Vec<Dart>) {
    let dart = |e: usize, forward: bool| {
        let [a, b] = edges[e];
        if forward {
            Dart { edge: EdgeId(e), from: a, to: b }
        } else {
            Dart { edge: EdgeId(e), from: b, to: a }
        }
    };
    let dart_index = |d: Dart| 2 * d.edge.0 + usize::from(d.from != edges[d.edge.0][0]);

    let mut position: Vec<HashMap<EdgeId, usize>> = Vec::with_capacity(rotation.len());
    for rot in rotation {
        position.push(rot.iter().enumerate().map(|(i, &e)| (e, i)).collect());
    }

    let mut visited = vec![false; 2 * edges.len()];
    let mut faces: Vec<(Vec<Dart>, f64)> = Vec::new();
    for start in 0..2 * edges.len() {
        if visited[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut d = dart(start / 2, start % 2 == 0);
        loop {
            let idx = dart_index(d);
            if visited[idx] {
                break;
            }
            visited[idx] = true;
            walk.push(d);
            let rot = &rotation[d.to.0];
            let pos = position[d.to.0][&d.edge];
            let next_edge = rot[(pos + rot.len() - 1) % rot.len()];
            let [a, _] = edges[next_edge.0];
            d = dart(next_edge.0, a == d.to);
        }
        let poly: Vec<Point> = walk.iter().map(|d| points[d.from.0]).collect();
        faces.push((walk, walk_area(&poly)));
    }

    let outer = faces.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|(i, _)| i);
    let mut cells = Vec::new();
    let mut outer_walk = Vec::new();
    for (i, (walk, _)) in faces.into_iter().enumerate() {
        if Some(i) == outer {
            outer_walk = walk;
        } else {
            cells.push(Cell { darts: walk });
        }
    }
    (cells, outer_walk)
}

// ---------------------------------------------------------------------------
// Board file format
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: usize,
    pub u: usize,
    pub v: usize,
}

/// On-disk board document: `{"vertices": [...], "edges": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoardFile {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

impl BoardFile {
    pub fn from_board(board: &Board) -> BoardFile {
        BoardFile {
            vertices: board.points.iter().enumerate().map(|(id, p)| VertexRecord { id, x: p.x, y: p.y }).collect(),
            edges: board.edges.iter().enumerate().map(|(id, &[u, v])| EdgeRecord { id, u: u.0, v: v.0 }).collect(),
        }
    }

    pub fn into_board(self) -> Result<Board, BoardError> {
        let points = dense("vertex", self.vertices.into_iter().map(|r| (r.id, Point::new(r.x, r.y))))?;
        let edges = dense("edge", self.edges.into_iter().map(|r| (r.id, (r.u, r.v))))?;
        Board::new(points, edges)
    }
}

fn dense<T>(kind: &'static str, items: impl Iterator<Item = (usize, T)>) -> Result<Vec<T>, BoardError> {
    let mut slots: Vec<Option<T>> = Vec::new();
    let mut count = 0;
    for (id, item) in items {
        if id >= slots.len() {
            slots.resize_with(id + 1, || None);
        }
        if slots[id].is_some() {
            return Err(BoardError::DuplicateId { kind, id });
        }
        slots[id] = Some(item);
        count += 1;
    }
    if count != slots.len() {
        let missing = slots.iter().position(Option::is_none).unwrap_or(0);
        return Err(BoardError::SparseIds { kind, missing });
    }
    Ok(slots.into_iter().flatten().collect())
}

/// Parses and validates a board document.
pub fn parse_board(text: &str) -> Result<Board, BoardError> {
    let file: BoardFile = serde_json::from_str(text).map_err(|e| BoardError::Malformed(e.to_string()))?;
    file.into_board()
}

/// Canonical board document: arrays sorted by id, shortest round-trip numbers.
pub fn emit_board(board: &Board) -> String {
    let mut text =
        serde_json::to_string_pretty(&BoardFile::from_board(board)).expect("board documents always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn k4() -> Board {
        // a at the center, b above, c and d below
        Board::new(
            pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, -0.7), (-1.0, -0.7)]),
            vec![(0, 3), (3, 2), (2, 0), (1, 2), (0, 1), (3, 1)],
        )
        .unwrap()
    }

    #[test]
    fn k4_has_three_triangles() {
        let b = k4();
        assert_eq!(b.cell_count(), 3);
        for c in b.cells() {
            assert_eq!(c.darts.len(), 3);
            assert!(c.vertices().any(|v| v == VertexId(0)));
        }
        assert_eq!(b.outer_walk().len(), 3);
        assert!(b.outer_walk().iter().all(|d| d.from != VertexId(0)));
        for e in b.edge_ids() {
            let expect = if b.endpoints(e).contains(&VertexId(0)) { 2 } else { 1 };
            assert_eq!(b.cells_of_edge(e).len(), expect);
        }
    }

    #[test]
    fn cells_are_counterclockwise() {
        let b = k4();
        for c in b.cell_ids() {
            let area = geometry::signed_area(&b.cell_polygon(c)).unwrap();
            assert!(area > 0.0);
        }
    }

    #[test]
    fn rotation_is_angular() {
        let b = k4();
        // around the center: b (90°), d (-145°), c (-35°) sorted by atan2
        let around: Vec<VertexId> = b.rotation(VertexId(0)).iter().map(|&e| b.other_end(e, VertexId(0))).collect();
        assert_eq!(around, vec![VertexId(3), VertexId(2), VertexId(1)]);
    }

    #[test]
    fn path_has_no_cells() {
        let b = Board::new(pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]), vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(b.cell_count(), 0);
        assert!(b.cells_of_edge(EdgeId(0)).is_empty());
        assert!(b.cells_of_edge(EdgeId(1)).is_empty());
    }

    #[test]
    fn single_vertex_board() {
        let b = Board::new(pts(&[(0.0, 0.0)]), vec![]).unwrap();
        assert_eq!((b.vertex_count(), b.edge_count(), b.cell_count()), (1, 0, 0));
    }

    #[test]
    fn pendant_edge_inside_a_cell() {
        // triangle with a spike pointing inward
        let b =
            Board::new(pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 4.0), (2.0, 1.0)]), vec![(0, 1), (1, 2), (2, 0), (0, 3)])
                .unwrap();
        assert_eq!(b.cell_count(), 1);
        assert_eq!(b.cell(CellId(0)).darts.len(), 5);
        assert!(!b.cell(CellId(0)).is_simple());
        assert_eq!(b.cells_of_edge(EdgeId(3)), &[CellId(0)]);
    }

    #[test]
    fn validation_errors_are_distinct() {
        let sq = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(Board::new(sq.clone(), vec![(0, 0)]).unwrap_err(), BoardError::Loop(EdgeId(0)));
        assert_eq!(
            Board::new(sq.clone(), vec![(0, 1), (1, 0)]).unwrap_err(),
            BoardError::ParallelEdges(EdgeId(0), EdgeId(1))
        );
        assert_eq!(Board::new(sq.clone(), vec![(0, 1), (2, 3)]).unwrap_err(), BoardError::Disconnected(VertexId(2)));
        assert_eq!(
            Board::new(sq.clone(), vec![(0, 2), (1, 3), (0, 1)]).unwrap_err(),
            BoardError::Crossing(EdgeId(0), EdgeId(1))
        );
        assert_eq!(
            Board::new(sq.clone(), vec![(0, 9)]).unwrap_err(),
            BoardError::UnknownVertex { edge: EdgeId(0), vertex: 9 }
        );
        assert_eq!(
            Board::new(pts(&[(0.0, 0.0), (0.0, 0.0)]), vec![(0, 1)]).unwrap_err(),
            BoardError::CoincidentVertices(VertexId(0), VertexId(1))
        );
        assert_eq!(
            Board::new(pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]), vec![(0, 2), (0, 1)]).unwrap_err(),
            BoardError::VertexOnEdge { vertex: VertexId(1), edge: EdgeId(0) }
        );
        assert_eq!(Board::new(vec![], vec![]).unwrap_err(), BoardError::Empty);
    }

    #[test]
    fn file_errors() {
        assert!(matches!(parse_board("{"), Err(BoardError::Malformed(_))));
        let dup = r#"{"vertices":[{"id":0,"x":0,"y":0},{"id":0,"x":1,"y":0}],"edges":[]}"#;
        assert_eq!(parse_board(dup).unwrap_err(), BoardError::DuplicateId { kind: "vertex", id: 0 });
        let sparse = r#"{"vertices":[{"id":0,"x":0,"y":0},{"id":2,"x":1,"y":0}],"edges":[]}"#;
        assert_eq!(parse_board(sparse).unwrap_err(), BoardError::SparseIds { kind: "vertex", missing: 1 });
    }

    #[test]
    fn emit_is_canonical_and_round_trips() {
        let b = k4();
        let text = emit_board(&b);
        assert_eq!(parse_board(&text).unwrap(), b);
        assert_eq!(emit_board(&parse_board(&text).unwrap()), text);
        // records come back sorted regardless of input order
        let shuffled = r#"{"edges":[{"id":1,"u":1,"v":2},{"id":0,"u":0,"v":1}],
            "vertices":[{"id":2,"x":0.5,"y":1},{"id":0,"x":0,"y":0},{"id":1,"x":1,"y":0}]}"#;
        let b = parse_board(shuffled).unwrap();
        let file = BoardFile::from_board(&b);
        assert_eq!(file.vertices[2].x, 0.5);
        assert_eq!((file.edges[1].u, file.edges[1].v), (1, 2));
    }
}
