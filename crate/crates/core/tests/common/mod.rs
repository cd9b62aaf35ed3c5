#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use cycles_core::filled::Orientation;
use cycles_core::records::{read_board, GameRecord, OrientationFile};
use cycles_core::{Board, EdgeId, GameState, Move, VertexId};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn board(name: &str) -> Arc<Board> {
    Arc::new(read_board(&fixture(&format!("boards/{name}.json"))).unwrap())
}

pub fn record(name: &str) -> GameRecord {
    GameRecord::read(&fixture(&format!("records/{name}.json"))).unwrap()
}

/// Replays a record on an already loaded board so the `Arc` is shared.
pub fn replay(board: &Arc<Board>, name: &str) -> GameState {
    record(name).replay_on(board.clone()).unwrap()
}

pub fn orientation(name: &str) -> (Arc<Board>, Orientation) {
    let (b, o) = OrientationFile::load(&fixture(&format!("orientations/{name}.json"))).unwrap();
    (Arc::new(b), o)
}

/// Vertex id from a one-letter label, `a` being 0.
pub fn v(label: char) -> VertexId {
    VertexId(label as usize - 'a' as usize)
}

/// The move `t -> h` on `board`, by single-letter labels.
pub fn arc(board: &Board, t: char, h: char) -> Move {
    let e = board.edge_between(v(t), v(h)).unwrap_or_else(|| panic!("no edge {t}{h}"));
    Move::new(e, v(t), v(h))
}

pub fn edge(board: &Board, a: char, b: char) -> EdgeId {
    board.edge_between(v(a), v(b)).unwrap_or_else(|| panic!("no edge {a}{b}"))
}

/// A connected straight-line planar board on the given integer points:
/// greedily triangulate in priority order, keep a spanning tree, then add
/// back non-tree edges until `max_edges`. `None` when fewer than 2 distinct
/// points remain.
pub fn planar_board(points: &[(i32, i32)], priorities: &[u32], max_edges: usize) -> Option<Board> {
    use cycles_core::geometry::{on_segment, segments_intersect};
    use cycles_core::Point;

    let mut pts: Vec<(i32, i32)> = Vec::new();
    for &p in points {
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    if pts.len() < 2 {
        return None;
    }
    let p = |i: usize| Point::new(pts[i].0 as f64, pts[i].1 as f64);
    let mut pairs: Vec<(u32, usize, usize)> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let k = pairs.len();
            pairs.push((priorities.get(k % priorities.len().max(1)).copied().unwrap_or(0), i, j));
        }
    }
    pairs.sort();
    let mut accepted: Vec<(usize, usize)> = Vec::new();
    for &(_, i, j) in &pairs {
        if (0..pts.len()).any(|k| k != i && k != j && on_segment(p(i), p(j), p(k))) {
            continue;
        }
        let crosses = accepted.iter().any(|&(a, b)| {
            let shared = a == i || a == j || b == i || b == j;
            !shared && segments_intersect(p(i), p(j), p(a), p(b))
        });
        if !crosses {
            accepted.push((i, j));
        }
    }
    // spanning tree first, in acceptance order
    let mut comp: Vec<usize> = (0..pts.len()).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    let (mut tree, mut rest) = (Vec::new(), Vec::new());
    for &(i, j) in &accepted {
        let (ri, rj) = (find(&mut comp, i), find(&mut comp, j));
        if ri != rj {
            comp[ri] = rj;
            tree.push((i, j));
        } else {
            rest.push((i, j));
        }
    }
    let extra = max_edges.saturating_sub(tree.len());
    tree.extend(rest.into_iter().take(extra));
    let points = (0..pts.len()).map(p).collect();
    Some(Board::new(points, tree).expect("greedy construction is planar and connected"))
}
