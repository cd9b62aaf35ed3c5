use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::board::{Board, CellId, EdgeId, VertexId};
use crate::rules::Player;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    /// Mapped to itself.
    SelfInvolutive,
    /// Mapped elsewhere, but holds two distinct edges that are partners.
    PartInvolutive,
    /// Mapped elsewhere and holds no partner pair.
    NowhereInvolutive,
}

/// A non-identity self-inverse automorphism of the board complex with the
/// induced edge and cell maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Involution {
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
    pub cell_map: Vec<CellId>,
    pub cell_kinds: Vec<CellKind>,
    pub self_involutive_edges: Vec<EdgeId>,
    pub fixed_vertices: Vec<VertexId>,
    pub qualifies: bool,
}

impl Involution {
    pub fn vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> EdgeId {
        self.edge_map[e.0]
    }

    pub fn cell(&self, c: CellId) -> CellId {
        self.cell_map[c.0]
    }

    /// The player the mirror-reverse strategy wins for, when it applies:
    /// the second player with no self-involutive edge, the first with
    /// exactly one whose endpoints swap.
    pub fn designated_winner(&self) -> Option<Player> {
        if !self.qualifies {
            return None;
        }
        Some(if self.self_involutive_edges.is_empty() { Player::Two } else { Player::One })
    }

    /// Builds and classifies the involution induced by `vertex_map`, or
    /// `None` if the map is not an involutive automorphism of the complex.
    pub fn from_vertex_map(board: &Board, vertex_map: Vec<VertexId>) -> Option<Involution> {
        let n = board.vertex_count();
        if vertex_map.len() != n || vertex_map.iter().any(|v| v.0 >= n) {
            return None;
        }
        if (0..n).any(|v| vertex_map[vertex_map[v].0].0 != v) {
            return None;
        }
        if (0..n).all(|v| vertex_map[v].0 == v) {
            return None;
        }
        let mut edge_map = Vec::with_capacity(board.edge_count());
        for e in board.edge_ids() {
            let [a, b] = board.endpoints(e);
            edge_map.push(board.edge_between(vertex_map[a.0], vertex_map[b.0])?);
        }
        let by_edges: HashMap<Vec<EdgeId>, CellId> = board.cell_ids().map(|c| (sorted_edges(board, c), c)).collect();
        let mut cell_map = Vec::with_capacity(board.cell_count());
        for c in board.cell_ids() {
            let mut image: Vec<EdgeId> = sorted_edges(board, c).iter().map(|e| edge_map[e.0]).collect();
            image.sort();
            cell_map.push(*by_edges.get(&image)?);
        }

        let cell_kinds: Vec<CellKind> = board
            .cell_ids()
            .map(|c| {
                if cell_map[c.0] == c {
                    return CellKind::SelfInvolutive;
                }
                let edges = sorted_edges(board, c);
                let paired = edges.iter().any(|&e| edge_map[e.0] != e && edges.binary_search(&edge_map[e.0]).is_ok());
                if paired {
                    CellKind::PartInvolutive
                } else {
                    CellKind::NowhereInvolutive
                }
            })
            .collect();
        let self_involutive_edges: Vec<EdgeId> = board.edge_ids().filter(|e| edge_map[e.0] == *e).collect();
        let fixed_vertices: Vec<VertexId> = board.vertices().filter(|v| vertex_map[v.0] == *v).collect();
        let cells_ok = cell_kinds.iter().all(|k| *k != CellKind::PartInvolutive);
        let edges_ok = match self_involutive_edges.as_slice() {
            [] => true,
            [e] => {
                let [a, b] = board.endpoints(*e);
                vertex_map[a.0] == b
            }
            _ => false,
        };
        Some(Involution {
            vertex_map,
            edge_map,
            cell_map,
            cell_kinds,
            self_involutive_edges,
            fixed_vertices,
            qualifies: cells_ok && edges_ok,
        })
    }
}

fn sorted_edges(board: &Board, c: CellId) -> Vec<EdgeId> {
    let mut v: Vec<EdgeId> = board.cell(c).edges().collect();
    v.sort();
    v.dedup();
    v
}

/// Every involutive automorphism of the board complex, in lexicographic
/// order of vertex maps.
pub fn find_involutions(board: &Board) -> Vec<Involution> {
    let n = board.vertex_count();
    let mut adj = vec![vec![false; n]; n];
    for e in board.edge_ids() {
        let [a, b] = board.endpoints(e);
        adj[a.0][b.0] = true;
        adj[b.0][a.0] = true;
    }
    let mut map: Vec<Option<usize>> = vec![None; n];
    let mut out = Vec::new();
    extend(board, &adj, &mut map, 0, &mut out);
    out
}

fn consistent(adj: &[Vec<bool>], map: &[Option<usize>], v: usize, w: usize) -> bool {
    // v -> w (and w -> v) against every vertex already assigned
    map.iter().enumerate().all(|(u, img)| match img {
        Some(x) => adj[v][u] == adj[w][*x] && adj[w][u] == adj[v][*x],
        None => true,
    })
}

fn extend(board: &Board, adj: &[Vec<bool>], map: &mut Vec<Option<usize>>, v: usize, out: &mut Vec<Involution>) {
    let n = map.len();
    if v == n {
        let vm = map.iter().map(|x| VertexId(x.expect("complete map"))).collect();
        if let Some(inv) = Involution::from_vertex_map(board, vm) {
            out.push(inv);
        }
        return;
    }
    if map[v].is_some() {
        extend(board, adj, map, v + 1, out);
        return;
    }
    for w in v..n {
        if map[w].is_some() || board.degree(VertexId(v)) != board.degree(VertexId(w)) {
            continue;
        }
        if !consistent(adj, map, v, w) {
            continue;
        }
        map[v] = Some(w);
        map[w] = Some(v);
        extend(board, adj, map, v + 1, out);
        map[v] = None;
        map[w] = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn check_automorphism(board: &Board, inv: &Involution) {
        for v in board.vertices() {
            assert_eq!(inv.vertex(inv.vertex(v)), v);
        }
        for e in board.edge_ids() {
            assert_eq!(inv.edge(inv.edge(e)), e);
            let [a, b] = board.endpoints(e);
            let [x, y] = board.endpoints(inv.edge(e));
            let mut img = [inv.vertex(a), inv.vertex(b)];
            img.sort();
            let mut want = [x, y];
            want.sort();
            assert_eq!(img, want);
        }
        for c in board.cell_ids() {
            assert_eq!(inv.cell(inv.cell(c)), c);
        }
    }

    #[test]
    fn cycle_has_reflections_and_rotation() {
        // dihedral group of order 8 has 5 non-identity involutions
        let b = generators::cycle(4).unwrap();
        let all = find_involutions(&b);
        assert_eq!(all.len(), 5);
        for inv in &all {
            check_automorphism(&b, inv);
            assert_eq!(inv.cell_kinds, vec![CellKind::SelfInvolutive]);
        }
    }

    #[test]
    fn grid_rotation_qualifies_for_second_player() {
        let b = generators::grid(2, 2).unwrap();
        let all = find_involutions(&b);
        assert!(all.iter().all(|i| {
            check_automorphism(&b, i);
            true
        }));
        let rot =
            all.iter().find(|i| i.fixed_vertices.len() == 1 && i.self_involutive_edges.is_empty()).expect("half turn");
        assert!(rot.qualifies);
        assert_eq!(rot.designated_winner(), Some(Player::Two));
    }

    #[test]
    fn asymmetric_path_has_none() {
        let b = generators::cycle_chord(7, 2).unwrap();
        // one reflection swaps the chord endpoints
        let all = find_involutions(&b);
        assert_eq!(all.len(), 1);
        check_automorphism(&b, &all[0]);
    }
}
