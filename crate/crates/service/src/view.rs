//! Response documents. Everything the client shows comes from here; the
//! client holds no rules logic.

use cycles_core::board::BoardFile;
use cycles_core::catalog::CatalogEntry;
use cycles_core::{CellId, EdgeId, EdgeStatus, GameState, Marking, Move, Player, Turning, VertexStatus};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct BoardSummary {
    pub id: String,
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub cells: usize,
}

impl BoardSummary {
    pub fn of(e: &CatalogEntry) -> BoardSummary {
        BoardSummary {
            id: e.id.clone(),
            name: e.name.clone(),
            vertices: e.board.vertex_count(),
            edges: e.board.edge_count(),
            cells: e.board.cell_count(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoardDetail {
    #[serde(flatten)]
    pub summary: BoardSummary,
    pub board: BoardFile,
    /// Vertex ids around each cell, counterclockwise.
    pub cell_vertices: Vec<Vec<usize>>,
}

impl BoardDetail {
    pub fn of(e: &CatalogEntry) -> BoardDetail {
        let b = &e.board;
        BoardDetail {
            summary: BoardSummary::of(e),
            board: BoardFile::from_board(b),
            cell_vertices: b.cells().iter().map(|c| c.vertices().map(|v| v.0).collect()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EdgeView {
    pub edge: EdgeId,
    pub marking: Marking,
    #[serde(flatten)]
    pub status: EdgeStatus,
}

#[derive(Debug, Serialize)]
pub struct CycleCellView {
    pub cell: CellId,
    pub turning: Turning,
}

#[derive(Debug, Serialize)]
pub struct GameView {
    pub id: String,
    pub board_id: String,
    pub engine_player: u8,
    pub policy: Option<String>,
    /// Unix seconds.
    pub created: u64,
    pub to_move: Player,
    pub moves: Vec<Move>,
    pub legal_moves: Vec<Move>,
    pub edges: Vec<EdgeView>,
    pub vertices: Vec<VertexStatus>,
    pub unmarkable: Vec<EdgeId>,
    pub cycle_cells: Vec<CycleCellView>,
    pub winner: Option<Player>,
}

impl GameView {
    pub fn of(id: String, board_id: String, engine_player: u8, policy: Option<String>, s: &GameState) -> GameView {
        let b = s.board();
        let edges: Vec<EdgeView> =
            b.edge_ids().map(|e| EdgeView { edge: e, marking: s.marking(e), status: s.classify_edge(e) }).collect();
        let unmarkable = edges.iter().filter(|v| v.status == EdgeStatus::Unmarkable).map(|v| v.edge).collect();
        GameView {
            id,
            board_id,
            engine_player,
            policy,
            created: 0,
            to_move: s.to_move(),
            moves: s.history().to_vec(),
            legal_moves: if s.is_terminal() { Vec::new() } else { s.legal_moves() },
            edges,
            vertices: b.vertices().map(|v| s.classify_vertex(v)).collect(),
            unmarkable,
            cycle_cells: s.cycle_cells().into_iter().map(|(cell, turning)| CycleCellView { cell, turning }).collect(),
            winner: s.winner_if_terminal(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MoveResponse {
    pub human_move: Move,
    pub engine_move: Option<Move>,
    pub state: GameView,
}
