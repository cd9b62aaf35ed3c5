//! Game state, move legality under the sink-source rule, cycle-cell
//! detection, terminal detection and the edge/vertex taxonomy.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Board, CellId, EdgeId, VertexId};
use crate::geometry::Turning;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    /// The player who makes move number `ply` (0-based).
    pub fn for_ply(ply: usize) -> Player {
        if ply.is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }
}

impl From<Player> for u8 {
    fn from(p: Player) -> u8 {
        p.number()
    }
}

impl TryFrom<u8> for Player {
    type Error = String;
    fn try_from(n: u8) -> Result<Player, String> {
        match n {
            1 => Ok(Player::One),
            2 => Ok(Player::Two),
            _ => Err(format!("player must be 1 or 2, got {n}")),
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Player {}", self.number())
    }
}

/// An arrow on an edge, or its absence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "state")]
pub enum Marking {
    Unmarked,
    Directed { tail: VertexId, head: VertexId },
}

impl Marking {
    pub fn is_marked(self) -> bool {
        matches!(self, Marking::Directed { .. })
    }
}

/// Marking `edge` with an arrow `tail -> head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub edge: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

impl Move {
    pub fn new(edge: EdgeId, tail: VertexId, head: VertexId) -> Move {
        Move { edge, tail, head }
    }

    pub fn reversed(self) -> Move {
        Move { edge: self.edge, tail: self.head, head: self.tail }
    }

    pub fn marking(self) -> Marking {
        Marking::Directed { tail: self.tail, head: self.head }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} (edge {})", self.tail, self.head, self.edge)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("edge {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("{tail} -> {head} does not join the endpoints of edge {edge}")]
    NotEndpoints { edge: EdgeId, tail: VertexId, head: VertexId },
    #[error("edge {0} is already marked")]
    EdgeMarked(EdgeId),
    #[error("would create a sink at vertex {0}")]
    CreatesSink(VertexId),
    #[error("would create a source at vertex {0}")]
    CreatesSource(VertexId),
    #[error("the game is already over")]
    GameOver,
}

impl MoveError {
    /// Short rule name used by the service and CLI.
    pub fn rule(&self) -> &'static str {
        match self {
            MoveError::UnknownEdge(_) => "unknown_edge",
            MoveError::NotEndpoints { .. } => "endpoints",
            MoveError::EdgeMarked(_) => "edge_marked",
            MoveError::CreatesSink(_) => "sink",
            MoveError::CreatesSource(_) => "source",
            MoveError::GameOver => "game_over",
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("move {index} ({mv}) is illegal: {error}")]
pub struct ReplayError {
    pub index: usize,
    pub mv: Move,
    pub error: MoveError,
}

/// Per-vertex status under the current marking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexStatus {
    Neutral,
    AlmostSink,
    AlmostSource,
    Saturated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionInfo {
    #[serde(rename = "move")]
    pub mv: Move,
    pub is_death_move: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum EdgeStatus {
    Marked,
    Markable { directions: Vec<DirectionInfo>, currently_unplayable: bool },
    Unmarkable,
}

/// A game in progress. Cloning is cheap relative to search (the board is
/// shared); `play`/`undo` mutate in place for recursive search.
#[derive(Clone, Debug)]
pub struct GameState {
    board: Arc<Board>,
    markings: Vec<Marking>,
    history: Vec<Move>,
    inward: Vec<u32>,
    outward: Vec<u32>,
}

impl PartialEq for GameState {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.board, &other.board) || *self.board == *other.board) && self.history == other.history
    }
}

impl GameState {
    pub fn new(board: Arc<Board>) -> GameState {
        let (e, v) = (board.edge_count(), board.vertex_count());
        GameState {
            board,
            markings: vec![Marking::Unmarked; e],
            history: Vec::new(),
            inward: vec![0; v],
            outward: vec![0; v],
        }
    }

    /// Replays `moves` from the empty board, validating each.
    pub fn replay(board: Arc<Board>, moves: &[Move]) -> Result<GameState, ReplayError> {
        let mut state = GameState::new(board);
        for (index, &mv) in moves.iter().enumerate() {
            state.play(mv).map_err(|error| ReplayError { index, mv, error })?;
        }
        Ok(state)
    }

    pub fn board(&self) -> &Arc<Board> {
        &self.board
    }

    pub fn markings(&self) -> &[Marking] {
        &self.markings
    }

    pub fn marking(&self, e: EdgeId) -> Marking {
        self.markings[e.0]
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    pub fn last_move(&self) -> Option<Move> {
        self.history.last().copied()
    }

    pub fn to_move(&self) -> Player {
        Player::for_ply(self.history.len())
    }

    pub fn marked_count(&self) -> usize {
        self.history.len()
    }

    pub fn unmarked_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.board.edge_ids().filter(move |&e| !self.markings[e.0].is_marked())
    }

    fn unmarked_at(&self, v: VertexId) -> u32 {
        self.board.degree(v) as u32 - self.inward[v.0] - self.outward[v.0]
    }

    /// Sink-source legality only; says nothing about whether the game is over.
    pub fn check_direction(&self, mv: Move) -> Result<(), MoveError> {
        if mv.edge.0 >= self.board.edge_count() {
            return Err(MoveError::UnknownEdge(mv.edge));
        }
        let [a, b] = self.board.endpoints(mv.edge);
        if !((mv.tail == a && mv.head == b) || (mv.tail == b && mv.head == a)) {
            return Err(MoveError::NotEndpoints { edge: mv.edge, tail: mv.tail, head: mv.head });
        }
        if self.markings[mv.edge.0].is_marked() {
            return Err(MoveError::EdgeMarked(mv.edge));
        }
        if self.unmarked_at(mv.head) == 1 && self.outward[mv.head.0] == 0 {
            return Err(MoveError::CreatesSink(mv.head));
        }
        if self.unmarked_at(mv.tail) == 1 && self.inward[mv.tail.0] == 0 {
            return Err(MoveError::CreatesSource(mv.tail));
        }
        Ok(())
    }

    #[inline]
    pub fn is_legal_direction(&self, mv: Move) -> bool {
        !self.markings[mv.edge.0].is_marked()
            && !(self.unmarked_at(mv.head) == 1 && self.outward[mv.head.0] == 0)
            && !(self.unmarked_at(mv.tail) == 1 && self.inward[mv.tail.0] == 0)
    }

    /// Full legality check including game-over.
    pub fn check_move(&self, mv: Move) -> Result<(), MoveError> {
        if self.last_move_completed_cycle() {
            return Err(MoveError::GameOver);
        }
        self.check_direction(mv)
    }

    /// Applies a validated move in place.
    pub fn play(&mut self, mv: Move) -> Result<(), MoveError> {
        self.check_move(mv)?;
        self.play_unchecked(mv);
        Ok(())
    }

    pub(crate) fn play_unchecked(&mut self, mv: Move) {
        self.markings[mv.edge.0] = mv.marking();
        self.outward[mv.tail.0] += 1;
        self.inward[mv.head.0] += 1;
        self.history.push(mv);
    }

    /// Reverts the most recent move.
    pub fn undo(&mut self) -> Option<Move> {
        let mv = self.history.pop()?;
        self.markings[mv.edge.0] = Marking::Unmarked;
        self.outward[mv.tail.0] -= 1;
        self.inward[mv.head.0] -= 1;
        Some(mv)
    }

    /// Copy-on-apply.
    pub fn apply_move(&self, mv: Move) -> Result<GameState, MoveError> {
        let mut next = self.clone();
        next.play(mv)?;
        Ok(next)
    }

    /// Every move on an unmarked edge that creates neither a sink nor a
    /// source, sorted by (edge id, tail id).
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        self.for_each_legal(|mv| out.push(mv));
        out
    }

    pub(crate) fn for_each_legal(&self, mut f: impl FnMut(Move)) {
        for e in self.board.edge_ids() {
            if self.markings[e.0].is_marked() {
                continue;
            }
            let [a, b] = self.board.endpoints(e);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            for mv in [Move::new(e, lo, hi), Move::new(e, hi, lo)] {
                if self.is_legal_direction(mv) {
                    f(mv);
                }
            }
        }
    }

    pub fn has_legal_move(&self) -> bool {
        let mut any = false;
        self.for_each_legal(|_| any = true);
        any
    }

    /// Orientation of `cell` if all of its boundary is marked coherently.
    pub fn cell_cycle(&self, c: CellId) -> Option<Turning> {
        cell_cycle_of(&self.board, &self.markings, c)
    }

    /// All cycle cells with the sense in which their arrows run.
    pub fn cycle_cells(&self) -> Vec<(CellId, Turning)> {
        cycle_cells_of(&self.board, &self.markings)
    }

    /// Whether marking `mv` would complete a cycle cell.
    pub fn completes_cycle(&self, mv: Move) -> bool {
        if self.markings[mv.edge.0].is_marked() {
            return false;
        }
        self.board.cells_of_edge(mv.edge).iter().any(|&c| {
            let cell = self.board.cell(c);
            let mut sense: Option<bool> = None;
            for d in &cell.darts {
                let marking = if d.edge == mv.edge { mv.marking() } else { self.markings[d.edge.0] };
                let Marking::Directed { tail, .. } = marking else {
                    return false;
                };
                let with = tail == d.from;
                match sense {
                    None => sense = Some(with),
                    Some(s) if s != with => return false,
                    _ => {}
                }
            }
            // an edge walked twice can never be coherent; the loop catches
            // it because its two darts disagree
            true
        })
    }

    /// Legal moves that complete a cycle cell, in move order.
    pub fn winning_moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        self.for_each_legal(|mv| {
            if self.completes_cycle(mv) {
                out.push(mv);
            }
        });
        out
    }

    pub fn last_move_completed_cycle(&self) -> bool {
        match self.history.last() {
            Some(mv) => self.board.cells_of_edge(mv.edge).iter().any(|&c| self.cell_cycle(c).is_some()),
            None => false,
        }
    }

    /// The winner if the game is over. A player with no legal move on their
    /// turn loses, which also covers boards with no possible first move.
    pub fn winner_if_terminal(&self) -> Option<Player> {
        if self.last_move_completed_cycle() || !self.has_legal_move() {
            Some(self.to_move().other())
        } else {
            None
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.winner_if_terminal().is_some()
    }

    /// One-ply lookahead: after `mv` the opponent can complete a cycle cell.
    /// Moves that themselves complete a cycle are never death moves.
    pub fn is_death_move(&self, mv: Move) -> bool {
        if self.completes_cycle(mv) {
            return false;
        }
        let mut next = self.clone();
        next.play_unchecked(mv);
        let mut death = false;
        next.for_each_legal(|reply| {
            if !death && next.completes_cycle(reply) {
                death = true;
            }
        });
        death
    }

    pub fn classify_edge(&self, e: EdgeId) -> EdgeStatus {
        if self.markings[e.0].is_marked() {
            return EdgeStatus::Marked;
        }
        let [a, b] = self.board.endpoints(e);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let directions: Vec<DirectionInfo> = [Move::new(e, lo, hi), Move::new(e, hi, lo)]
            .into_iter()
            .filter(|&mv| self.is_legal_direction(mv))
            .map(|mv| DirectionInfo { mv, is_death_move: self.is_death_move(mv) })
            .collect();
        if directions.is_empty() {
            return EdgeStatus::Unmarkable;
        }
        let currently_unplayable = directions.iter().all(|d| d.is_death_move);
        EdgeStatus::Markable { directions, currently_unplayable }
    }

    pub fn classify_vertex(&self, v: VertexId) -> VertexStatus {
        let unmarked = self.unmarked_at(v);
        let (inw, outw) = (self.inward[v.0], self.outward[v.0]);
        match unmarked {
            0 => VertexStatus::Saturated,
            1 if outw == 0 => VertexStatus::AlmostSink,
            1 if inw == 0 => VertexStatus::AlmostSource,
            _ => VertexStatus::Neutral,
        }
    }

    /// A cell that can no longer become a cycle cell: its walk repeats an
    /// edge, two of its arrows disagree, or one of its edges is unmarkable.
    pub fn is_uncyclable(&self, c: CellId) -> bool {
        let cell = self.board.cell(c);
        if !cell.is_simple() {
            return true;
        }
        let mut sense = None;
        for d in &cell.darts {
            match self.markings[d.edge.0] {
                Marking::Directed { tail, .. } => {
                    let with = tail == d.from;
                    if *sense.get_or_insert(with) != with {
                        return true;
                    }
                }
                Marking::Unmarked => {
                    let [a, b] = self.board.endpoints(d.edge);
                    if !self.is_legal_direction(Move::new(d.edge, a, b))
                        && !self.is_legal_direction(Move::new(d.edge, b, a))
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// The full position taxonomy in one pass.
    pub fn taxonomy(&self) -> Taxonomy {
        let mut t = Taxonomy::default();
        for v in self.board.vertices() {
            match self.classify_vertex(v) {
                VertexStatus::AlmostSink => t.almost_sinks.push(v),
                VertexStatus::AlmostSource => t.almost_sources.push(v),
                _ => {}
            }
        }
        for e in self.board.edge_ids() {
            match self.classify_edge(e) {
                EdgeStatus::Unmarkable => t.unmarkable.push(e),
                EdgeStatus::Markable { directions, currently_unplayable } => {
                    if currently_unplayable {
                        t.currently_unplayable.push(e);
                    }
                    t.death_moves.extend(directions.iter().filter(|d| d.is_death_move).map(|d| d.mv));
                }
                EdgeStatus::Marked => {}
            }
        }
        t.uncyclable = self.board.cell_ids().filter(|&c| self.is_uncyclable(c)).collect();
        t.cycle_cells = self.cycle_cells();
        t
    }
}

/// Summary of the position classification.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub almost_sinks: Vec<VertexId>,
    pub almost_sources: Vec<VertexId>,
    pub unmarkable: Vec<EdgeId>,
    pub currently_unplayable: Vec<EdgeId>,
    pub death_moves: Vec<Move>,
    pub uncyclable: Vec<CellId>,
    pub cycle_cells: Vec<(CellId, Turning)>,
}

/// Cycle-cell test over a raw marking, independent of how it was reached.
pub fn cell_cycle_of(board: &Board, markings: &[Marking], c: CellId) -> Option<Turning> {
    let mut sense = None;
    for d in &board.cell(c).darts {
        let Marking::Directed { tail, .. } = markings[d.edge.0] else {
            return None;
        };
        let with = tail == d.from;
        if *sense.get_or_insert(with) != with {
            return None;
        }
    }
    // darts run counterclockwise around the cell
    sense.map(|with| if with { Turning::Counterclockwise } else { Turning::Clockwise })
}

pub fn cycle_cells_of(board: &Board, markings: &[Marking]) -> Vec<(CellId, Turning)> {
    board.cell_ids().filter_map(|c| cell_cycle_of(board, markings, c).map(|t| (c, t))).collect()
}

/// Vertices that are sinks or sources under `markings` (full rescan).
pub fn sinks_and_sources(board: &Board, markings: &[Marking]) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut sinks = Vec::new();
    let mut sources = Vec::new();
    for v in board.vertices() {
        let rot = board.rotation(v);
        if rot.is_empty() {
            continue;
        }
        let heads: Option<Vec<bool>> = rot
            .iter()
            .map(|&e| match markings[e.0] {
                Marking::Directed { head, .. } => Some(head == v),
                Marking::Unmarked => None,
            })
            .collect();
        if let Some(heads) = heads {
            if heads.iter().all(|&h| h) {
                sinks.push(v);
            } else if heads.iter().all(|&h| !h) {
                sources.push(v);
            }
        }
    }
    (sinks, sources)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn triangle() -> Arc<Board> {
        Arc::new(
            Board::new(
                vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
                vec![(0, 1), (1, 2), (2, 0)],
            )
            .unwrap(),
        )
    }

    fn mv(e: usize, t: usize, h: usize) -> Move {
        Move::new(EdgeId(e), VertexId(t), VertexId(h))
    }

    #[test]
    fn empty_triangle_has_six_moves() {
        let s = GameState::new(triangle());
        let moves = s.legal_moves();
        assert_eq!(moves.len(), 6);
        assert_eq!(moves[0], mv(0, 0, 1));
        assert_eq!(moves[1], mv(0, 1, 0));
    }

    #[test]
    fn apply_records_history_and_turn() {
        let s = GameState::new(triangle());
        let t = s.apply_move(mv(0, 0, 1)).unwrap();
        assert_eq!(t.history(), &[mv(0, 0, 1)]);
        assert_eq!(t.to_move(), Player::Two);
        assert_eq!(s.history().len(), 0);
        assert_eq!(t.apply_move(mv(0, 1, 0)).unwrap_err(), MoveError::EdgeMarked(EdgeId(0)));
    }

    #[test]
    fn degree_two_direction_is_forced() {
        let s = GameState::replay(triangle(), &[mv(0, 0, 1)]).unwrap();
        // vertex 1 has 0 -> 1 incoming; 2 -> 1 would make it a sink
        assert_eq!(s.check_move(mv(1, 2, 1)), Err(MoveError::CreatesSink(VertexId(1))));
        assert!(s.check_move(mv(1, 1, 2)).is_ok());
        assert_eq!(s.check_move(mv(2, 0, 2)), Err(MoveError::CreatesSource(VertexId(0))));
    }

    #[test]
    fn cycle_completion_wins() {
        let s = GameState::replay(triangle(), &[mv(0, 0, 1), mv(1, 1, 2)]).unwrap();
        assert!(s.completes_cycle(mv(2, 2, 0)));
        let s = s.apply_move(mv(2, 2, 0)).unwrap();
        assert_eq!(s.cycle_cells(), vec![(CellId(0), Turning::Counterclockwise)]);
        assert_eq!(s.winner_if_terminal(), Some(Player::One));
        assert_eq!(s.check_move(mv(0, 1, 0)), Err(MoveError::GameOver));
    }

    #[test]
    fn single_edge_board_is_a_second_player_win() {
        let b = Arc::new(Board::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], vec![(0, 1)]).unwrap());
        let s = GameState::new(b);
        assert!(s.legal_moves().is_empty());
        assert_eq!(s.check_move(mv(0, 0, 1)), Err(MoveError::CreatesSink(VertexId(1))));
        assert_eq!(s.classify_edge(EdgeId(0)), EdgeStatus::Unmarkable);
        assert_eq!(s.winner_if_terminal(), Some(Player::Two));
    }

    #[test]
    fn undo_restores_state() {
        let mut s = GameState::new(triangle());
        let before = (s.markings().to_vec(), s.legal_moves(), s.to_move());
        s.play(mv(1, 2, 1)).unwrap();
        s.undo();
        assert_eq!((s.markings().to_vec(), s.legal_moves(), s.to_move()), before);
        assert_eq!(s.undo(), None);
    }

    #[test]
    fn death_move_by_lookahead() {
        let s = GameState::replay(triangle(), &[mv(0, 0, 1)]).unwrap();
        // 1 -> 2 leaves 2 -> 0 to close the cycle
        assert!(s.is_death_move(mv(1, 1, 2)));
        let EdgeStatus::Markable { directions, currently_unplayable } = s.classify_edge(EdgeId(1)) else {
            panic!("edge 1 should be markable");
        };
        assert_eq!(directions.len(), 1);
        assert!(currently_unplayable);
    }

    #[test]
    fn errors_name_their_rule() {
        assert_eq!(MoveError::CreatesSink(VertexId(0)).rule(), "sink");
        assert_eq!(MoveError::CreatesSource(VertexId(0)).rule(), "source");
        assert_eq!(MoveError::EdgeMarked(EdgeId(0)).rule(), "edge_marked");
        assert_eq!(MoveError::GameOver.rule(), "game_over");
        let s = GameState::new(triangle());
        assert_eq!(s.check_move(mv(7, 0, 1)), Err(MoveError::UnknownEdge(EdgeId(7))));
        assert!(matches!(s.check_move(mv(0, 0, 2)), Err(MoveError::NotEndpoints { .. })));
    }

    #[test]
    fn player_serializes_as_number() {
        assert_eq!(serde_json::to_string(&Player::Two).unwrap(), "2");
        assert_eq!(serde_json::from_str::<Player>("1").unwrap(), Player::One);
        assert!(serde_json::from_str::<Player>("3").is_err());
    }
}
