use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::board::{Board, CellId, EdgeId, VertexId};
use crate::rules::{GameState, Marking, Move, Player};

use super::{least_safe_move, least_winning_move, Policy, StrategyError};

/// A cycle with one chord: exactly two degree-3 vertices `a < b` joined by
/// the chord, every other vertex of degree 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChordFamily {
    pub chord: EdgeId,
    pub a: VertexId,
    pub b: VertexId,
    /// The two paths from `a` to `b` avoiding the chord, as vertex lists.
    pub chains: [Vec<VertexId>; 2],
}

impl ChordFamily {
    pub fn detect(board: &Board) -> Option<ChordFamily> {
        if board.edge_count() != board.vertex_count() + 1 {
            return None;
        }
        let mut hubs = Vec::new();
        for v in board.vertices() {
            match board.degree(v) {
                2 => {}
                3 => hubs.push(v),
                _ => return None,
            }
        }
        let [a, b] = hubs[..] else { return None };
        let chord = board.edge_between(a, b)?;
        let mut chains = Vec::new();
        for &start in board.rotation(a) {
            if start == chord {
                continue;
            }
            let mut path = vec![a];
            let (mut prev, mut cur) = (a, board.other_end(start, a));
            while cur != b {
                if cur == a || path.len() > board.vertex_count() {
                    return None;
                }
                path.push(cur);
                let next = board.rotation(cur).iter().map(|&e| board.other_end(e, cur)).find(|&w| w != prev)?;
                (prev, cur) = (cur, next);
            }
            path.push(b);
            if path.len() < 3 {
                return None;
            }
            chains.push(path);
        }
        chains.sort();
        let [c0, c1]: [Vec<VertexId>; 2] = chains.try_into().ok()?;
        if c0.len() + c1.len() - 2 != board.vertex_count() {
            return None;
        }
        Some(ChordFamily { chord, a, b, chains: [c0, c1] })
    }

    /// Number of vertices on the outer cycle.
    pub fn n(&self) -> usize {
        self.chains[0].len() + self.chains[1].len() - 2
    }

    /// First player wins when the cycle is even.
    pub fn designated_winner(&self) -> Player {
        if self.n().is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }

    /// For a move on a chain edge, the chord endpoint its arrow flows toward.
    pub fn chain_flow(&self, mv: Move) -> Option<VertexId> {
        for chain in &self.chains {
            for w in chain.windows(2) {
                if (w[0], w[1]) == (mv.tail, mv.head) {
                    return Some(self.b);
                }
                if (w[1], w[0]) == (mv.tail, mv.head) {
                    return Some(self.a);
                }
            }
        }
        None
    }

    /// Chord arrow pointing at `head`.
    pub fn chord_toward(&self, head: VertexId) -> Move {
        let tail = if head == self.a { self.b } else { self.a };
        Move::new(self.chord, tail, head)
    }

    /// Whether the chord endpoint `v` has, or can still get, a reversal:
    /// a non-chord edge relating to `v` the same way the marked chord does
    /// (both in or both out). An unmarked edge that can only be marked
    /// that way counts as one; if it later becomes unmarkable the other
    /// chain edge at `v` must have been marked that way instead.
    pub fn reversal_at(&self, board: &Board, state: &GameState, v: VertexId) -> Reversal {
        let Marking::Directed { head: ch, .. } = state.marking(self.chord) else {
            return Reversal::Open;
        };
        let chord_in = ch == v;
        let mut open = false;
        for &e in board.rotation(v) {
            if e == self.chord {
                continue;
            }
            match state.marking(e) {
                Marking::Directed { head, .. } if (head == v) == chord_in => return Reversal::Present,
                Marking::Directed { .. } => {}
                Marking::Unmarked => {
                    let w = board.other_end(e, v);
                    let with = if chord_in { Move::new(e, w, v) } else { Move::new(e, v, w) };
                    match (state.is_legal_direction(with), state.is_legal_direction(with.reversed())) {
                        (true, false) => return Reversal::Present,
                        (true, true) => open = true,
                        _ => {}
                    }
                }
            }
        }
        if open {
            Reversal::Open
        } else {
            Reversal::Absent
        }
    }

    /// `Some(true)` once both chord endpoints are settled alike, `Some(false)`
    /// once they are settled differently.
    pub fn settled(&self, board: &Board, state: &GameState) -> Option<bool> {
        match (self.reversal_at(board, state, self.a), self.reversal_at(board, state, self.b)) {
            (Reversal::Open, _) | (_, Reversal::Open) => None,
            (x, y) => Some(x == y),
        }
    }

    fn settled_count(&self, board: &Board, state: &GameState) -> usize {
        [self.a, self.b].into_iter().filter(|&v| self.reversal_at(board, state, v) != Reversal::Open).count()
    }

    /// The non-chord moves at `v` that would create a reversal.
    fn reversal_moves(&self, board: &Board, state: &GameState, v: VertexId) -> Vec<Move> {
        let Marking::Directed { head: ch, .. } = state.marking(self.chord) else {
            return Vec::new();
        };
        let chord_in = ch == v;
        board
            .rotation(v)
            .iter()
            .filter(|&&e| e != self.chord && !state.marking(e).is_marked())
            .map(|&e| {
                let w = board.other_end(e, v);
                if chord_in {
                    Move::new(e, w, v)
                } else {
                    Move::new(e, v, w)
                }
            })
            .filter(|&m| state.is_legal_direction(m))
            .collect()
    }
}

/// Flow reversal status at a chord endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reversal {
    /// A reversal is marked or forced.
    Present,
    /// No reversal can ever be marked.
    Absent,
    Open,
}

/// Plays for the chord board's designated winner.
///
/// With the chord marked, a finished game without a cycle has an even
/// number of unmarkable edges exactly when the flow reverses at both
/// chord endpoints or at neither. The policy takes the chord (or answers
/// on it), then steers toward both endpoints settling alike, never
/// allowing a reply that settles them differently, and otherwise avoids
/// death moves.
#[derive(Clone, Debug)]
pub struct ChordPolicy {
    board: Arc<Board>,
    family: ChordFamily,
}

impl ChordPolicy {
    pub fn new(board: &Arc<Board>) -> Result<ChordPolicy, StrategyError> {
        let family = ChordFamily::detect(board).ok_or(StrategyError::NotInFamily("cycle-with-chord"))?;
        Ok(ChordPolicy { board: board.clone(), family })
    }

    pub fn family(&self) -> &ChordFamily {
        &self.family
    }

    fn least_safe_of(&self, state: &GameState, mut moves: Vec<Move>) -> Option<Move> {
        moves.sort();
        moves.into_iter().find(|&m| state.is_legal_direction(m) && !state.is_death_move(m))
    }

    fn opening_reply(&self, state: &GameState, first: Move) -> Option<Move> {
        let f = &self.family;
        if first.edge == f.chord {
            let mut cands = f.reversal_moves(&self.board, state, f.a);
            cands.extend(f.reversal_moves(&self.board, state, f.b));
            return self.least_safe_of(state, cands);
        }
        // the chord flows into the endpoint the chain flows into
        if let Some(toward) = f.chain_flow(first) {
            let m = f.chord_toward(toward);
            if state.is_legal_direction(m) {
                return Some(m);
            }
        }
        None
    }

    /// Whether the opponent, to move in `state`, has a non-death reply that
    /// settles the endpoints differently.
    fn opponent_can_split(&self, state: &GameState) -> bool {
        let f = &self.family;
        let mut next = state.clone();
        state.legal_moves().into_iter().any(|r| {
            if state.is_death_move(r) {
                return false;
            }
            next.play_unchecked(r);
            let split = f.settled(&self.board, &next) == Some(false);
            next.undo();
            split
        })
    }

    /// Edge ids along a chain, from `a` to `b`.
    fn chain_edges(&self, chain: usize) -> Vec<EdgeId> {
        self.family.chains[chain].windows(2).map(|w| self.board.edge_between(w[0], w[1]).expect("chain edge")).collect()
    }

    /// Once the other chain no longer touches either endpoint's status, an
    /// untouched odd chain decides the game on its own. Marking its middle
    /// edge and then answering every move on it by reflection through the
    /// middle makes its two ends settle alike.
    fn chain_middle_move(&self, state: &GameState) -> Option<Move> {
        let f = &self.family;
        for (c, other) in [(0, 1), (1, 0)] {
            let edges = self.chain_edges(c);
            let len = edges.len();
            if len.is_multiple_of(2) || edges.iter().any(|&e| state.marking(e).is_marked()) {
                continue;
            }
            if !self.chain_ends_blocked(state, other) {
                continue;
            }
            let mid = edges[len / 2];
            let path = &f.chains[c];
            let m = Move::new(mid, path[len / 2], path[len / 2 + 1]);
            if let Some(m) = self.least_safe_of(state, vec![m, m.reversed()]) {
                return Some(m);
            }
        }
        None
    }

    /// Both end edges of `chain` are marked or forced, and neither gives
    /// its chord endpoint a reversal.
    fn chain_ends_blocked(&self, state: &GameState, chain: usize) -> bool {
        let f = &self.family;
        let Marking::Directed { head: ch, .. } = state.marking(f.chord) else {
            return false;
        };
        let edges = self.chain_edges(chain);
        [(edges[0], f.a), (edges[edges.len() - 1], f.b)].into_iter().all(|(e, v)| {
            let w = self.board.other_end(e, v);
            let with = if ch == v { Move::new(e, w, v) } else { Move::new(e, v, w) };
            match state.marking(e) {
                Marking::Directed { tail, .. } => tail != with.tail,
                Marking::Unmarked => !state.is_legal_direction(with) && state.is_legal_direction(with.reversed()),
            }
        })
    }

    /// Reflection of `last` through the middle of its chain, when that
    /// chain's middle edge is marked.
    fn chain_mirror_reply(&self, state: &GameState, last: Move) -> Option<Move> {
        let f = &self.family;
        for c in 0..2 {
            let edges = self.chain_edges(c);
            let len = edges.len();
            let Some(i) = edges.iter().position(|&e| e == last.edge) else { continue };
            if len.is_multiple_of(2)
                || i == len / 2
                || !state.marking(edges[len / 2]).is_marked()
                || !self.chain_ends_blocked(state, 1 - c)
            {
                return None;
            }
            let path = &f.chains[c];
            let refl = |v: VertexId| path[len - path.iter().position(|&w| w == v).expect("on chain")];
            let m = Move::new(edges[len - 1 - i], refl(last.head), refl(last.tail));
            return (state.is_legal_direction(m) && !state.is_death_move(m)).then_some(m);
        }
        None
    }

    fn settling_move(&self, state: &GameState) -> Option<Move> {
        let f = &self.family;
        if let Some(m) = state.last_move().and_then(|l| self.chain_mirror_reply(state, l)) {
            return Some(m);
        }
        if let Some(m) = self.chain_middle_move(state) {
            return Some(m);
        }
        let mut next = state.clone();
        state
            .legal_moves()
            .into_iter()
            .filter(|&m| !state.is_death_move(m))
            .filter_map(|m| {
                next.play_unchecked(m);
                let score = match f.settled(&self.board, &next) {
                    Some(true) => Some((2, 0)),
                    Some(false) => None,
                    None if self.opponent_can_split(&next) => None,
                    None => Some((1, f.settled_count(&self.board, &next))),
                };
                next.undo();
                score.map(|s| (s, m))
            })
            .min_by_key(|&(s, m)| (std::cmp::Reverse(s), m))
            .map(|(_, m)| m)
    }
}

fn chord_least_direction(state: &GameState, board: &Board, chord: EdgeId) -> Option<Move> {
    let [x, y] = board.endpoints(chord);
    let m = Move::new(chord, x.min(y), x.max(y));
    [m, m.reversed()].into_iter().find(|&m| state.is_legal_direction(m))
}

impl Policy for ChordPolicy {
    fn name(&self) -> String {
        "chord".into()
    }

    fn choose(&self, state: &GameState) -> Result<Move, StrategyError> {
        if let Some(m) = least_winning_move(state) {
            return Ok(m);
        }
        let f = &self.family;
        match state.history() {
            [] => {
                if let Some(m) = chord_least_direction(state, &self.board, f.chord) {
                    return Ok(m);
                }
            }
            [first] => {
                if let Some(m) = self.opening_reply(state, *first) {
                    return Ok(m);
                }
            }
            _ => {}
        }
        if !state.marking(f.chord).is_marked() {
            if let Some(m) = chord_least_direction(state, &self.board, f.chord) {
                if !state.is_death_move(m) {
                    return Ok(m);
                }
            }
        } else if f.settled(&self.board, state).is_none() {
            if let Some(m) = self.settling_move(state) {
                return Ok(m);
            }
        }
        least_safe_move(state)
    }
}

/// A cycle with a flap: the chord board whose chord `bc` cuts off a
/// triangle `abc` with `a` of degree 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlapFamily {
    pub chord: ChordFamily,
    pub apex: VertexId,
    pub triangle: CellId,
    /// The path from `b` to `c` on the far side, as chord-family chain index.
    pub outer_chain: usize,
}

impl FlapFamily {
    pub fn detect(board: &Board) -> Option<FlapFamily> {
        let chord = ChordFamily::detect(board)?;
        // the apex is the middle of a two-edge chain that bounds a triangle;
        // when both chains qualify the lower apex id wins
        let (inner, apex, triangle) = (0..2).find_map(|i| {
            let chain = &chord.chains[i];
            if chain.len() != 3 {
                return None;
            }
            let ab = board.edge_between(chord.a, chain[1])?;
            let tri = board.cells_of_edge(ab).iter().copied().find(|&c| board.cell(c).darts.len() == 3)?;
            Some((i, chain[1], tri))
        })?;
        Some(FlapFamily { chord, apex, triangle, outer_chain: 1 - inner })
    }

    /// Vertices on the outer cycle, which excludes the apex.
    pub fn n(&self) -> usize {
        self.chord.n() - 1
    }

    /// First player wins when the outer cycle is odd.
    pub fn designated_winner(&self) -> Player {
        if self.n() % 2 == 1 {
            Player::One
        } else {
            Player::Two
        }
    }

    fn triangle_edges(&self, board: &Board) -> Vec<EdgeId> {
        board.cell(self.triangle).edges().collect()
    }

    fn on_outer_chain(&self, mv: Move) -> bool {
        self.chord.chains[self.outer_chain]
            .windows(2)
            .any(|w| (w[0] == mv.tail && w[1] == mv.head) || (w[1] == mv.tail && w[0] == mv.head))
    }
}

/// Plays for the flap board's designated winner: make the triangle
/// uncyclable without a death move, then avoid death moves.
#[derive(Clone, Debug)]
pub struct FlapPolicy {
    board: Arc<Board>,
    family: FlapFamily,
}

impl FlapPolicy {
    pub fn new(board: &Arc<Board>) -> Result<FlapPolicy, StrategyError> {
        let family = FlapFamily::detect(board).ok_or(StrategyError::NotInFamily("cycle-with-flap"))?;
        Ok(FlapPolicy { board: board.clone(), family })
    }

    pub fn family(&self) -> &FlapFamily {
        &self.family
    }

    fn spoils_triangle(&self, state: &GameState) -> Option<Move> {
        let mut cands = Vec::new();
        for e in self.family.triangle_edges(&self.board) {
            let [x, y] = self.board.endpoints(e);
            cands.push(Move::new(e, x, y));
            cands.push(Move::new(e, y, x));
        }
        cands.sort();
        cands.into_iter().find(|&m| {
            state.is_legal_direction(m) && !state.is_death_move(m) && {
                let mut next = state.clone();
                next.play_unchecked(m);
                next.is_uncyclable(self.family.triangle)
            }
        })
    }
}

impl Policy for FlapPolicy {
    fn name(&self) -> String {
        "flap".into()
    }

    fn choose(&self, state: &GameState) -> Result<Move, StrategyError> {
        if let Some(m) = least_winning_move(state) {
            return Ok(m);
        }
        let f = &self.family;
        let chord = f.chord.chord;
        match state.history() {
            [] => {
                if let Some(m) = chord_least_direction(state, &self.board, chord) {
                    return Ok(m);
                }
            }
            [first] if f.on_outer_chain(*first) => {
                if let Some(toward) = f.chord.chain_flow(*first) {
                    let m = f.chord.chord_toward(toward);
                    if state.is_legal_direction(m) {
                        return Ok(m);
                    }
                }
            }
            _ => {}
        }
        if !state.is_uncyclable(f.triangle) {
            if let Some(m) = self.spoils_triangle(state) {
                return Ok(m);
            }
        }
        least_safe_move(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::solver::{verify_strategy, SolverConfig};

    #[test]
    fn detects_chord_boards() {
        let b = generators::cycle_chord(7, 3).unwrap();
        let f = ChordFamily::detect(&b).unwrap();
        assert_eq!(f.n(), 7);
        assert_eq!(f.designated_winner(), Player::Two);
        assert_eq!(f.chains[0].len() + f.chains[1].len(), 9);
        assert!(ChordFamily::detect(&generators::cycle(5).unwrap()).is_none());
        assert!(ChordFamily::detect(&generators::k4()).is_none());
        assert!(FlapFamily::detect(&b).is_none());
    }

    #[test]
    fn detects_flap_boards() {
        for n in 3..=6 {
            let b = generators::cycle_flap(n).unwrap();
            let f = FlapFamily::detect(&b).expect("flap");
            assert_eq!(f.n(), n);
            assert_eq!(b.cell(f.triangle).darts.len(), 3);
        }
    }

    #[test]
    fn chord_policy_wins_small_boards() {
        for (n, split) in [(4, 2), (5, 2), (6, 3)] {
            let b = Arc::new(generators::cycle_chord(n, split).unwrap());
            let p = ChordPolicy::new(&b).unwrap();
            let r = verify_strategy(&b, &p, p.family().designated_winner(), SolverConfig::default()).unwrap();
            assert!(r.passed, "C_{n} split {split}: {:?}", r.failure);
        }
    }

    #[test]
    fn flap_policy_wins_small_boards() {
        for n in 3..=5 {
            let b = Arc::new(generators::cycle_flap(n).unwrap());
            let p = FlapPolicy::new(&b).unwrap();
            let r = verify_strategy(&b, &p, p.family().designated_winner(), SolverConfig::default()).unwrap();
            assert!(r.passed, "flap {n}: {:?}", r.failure);
        }
    }
}
