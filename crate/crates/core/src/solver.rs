//! Exhaustive win/loss search with a transposition table, the adversarial
//! strategy checker, and a full playout counter.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::Board;
use crate::rules::{GameState, Marking, Move, Player};
use crate::strategies::{MemoScope, Policy};

/// Largest board a [`StateKey`] can encode.
pub const MAX_KEY_EDGES: usize = 32;

/// Two bits per edge: 0 unmarked, 1 tail is the lower endpoint, 2 head is
/// the lower endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateKey(pub u64);

impl StateKey {
    pub fn of(state: &GameState) -> StateKey {
        StateKey::from_markings(state.markings())
    }

    pub fn from_markings(markings: &[Marking]) -> StateKey {
        assert!(markings.len() <= MAX_KEY_EDGES, "state key holds at most 32 edges");
        let mut k = 0u64;
        for (i, m) in markings.iter().enumerate() {
            k |= marking_code(*m) << (2 * i);
        }
        StateKey(k)
    }

    fn with(self, mv: Move) -> StateKey {
        StateKey(self.0 | marking_code(mv.marking()) << (2 * mv.edge.0))
    }
}

fn marking_code(m: Marking) -> u64 {
    match m {
        Marking::Unmarked => 0,
        Marking::Directed { tail, head } if tail < head => 1,
        Marking::Directed { .. } => 2,
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("board has {edges} edges, above the limit of {limit}")]
    TooManyEdges { edges: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub max_edges: usize,
    pub use_table: bool,
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_edges: 16, use_table: true, threads: 1 }
    }
}

impl SolverConfig {
    fn check(&self, board: &Board) -> Result<(), SolveError> {
        let limit = self.max_edges.min(MAX_KEY_EDGES);
        if board.edge_count() > limit {
            return Err(SolveError::TooManyEdges { edges: board.edge_count(), limit });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub winner: Player,
    pub best_move: Option<Move>,
    pub nodes_visited: u64,
    pub table_hits: u64,
    pub elapsed: Duration,
}

trait Table {
    fn get(&self, key: u64) -> Option<bool>;
    fn put(&mut self, key: u64, wins: bool);
}

impl Table for HashMap<u64, bool> {
    fn get(&self, key: u64) -> Option<bool> {
        HashMap::get(self, &key).copied()
    }
    fn put(&mut self, key: u64, wins: bool) {
        self.insert(key, wins);
    }
}

/// Shared between root workers. Every writer of a key computes the same
/// value, so races only duplicate work.
struct Shared<'a>(&'a DashMap<u64, bool>);

impl Table for Shared<'_> {
    fn get(&self, key: u64) -> Option<bool> {
        self.0.get(&key).map(|v| *v)
    }
    fn put(&mut self, key: u64, wins: bool) {
        self.0.insert(key, wins);
    }
}

struct NoTable;

impl Table for NoTable {
    fn get(&self, _: u64) -> Option<bool> {
        None
    }
    fn put(&mut self, _: u64, _: bool) {}
}

#[derive(Default)]
struct Counters {
    nodes: u64,
    hits: u64,
}

/// Does the player to move win? `state` must not be terminal by a completed
/// cycle; states reached here never are, because winning moves are taken
/// before recursing.
fn wins<T: Table>(state: &mut GameState, key: StateKey, table: &mut T, c: &mut Counters) -> bool {
    c.nodes += 1;
    if let Some(w) = table.get(key.0) {
        c.hits += 1;
        return w;
    }
    let moves = state.legal_moves();
    let result = moves.iter().any(|&m| state.completes_cycle(m))
        || moves.iter().any(|&m| {
            state.play_unchecked(m);
            let child = wins(state, key.with(m), table, c);
            state.undo();
            !child
        });
    table.put(key.0, result);
    result
}

/// Holds a transposition table that persists across queries on one board.
pub struct Solver {
    config: SolverConfig,
    table: HashMap<u64, bool>,
    board: Option<Arc<Board>>,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Solver {
        Solver { config, table: HashMap::new(), board: None }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn solve(&mut self, state: &GameState) -> Result<SolveResult, SolveError> {
        self.config.check(state.board())?;
        let same = self.board.as_ref().is_some_and(|b| Arc::ptr_eq(b, state.board()) || **b == **state.board());
        if !same {
            self.table.clear();
            self.board = Some(state.board().clone());
        }
        let start = Instant::now();
        let mut c = Counters::default();
        if let Some(w) = state.winner_if_terminal() {
            return Ok(SolveResult {
                winner: w,
                best_move: None,
                nodes_visited: 1,
                table_hits: 0,
                elapsed: start.elapsed(),
            });
        }
        let me = state.to_move();
        let moves = state.legal_moves();
        let key = StateKey::of(state);
        c.nodes += 1;
        if let Some(&m) = moves.iter().find(|&&m| state.completes_cycle(m)) {
            return Ok(SolveResult {
                winner: me,
                best_move: Some(m),
                nodes_visited: c.nodes,
                table_hits: 0,
                elapsed: start.elapsed(),
            });
        }

        let child_wins: Vec<bool> = if self.config.threads > 1 && moves.len() > 1 {
            let shared = DashMap::new();
            let (results, counters) = search_parallel(state, key, &moves, &shared, &self.config);
            c.nodes += counters.nodes;
            c.hits += counters.hits;
            if self.config.use_table {
                self.table.extend(shared);
            }
            results
        } else {
            let mut s = state.clone();
            let mut out = Vec::with_capacity(moves.len());
            for &m in &moves {
                s.play_unchecked(m);
                let w = if self.config.use_table {
                    wins(&mut s, key.with(m), &mut self.table, &mut c)
                } else {
                    wins(&mut s, key.with(m), &mut NoTable, &mut c)
                };
                s.undo();
                out.push(w);
                if !w {
                    // first winning move found; later children are not needed
                    break;
                }
            }
            out
        };

        let winning = child_wins.iter().position(|&w| !w);
        let (winner, best_move) = match winning {
            Some(i) => (me, moves[i]),
            None => (me.other(), moves[0]),
        };
        Ok(SolveResult {
            winner,
            best_move: Some(best_move),
            nodes_visited: c.nodes,
            table_hits: c.hits,
            elapsed: start.elapsed(),
        })
    }
}

fn search_parallel(
    state: &GameState,
    key: StateKey,
    moves: &[Move],
    shared: &DashMap<u64, bool>,
    config: &SolverConfig,
) -> (Vec<bool>, Counters) {
    let threads = config.threads.min(moves.len());
    let mut results = vec![false; moves.len()];
    let mut total = Counters::default();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let mut s = state.clone();
                scope.spawn(move || {
                    let mut c = Counters::default();
                    let mut out = Vec::new();
                    for (i, &m) in moves.iter().enumerate().skip(t).step_by(threads) {
                        s.play_unchecked(m);
                        let w = if config.use_table {
                            wins(&mut s, key.with(m), &mut Shared(shared), &mut c)
                        } else {
                            wins(&mut s, key.with(m), &mut NoTable, &mut c)
                        };
                        s.undo();
                        out.push((i, w));
                    }
                    (out, c)
                })
            })
            .collect();
        for h in handles {
            let (out, c) = h.join().expect("solver worker panicked");
            for (i, w) in out {
                results[i] = w;
            }
            total.nodes += c.nodes;
            total.hits += c.hits;
        }
    });
    (results, total)
}

/// One-shot solve with a fresh table.
pub fn solve(state: &GameState, config: SolverConfig) -> Result<SolveResult, SolveError> {
    Solver::new(config).solve(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// The game ended with the other player winning.
    Lost,
    /// The policy returned a move the rules reject.
    IllegalMove,
    /// The policy declined to move.
    PolicyError,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    /// Moves from the empty board to the failing position.
    pub line: Vec<Move>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub policy: String,
    pub as_player: Player,
    pub passed: bool,
    pub leaves: u64,
    pub nodes: u64,
    pub failure: Option<Failure>,
}

struct Verifier<'a> {
    policy: &'a dyn Policy,
    as_player: Player,
    scope: MemoScope,
    passed: HashSet<(u64, u64)>,
    leaves: u64,
    nodes: u64,
}

impl Verifier<'_> {
    fn memo_key(&self, state: &GameState) -> Option<(u64, u64)> {
        let pos = StateKey::of(state).0;
        match self.scope {
            MemoScope::Position => Some((pos, 0)),
            MemoScope::PositionAndLastMove => {
                let last = state.last_move().map_or(0, |m| 1 + ((m.edge.0 as u64) << 1) + u64::from(m.tail > m.head));
                Some((pos, last))
            }
            MemoScope::History => None,
        }
    }

    fn explore(&mut self, state: &mut GameState) -> Option<Failure> {
        self.nodes += 1;
        let memo = self.memo_key(state);
        if memo.is_some_and(|k| self.passed.contains(&k)) {
            return None;
        }
        let failure = self.explore_uncached(state);
        if failure.is_none() {
            if let Some(k) = memo {
                self.passed.insert(k);
            }
        }
        failure
    }

    fn explore_uncached(&mut self, state: &mut GameState) -> Option<Failure> {
        if let Some(w) = state.winner_if_terminal() {
            self.leaves += 1;
            if w == self.as_player {
                return None;
            }
            return Some(Failure {
                kind: FailureKind::Lost,
                line: state.history().to_vec(),
                detail: format!("{w} wins"),
            });
        }
        if state.to_move() == self.as_player {
            let mv = match self.policy.choose(state) {
                Ok(m) => m,
                Err(e) => {
                    return Some(Failure {
                        kind: FailureKind::PolicyError,
                        line: state.history().to_vec(),
                        detail: e.to_string(),
                    })
                }
            };
            if let Err(e) = state.check_move(mv) {
                let mut line = state.history().to_vec();
                line.push(mv);
                return Some(Failure { kind: FailureKind::IllegalMove, line, detail: e.to_string() });
            }
            state.play_unchecked(mv);
            let f = self.explore(state);
            state.undo();
            f
        } else {
            for reply in state.legal_moves() {
                state.play_unchecked(reply);
                let f = self.explore(state);
                state.undo();
                if f.is_some() {
                    return f;
                }
            }
            None
        }
    }
}

/// Plays `policy` for `as_player` against every possible sequence of
/// opponent replies from `start`. Stops at the first failing line.
pub fn verify_strategy_from(
    start: &GameState,
    policy: &dyn Policy,
    as_player: Player,
    config: SolverConfig,
) -> Result<VerificationReport, SolveError> {
    config.check(start.board())?;
    let mut v = Verifier { policy, as_player, scope: policy.memo_scope(), passed: HashSet::new(), leaves: 0, nodes: 0 };
    let mut state = start.clone();
    let failure = v.explore(&mut state);
    Ok(VerificationReport {
        policy: policy.name(),
        as_player,
        passed: failure.is_none(),
        leaves: v.leaves,
        nodes: v.nodes,
        failure,
    })
}

pub fn verify_strategy(
    board: &Arc<Board>,
    policy: &dyn Policy,
    as_player: Player,
    config: SolverConfig,
) -> Result<VerificationReport, SolveError> {
    verify_strategy_from(&GameState::new(board.clone()), policy, as_player, config)
}

/// Exact counts over the full game tree. Counts are by distinct move
/// sequence, not by distinct final position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayoutStats {
    pub terminals: u128,
    pub player_one_wins: u128,
    pub player_two_wins: u128,
    pub max_depth: u32,
}

impl PlayoutStats {
    /// Whether every playout ends with the same winner.
    pub fn single_winner(&self) -> Option<Player> {
        if self.terminals == 0 {
            None
        } else if self.player_two_wins == 0 {
            Some(Player::One)
        } else if self.player_one_wins == 0 {
            Some(Player::Two)
        } else {
            None
        }
    }
}

fn playouts(state: &mut GameState, key: StateKey, memo: &mut HashMap<u64, PlayoutStats>) -> PlayoutStats {
    if let Some(s) = memo.get(&key.0) {
        return *s;
    }
    let stats = match state.winner_if_terminal() {
        Some(w) => PlayoutStats {
            terminals: 1,
            player_one_wins: u128::from(w == Player::One),
            player_two_wins: u128::from(w == Player::Two),
            max_depth: 0,
        },
        None => {
            let mut acc = PlayoutStats::default();
            for m in state.legal_moves() {
                state.play_unchecked(m);
                let s = playouts(state, key.with(m), memo);
                state.undo();
                acc.terminals += s.terminals;
                acc.player_one_wins += s.player_one_wins;
                acc.player_two_wins += s.player_two_wins;
                acc.max_depth = acc.max_depth.max(s.max_depth + 1);
            }
            acc
        }
    };
    memo.insert(key.0, stats);
    stats
}

pub fn enumerate_playouts(board: &Arc<Board>, config: SolverConfig) -> Result<PlayoutStats, SolveError> {
    config.check(board)?;
    let mut state = GameState::new(board.clone());
    Ok(playouts(&mut state, StateKey(0), &mut HashMap::new()))
}

/// Calls `f` on every terminal state reachable by legal play, once per
/// distinct marking.
pub fn for_each_terminal(
    board: &Arc<Board>,
    config: SolverConfig,
    mut f: impl FnMut(&GameState),
) -> Result<(), SolveError> {
    config.check(board)?;
    fn walk(state: &mut GameState, key: StateKey, seen: &mut HashSet<u64>, f: &mut dyn FnMut(&GameState)) {
        if !seen.insert(key.0) {
            return;
        }
        if state.is_terminal() {
            f(state);
            return;
        }
        for m in state.legal_moves() {
            state.play_unchecked(m);
            walk(state, key.with(m), seen, f);
            state.undo();
        }
    }
    let mut state = GameState::new(board.clone());
    walk(&mut state, StateKey(0), &mut HashSet::new(), &mut f);
    Ok(())
}

/// Reference minimax with no table and no move ordering, for cross-checks.
pub fn plain_minimax(state: &mut GameState) -> Player {
    if let Some(w) = state.winner_if_terminal() {
        return w;
    }
    let me = state.to_move();
    for m in state.legal_moves() {
        state.play_unchecked(m);
        let w = plain_minimax(state);
        state.undo();
        if w == me {
            return me;
        }
    }
    me.other()
}
