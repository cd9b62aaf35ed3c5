//! Move policies: the explicit winning strategies for the cycle, chord,
//! flap and symmetric families, plus solver-backed and random opponents.

mod families;
mod involution;
mod mirror;

use std::sync::{Arc, Mutex};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::board::Board;
use crate::rules::{GameState, Move, Player};
use crate::solver::{SolveError, Solver, SolverConfig, StateKey};

pub use families::{ChordFamily, ChordPolicy, FlapFamily, FlapPolicy};
pub use involution::{find_involutions, CellKind, Involution};
pub use mirror::MirrorPolicy;

/// What a policy's choice may depend on, so the verifier knows which
/// positions it can treat as already explored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoScope {
    /// Markings only.
    Position,
    /// Markings plus the opponent's last move.
    PositionAndLastMove,
    /// Anything in the history; never memoized.
    History,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("no legal move available")]
    NoLegalMove,
    #[error("strategy does not apply here: {0}")]
    Inapplicable(String),
    #[error("board is not in the {0} family")]
    NotInFamily(&'static str),
    #[error("unknown policy {0:?}")]
    UnknownPolicy(String),
    #[error(transparent)]
    Solver(#[from] SolveError),
}

pub trait Policy: Send + Sync {
    fn name(&self) -> String;

    /// Chooses a move for the player to move. The state is not terminal.
    fn choose(&self, state: &GameState) -> Result<Move, StrategyError>;

    fn memo_scope(&self) -> MemoScope {
        MemoScope::Position
    }
}

/// Least legal move. On a single cycle every legal line has the same
/// length parity, so nothing cleverer is needed.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParityPolicy;

impl Policy for ParityPolicy {
    fn name(&self) -> String {
        "parity".into()
    }

    fn choose(&self, state: &GameState) -> Result<Move, StrategyError> {
        state.legal_moves().first().copied().ok_or(StrategyError::NoLegalMove)
    }
}

/// Plays the solver's principal move.
pub struct OptimalPolicy {
    solver: Mutex<Solver>,
}

impl OptimalPolicy {
    pub fn new(config: SolverConfig) -> OptimalPolicy {
        OptimalPolicy { solver: Mutex::new(Solver::new(config)) }
    }
}

impl Policy for OptimalPolicy {
    fn name(&self) -> String {
        "optimal".into()
    }

    fn choose(&self, state: &GameState) -> Result<Move, StrategyError> {
        let mut solver = self.solver.lock().unwrap_or_else(|p| p.into_inner());
        solver.solve(state)?.best_move.ok_or(StrategyError::NoLegalMove)
    }
}

/// Uniform over legal moves, as a pure function of the seed and position.
#[derive(Clone, Copy, Debug)]
pub struct RandomPolicy {
    pub seed: u64,
}

impl Policy for RandomPolicy {
    fn name(&self) -> String {
        format!("random({})", self.seed)
    }

    fn choose(&self, state: &GameState) -> Result<Move, StrategyError> {
        let moves = state.legal_moves();
        let key = StateKey::from_markings(state.markings()).0;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        moves.choose(&mut rng).copied().ok_or(StrategyError::NoLegalMove)
    }
}

/// The least cycle-completing move, if any.
pub(crate) fn least_winning_move(state: &GameState) -> Option<Move> {
    state.legal_moves().into_iter().find(|&m| state.completes_cycle(m))
}

/// The least legal move that is not a death move, else the least legal move.
pub(crate) fn least_safe_move(state: &GameState) -> Result<Move, StrategyError> {
    let moves = state.legal_moves();
    moves
        .iter()
        .copied()
        .find(|&m| !state.is_death_move(m))
        .or_else(|| moves.first().copied())
        .ok_or(StrategyError::NoLegalMove)
}

/// Names accepted by [`policy_by_name`].
pub const POLICY_NAMES: &[&str] = &["parity", "optimal", "random(SEED)", "mirror", "chord", "flap"];

/// Builds a policy from its vocabulary name for `player` on `board`.
/// `mirror` picks the first qualifying involution that favours `player`.
pub fn policy_by_name(
    name: &str,
    board: &Arc<Board>,
    player: Player,
    config: SolverConfig,
) -> Result<Box<dyn Policy>, StrategyError> {
    let name = name.trim();
    if let Some(rest) = name.strip_prefix("random") {
        let seed = match rest {
            "" => 0,
            r => r
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| StrategyError::UnknownPolicy(name.into()))?,
        };
        return Ok(Box::new(RandomPolicy { seed }));
    }
    match name {
        "parity" => Ok(Box::new(ParityPolicy)),
        "optimal" => {
            if board.edge_count() > config.max_edges {
                return Err(SolveError::TooManyEdges { edges: board.edge_count(), limit: config.max_edges }.into());
            }
            Ok(Box::new(OptimalPolicy::new(config)))
        }
        "mirror" => {
            let inv = find_involutions(board)
                .into_iter()
                .find(|i| i.designated_winner() == Some(player))
                .ok_or(StrategyError::NotInFamily("qualifying involution"))?;
            Ok(Box::new(MirrorPolicy::new(board.clone(), inv)?))
        }
        "chord" => Ok(Box::new(ChordPolicy::new(board)?)),
        "flap" => Ok(Box::new(FlapPolicy::new(board)?)),
        _ => Err(StrategyError::UnknownPolicy(name.into())),
    }
}
