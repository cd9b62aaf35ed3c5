use std::sync::Arc;

use crate::board::Board;
use crate::rules::{GameState, Move};

use super::{least_winning_move, Involution, MemoScope, Policy, StrategyError};

/// Mirror-reverse play under an involution: complete a cycle when
/// possible, open on the self-involutive edge when moving first, and
/// otherwise answer `i -> j` with `j' -> i'`.
#[derive(Clone, Debug)]
pub struct MirrorPolicy {
    board: Arc<Board>,
    involution: Involution,
}

impl MirrorPolicy {
    pub fn new(board: Arc<Board>, involution: Involution) -> Result<MirrorPolicy, StrategyError> {
        if !involution.qualifies {
            return Err(StrategyError::Inapplicable(
                "involution has a part-involutive cell or an unsuitable self-involutive edge".into(),
            ));
        }
        Ok(MirrorPolicy { board, involution })
    }

    /// Skips the qualification check; used to replay the known failures.
    pub fn new_unchecked(board: Arc<Board>, involution: Involution) -> MirrorPolicy {
        MirrorPolicy { board, involution }
    }

    pub fn involution(&self) -> &Involution {
        &self.involution
    }

    pub fn mirror_reverse(&self, mv: Move) -> Move {
        let inv = &self.involution;
        Move::new(inv.edge(mv.edge), inv.vertex(mv.head), inv.vertex(mv.tail))
    }
}

impl Policy for MirrorPolicy {
    fn name(&self) -> String {
        "mirror".into()
    }

    fn choose(&self, state: &GameState) -> Result<Move, StrategyError> {
        debug_assert!(Arc::ptr_eq(state.board(), &self.board) || **state.board() == *self.board);
        if let Some(m) = least_winning_move(state) {
            return Ok(m);
        }
        let Some(last) = state.last_move() else {
            let &e = self
                .involution
                .self_involutive_edges
                .first()
                .ok_or_else(|| StrategyError::Inapplicable("no self-involutive edge to open on".into()))?;
            let [a, b] = self.board.endpoints(e);
            let m = Move::new(e, a.min(b), a.max(b));
            return match state.check_move(m) {
                Ok(()) => Ok(m),
                Err(_) if state.check_move(m.reversed()).is_ok() => Ok(m.reversed()),
                Err(err) => Err(StrategyError::Inapplicable(format!("opening {m} is illegal: {err}"))),
            };
        };
        let reply = self.mirror_reverse(last);
        state
            .check_move(reply)
            .map(|()| reply)
            .map_err(|err| StrategyError::Inapplicable(format!("mirror reply {reply} is illegal: {err}")))
    }

    fn memo_scope(&self) -> MemoScope {
        MemoScope::PositionAndLastMove
    }
}
