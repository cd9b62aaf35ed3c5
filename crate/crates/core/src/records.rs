//! File documents: game records, orientation files and solve results.
//! Board references inside a document may be a path, resolved relative to
//! the document's own directory, or an inline board.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{emit_board, parse_board, Board, BoardError, BoardFile};
use crate::filled::{FilledError, Orientation};
use crate::rules::{GameState, Move, Player, ReplayError};
use crate::solver::SolveResult;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Orientation(#[from] FilledError),
}

pub fn read_text(path: &Path) -> Result<String, RecordError> {
    fs::read_to_string(path).map_err(|e| RecordError::Io { path: path.to_path_buf(), message: e.to_string() })
}

pub fn read_board(path: &Path) -> Result<Board, RecordError> {
    Ok(parse_board(&read_text(path)?)?)
}

pub fn write_board(path: &Path, board: &Board) -> Result<(), RecordError> {
    fs::write(path, emit_board(board)).map_err(|e| RecordError::Io { path: path.to_path_buf(), message: e.to_string() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoardRef {
    Path(PathBuf),
    Inline(BoardFile),
}

impl BoardRef {
    pub fn inline(board: &Board) -> BoardRef {
        BoardRef::Inline(BoardFile::from_board(board))
    }

    /// Loads the board; relative paths are taken from `base`.
    pub fn load(&self, base: &Path) -> Result<Board, RecordError> {
        match self {
            BoardRef::Path(p) if p.is_absolute() => read_board(p),
            BoardRef::Path(p) => read_board(&base.join(p)),
            BoardRef::Inline(f) => Ok(f.clone().into_board()?),
        }
    }
}

fn base_of(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

/// `{"board": ..., "moves": [{"edge", "tail", "head"}, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameRecord {
    pub board: BoardRef,
    pub moves: Vec<Move>,
}

impl GameRecord {
    pub fn from_state(board: BoardRef, state: &GameState) -> GameRecord {
        GameRecord { board, moves: state.history().to_vec() }
    }

    pub fn parse(text: &str) -> Result<GameRecord, RecordError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<GameRecord, RecordError> {
        GameRecord::parse(&read_text(path)?)
    }

    /// Replays every move, validating each, on the given board.
    pub fn replay_on(&self, board: Arc<Board>) -> Result<GameState, RecordError> {
        Ok(GameState::replay(board, &self.moves)?)
    }

    /// Loads the referenced board (relative to `base`) and replays.
    pub fn replay(&self, base: &Path) -> Result<GameState, RecordError> {
        self.replay_on(Arc::new(self.board.load(base)?))
    }

    pub fn replay_file(path: &Path) -> Result<GameState, RecordError> {
        GameRecord::read(path)?.replay(base_of(path))
    }
}

/// `{"board": ..., "arcs": [...]}` covering every edge once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationFile {
    pub board: BoardRef,
    pub arcs: Vec<Move>,
}

impl OrientationFile {
    pub fn parse(text: &str) -> Result<OrientationFile, RecordError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn orientation(&self, board: &Board) -> Result<Orientation, RecordError> {
        Ok(Orientation::new(board, &self.arcs)?)
    }

    /// Reads the file and its board.
    pub fn load(path: &Path) -> Result<(Board, Orientation), RecordError> {
        let file = OrientationFile::parse(&read_text(path)?)?;
        let board = file.board.load(base_of(path))?;
        let o = file.orientation(&board)?;
        Ok((board, o))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub board: String,
    pub winner: Player,
    pub best_move: Option<Move>,
    pub nodes: u64,
    pub table_hits: u64,
    pub elapsed_ms: f64,
}

impl SolveRecord {
    pub fn new(board: impl Into<String>, r: &SolveResult) -> SolveRecord {
        SolveRecord {
            board: board.into(),
            winner: r.winner,
            best_move: r.best_move,
            nodes: r.nodes_visited,
            table_hits: r.table_hits,
            elapsed_ms: r.elapsed.as_secs_f64() * 1000.0,
        }
    }
}
