//! Engine for the Game of Cycles: boards, rules, exhaustive solving,
//! explicit winning strategies and the cycle-cell search for filled boards.

pub mod board;
pub mod catalog;
pub mod filled;
pub mod generators;
pub mod geometry;
pub mod records;
pub mod rules;
pub mod solver;
pub mod strategies;
pub mod theorems;

pub use board::{Board, BoardError, Cell, CellId, Dart, EdgeId, VertexId};
pub use geometry::{Point, Turning};
pub use rules::{EdgeStatus, GameState, Marking, Move, MoveError, Player, Taxonomy, VertexStatus};
pub use solver::{solve, verify_strategy, SolveResult, Solver, SolverConfig, StateKey};
pub use strategies::{policy_by_name, Policy};
