//! Built-in boards: the generated families at small sizes plus the
//! hand-transcribed fixtures, which are compiled into the library so tools
//! work without the source tree.

use std::sync::Arc;

use crate::board::{parse_board, Board};
use crate::generators;
use crate::records::{BoardRef, GameRecord, RecordError};
use crate::rules::GameState;

macro_rules! fixture_boards {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/boards/", $name, ".json")))),*]
    };
}

macro_rules! fixture_records {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/records/", $name, ".json")))),*]
    };
}

/// `(name, board document)` for every fixture board.
pub const FIXTURE_BOARDS: &[(&str, &str)] = fixture_boards![
    "grid_diagonals",
    "rotation_square",
    "rotation_two_cells",
    "rotation_bar",
    "reflection_house",
    "reflection_house_bar",
    "kite",
    "two_fixed_edges",
    "selection_wheel",
    "absorbing_hexagon",
    "clockwise_octagon",
    "annulus",
    "two_triangles",
];

/// `(name, game record)` for every fixture transcript. Board paths inside
/// the records resolve by file stem against [`FIXTURE_BOARDS`].
pub const FIXTURE_RECORDS: &[(&str, &str)] = fixture_records![
    "taxonomy_position",
    "cycle_cell_dabe",
    "rotation_square_mirror",
    "rotation_two_cells_death_move",
    "rotation_bar_mirror",
    "reflection_house_mirror",
    "reflection_house_bar_fixed_edge",
    "kite_axis_edge",
];

pub fn fixture_board(name: &str) -> Option<Board> {
    FIXTURE_BOARDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_board(text).expect("fixture boards are valid"))
}

/// Parses a fixture record and replays it on its fixture board.
pub fn fixture_game(name: &str) -> Option<Result<GameState, RecordError>> {
    let (_, text) = FIXTURE_RECORDS.iter().find(|(n, _)| *n == name)?;
    Some(GameRecord::parse(text).and_then(|rec| {
        let board = match &rec.board {
            BoardRef::Path(p) => {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
                fixture_board(stem)
                    .ok_or_else(|| RecordError::Io { path: p.clone(), message: "not a built-in board".into() })?
            }
            BoardRef::Inline(f) => f.clone().into_board()?,
        };
        rec.replay_on(Arc::new(board))
    }))
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub name: String,
    pub board: Arc<Board>,
}

fn entry(id: impl Into<String>, name: impl Into<String>, board: Board) -> CatalogEntry {
    CatalogEntry { id: id.into(), name: name.into(), board: Arc::new(board) }
}

/// Generated boards first, then fixtures, in a fixed order.
pub fn standard_catalog() -> Vec<CatalogEntry> {
    let mut out = vec![entry("k4", "K4", generators::k4())];
    for n in 3..=9 {
        out.push(entry(format!("cycle-{n}"), format!("Cycle C{n}"), generators::cycle(n).unwrap()));
    }
    for n in 4..=8 {
        for split in 2..=n / 2 {
            out.push(entry(
                format!("chord-{n}-{split}"),
                format!("C{n} with chord, cells {} and {}", split + 1, n - split + 1),
                generators::cycle_chord(n, split).unwrap(),
            ));
        }
    }
    for n in 3..=7 {
        out.push(entry(format!("flap-{n}"), format!("C{n} with flap"), generators::cycle_flap(n).unwrap()));
    }
    for (r, c) in [(1, 2), (2, 2), (2, 3)] {
        out.push(entry(format!("grid-{r}x{c}"), format!("{r}x{c} grid"), generators::grid(r, c).unwrap()));
    }
    out.push(entry("two-cell-7-5", "Heptagon and pentagon", generators::two_cell(7, 5).unwrap()));
    for (name, _) in FIXTURE_BOARDS {
        out.push(entry(*name, name.replace('_', " "), fixture_board(name).unwrap()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn ids_are_unique() {
        let cat = standard_catalog();
        let ids: HashSet<_> = cat.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids.len(), cat.len());
    }

    #[test]
    fn fixture_records_replay() {
        for (name, _) in FIXTURE_RECORDS {
            fixture_game(name).unwrap().unwrap();
        }
    }
}
