//! Text renderings for `--pretty`.

use std::fmt::Write;

use cycles_core::filled::CycleCellCertificate;
use cycles_core::records::SolveRecord;
use cycles_core::theorems::Check;
use cycles_core::{GameState, Move, Player, Taxonomy};
use serde::Serialize;

fn list<T: ToString>(items: &[T]) -> String {
    if items.is_empty() {
        "-".into()
    } else {
        items.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
    }
}

fn arrow(m: &Move) -> String {
    format!("{}->{}", m.tail, m.head)
}

pub fn solve(r: &SolveRecord) -> String {
    let best = r.best_move.as_ref().map(arrow).unwrap_or_else(|| "-".into());
    format!(
        "board      {}\nwinner     {}\nbest move  {best}\nnodes      {}\ntable hits {}\ntime       {:.1} ms\n",
        r.board, r.winner, r.nodes, r.table_hits, r.elapsed_ms
    )
}

pub fn checks(checks: &[Check]) -> String {
    let mut s = String::new();
    let width = checks.iter().map(|c| c.group.len() + c.case.len() + 3).max().unwrap_or(0);
    for c in checks {
        let tag = match (c.passed, c.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "NOTE",
        };
        let name = format!("{} / {}", c.group, c.case);
        let _ = writeln!(s, "{tag}  {name:<width$}  {:>8.1} ms  {}", c.elapsed_ms, c.detail);
    }
    let failed = checks.iter().filter(|c| c.gating && !c.passed).count();
    let _ = writeln!(s, "{} checks, {failed} failed", checks.len());
    s
}

#[derive(Serialize)]
pub struct Classification {
    pub to_move: Player,
    pub winner: Option<Player>,
    pub moves_played: usize,
    #[serde(flatten)]
    pub taxonomy: Taxonomy,
}

impl Classification {
    pub fn of(s: &GameState) -> Classification {
        Classification {
            to_move: s.to_move(),
            winner: s.winner_if_terminal(),
            moves_played: s.history().len(),
            taxonomy: s.taxonomy(),
        }
    }
}

pub fn classification(c: &Classification) -> String {
    let t = &c.taxonomy;
    let mut s = String::new();
    let _ = writeln!(s, "after {} moves, {} to move", c.moves_played, c.to_move);
    if let Some(w) = c.winner {
        let _ = writeln!(s, "game over: {w} wins");
    }
    let _ = writeln!(s, "almost-sinks          {}", list(&t.almost_sinks));
    let _ = writeln!(s, "almost-sources        {}", list(&t.almost_sources));
    let _ = writeln!(s, "unmarkable edges      {}", list(&t.unmarkable));
    let _ = writeln!(s, "currently unplayable  {}", list(&t.currently_unplayable));
    let deaths: Vec<String> = t.death_moves.iter().map(arrow).collect();
    let _ = writeln!(s, "death moves           {}", list(&deaths));
    let _ = writeln!(s, "uncyclable cells      {}", list(&t.uncyclable));
    let cycles: Vec<String> = t.cycle_cells.iter().map(|(c, d)| format!("{c} ({d:?})")).collect();
    let _ = writeln!(s, "cycle cells           {}", list(&cycles));
    s
}

pub fn game(s: &GameState) -> String {
    let mut out = String::new();
    for (i, m) in s.history().iter().enumerate() {
        let _ = writeln!(out, "{:>3}. {} {}", i + 1, Player::for_ply(i), arrow(m));
    }
    if let Some(w) = s.winner_if_terminal() {
        let how = if s.cycle_cells().is_empty() { "last move" } else { "cycle cell" };
        let _ = writeln!(out, "{w} wins ({how})");
    }
    out
}

pub fn certificate(c: &CycleCellCertificate) -> String {
    let mut s = String::new();
    for (i, step) in c.steps.iter().enumerate() {
        let path: Vec<String> = step.cycle.vertices.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            s,
            "{}. {:?} {:?}: {} ({:?}, {} enclosed{})",
            i + 1,
            step.kind,
            step.rule,
            path.join(" -> "),
            step.cycle.turning,
            step.cycle.enclosed_cells.len(),
            if step.inside_absorbing { ", absorbing" } else { "" }
        );
    }
    let _ = writeln!(s, "cycle cell {} ({:?})", c.cell, c.direction);
    s
}

pub fn arcs(arcs: &[Move]) -> String {
    let mut s = String::new();
    for m in arcs {
        let _ = writeln!(s, "edge {:>3}: {}", m.edge, arrow(m));
    }
    s
}
