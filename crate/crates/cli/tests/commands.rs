use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn cycles(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cycles")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn core_fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(rel).to_string_lossy().into_owned()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path: PathBuf = dir.join(format!("{name}.json"));
    let p = path.to_string_lossy().into_owned();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend(["-o", &p]);
    let out = cycles(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn solve_k4_gives_player_two() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = gen(dir.path(), "k4", &["k4"]);
    let v = json(&cycles(&["solve", &k4]));
    assert_eq!(v["winner"], 2);
    // built-in ids work too, and the pretty form names the winner
    let out = cycles(&["solve", "k4", "--pretty"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Player 2"));
    let v = json(&cycles(&["solve", "cycle-7", "--threads", "3", "--no-table"]));
    assert_eq!(v["winner"], 1);
}

#[test]
fn solve_from_a_record() {
    let board = core_fixture("boards/grid_diagonals.json");
    let rec = core_fixture("records/cycle_cell_dabe.json");
    let v = json(&cycles(&["solve", &board, "--from", &rec]));
    // the record ends with a completed cycle cell, so the game is decided
    assert!(v["best_move"].is_null());
    assert!(v["winner"] == 1 || v["winner"] == 2);
}

#[test]
fn generated_boards_are_canonical() {
    let out = cycles(&["gen", "chord", "6", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 7);
    let b = cycles_core_board(&text);
    assert_eq!(cycles_core::board::emit_board(&b), text);
}

fn cycles_core_board(text: &str) -> cycles_core::Board {
    cycles_core::board::parse_board(text).unwrap()
}

#[test]
fn classify_lists_the_taxonomy() {
    let board = core_fixture("boards/grid_diagonals.json");
    let rec = core_fixture("records/taxonomy_position.json");
    let v = json(&cycles(&["classify", &board, &rec]));
    // c = 2, f = 5, i = 8; unmarkable cf, almost-sink c, almost-source i
    let b = cycles_core_board(&std::fs::read_to_string(&board).unwrap());
    let cf = b.edge_between(cycles_core::VertexId(2), cycles_core::VertexId(5)).unwrap();
    assert_eq!(v["unmarkable"], serde_json::json!([cf.0]));
    assert!(v["almost_sinks"].as_array().unwrap().contains(&Value::from(2)));
    assert!(v["almost_sources"].as_array().unwrap().contains(&Value::from(8)));
    assert!(!v["currently_unplayable"].as_array().unwrap().is_empty());
    let out = cycles(&["classify", &board, &rec, "--pretty"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("unmarkable edges"));
}

#[test]
fn filled_workflows() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = gen(dir.path(), "c5", &["cycle", "5"]);
    let v = json(&cycles(&["filled", "enumerate", &c5]));
    assert_eq!(v["orientations"], 2);
    assert_eq!(v["all_have_cycle_cell"], true);

    let grid = gen(dir.path(), "grid", &["grid", "2", "2"]);
    let out = cycles(&["filled", "sample", &grid, "--seed", "5"]);
    let sample = json(&out);
    assert_eq!(sample["arcs"].as_array().unwrap().len(), 12);
    let o = dir.path().join("o.json");
    std::fs::write(&o, &out.stdout).unwrap();
    let cert = json(&cycles(&["filled", "find", &grid, o.to_str().unwrap()]));
    assert!(!cert["steps"].as_array().unwrap().is_empty());

    let oct = core_fixture("orientations/clockwise_octagon.json");
    let octb = core_fixture("boards/clockwise_octagon.json");
    let cert = json(&cycles(&["filled", "find", &octb, &oct]));
    assert_eq!(cert["steps"].as_array().unwrap().len(), 2);
}

#[test]
fn play_emits_a_replayable_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = cycles(&["play", "k4", "--p1", "random", "--p2", "optimal", "--seed", "9"]);
    let rec = json(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Player 2"));
    let path = dir.path().join("game.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let s = cycles_core::records::GameRecord::replay_file(&path).unwrap();
    assert_eq!(s.winner_if_terminal(), Some(cycles_core::Player::Two));
    assert_eq!(rec["moves"].as_array().unwrap().len(), s.history().len());

    // records produced by play feed classify and solve
    let board = gen(dir.path(), "c6", &["cycle", "6"]);
    let out = cycles(&["play", &board, "--p1", "parity", "--p2", "parity"]);
    let path = dir.path().join("c6game.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let v = json(&cycles(&["classify", &board, path.to_str().unwrap()]));
    assert_eq!(v["winner"], 2);
}

#[test]
fn verify_theorems_small() {
    let out = cycles(&["verify-theorems", "--max-n", "5"]);
    let v = json(&out);
    let checks = v.as_array().unwrap();
    assert!(checks.len() > 20);
    assert!(checks.iter().all(|c| c["passed"] == true || c["gating"] == false));
    let out = cycles(&["verify-theorems", "--max-n", "4", "--pretty"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS") && text.contains("0 failed"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(cycles(&["solve"]).status.code(), Some(1));
    assert_eq!(cycles(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cycles(&["--help"]).status.code(), Some(0));
    // invalid input
    assert_eq!(cycles(&["solve", "/no/such/board.json"]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"vertices\": []}").unwrap();
    assert_eq!(cycles(&["solve", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cycles(&["gen", "cycle", "2"]).status.code(), Some(2));
    assert_eq!(cycles(&["gen", "hexagon"]).status.code(), Some(2));
    assert_eq!(cycles(&["play", "k4", "--p1", "chord"]).status.code(), Some(2));
    // size limits
    assert_eq!(cycles(&["solve", "annulus"]).status.code(), Some(3));
    assert_eq!(cycles(&["solve", "k4", "--max-edges", "5"]).status.code(), Some(3));
    assert_eq!(cycles(&["filled", "enumerate", "annulus"]).status.code(), Some(3));
    // a board with no orientation free of sinks and sources
    let tree = dir.path().join("path.json");
    std::fs::write(
        &tree,
        r#"{"vertices": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0}], "edges": [{"id": 0, "u": 0, "v": 1}]}"#,
    )
    .unwrap();
    assert_eq!(cycles(&["filled", "sample", tree.to_str().unwrap()]).status.code(), Some(2));
}
