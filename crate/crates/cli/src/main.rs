use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use cycles_core::catalog::standard_catalog;
use cycles_core::filled::{self, FilledError};
use cycles_core::records::{read_board, write_board, BoardRef, GameRecord, OrientationFile, RecordError, SolveRecord};
use cycles_core::solver::SolveError;
use cycles_core::strategies::StrategyError;
use cycles_core::theorems::{self, SuiteOptions};
use cycles_core::{generators, policy_by_name, Board, GameState, Player, Solver, SolverConfig};
use serde::Serialize;

mod report;

#[derive(Parser, Debug)]
#[command(name = "cycles", version, about = "Solve, verify and play the Game of Cycles")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated board: k4, cycle N, chord N SPLIT, flap N, grid ROWS COLS, two-cell A B.
    Gen {
        family: String,
        params: Vec<usize>,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a board, optionally from the position a game record reaches.
    Solve {
        /// Board file or built-in board id.
        board: String,
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        max_edges: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Disable the transposition table.
        #[arg(long)]
        no_table: bool,
    },
    /// Run the theorem checks and print a pass/fail table.
    VerifyTheorems {
        /// Cap every family size at N.
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Complete orientations: cycle-cell search, enumeration, sampling.
    Filled {
        #[command(subcommand)]
        command: FilledCommand,
    },
    /// Classify the position a game record reaches.
    Classify { board: String, record: PathBuf },
    /// Play two policies against each other and print the game record.
    Play {
        board: String,
        #[arg(long, default_value = "optimal")]
        p1: String,
        #[arg(long, default_value = "optimal")]
        p2: String,
        /// Seed for `random` policies given without one.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 16)]
        max_edges: usize,
    },
    /// Start the game service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of extra board files for the catalog.
        #[arg(long)]
        boards: Option<PathBuf>,
        /// Directory to write a game record for every session.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum FilledCommand {
    /// Find a cycle cell in a complete orientation.
    Find { board: String, orientation: PathBuf },
    /// Enumerate every complete orientation and check each has a cycle cell.
    Enumerate { board: String },
    /// Draw one complete orientation from a seed.
    Sample {
        board: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failures, by exit code.
#[derive(Debug)]
enum Fail {
    Invalid(String),
    Limit(String),
    Verification(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Invalid(_) => 2,
            Fail::Limit(_) => 3,
            Fail::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Invalid(m) | Fail::Limit(m) | Fail::Verification(m) => m,
        }
    }
}

impl From<RecordError> for Fail {
    fn from(e: RecordError) -> Fail {
        match e {
            RecordError::Orientation(f) => f.into(),
            e => Fail::Invalid(e.to_string()),
        }
    }
}

impl From<SolveError> for Fail {
    fn from(e: SolveError) -> Fail {
        Fail::Limit(e.to_string())
    }
}

impl From<FilledError> for Fail {
    fn from(e: FilledError) -> Fail {
        match e {
            FilledError::TooManyEdges { .. } => Fail::Limit(e.to_string()),
            FilledError::Stalled(_) => Fail::Verification(e.to_string()),
            e => Fail::Invalid(e.to_string()),
        }
    }
}

impl From<StrategyError> for Fail {
    fn from(e: StrategyError) -> Fail {
        match e {
            StrategyError::Solver(s) => s.into(),
            e => Fail::Invalid(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, Fail>;

struct Out {
    pretty: bool,
}

impl Out {
    /// JSON by default; the text rendering under `--pretty`.
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) {
        if self.pretty {
            print!("{}", text());
        } else {
            println!("{}", serde_json::to_string(value).expect("outputs serialize"));
        }
    }
}

/// A board file path, or failing that a built-in board id.
fn load_board(arg: &str) -> Result<(Board, BoardRef)> {
    let path = Path::new(arg);
    if path.exists() {
        let b = read_board(path)?;
        let reference = BoardRef::Path(std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf()));
        return Ok((b, reference));
    }
    match standard_catalog().into_iter().find(|e| e.id == arg) {
        Some(e) => {
            let b = (*e.board).clone();
            let reference = BoardRef::inline(&b);
            Ok((b, reference))
        }
        None => Err(Fail::Invalid(format!("{arg}: no such file or built-in board"))),
    }
}

fn generate(family: &str, params: &[usize]) -> Result<Board> {
    let arity = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Fail::Invalid(format!("{family} takes {n} parameter(s), got {}", params.len())))
        }
    };
    let built = match family {
        "k4" => arity(0).map(|_| Ok(generators::k4()))?,
        "cycle" => arity(1).map(|_| generators::cycle(params[0]))?,
        "chord" => arity(2).map(|_| generators::cycle_chord(params[0], params[1]))?,
        "flap" => arity(1).map(|_| generators::cycle_flap(params[0]))?,
        "grid" => arity(2).map(|_| generators::grid(params[0], params[1]))?,
        "two-cell" => arity(2).map(|_| generators::two_cell(params[0], params[1]))?,
        _ => {
            return Err(Fail::Invalid(format!(
                "unknown family {family:?}; expected k4, cycle, chord, flap, grid or two-cell"
            )))
        }
    };
    built.map_err(|e| Fail::Invalid(e.to_string()))
}

fn replay_moves(board: Arc<Board>, record: &Path) -> Result<GameState> {
    Ok(GameRecord::read(record)?.replay_on(board)?)
}

fn run(cli: Cli) -> Result<()> {
    let out = Out { pretty: cli.pretty };
    match cli.command {
        Command::Gen { family, params, output } => {
            let b = generate(&family, &params)?;
            match output {
                Some(path) => write_board(&path, &b)?,
                None => print!("{}", cycles_core::board::emit_board(&b)),
            }
        }
        Command::Solve { board, from, max_edges, threads, no_table } => {
            let (b, _) = load_board(&board)?;
            let b = Arc::new(b);
            let state = match from {
                Some(rec) => replay_moves(b, &rec)?,
                None => GameState::new(b),
            };
            let config = SolverConfig { max_edges, use_table: !no_table, threads: threads.max(1) };
            let r = Solver::new(config).solve(&state)?;
            let rec = SolveRecord::new(board, &r);
            out.emit(&rec, || report::solve(&rec));
        }
        Command::VerifyTheorems { max_n, threads } => {
            let mut opts = max_n.map(SuiteOptions::with_max_n).unwrap_or_default();
            opts.solver.threads = threads.max(1);
            let checks = theorems::run_all(&opts);
            out.emit(&checks, || report::checks(&checks));
            if !theorems::all_passed(&checks) {
                let n = checks.iter().filter(|c| c.gating && !c.passed).count();
                return Err(Fail::Verification(format!("{n} check(s) failed")));
            }
        }
        Command::Filled { command } => filled_command(command, &out)?,
        Command::Classify { board, record } => {
            let (b, _) = load_board(&board)?;
            let s = replay_moves(Arc::new(b), &record)?;
            let c = report::Classification::of(&s);
            out.emit(&c, || report::classification(&c));
        }
        Command::Play { board, p1, p2, seed, max_edges } => {
            let (b, reference) = load_board(&board)?;
            let b = Arc::new(b);
            let config = SolverConfig { max_edges, ..SolverConfig::default() };
            let named = |n: &str| match (n.trim(), seed) {
                ("random", Some(s)) => format!("random({s})"),
                (n, _) => n.to_string(),
            };
            let policies = [
                policy_by_name(&named(&p1), &b, Player::One, config)?,
                policy_by_name(&named(&p2), &b, Player::Two, config)?,
            ];
            let mut s = GameState::new(b);
            while !s.is_terminal() {
                let p = &policies[usize::from(s.to_move().number() - 1)];
                let mv = p.choose(&s)?;
                s.play(mv).map_err(|e| Fail::Verification(format!("{} chose an illegal move {mv}: {e}", p.name())))?;
            }
            let winner = s.winner_if_terminal().expect("loop ends at a terminal state");
            eprintln!(
                "{} ({}) beats {} ({}) after {} moves",
                winner,
                policies[usize::from(winner.number() - 1)].name(),
                winner.other(),
                policies[usize::from(winner.other().number() - 1)].name(),
                s.history().len()
            );
            let rec = GameRecord::from_state(reference, &s);
            out.emit(&rec, || report::game(&s));
        }
        Command::Serve { port, host, boards, snapshots } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| Fail::Invalid(format!("bad address {host}:{port}: {e}")))?;
            let config = cycles_service::ServiceConfig { boards_dir: boards, snapshot_dir: snapshots };
            tracing_subscriber::fmt().with_writer(std::io::stderr).init();
            let rt = tokio::runtime::Runtime::new().map_err(|e| Fail::Invalid(e.to_string()))?;
            rt.block_on(cycles_service::serve(addr, &config)).map_err(|e| Fail::Invalid(e.to_string()))?;
        }
    }
    Ok(())
}

fn filled_command(command: FilledCommand, out: &Out) -> Result<()> {
    match command {
        FilledCommand::Find { board, orientation } => {
            let (b, _) = load_board(&board)?;
            let file = OrientationFile::parse(&cycles_core::records::read_text(&orientation)?)?;
            let o = file.orientation(&b)?;
            let cert = filled::find_cycle_cell(&b, &o)?;
            cert.check(&b, &o).map_err(Fail::Verification)?;
            out.emit(&cert, || report::certificate(&cert));
        }
        FilledCommand::Enumerate { board } => {
            let (b, _) = load_board(&board)?;
            #[derive(Serialize)]
            struct Summary {
                board: String,
                edges: usize,
                orientations: u64,
                all_have_cycle_cell: bool,
            }
            // size limit first so it maps to its own exit code
            filled::enumerate_orientations(&b)?;
            let n = theorems::check_all_orientations(&b).map_err(Fail::Verification)?;
            let s = Summary { board, edges: b.edge_count(), orientations: n, all_have_cycle_cell: true };
            out.emit(&s, || format!("{}: {} orientations, each with a cycle cell\n", s.board, s.orientations));
        }
        FilledCommand::Sample { board, seed } => {
            let (b, reference) = load_board(&board)?;
            let o = filled::sample_orientation(&b, seed)
                .ok_or_else(|| Fail::Invalid(format!("{board} has no orientation without sinks and sources")))?;
            let file = OrientationFile { board: reference, arcs: o.arcs() };
            out.emit(&file, || report::arcs(&file.arcs));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cycles: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
