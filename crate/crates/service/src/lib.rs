//! Session-based HTTP service over the engine: board catalog, games against
//! a policy, move submission with synchronous engine replies.

mod error;
mod view;

use std::collections::HashMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path as FsPath, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::get;
use axum::{Json, Router};
use cycles_core::catalog::{standard_catalog, CatalogEntry};
use cycles_core::records::{read_board, BoardRef, GameRecord};
use cycles_core::{policy_by_name, EdgeId, GameState, Move, Player, Policy, SolverConfig, VertexId};
use serde::Deserialize;
use uuid::Uuid;

pub use error::ApiError;
pub use view::{BoardDetail, BoardSummary, GameView, MoveResponse};

/// Boards larger than this cannot be played against the exhaustive policy.
pub const OPTIMAL_EDGE_LIMIT: usize = 16;

#[derive(Clone, Debug, Default)]
pub struct ServiceConfig {
    /// Extra board files (`*.json`) added to the catalog, keyed by file stem.
    pub boards_dir: Option<PathBuf>,
    /// When set, every session is written here as a game record after each
    /// change.
    pub snapshot_dir: Option<PathBuf>,
}

struct Session {
    board_id: String,
    state: GameState,
    engine: Option<(Player, Box<dyn Policy>)>,
    created: SystemTime,
}

impl Session {
    fn view(&self, id: Uuid) -> GameView {
        let (player, policy) = match &self.engine {
            Some((p, pol)) => (p.number(), Some(pol.name())),
            None => (0, None),
        };
        let mut v = GameView::of(id.to_string(), self.board_id.clone(), player, policy, &self.state);
        v.created = self.created.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        v
    }

    fn engine_to_move(&self) -> Option<&dyn Policy> {
        match &self.engine {
            Some((p, pol)) if *p == self.state.to_move() && !self.state.is_terminal() => Some(pol.as_ref()),
            _ => None,
        }
    }

    /// Plays the engine's move if it is the engine's turn.
    fn engine_reply(&mut self) -> Result<Option<Move>, ApiError> {
        let Some(policy) = self.engine_to_move() else { return Ok(None) };
        let mv = policy.choose(&self.state).map_err(|e| ApiError::internal(format!("engine failed: {e}")))?;
        self.state.play(mv).map_err(|e| ApiError::internal(format!("engine chose an illegal move: {e}")))?;
        Ok(Some(mv))
    }
}

struct Inner {
    catalog: Vec<CatalogEntry>,
    index: HashMap<String, usize>,
    sessions: RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>,
    snapshot_dir: Option<PathBuf>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(config: &ServiceConfig) -> std::io::Result<AppState> {
        let mut catalog = standard_catalog();
        if let Some(dir) = &config.boards_dir {
            catalog.extend(load_board_dir(dir)?);
        }
        if let Some(dir) = &config.snapshot_dir {
            fs::create_dir_all(dir)?;
        }
        // later entries win on id clashes so a board directory can override
        let index = catalog.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        Ok(AppState(Arc::new(Inner {
            catalog,
            index,
            sessions: RwLock::default(),
            snapshot_dir: config.snapshot_dir.clone(),
        })))
    }

    fn entry(&self, id: &str) -> Option<&CatalogEntry> {
        self.0.index.get(id).map(|&i| &self.0.catalog[i])
    }

    fn session(&self, id: Uuid) -> Result<Arc<Mutex<Session>>, ApiError> {
        let sessions = self.0.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions.get(&id).cloned().ok_or_else(|| ApiError::not_found(format!("no game {id}")))
    }

    fn snapshot(&self, id: Uuid, s: &Session) {
        let Some(dir) = &self.0.snapshot_dir else { return };
        let rec = GameRecord::from_state(BoardRef::inline(s.state.board()), &s.state);
        let path = dir.join(format!("{id}.json"));
        let text = serde_json::to_string_pretty(&rec).expect("records serialize");
        if let Err(e) = fs::write(&path, text) {
            tracing::warn!("cannot write snapshot {}: {e}", path.display());
        }
    }
}

fn load_board_dir(dir: &FsPath) -> std::io::Result<Vec<CatalogEntry>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        match read_board(&p) {
            Ok(b) => out.push(CatalogEntry { id: stem.clone(), name: stem, board: Arc::new(b) }),
            Err(e) => tracing::warn!("skipping {}: {e}", p.display()),
        }
    }
    Ok(out)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/boards", get(list_boards))
        .route("/boards/{id}", get(get_board))
        .route("/games", axum::routing::post(create_game))
        .route("/games/{id}", get(get_game).delete(delete_game))
        .route("/games/{id}/moves", axum::routing::post(post_move))
        .with_state(state)
}

/// Binds and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: &ServiceConfig) -> std::io::Result<()> {
    let app = router(AppState::new(config)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}

async fn list_boards(State(app): State<AppState>) -> Json<Vec<BoardSummary>> {
    let mut seen = std::collections::HashSet::new();
    Json(
        app.0
            .catalog
            .iter()
            .enumerate()
            .filter(|(i, e)| app.0.index.get(&e.id) == Some(i) && seen.insert(e.id.clone()))
            .map(|(_, e)| BoardSummary::of(e))
            .collect(),
    )
}

async fn get_board(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<BoardDetail>, ApiError> {
    let e = app.entry(&id).ok_or_else(|| ApiError::not_found(format!("no board {id:?}")))?;
    Ok(Json(BoardDetail::of(e)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewGame {
    pub board_id: String,
    /// 0 for no engine, otherwise the engine's player number.
    #[serde(default)]
    pub engine_player: u8,
    #[serde(default)]
    pub policy: Option<String>,
}

async fn create_game(
    State(app): State<AppState>,
    body: Result<Json<NewGame>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<GameView>), ApiError> {
    let Json(req) = body?;
    let entry = app.entry(&req.board_id).ok_or_else(|| ApiError::not_found(format!("no board {:?}", req.board_id)))?;
    let board = entry.board.clone();
    let engine = match req.engine_player {
        0 => None,
        n @ (1 | 2) => {
            let player = if n == 1 { Player::One } else { Player::Two };
            let name = req.policy.as_deref().unwrap_or("optimal");
            if name.trim() == "optimal" && board.edge_count() > OPTIMAL_EDGE_LIMIT {
                return Err(ApiError::unprocessable(format!(
                    "policy \"optimal\" is limited to {OPTIMAL_EDGE_LIMIT} edges; this board has {}",
                    board.edge_count()
                )));
            }
            let config = SolverConfig { max_edges: OPTIMAL_EDGE_LIMIT, ..SolverConfig::default() };
            let policy =
                policy_by_name(name, &board, player, config).map_err(|e| ApiError::unprocessable(e.to_string()))?;
            Some((player, policy))
        }
        n => return Err(ApiError::unprocessable(format!("engine_player must be 0, 1 or 2, got {n}"))),
    };
    let id = Uuid::new_v4();
    let mut session =
        Session { board_id: entry.id.clone(), state: GameState::new(board), engine, created: SystemTime::now() };
    session.engine_reply()?;
    let view = session.view(id);
    app.snapshot(id, &session);
    app.0.sessions.write().unwrap_or_else(|p| p.into_inner()).insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

fn parse_id(raw: &str) -> Result<Uuid, ApiError> {
    Uuid::parse_str(raw).map_err(|_| ApiError::not_found(format!("no game {raw}")))
}

async fn get_game(State(app): State<AppState>, Path(raw): Path<String>) -> Result<Json<GameView>, ApiError> {
    let id = parse_id(&raw)?;
    let s = app.session(id)?;
    let s = s.lock().unwrap_or_else(|p| p.into_inner());
    Ok(Json(s.view(id)))
}

async fn delete_game(State(app): State<AppState>, Path(raw): Path<String>) -> Result<StatusCode, ApiError> {
    let id = parse_id(&raw)?;
    match app.0.sessions.write().unwrap_or_else(|p| p.into_inner()).remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::not_found(format!("no game {id}"))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub edge: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

async fn post_move(
    State(app): State<AppState>,
    Path(raw): Path<String>,
    body: Result<Json<MoveRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<Json<MoveResponse>, ApiError> {
    let id = parse_id(&raw)?;
    let session = app.session(id)?;
    let Json(req) = body?;
    let mut s = session.lock().unwrap_or_else(|p| p.into_inner());
    if s.state.is_terminal() {
        return Err(ApiError::conflict("game_over", "the game is already over"));
    }
    if s.engine_to_move().is_some() {
        return Err(ApiError::conflict("not_your_turn", format!("{} is played by the engine", s.state.to_move())));
    }
    let mv = Move::new(req.edge, req.tail, req.head);
    s.state.play(mv)?;
    let reply = s.engine_reply();
    app.snapshot(id, &s);
    let engine_move = reply?;
    Ok(Json(MoveResponse { human_move: mv, engine_move, state: s.view(id) }))
}
