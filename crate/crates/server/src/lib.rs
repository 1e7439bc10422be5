//! JSON-over-HTTP API for the dice engine.
//!
//! | route | |
//! |---|---|
//! | `GET /api/dice-sets` | catalog |
//! | `GET /api/dice-sets/{name}` | the dice file |
//! | `GET /api/dice-sets/{name}/tournaments?m=M` | realized tournaments with exact odds |
//! | `POST /api/advise` | `{set, opponents, m}` to `{die, rolls, odds}` |
//! | `POST /api/simulate` | `{set, a, b, r, trials, seed}` to a tally |
//!
//! Errors carry an [`ErrorBody`]: 404 for unknown sets or labels, 422 for
//! invalid requests and 409 when the dice set cannot satisfy the request
//! (ties, or no die beats every opponent).

use std::collections::BTreeMap;
use std::future::Future;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use anyhow::Context;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use schutte_core::dice::{advise, simulate, win_odds, DiceError, DiceSet};
use schutte_core::fixtures;
use schutte_core::io::{parse_dice_set, DiceSetFile};
use schutte_core::wire::{
    AdviseRequest, AdviseResponse, Catalog, CatalogEntry, ErrorBody, SimulateRequest, SimulateResponse,
    TournamentsResponse,
};
use serde::Deserialize;

/// Environment variable naming a directory of extra dice-set JSON files.
pub const FIXTURE_DIR_ENV: &str = "SCHUTTE_FIXTURES";

/// Largest trial count `POST /api/simulate` accepts.
pub const MAX_TRIALS: u64 = 10_000_000;

/// Dice sets served, keyed by name. Immutable once built.
#[derive(Clone, Debug)]
pub struct AppState {
    sets: Arc<BTreeMap<String, DiceSet>>,
}

impl AppState {
    pub fn new(sets: impl IntoIterator<Item = DiceSet>) -> Self {
        let sets = sets.into_iter().map(|s| (s.name().to_string(), s)).collect();
        AppState { sets: Arc::new(sets) }
    }

    /// The built-in sets plus every `*.json` file in `dir`; a file whose
    /// set name matches a built-in replaces it.
    pub fn load(dir: Option<&Path>) -> anyhow::Result<Self> {
        let mut sets = fixtures::builtin();
        if let Some(dir) = dir {
            let mut paths: Vec<_> = std::fs::read_dir(dir)
                .with_context(|| format!("reading fixture directory {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for path in paths {
                let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                let ds = parse_dice_set(&text).with_context(|| format!("parsing {}", path.display()))?;
                sets.retain(|s| s.name() != ds.name());
                sets.push(ds);
            }
        }
        Ok(Self::new(sets))
    }

    /// [`AppState::load`] with the directory from [`FIXTURE_DIR_ENV`], if set.
    pub fn from_env() -> anyhow::Result<Self> {
        let dir = std::env::var_os(FIXTURE_DIR_ENV);
        Self::load(dir.as_deref().map(Path::new))
    }

    fn set(&self, name: &str) -> Result<&DiceSet, ApiError> {
        self.sets
            .get(name)
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_set", format!("no dice set named {name:?}")))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/dice-sets", get(catalog))
        .route("/api/dice-sets/{name}", get(dice_set))
        .route("/api/dice-sets/{name}/tournaments", get(tournaments))
        .route("/api/advise", post(advise_handler))
        .route("/api/simulate", post(simulate_handler))
        .with_state(state)
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(addr: SocketAddr, state: AppState) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    tracing::info!("listening on {}", listener.local_addr()?);
    serve_listener(listener, state, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}

/// Serves on an already bound listener until `shutdown` resolves.
pub async fn serve_listener(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> anyhow::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await?;
    Ok(())
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorBody { code: code.to_string(), message: message.into(), matrix: None } }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<DiceError> for ApiError {
    fn from(e: DiceError) -> Self {
        let message = e.to_string();
        match e {
            DiceError::UnknownLabel(_) => Self::new(StatusCode::NOT_FOUND, "unknown_label", message),
            DiceError::TiedPair { .. } => Self::new(StatusCode::CONFLICT, "tied_pair", message),
            DiceError::MarginViolation { .. } => Self::new(StatusCode::CONFLICT, "margin_violation", message),
            DiceError::NoDominatingChoice(matrix) => {
                let mut err = Self::new(StatusCode::CONFLICT, "no_dominating_choice", message);
                err.body.matrix = Some((&*matrix).into());
                err
            }
            DiceError::TooFewDice { .. } => Self::new(StatusCode::CONFLICT, "too_few_dice", message),
            _ => Self::invalid(message),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::invalid(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::invalid(e.body_text())
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

async fn catalog(State(state): State<AppState>) -> Json<Catalog> {
    Json(Catalog { sets: state.sets.values().map(CatalogEntry::from).collect() })
}

async fn dice_set(
    State(state): State<AppState>,
    UrlPath(name): UrlPath<String>,
) -> Result<Json<DiceSetFile>, ApiError> {
    Ok(Json(state.set(&name)?.into()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TournamentsQuery {
    m: u32,
}

async fn tournaments(
    State(state): State<AppState>,
    UrlPath(name): UrlPath<String>,
    query: Result<Query<TournamentsQuery>, QueryRejection>,
) -> Result<Json<TournamentsResponse>, ApiError> {
    let Query(TournamentsQuery { m }) = query?;
    let ds = state.set(&name)?.clone();
    if m == 0 {
        return Err(ApiError::invalid("m must be at least 1"));
    }
    blocking(move || Ok(Json(TournamentsResponse::compute(&ds, m)?))).await
}

async fn advise_handler(
    State(state): State<AppState>,
    body: Result<Json<AdviseRequest>, JsonRejection>,
) -> Result<Json<AdviseResponse>, ApiError> {
    let Json(req) = body?;
    let ds = state.set(&req.set)?.clone();
    blocking(move || {
        let opponents: Vec<&str> = req.opponents.iter().map(String::as_str).collect();
        let advice = advise(&ds, &opponents, req.m)?;
        Ok(Json(AdviseResponse::new(&advice, &req.opponents)))
    })
    .await
}

async fn simulate_handler(
    State(state): State<AppState>,
    body: Result<Json<SimulateRequest>, JsonRejection>,
) -> Result<Json<SimulateResponse>, ApiError> {
    let Json(req) = body?;
    let ds = state.set(&req.set)?;
    let die = |label: &str| {
        ds.by_label(label).cloned().ok_or_else(|| ApiError::from(DiceError::UnknownLabel(label.to_string())))
    };
    let (a, b) = (die(&req.a)?, die(&req.b)?);
    if req.trials > MAX_TRIALS {
        return Err(ApiError::invalid(format!("trials must be at most {MAX_TRIALS}")));
    }
    blocking(move || {
        let tally = simulate(&a, &b, req.r, req.trials, req.seed)?;
        let exact = win_odds(&a, &b, req.r)?;
        Ok(Json(SimulateResponse::new(tally, &exact)))
    })
    .await
}
