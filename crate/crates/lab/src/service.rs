//! HTTP/JSON service driving live labeling sessions.
//!
//! Each session owns its pool, strategy and model behind its own mutex, so
//! requests for one session are serialized while different sessions proceed
//! concurrently. A session alternates strictly between idle and one pending
//! query.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use active_core::{
    min_max_scale, seed_pool, split, Classifier, EntryId, Error as CoreError, Model, Pool,
    QueryStrategy, RawDataset,
};
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::{DatasetEntry, DisplayHint};
use crate::harness::{ExperimentConfig, DEFAULT_N_LABELED, DEFAULT_TEST_FRACTION};
use crate::spec::{ModelKind, StrategySpec};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(60 * 60);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub idle_timeout: Duration,
    /// Directory for per-session JSONL event logs; no logging when absent.
    pub log_dir: Option<PathBuf>,
    pub test_fraction: f64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            log_dir: None,
            test_fraction: DEFAULT_TEST_FRACTION,
        }
    }
}

pub struct AppState {
    datasets: BTreeMap<String, DatasetEntry>,
    sessions: Mutex<HashMap<String, Arc<Slot>>>,
    config: ServiceConfig,
}

/// A session plus its idle clock, which lives outside the session lock so
/// lookups and expiry never wait for a busy session.
struct Slot {
    last_access: Mutex<Instant>,
    session: Mutex<Session>,
}

impl Slot {
    fn idle(&self, now: Instant) -> Duration {
        now.saturating_duration_since(*self.last_access.lock().expect("clock poisoned"))
    }

    fn touch(&self) {
        *self.last_access.lock().expect("clock poisoned") = Instant::now();
    }
}

impl AppState {
    pub fn new(datasets: BTreeMap<String, DatasetEntry>, config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self {
            datasets,
            sessions: Mutex::new(HashMap::new()),
            config,
        })
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session store poisoned").len()
    }

    /// Drops sessions idle for longer than the timeout as of `now`; returns how many.
    pub fn expire_idle(&self, now: Instant) -> usize {
        let mut store = self.sessions.lock().expect("session store poisoned");
        let before = store.len();
        store.retain(|_, slot| slot.idle(now) <= self.config.idle_timeout);
        before - store.len()
    }

    /// The live session `id`, touched; expired sessions are removed and reported missing.
    fn lookup(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        let mut store = self.sessions.lock().expect("session store poisoned");
        let slot = store.get(id).cloned().ok_or_else(|| ApiError::not_found(id))?;
        if slot.idle(Instant::now()) > self.config.idle_timeout {
            store.remove(id);
            return Err(ApiError::not_found(id));
        }
        slot.touch();
        Ok(slot)
    }
}

struct Session {
    id: String,
    pool: Pool,
    strategy: Box<dyn QueryStrategy>,
    model: Classifier,
    /// Unscaled training rows, indexed like the pool, for display.
    raw_train: RawDataset,
    test: RawDataset,
    class_table: Vec<String>,
    hint: DisplayHint,
    quota: usize,
    queries_used: usize,
    pending: Option<EntryId>,
    curve: Vec<f64>,
    log: Option<File>,
}

impl Session {
    fn error_rate(&self) -> Result<f64, CoreError> {
        Ok(1.0 - self.model.score(&self.test.features, &self.test.labels)?)
    }

    fn log(&mut self, event: &str, payload: Value) {
        if let Some(file) = &mut self.log {
            let line = json!({
                "ts": chrono::Utc::now().to_rfc3339(),
                "session_id": self.id,
                "event": event,
                "payload": payload,
            });
            // the log is an audit aid; a failed write must not fail the request
            let _ = writeln!(file, "{line}");
        }
    }

    fn query(&mut self) -> Result<QueryResponse, ApiError> {
        let entry_id = match self.pending {
            Some(id) => id,
            None => {
                if self.queries_used >= self.quota {
                    return Err(ApiError::conflict(format!("quota of {} queries exhausted", self.quota)));
                }
                let id = self.strategy.make_query(&self.pool)?;
                self.pending = Some(id);
                self.log("query", json!({ "entry_id": id }));
                id
            }
        };
        Ok(QueryResponse {
            entry_id,
            features: self.raw_train.features.row(entry_id).to_vec(),
            display_hint: self.hint.clone(),
            queries_used: self.queries_used,
            quota: self.quota,
        })
    }

    fn label(&mut self, req: LabelRequest) -> Result<LabelResponse, ApiError> {
        match self.pending {
            Some(id) if id == req.entry_id => {}
            Some(id) => {
                return Err(ApiError::conflict(format!(
                    "entry {} is not pending; the pending query is {id}",
                    req.entry_id
                )))
            }
            None => return Err(ApiError::conflict("no query is pending".into())),
        }
        let token = match &req.label_token {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => other.to_string(),
        };
        let label = self.class_table.iter().position(|t| *t == token).ok_or_else(|| {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                format!("label token `{token}` is not one of {:?}", self.class_table),
            )
        })?;
        self.pool.update(req.entry_id, label)?;
        self.pending = None;
        self.queries_used += 1;
        self.strategy.sync(&self.pool)?;
        self.model.train(&self.pool)?;
        let error_rate = self.error_rate()?;
        self.curve.push(error_rate);
        self.log(
            "label",
            json!({ "entry_id": req.entry_id, "label_token": token, "error_rate": error_rate }),
        );
        Ok(LabelResponse {
            accepted: true,
            error_rate,
            queries_used: self.queries_used,
        })
    }

    fn curve(&self) -> CurveResponse {
        let snapshot = self.strategy.snapshot();
        CurveResponse {
            error_rates: self.curve.clone(),
            albl_candidates: snapshot.as_ref().map(|s| s.candidate_names.clone()),
            albl_weights: snapshot.map(|s| s.weights),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: String) -> Self {
        Self { status, message }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`"))
    }

    fn conflict(message: String) -> Self {
        Self::new(StatusCode::CONFLICT, message)
    }

    fn unprocessable(message: impl ToString) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message.to_string())
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let status = match e {
            CoreError::Exhausted | CoreError::AlreadyLabeled(_) | CoreError::Protocol(_) => StatusCode::CONFLICT,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(e.status(), e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

fn default_quota() -> usize {
    10
}

fn default_n_labeled() -> usize {
    DEFAULT_N_LABELED
}

fn default_scale() -> bool {
    true
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub dataset_id: String,
    pub strategy: String,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default = "default_quota")]
    pub quota: usize,
    #[serde(default = "default_n_labeled")]
    pub n_labeled: usize,
    #[serde(default)]
    pub seed: u64,
    /// Min-max scale features for the models; displayed features stay raw.
    #[serde(default = "default_scale")]
    pub scale: bool,
}

#[derive(Debug, Serialize)]
struct CreateResponse {
    session_id: String,
    classes: Vec<String>,
    quota: usize,
}

#[derive(Debug, Serialize)]
struct QueryResponse {
    entry_id: EntryId,
    features: Vec<f64>,
    display_hint: DisplayHint,
    queries_used: usize,
    quota: usize,
}

#[derive(Debug, Deserialize)]
struct LabelRequest {
    entry_id: EntryId,
    label_token: Value,
}

#[derive(Debug, Serialize)]
struct LabelResponse {
    accepted: bool,
    error_rate: f64,
    queries_used: usize,
}

#[derive(Debug, Serialize)]
struct CurveResponse {
    error_rates: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    albl_candidates: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    albl_weights: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct DatasetInfo {
    dataset_id: String,
    n: usize,
    d: usize,
    classes: Vec<String>,
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/datasets", get(list_datasets))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/query", get(get_query))
        .route("/api/sessions/{id}/label", post(post_label))
        .route("/api/sessions/{id}/curve", get(get_curve))
        .with_state(state)
}

/// Serves until interrupted, sweeping idle sessions once a minute.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let sweeper = Arc::clone(&state);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.expire_idle(Instant::now());
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn list_datasets(State(state): State<Arc<AppState>>) -> Json<Vec<DatasetInfo>> {
    Json(
        state
            .datasets
            .values()
            .map(|e| DatasetInfo {
                dataset_id: e.id.clone(),
                n: e.data.len(),
                d: e.data.dim(),
                classes: e.data.class_table.clone(),
            })
            .collect(),
    )
}

/// Runs CPU-bound session work off the async executor.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<CreateResponse>), ApiError> {
    let Json(req) = body?;
    let entry = state
        .datasets
        .get(&req.dataset_id)
        .ok_or_else(|| ApiError::unprocessable(format!("unknown dataset `{}`", req.dataset_id)))?
        .clone();
    let spec: StrategySpec = req.strategy.parse().map_err(ApiError::unprocessable)?;
    let mut config = ExperimentConfig::new(&entry.path, vec![spec.clone()]);
    config.model = req.model;
    config.quota = req.quota;
    config.n_labeled = req.n_labeled;
    config.seed = req.seed;
    config.scale = req.scale;
    config.test_fraction = state.config.test_fraction;
    config.validate(&entry.data).map_err(ApiError::unprocessable)?;

    let id = uuid::Uuid::new_v4().simple().to_string();
    let log = match &state.config.log_dir {
        Some(dir) => Some(
            File::options()
                .create(true)
                .append(true)
                .open(dir.join(format!("{id}.jsonl")))
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?,
        ),
        None => None,
    };
    let session_id = id.clone();
    let session = blocking(move || {
        let seed = config.seed;
        let (raw_train, mut test) = split(&entry.data, config.test_fraction, seed)?;
        let mut train = raw_train.clone();
        if config.scale {
            min_max_scale(&mut train, &mut test);
        }
        let mut pool = seed_pool(&train, config.n_labeled, seed)?.pool;
        let model_spec = config.model.spec(seed);
        let strategy = spec.build(&mut pool, model_spec, seed)?;
        let mut model = model_spec.build();
        model.train(&pool)?;
        let mut session = Session {
            id: session_id,
            pool,
            strategy,
            model,
            raw_train,
            test,
            class_table: entry.data.class_table.clone(),
            hint: entry.hint.clone(),
            quota: config.quota,
            queries_used: 0,
            pending: None,
            curve: Vec::new(),
            log,
        };
        let initial = session.error_rate()?;
        session.curve.push(initial);
        session.log(
            "create",
            json!({
                "dataset_id": entry.id,
                "strategy": spec.to_string(),
                "model": config.model,
                "quota": config.quota,
                "n_labeled": config.n_labeled,
                "seed": seed,
                "scale": config.scale,
                "error_rate": initial,
            }),
        );
        Ok(session)
    })
    .await?;

    let response = CreateResponse {
        session_id: id.clone(),
        classes: session.class_table.clone(),
        quota: session.quota,
    };
    state
        .sessions
        .lock()
        .expect("session store poisoned")
        .insert(
            id,
            Arc::new(Slot {
                last_access: Mutex::new(Instant::now()),
                session: Mutex::new(session),
            }),
        );
    Ok((StatusCode::CREATED, Json(response)))
}

/// Runs `f` on a blocking thread while holding the session's lock.
async fn with_session<T: Send + 'static>(
    slot: Arc<Slot>,
    f: impl FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    blocking(move || {
        let mut guard = slot
            .session
            .lock()
            .map_err(|_| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "session state poisoned".into()))?;
        let out = f(&mut guard);
        slot.touch();
        out
    })
    .await
}

async fn get_query(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<QueryResponse>, ApiError> {
    with_session(state.lookup(&id)?, Session::query).await.map(Json)
}

async fn post_label(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<LabelRequest>, JsonRejection>,
) -> Result<Json<LabelResponse>, ApiError> {
    let slot = state.lookup(&id)?;
    let Json(req) = body?;
    with_session(slot, move |s| s.label(req)).await.map(Json)
}

async fn get_curve(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<CurveResponse>, ApiError> {
    with_session(state.lookup(&id)?, |s| Ok(s.curve())).await.map(Json)
}
