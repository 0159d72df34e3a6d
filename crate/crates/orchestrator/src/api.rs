//! JSON HTTP API over a [`Project`].
//!
//! | method | path                     | body                                              |
//! |--------|--------------------------|---------------------------------------------------|
//! | GET    | `/runs`                  |                                                   |
//! | GET    | `/runs/{id}`             |                                                   |
//! | GET    | `/runs/{id}/failures`    |                                                   |
//! | POST   | `/runs`                  | `{split, revision?, backend?}`                    |
//! | POST   | `/exemplars`             | `{run_id, query_id, corrected_plan, note?}`       |
//! | POST   | `/revisions`             | `{exemplar_ids, rule_override?}`                  |
//! | GET    | `/revisions/{i}/prompt`  | (plain text reply)                                |
//!
//! Errors reply `{error, message, failing?}` with a matching status code.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Semaphore;
use tripwise_agents::BackendConfig;
use tripwise_core::model::Split;

use crate::{OrchError, Project, RunRecord};

#[derive(Clone)]
pub struct AppState {
    project: Arc<Project>,
    jobs: Arc<Mutex<BTreeMap<String, Job>>>,
    pool: Arc<Semaphore>,
}

#[derive(Debug, Clone)]
enum Job {
    Running,
    Failed(String),
}

impl AppState {
    pub fn new(project: Arc<Project>, workers: usize) -> Self {
        AppState {
            project,
            jobs: Arc::default(),
            pool: Arc::new(Semaphore::new(workers.max(1))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunHandle {
    pub run_id: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<RunRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartRun {
    pub split: Split,
    #[serde(default)]
    pub revision: Option<u32>,
    #[serde(default = "BackendConfig::mock")]
    pub backend: BackendConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitExemplar {
    pub run_id: String,
    pub query_id: String,
    pub corrected_plan: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateRevision {
    pub exemplar_ids: Vec<String>,
    #[serde(default)]
    pub rule_override: Option<String>,
}

pub struct ApiError(OrchError);

impl From<OrchError> for ApiError {
    fn from(e: OrchError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = match &self.0 {
            OrchError::Validation(_) => (StatusCode::BAD_REQUEST, "validation"),
            OrchError::ParseFailure(_) => (StatusCode::BAD_REQUEST, "parse-failure"),
            OrchError::UnknownRun(_) => (StatusCode::NOT_FOUND, "unknown-run"),
            OrchError::UnknownQuery(_) => (StatusCode::NOT_FOUND, "unknown-query"),
            OrchError::UnknownRevision(_) => (StatusCode::NOT_FOUND, "unknown-revision"),
            OrchError::ExemplarInvariantViolation { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "exemplar-invariant-violation")
            }
            OrchError::Busy(_) => (StatusCode::CONFLICT, "busy"),
            OrchError::Backend(_) => (StatusCode::BAD_GATEWAY, "backend"),
            OrchError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, "storage"),
        };
        let mut body = json!({ "error": kind, "message": self.0.to_string() });
        if let OrchError::ExemplarInvariantViolation { failing, .. } = &self.0 {
            body["failing"] = json!(failing);
        }
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/runs", get(list_runs).post(start_run))
        .route("/runs/{id}", get(get_run))
        .route("/runs/{id}/failures", get(run_failures))
        .route("/exemplars", axum::routing::post(submit_exemplar))
        .route("/revisions", axum::routing::post(create_revision))
        .route("/revisions/{index}/prompt", get(revision_prompt))
        .with_state(state)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, OrchError> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| OrchError::Storage(format!("worker panicked: {e}")))?
        .map_err(ApiError)
}

async fn list_runs(State(s): State<AppState>) -> ApiResult<impl IntoResponse> {
    let p = s.project.clone();
    Ok(Json(blocking(move || p.summaries()).await?))
}

async fn get_run(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<RunHandle>> {
    let job = s.jobs.lock().expect("job table").get(&id).cloned();
    match job {
        Some(Job::Running) => Ok(Json(RunHandle {
            run_id: id,
            status: RunStatus::Running,
            error: None,
            record: None,
        })),
        Some(Job::Failed(e)) => Ok(Json(RunHandle {
            run_id: id,
            status: RunStatus::Failed,
            error: Some(e),
            record: None,
        })),
        None => {
            let p = s.project.clone();
            let run_id = id.clone();
            let record = blocking(move || p.load_run(&run_id)).await?;
            Ok(Json(RunHandle {
                run_id: id,
                status: RunStatus::Done,
                error: None,
                record: Some(record),
            }))
        }
    }
}

async fn run_failures(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let p = s.project.clone();
    Ok(Json(blocking(move || p.list_failures(&id)).await?))
}

async fn start_run(State(s): State<AppState>, Json(req): Json<StartRun>) -> ApiResult<impl IntoResponse> {
    s.project.check_evaluation(req.split, req.revision, &req.backend)?;
    let run_id = s.project.runs().reserve_run_id();
    s.jobs.lock().expect("job table").insert(run_id.clone(), Job::Running);
    let state = s.clone();
    let id = run_id.clone();
    tokio::spawn(async move {
        let _permit = state.pool.clone().acquire_owned().await.expect("pool open");
        let p = state.project.clone();
        let job_id = id.clone();
        let result = blocking(move || p.evaluate_as(&job_id, req.split, req.revision, &req.backend)).await;
        let mut jobs = state.jobs.lock().expect("job table");
        match result {
            Ok(_) => {
                jobs.remove(&id);
            }
            Err(ApiError(e)) => {
                log::error!("{id}: {e}");
                jobs.insert(id, Job::Failed(e.to_string()));
            }
        }
    });
    let handle = RunHandle {
        run_id,
        status: RunStatus::Running,
        error: None,
        record: None,
    };
    Ok((StatusCode::ACCEPTED, Json(handle)))
}

async fn submit_exemplar(State(s): State<AppState>, Json(req): Json<SubmitExemplar>) -> ApiResult<impl IntoResponse> {
    let p = s.project.clone();
    let id = blocking(move || p.submit_exemplar(&req.run_id, &req.query_id, &req.corrected_plan, &req.note)).await?;
    Ok((StatusCode::CREATED, Json(json!({ "exemplar_id": id }))))
}

async fn create_revision(State(s): State<AppState>, Json(req): Json<CreateRevision>) -> ApiResult<impl IntoResponse> {
    if req.exemplar_ids.is_empty() {
        return Err(OrchError::Validation("select at least one exemplar".into()).into());
    }
    let p = s.project.clone();
    let (index, prompt) = blocking(move || {
        let i = p.create_revision(&req.exemplar_ids, req.rule_override)?;
        Ok((i, p.revision_prompt(i)?))
    })
    .await?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "index": index, "id": format!("R{index}"), "prompt": prompt })),
    ))
}

async fn revision_prompt(State(s): State<AppState>, Path(index): Path<u32>) -> ApiResult<impl IntoResponse> {
    let text = s.project.revision_prompt(index)?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text))
}

/// Serves the API until the process is stopped.
pub async fn serve(project: Arc<Project>, addr: &str, workers: usize) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(project, workers))).await
}
