//! HTTP routes.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | [`SessionParams`] | 201 `{id, problem, active_players, ...state}` |
//! | GET | `/sessions/{id}/query` | | [`State`] |
//! | POST | `/sessions/{id}/answer` | [`AnswerBody`] | [`State`] plus `duplicate` |
//! | GET | `/sessions/{id}/result` | | `FairOutcome`, or 409 `not_finished` |
//! | GET | `/sessions/{id}/transcript` | | `{id, params, problem, transcript}` |

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State as Extract};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};

use crate::error::ApiError;
use crate::session::{AnswerBody, Session, SessionParams, State};
use crate::store::Store;

pub struct App {
    store: Store,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl App {
    /// Loads and replays every stored session.
    pub fn open(store: Store) -> anyhow::Result<Arc<Self>> {
        let mut sessions = HashMap::new();
        for mut s in store.load_all()? {
            s.replay();
            sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
        }
        Ok(Arc::new(App { store, sessions: RwLock::new(sessions) }))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::not_found(id))
    }
}

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/query", get(query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/result", get(result))
        .route("/sessions/{id}/transcript", get(transcript))
        .with_state(app)
}

/// `missing field `players`` and friends name the offending field.
fn serde_field(msg: &str) -> Option<String> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}

fn parse<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let v: Value = serde_json::from_slice(body).map_err(|e| ApiError::invalid_json(e.to_string()))?;
    serde_json::from_value(v).map_err(|e| {
        let msg = e.to_string();
        match serde_field(&msg) {
            Some(f) => ApiError::invalid_params(&f, msg),
            None => ApiError::invalid_json(msg),
        }
    })
}

fn state_json(s: &State) -> Value {
    serde_json::to_value(s).expect("state serializes")
}

async fn create(Extract(app): Extract<Arc<App>>, body: Bytes) -> Result<Response, ApiError> {
    let params: SessionParams = parse(&body)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let s = Session::new(id.clone(), params)?;
    app.store.save(&s).map_err(|e| ApiError::storage(e.to_string()))?;
    let active = s.problem.active_players().map_err(|e| ApiError::invalid_params("players", e.to_string()))?;
    let reply = json!({
        "id": id,
        "problem": s.problem,
        "active_players": active,
        "resolution": s.problem.resolution,
    });
    app.sessions.write().unwrap().insert(id, Arc::new(Mutex::new(s)));
    Ok((StatusCode::CREATED, Json(reply)).into_response())
}

async fn query(Extract(app): Extract<Arc<App>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = app.session(&id)?;
    let mut s = s.lock().unwrap();
    Ok(Json(state_json(s.state())))
}

async fn answer(Extract(app): Extract<Arc<App>>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let a: AnswerBody = parse(&body)?;
    let s = app.session(&id)?;
    let mut s = s.lock().unwrap();
    let fresh = s.answer(a)?;
    if fresh {
        if let Err(e) = app.store.save(&s) {
            s.rollback();
            return Err(ApiError::storage(e.to_string()));
        }
    }
    let mut v = state_json(s.state());
    v["duplicate"] = json!(!fresh);
    Ok(Json(v))
}

async fn result(Extract(app): Extract<Arc<App>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = app.session(&id)?;
    let mut s = s.lock().unwrap();
    match s.state() {
        State::Done { outcome } => Ok(Json(serde_json::to_value(outcome).expect("outcome serializes"))),
        State::Failed { .. } => Err(ApiError::finished()),
        State::AwaitingAnswer { .. } => Err(ApiError::not_finished()),
    }
}

async fn transcript(Extract(app): Extract<Arc<App>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = app.session(&id)?;
    let s = s.lock().unwrap();
    Ok(Json(json!({
        "id": s.id,
        "created_ms": s.created_ms,
        "params": s.params,
        "problem": s.problem,
        "transcript": s.transcript,
    })))
}
