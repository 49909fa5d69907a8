//! Annotation server: hands out the most useful unlabeled sentence, takes
//! the annotator's label, and keeps the session on disk.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use verbsense::{Database, Error, SamplerConfig, SamplingState, SenseEntry, SentenceExample, Sim, Thesaurus};

/// What is written to the session file after every label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionFile {
    /// (sentence id, sense id) in commit order.
    pub labeled: Vec<(String, String)>,
    /// Ids still waiting for a label.
    pub pool: Vec<String>,
    pub database: Vec<SenseEntry>,
}

pub struct Session {
    state: SamplingState,
    file: Option<PathBuf>,
    /// Cached suggestion, cleared by every commit.
    next: Option<usize>,
}

impl Session {
    pub fn new(state: SamplingState, file: Option<PathBuf>) -> Self {
        Session {
            state,
            file,
            next: None,
        }
    }

    /// Resumes from `file` when it exists, otherwise starts fresh from the
    /// seeds.
    pub fn open(
        thesaurus: Arc<Thesaurus>,
        seeds: Database,
        corpus: Vec<SentenceExample>,
        config: SamplerConfig,
        file: Option<PathBuf>,
    ) -> verbsense::Result<Self> {
        let saved = match &file {
            Some(path) if path.exists() => Some(read_session(path)?),
            _ => None,
        };
        let state = match saved {
            None => SamplingState::new(thesaurus, seeds, corpus, config)?,
            Some(saved) => {
                let db = Database::from_entries(saved.database)?;
                let state = SamplingState::restore(thesaurus, db, corpus, saved.labeled, config)?;
                let pool: Vec<&str> = state
                    .pool()
                    .into_iter()
                    .map(|x| state.corpus()[x].id.as_str())
                    .collect();
                if pool != saved.pool {
                    return Err(Error::Config(
                        "session file pool does not match the corpus minus its labeled sentences".into(),
                    ));
                }
                tracing::info!(labeled = state.labeled().len(), "resumed session");
                state
            }
        };
        Ok(Session::new(state, file))
    }

    pub fn state(&self) -> &SamplingState {
        &self.state
    }

    pub fn snapshot(&self) -> SessionFile {
        let st = &self.state;
        SessionFile {
            labeled: st
                .labeled()
                .iter()
                .map(|(x, s)| (st.corpus()[*x].id.clone(), s.clone()))
                .collect(),
            pool: st.pool().into_iter().map(|x| st.corpus()[x].id.clone()).collect(),
            database: st.database().entries().cloned().collect(),
        }
    }

    fn persist(&self) -> verbsense::Result<()> {
        let Some(path) = &self.file else {
            return Ok(());
        };
        let text = serde_json::to_string(&self.snapshot())?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn next(&mut self) -> verbsense::Result<NextPayload> {
        if self.state.pool_len() == 0 {
            return Ok(NextPayload::complete());
        }
        let x = match self.next {
            Some(x) => x,
            None => {
                let x = self.state.select_samples()?[0];
                self.next = Some(x);
                x
            }
        };
        Ok(self.payload(x))
    }

    fn payload(&self, x: usize) -> NextPayload {
        let st = &self.state;
        let sentence = &st.corpus()[x];
        let senses = st.database().senses(&sentence.verb).expect("validated");
        let ranking = st.ranking(x);
        NextPayload {
            complete: false,
            remaining: st.pool_len(),
            example: Some(ExampleView {
                id: sentence.id.clone(),
                verb: sentence.verb.clone(),
                complements: sentence
                    .complements
                    .iter()
                    .map(|c| (c.case().to_owned(), c.noun().to_owned()))
                    .collect(),
            }),
            candidates: ranking
                .interpretations
                .iter()
                .map(|i| Candidate {
                    sense_id: i.sense_id.clone(),
                    gloss: senses[i.sense_index].gloss.clone(),
                    score: i.score,
                    per_case_sim: i.per_case_sim.clone(),
                })
                .collect(),
            certainty: Some(st.certainty(x)),
            tuf: Some(st.tuf(x)),
            frame_mismatch: ranking.frame_mismatch,
        }
    }

    /// Stores a label, refreshes the cache and the session file.
    pub fn label(&mut self, example_id: &str, sense_id: &str) -> verbsense::Result<()> {
        let x = self
            .state
            .corpus()
            .iter()
            .position(|s| s.id == example_id)
            .ok_or_else(|| Error::UnknownExample(example_id.to_owned()))?;
        self.state.commit_batch(&[(x, sense_id.to_owned())])?;
        self.next = None;
        tracing::info!(example_id, sense_id, remaining = self.state.pool_len(), "labeled");
        self.persist()
    }

    pub fn summary(&self) -> StateView {
        let st = &self.state;
        StateView {
            total: st.corpus().len(),
            labeled: st.labeled().len(),
            remaining: st.pool_len(),
            complete: st.pool_len() == 0,
            last_labeled: self.snapshot().labeled.last().cloned(),
        }
    }
}

fn read_session(path: &Path) -> verbsense::Result<SessionFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExampleView {
    pub id: String,
    pub verb: String,
    pub complements: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Candidate {
    #[serde(rename = "sense")]
    pub sense_id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub gloss: String,
    pub score: f64,
    pub per_case_sim: IndexMap<String, Sim>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NextPayload {
    pub complete: bool,
    pub remaining: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleView>,
    pub candidates: Vec<Candidate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certainty: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuf: Option<f64>,
    pub frame_mismatch: bool,
}

impl NextPayload {
    fn complete() -> Self {
        NextPayload {
            complete: true,
            remaining: 0,
            example: None,
            candidates: Vec::new(),
            certainty: None,
            tuf: None,
            frame_mismatch: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateView {
    pub total: usize,
    pub labeled: usize,
    pub remaining: usize,
    pub complete: bool,
    pub last_labeled: Option<(String, String)>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct LabelRequest {
    pub example_id: String,
    pub sense_id: String,
}

pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UnknownExample(_) => StatusCode::NOT_FOUND,
            Error::NotInPool(_) => StatusCode::CONFLICT,
            Error::UnknownSense { .. } => StatusCode::BAD_REQUEST,
            Error::CaseNotInFrame { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            tracing::error!(error = %e, "request failed");
        }
        ApiError {
            status,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

pub type Shared = Arc<Mutex<Session>>;

/// Runs session work off the async threads; utility ranking is CPU-bound.
async fn with_session<T: Send + 'static>(
    shared: Shared,
    f: impl FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(move || {
        let mut session = shared.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
        f(&mut session)
    })
    .await
    .map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        message: e.to_string(),
    })?
}

async fn next(State(shared): State<Shared>) -> Result<Json<NextPayload>, ApiError> {
    with_session(shared, |s| Ok(s.next()?)).await.map(Json)
}

async fn label(State(shared): State<Shared>, Json(req): Json<LabelRequest>) -> Result<Json<NextPayload>, ApiError> {
    with_session(shared, move |s| {
        s.label(&req.example_id, &req.sense_id)?;
        Ok(s.next()?)
    })
    .await
    .map(Json)
}

async fn state(State(shared): State<Shared>) -> Result<Json<StateView>, ApiError> {
    with_session(shared, |s| Ok(s.summary())).await.map(Json)
}

pub fn router(shared: Shared) -> Router {
    Router::new()
        .route("/session/next", get(next))
        .route("/session/label", post(label))
        .route("/session/state", get(state))
        .with_state(shared)
}
