#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt as _;
use serde_json::{json, Value};
use stresslab::experiment::{Answer, SessionLog};
use stresslab::stimulus::{build_corpus, CorpusOptions};
use stresslab_service::{router, AppState, ServiceConfig};
use tower::ServiceExt as _;

/// A size-10 corpus shared by every test in the binary.
pub fn corpus_dir() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap().keep();
        build_corpus(&dir, &CorpusOptions::new(vec![10], 42)).unwrap();
        dir
    })
}

pub struct App {
    pub state: Arc<AppState>,
    pub router: Router,
}

impl App {
    pub fn open(data_dir: &Path) -> Self {
        Self::with_corpus(data_dir, Some(corpus_dir().to_path_buf()))
    }

    pub fn with_corpus(data_dir: &Path, corpus_dir: Option<PathBuf>) -> Self {
        let config = ServiceConfig { data_dir: data_dir.to_path_buf(), corpus_dir };
        let state = Arc::new(AppState::open(&config).unwrap());
        Self { router: router(state.clone()), state }
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
        let request = Request::builder().method(method).uri(uri);
        let request = match body {
            Some(b) => request
                .header("content-type", "application/json")
                .body(Body::from(b.to_string())),
            None => request.body(Body::empty()),
        }
        .unwrap();
        let response = self.router.clone().oneshot(request).await.unwrap();
        let status = response.status();
        let bytes = response.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, bytes)
    }

    pub async fn json(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, bytes) = self.call(method, uri, body).await;
        let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
        (status, value)
    }

    pub async fn create(&self, study: &str, participant: &str, mode: &str, seed: u64) -> (StatusCode, Value) {
        let body = json!({"v": 1, "study_id": study, "participant_id": participant, "mode": mode, "size": 10, "seed": seed});
        self.json(Method::POST, "/sessions", Some(body)).await
    }

    pub fn log(&self, session: &str) -> SessionLog {
        self.state.store.with_session(session, |s| s.log.clone()).unwrap()
    }

    /// The right answer for the session's current trial, read server side.
    pub fn expected(&self, session: &str) -> Answer {
        self.log(session).current_plan().unwrap().correct_answer
    }

    pub async fn answer(&self, session: &str, trial_index: u64, answer: Answer) -> (StatusCode, Value) {
        let body = json!({"v": 1, "trial_index": trial_index, "answer": answer, "confident": true, "response_time": 1.5});
        self.json(Method::POST, &format!("/sessions/{session}/responses"), Some(body)).await
    }
}

pub fn wrong(answer: Answer) -> Answer {
    match answer {
        Answer::Left => Answer::Right,
        _ => Answer::Left,
    }
}

pub fn questionnaire() -> Value {
    json!({"v": 1, "answers": {
        "strategy": "looked for even edge lengths",
        "overall_confidence": "Fairly confident",
        "difficulty": "Difficult",
        "familiarity": "Slightly familiar",
        "age_range": "25-34",
        "gender": "Prefer not to say"
    }})
}
