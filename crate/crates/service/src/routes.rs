use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use stresslab::experiment::log::SessionLog;
use stresslab::experiment::questionnaire::questions;
use stresslab::experiment::{
    schedule_session, Mode, SessionConfig, SessionStatus, StimulusPool, TrialKind, TrialPlan,
    GATE_PASS_MIN, TRAINING_TRIALS,
};
use stresslab::stimulus::corpus::STIMULUS_SIZES;
use stresslab::stimulus::Corpus;
use stresslab::svg::{render_svg, SvgStyle};

use crate::error::{Result, ServiceError};
use crate::export::export_study;
use crate::payload::*;
use crate::store::SessionStore;
use crate::tokens::{load_or_create_salt, DrawingTokens};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub corpus_dir: Option<PathBuf>,
}

pub struct Stimuli {
    corpus: Corpus,
    pool: StimulusPool,
    tokens: DrawingTokens,
}

pub struct AppState {
    pub store: SessionStore,
    stimuli: Option<Stimuli>,
}

impl AppState {
    /// Replays stored sessions and loads the corpus. A missing corpus is not
    /// fatal: sessions can still be exported, but none can be created.
    pub fn open(config: &ServiceConfig) -> Result<Self> {
        let store = SessionStore::open(&config.data_dir)?;
        let stimuli = match &config.corpus_dir {
            Some(dir) => match Corpus::open(dir) {
                Ok(corpus) => {
                    let salt = load_or_create_salt(&config.data_dir)?;
                    let tokens = DrawingTokens::new(salt, corpus.drawing_refs());
                    let pool = StimulusPool::from_corpus(&corpus);
                    Some(Stimuli { corpus, pool, tokens })
                }
                Err(e) => {
                    eprintln!("warning: no stimulus corpus at {}: {e}", dir.display());
                    None
                }
            },
            None => None,
        };
        Ok(Self { store, stimuli })
    }

    fn stimuli(&self) -> Result<&Stimuli> {
        self.stimuli
            .as_ref()
            .ok_or_else(|| ServiceError::NotFound("no stimulus corpus is loaded".into()))
    }

    fn trial_payload(&self, log: &SessionLog, plan: &TrialPlan) -> Result<TrialPayload> {
        let tokens = &self.stimuli()?.tokens;
        let image = |shown: &stresslab::experiment::Shown| {
            tokens
                .token(&shown.drawing)
                .map(|t| Image { src: format!("/drawings/{t}.svg") })
                .ok_or_else(|| ServiceError::NotFound("a scheduled drawing is missing from the corpus".into()))
        };
        let phase: Vec<&TrialPlan> = log.plans().iter().filter(|p| p.kind == plan.kind && p.size == plan.size).collect();
        let position = phase.iter().position(|p| p.trial_index == plan.trial_index).unwrap_or(0) + 1;
        Ok(TrialPayload {
            trial_index: plan.trial_index,
            kind: plan.kind,
            size: plan.size,
            position,
            phase_length: phase.len(),
            left: image(&plan.left)?,
            right: image(&plan.right)?,
            answers: [stresslab::experiment::Answer::Left, stresslab::experiment::Answer::Same, stresslab::experiment::Answer::Right],
        })
    }

    fn view(&self, log: &SessionLog) -> Result<SessionView> {
        let status = log.status();
        let trial = log.current_plan().map(|p| self.trial_payload(log, p)).transpose()?;
        let training = log.training_count();
        let gate = (log.header.config.mode.gives_feedback() && training > 0 && log.responses.len() >= training)
            .then(|| {
                let correct_count = log.responses[..training].iter().filter(|r| r.correct).count();
                GateResult {
                    passed: correct_count >= GATE_PASS_MIN,
                    correct_count,
                    required: GATE_PASS_MIN,
                    of: TRAINING_TRIALS,
                }
            });
        let complete = status == SessionStatus::Complete;
        let questionnaire = (complete && log.questionnaire.is_none()).then(questions);
        let summary = complete.then(|| {
            let main: Vec<_> = log.responses[training..].iter().collect();
            Summary {
                main_trials: main.len(),
                main_correct: main.iter().filter(|r| r.correct).count(),
                questionnaire_submitted: log.questionnaire.is_some(),
            }
        });
        Ok(SessionView {
            v: API_VERSION,
            session_id: log.header.session_id.clone(),
            status,
            trial,
            gate,
            questionnaire,
            summary,
        })
    }
}

type Shared = Arc<AppState>;

fn body<T>(payload: std::result::Result<Json<T>, JsonRejection>) -> Result<T> {
    payload
        .map(|Json(t)| t)
        .map_err(|e| ServiceError::BadRequest(e.body_text()))
}

fn check_version(v: u32) -> Result<()> {
    if v != API_VERSION {
        return Err(ServiceError::BadRequest(format!("unsupported version {v}, expected {API_VERSION}")));
    }
    Ok(())
}

async fn create_session(
    State(state): State<Shared>,
    payload: std::result::Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>)> {
    let req = body(payload)?;
    check_version(req.v)?;
    let participant_id = req.participant_id.trim().to_owned();
    if participant_id.is_empty() || participant_id.len() > 128 {
        return Err(ServiceError::BadRequest("participant_id must be 1-128 characters".into()));
    }
    let size = match (req.mode, req.size) {
        (Mode::Expert, size) => size.unwrap_or(0),
        (_, Some(size)) if STIMULUS_SIZES.contains(&size) => size,
        (_, Some(size)) => {
            return Err(ServiceError::BadRequest(format!("size must be one of {STIMULUS_SIZES:?}, got {size}")))
        }
        (_, None) => return Err(ServiceError::BadRequest("size is required".into())),
    };
    let config = SessionConfig {
        size,
        mode: req.mode,
        seed: req.seed.unwrap_or_else(rand::random),
        participant_id,
    };
    let stimuli = state.stimuli()?;
    for size in config.sizes() {
        stimuli.pool.require_size(size).map_err(|e| ServiceError::NotFound(e.to_string()))?;
    }
    let plans = schedule_session(&config, &stimuli.pool).map_err(|e| ServiceError::NotFound(e.to_string()))?;
    let session_id = state.store.create(&req.study_id, config, plans)?;
    let view = state.store.with_session(&session_id, |s| state.view(&s.log))??;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn current(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionView>> {
    let view = state.store.with_session(&id, |s| state.view(&s.log))??;
    Ok(Json(view))
}

async fn submit_response(
    State(state): State<Shared>,
    Path(id): Path<String>,
    payload: std::result::Result<Json<SubmitResponse>, JsonRejection>,
) -> Result<Json<SubmitReply>> {
    let req = body(payload)?;
    check_version(req.v)?;
    let submitted = state.store.submit(&id, req.record())?;
    let reply = state.store.with_session(&id, |s| -> Result<SubmitReply> {
        let plan = s.log.plans().iter().find(|p| p.trial_index == submitted.trial_index);
        let feedback = plan.filter(|p| p.feedback && p.kind == TrialKind::Training).map(|p| Feedback {
            was_correct: submitted.correct,
            expected_answer: p.correct_answer,
        });
        Ok(SubmitReply {
            view: state.view(&s.log)?,
            accepted_trial: submitted.trial_index,
            replayed: submitted.replayed,
            feedback,
        })
    })??;
    Ok(Json(reply))
}

async fn submit_questionnaire(
    State(state): State<Shared>,
    Path(id): Path<String>,
    payload: std::result::Result<Json<SubmitQuestionnaire>, JsonRejection>,
) -> Result<Json<SessionView>> {
    let req = body(payload)?;
    check_version(req.v)?;
    state.store.submit_questionnaire(&id, req.answers)?;
    let view = state.store.with_session(&id, |s| state.view(&s.log))??;
    Ok(Json(view))
}

async fn export(State(state): State<Shared>, Path(study): Path<String>) -> Result<impl IntoResponse> {
    let archive = export_study(state.store.data_dir(), &study)?;
    let disposition = format!("attachment; filename=\"{study}.tar\"");
    Ok((
        [(header::CONTENT_TYPE, "application/x-tar".to_owned()), (header::CONTENT_DISPOSITION, disposition)],
        archive,
    ))
}

async fn drawing_svg(State(state): State<Shared>, Path(file): Path<String>) -> Result<impl IntoResponse> {
    let stimuli = state.stimuli()?;
    let id = file
        .strip_suffix(".svg")
        .and_then(|token| stimuli.tokens.resolve(token))
        .ok_or_else(|| ServiceError::NotFound(format!("no drawing {file:?}")))?;
    let drawing = stimuli.corpus.load(&id)?;
    Ok((
        [(header::CONTENT_TYPE, "image/svg+xml"), (header::CACHE_CONTROL, "private, max-age=3600")],
        render_svg(&drawing, &SvgStyle::default()),
    ))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/current", get(current))
        .route("/sessions/{id}/responses", post(submit_response))
        .route("/sessions/{id}/questionnaire", post(submit_questionnaire))
        .route("/studies/{id}/export", get(export))
        .route("/drawings/{file}", get(drawing_svg))
        .with_state(state)
}
