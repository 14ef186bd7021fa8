//! Wire formats. Every document carries `"v": 1`. Nothing sent before a
//! session is complete names a stress value, a delta or the correct answer,
//! except the feedback on an already answered training trial.

use serde::{Deserialize, Serialize};
use stresslab::experiment::questionnaire::{Question, QuestionnaireAnswers};
use stresslab::experiment::{Answer, Mode, ResponseRecord, SessionStatus, TrialKind};

pub const API_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub v: u32,
    pub study_id: String,
    pub participant_id: String,
    pub mode: Mode,
    /// Required except in expert mode.
    #[serde(default)]
    pub size: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitResponse {
    pub v: u32,
    pub trial_index: u32,
    pub answer: Answer,
    pub confident: bool,
    pub response_time: f64,
    #[serde(default)]
    pub client_submitted_ms: Option<u64>,
}

impl SubmitResponse {
    pub fn record(&self) -> ResponseRecord {
        ResponseRecord {
            trial_index: self.trial_index,
            answer: self.answer,
            confident: self.confident,
            response_time: self.response_time,
            client_submitted_ms: self.client_submitted_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitQuestionnaire {
    pub v: u32,
    pub answers: QuestionnaireAnswers,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Image {
    pub src: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialPayload {
    pub trial_index: u32,
    pub kind: TrialKind,
    pub size: usize,
    /// 1-based position within the current phase.
    pub position: usize,
    pub phase_length: usize,
    pub left: Image,
    pub right: Image,
    pub answers: [Answer; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub was_correct: bool,
    pub expected_answer: Answer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateResult {
    pub passed: bool,
    pub correct_count: usize,
    pub required: usize,
    pub of: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub main_trials: usize,
    pub main_correct: usize,
    pub questionnaire_submitted: bool,
}

/// What a client needs to render the session right now.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub v: u32,
    pub session_id: String,
    pub status: SessionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<TrialPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub questionnaire: Option<Vec<Question>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmitReply {
    #[serde(flatten)]
    pub view: SessionView,
    pub accepted_trial: u32,
    /// True when this exact response had been stored by an earlier request.
    pub replayed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<Feedback>,
}
