//! Append-only JSONL session logs.
//!
//! The first line is a header carrying the session config and the fixed
//! schedule; each later line is one graded response or the questionnaire.
//! Only newline-terminated lines are durable: a torn final line left by an
//! interrupted write is ignored on replay.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::questionnaire::QuestionnaireAnswers;
use super::{grade, training_gate, Mode, ResponseRecord, SessionConfig, TrialKind, TrialPlan};
use crate::error::{Error, IoContext, Result};

pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionHeader {
    pub v: u32,
    pub session_id: String,
    pub study_id: String,
    pub config: SessionConfig,
    pub plans: Vec<TrialPlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedResponse {
    pub v: u32,
    #[serde(flatten)]
    pub record: ResponseRecord,
    pub correct: bool,
    pub server_received_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedQuestionnaire {
    pub v: u32,
    pub answers: QuestionnaireAnswers,
    pub server_received_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogLine {
    Header(SessionHeader),
    Response(LoggedResponse),
    Questionnaire(LoggedQuestionnaire),
}

impl LogLine {
    /// One JSON document followed by a newline.
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("log lines always serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SessionStatus {
    InTraining,
    FailedGate,
    InMain,
    Complete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub header: SessionHeader,
    pub responses: Vec<LoggedResponse>,
    pub questionnaire: Option<LoggedQuestionnaire>,
}

impl SessionLog {
    pub fn new(header: SessionHeader) -> Self {
        Self { header, responses: Vec::new(), questionnaire: None }
    }

    pub fn participant(&self) -> &str {
        &self.header.config.participant_id
    }

    pub fn plans(&self) -> &[TrialPlan] {
        &self.header.plans
    }

    /// Index into `plans` of the next trial awaiting a response.
    pub fn cursor(&self) -> usize {
        self.responses.len()
    }

    pub fn current_plan(&self) -> Option<&TrialPlan> {
        match self.status() {
            SessionStatus::InTraining | SessionStatus::InMain => self.header.plans.get(self.cursor()),
            _ => None,
        }
    }

    pub fn training_count(&self) -> usize {
        self.header.plans.iter().filter(|p| p.kind == TrialKind::Training).count()
    }

    pub fn status(&self) -> SessionStatus {
        let done = self.responses.len();
        let training = self.training_count();
        if done < training {
            return SessionStatus::InTraining;
        }
        if self.header.config.mode == Mode::TrainedFeedback && training > 0 {
            let graded: Vec<bool> = self.responses[..training].iter().map(|r| r.correct).collect();
            if !training_gate(&graded).unwrap_or(false) {
                return SessionStatus::FailedGate;
            }
        }
        if done < self.header.plans.len() {
            SessionStatus::InMain
        } else {
            SessionStatus::Complete
        }
    }

    /// Grades `record` against the cursor trial and appends it.
    pub fn accept(&mut self, record: ResponseRecord, server_received_ms: u64) -> Result<&LoggedResponse> {
        let plan = self
            .current_plan()
            .ok_or_else(|| Error::Log(format!("session {} takes no more responses", self.header.session_id)))?;
        record.validate()?;
        let correct = grade(plan, &record)?;
        self.responses.push(LoggedResponse { v: LOG_VERSION, record, correct, server_received_ms });
        Ok(self.responses.last().unwrap())
    }

    fn apply(&mut self, line: LogLine) -> Result<()> {
        match line {
            LogLine::Header(_) => Err(Error::Log("second header line".into())),
            LogLine::Response(r) => {
                let record = r.record.clone();
                let stored = self.accept(record, r.server_received_ms)?;
                if stored.correct != r.correct {
                    return Err(Error::Log(format!(
                        "trial {} grade disagrees with its plan",
                        r.record.trial_index
                    )));
                }
                Ok(())
            }
            LogLine::Questionnaire(q) => {
                if self.questionnaire.is_some() {
                    return Err(Error::Log("questionnaire recorded twice".into()));
                }
                if self.status() != SessionStatus::Complete {
                    return Err(Error::Log("questionnaire before the last trial".into()));
                }
                self.questionnaire = Some(q);
                Ok(())
            }
        }
    }

    /// Replays a log. Returns the session and the byte length of its durable
    /// prefix (everything up to the last newline).
    pub fn parse(text: &str) -> Result<(Self, usize)> {
        let durable = text.rfind('\n').map_or(0, |i| i + 1);
        let mut lines = text[..durable].lines().enumerate();
        let (_, first) = lines.next().ok_or_else(|| Error::Log("missing header line".into()))?;
        let LogLine::Header(header) = serde_json::from_str(first)? else {
            return Err(Error::Log("first line is not a header".into()));
        };
        let mut log = Self::new(header);
        for (k, line) in lines {
            let entry: LogLine = serde_json::from_str(line)
                .map_err(|e| Error::Log(format!("line {}: {e}", k + 1)))?;
            log.apply(entry)?;
        }
        Ok((log, durable))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).at(path)?;
        Self::parse(&text).map(|(log, _)| log)
    }

    pub fn lines(&self) -> Vec<LogLine> {
        let mut out = vec![LogLine::Header(self.header.clone())];
        out.extend(self.responses.iter().cloned().map(LogLine::Response));
        out.extend(self.questionnaire.clone().map(LogLine::Questionnaire));
        out
    }

    pub fn to_text(&self) -> String {
        self.lines().iter().map(LogLine::to_line).collect()
    }
}

/// Reads every `*.jsonl` log in `dir`, sorted by file name.
pub fn read_logs(dir: &Path) -> Result<Vec<SessionLog>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).at(dir)? {
        let path = entry.at(dir)?.path();
        if path.extension().is_some_and(|e| e == "jsonl") {
            paths.push(path);
        }
    }
    paths.sort();
    paths.iter().map(|p| SessionLog::read(p)).collect()
}
