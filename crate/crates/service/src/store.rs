//! Durable session state: one append-only JSONL log per session, replayed
//! on startup. Every state change is fsynced before it becomes visible.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use stresslab::experiment::log::{LogLine, LoggedQuestionnaire, LOG_VERSION};
use stresslab::experiment::questionnaire::QuestionnaireAnswers;
use stresslab::experiment::{ResponseRecord, SessionConfig, SessionHeader, SessionLog, SessionStatus, TrialPlan};

use crate::error::{Result, ServiceError};

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// Study ids become directory names, so they are kept to a safe alphabet.
pub fn valid_study_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 64
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

pub fn study_dir(data_dir: &Path, study_id: &str) -> PathBuf {
    data_dir.join("studies").join(study_id)
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

fn sync_dir(dir: &Path) -> Result<()> {
    File::open(dir)
        .and_then(|d| d.sync_all())
        .map_err(ServiceError::io(format!("sync {}", dir.display())))
}

#[derive(Debug)]
pub struct Session {
    pub log: SessionLog,
    path: PathBuf,
}

impl Session {
    pub fn id(&self) -> &str {
        &self.log.header.session_id
    }

    fn append(&self, line: &LogLine) -> Result<()> {
        let context = format!("append {}", self.path.display());
        let mut file = OpenOptions::new()
            .append(true)
            .open(&self.path)
            .map_err(ServiceError::io(&context))?;
        file.write_all(line.to_line().as_bytes())
            .and_then(|()| file.sync_data())
            .map_err(ServiceError::io(context))
    }
}

/// Result of submitting a response.
#[derive(Debug, Clone, PartialEq)]
pub struct Submitted {
    pub trial_index: u32,
    pub correct: bool,
    /// True when the same response had already been stored.
    pub replayed: bool,
}

#[derive(Debug, Default)]
pub struct SessionStore {
    data_dir: PathBuf,
    sessions: Mutex<BTreeMap<String, Arc<Mutex<Session>>>>,
    participants: Mutex<BTreeSet<(String, String)>>,
}

impl SessionStore {
    /// Replays every log under `data_dir`. A torn final line is cut off; a
    /// log without a complete header never acknowledged its session and is
    /// removed.
    pub fn open(data_dir: impl Into<PathBuf>) -> Result<Self> {
        let data_dir = data_dir.into();
        let studies = data_dir.join("studies");
        fs::create_dir_all(&studies).map_err(ServiceError::io(format!("create {}", studies.display())))?;
        let store = Self { data_dir, ..Self::default() };

        let mut paths = Vec::new();
        for study in fs::read_dir(&studies).map_err(ServiceError::io("list studies"))? {
            let study = study.map_err(ServiceError::io("list studies"))?.path();
            if !study.is_dir() {
                continue;
            }
            for entry in fs::read_dir(&study).map_err(ServiceError::io("list sessions"))? {
                let path = entry.map_err(ServiceError::io("list sessions"))?.path();
                if path.extension().is_some_and(|e| e == "jsonl") {
                    paths.push(path);
                }
            }
        }
        paths.sort();

        let mut sessions = lock(&store.sessions);
        let mut participants = lock(&store.participants);
        for path in paths {
            let Some(log) = recover(&path)? else { continue };
            participants.insert((log.header.study_id.clone(), log.participant().to_owned()));
            let id = log.header.session_id.clone();
            sessions.insert(id, Arc::new(Mutex::new(Session { log, path })));
        }
        drop(sessions);
        drop(participants);
        Ok(store)
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }

    /// Writes the header of a new session. Fails with a conflict when the
    /// participant already has a session in this study.
    pub fn create(&self, study_id: &str, config: SessionConfig, plans: Vec<TrialPlan>) -> Result<String> {
        if !valid_study_id(study_id) {
            return Err(ServiceError::BadRequest(format!(
                "study_id {study_id:?} must be 1-64 characters of [A-Za-z0-9_-]"
            )));
        }
        let mut participants = lock(&self.participants);
        let key = (study_id.to_owned(), config.participant_id.clone());
        if participants.contains(&key) {
            return Err(ServiceError::Conflict(format!(
                "participant {:?} already has a session in study {study_id:?}",
                config.participant_id
            )));
        }

        let session_id = uuid::Uuid::new_v4().simple().to_string();
        let header = SessionHeader {
            v: LOG_VERSION,
            session_id: session_id.clone(),
            study_id: study_id.to_owned(),
            config,
            plans,
        };
        let dir = study_dir(&self.data_dir, study_id);
        fs::create_dir_all(&dir).map_err(ServiceError::io(format!("create {}", dir.display())))?;
        let path = dir.join(format!("{session_id}.jsonl"));
        let line = LogLine::Header(header.clone()).to_line();
        let written = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .and_then(|mut f| f.write_all(line.as_bytes()).and_then(|()| f.sync_all()));
        if let Err(e) = written {
            let _ = fs::remove_file(&path);
            return Err(ServiceError::io(format!("create {}", path.display()))(e));
        }
        sync_dir(&dir)?;

        participants.insert(key);
        let session = Session { log: SessionLog::new(header), path };
        lock(&self.sessions).insert(session_id.clone(), Arc::new(Mutex::new(session)));
        Ok(session_id)
    }

    fn slot(&self, session_id: &str) -> Result<Arc<Mutex<Session>>> {
        lock(&self.sessions)
            .get(session_id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(format!("no session {session_id:?}")))
    }

    /// Runs `f` with the session locked.
    pub fn with_session<R>(&self, session_id: &str, f: impl FnOnce(&Session) -> R) -> Result<R> {
        let slot = self.slot(session_id)?;
        let session = lock(&slot);
        Ok(f(&session))
    }

    /// Stores a response for the current trial. Resubmitting an already
    /// stored response is acknowledged without writing.
    pub fn submit(&self, session_id: &str, record: ResponseRecord) -> Result<Submitted> {
        let slot = self.slot(session_id)?;
        let mut session = lock(&slot);
        let log = &session.log;

        if let Some(stored) = log.responses.iter().find(|r| r.record.trial_index == record.trial_index) {
            if same_response(&stored.record, &record) {
                return Ok(Submitted { trial_index: record.trial_index, correct: stored.correct, replayed: true });
            }
            return Err(ServiceError::Conflict(format!(
                "trial {} already has a different response",
                record.trial_index
            )));
        }
        match log.status() {
            SessionStatus::FailedGate => {
                return Err(ServiceError::Gone("session ended at the training gate".into()))
            }
            SessionStatus::Complete => return Err(ServiceError::Gone("session already complete".into())),
            SessionStatus::InTraining | SessionStatus::InMain => {}
        }
        let expected = log.current_plan().map(|p| p.trial_index);
        if expected != Some(record.trial_index) {
            return Err(ServiceError::Conflict(format!(
                "expected trial {}, got {}",
                expected.unwrap_or(0),
                record.trial_index
            )));
        }
        record.validate().map_err(|e| ServiceError::BadRequest(e.to_string()))?;

        let mut next = log.clone();
        let stored = next.accept(record, now_ms())?.clone();
        session.append(&LogLine::Response(stored.clone()))?;
        session.log = next;
        Ok(Submitted { trial_index: stored.record.trial_index, correct: stored.correct, replayed: false })
    }

    /// Stores the questionnaire of a completed session. Returns false when
    /// the identical answers were already stored.
    pub fn submit_questionnaire(&self, session_id: &str, answers: QuestionnaireAnswers) -> Result<bool> {
        let slot = self.slot(session_id)?;
        let mut session = lock(&slot);
        match session.log.status() {
            SessionStatus::FailedGate => {
                return Err(ServiceError::Gone("session ended at the training gate".into()))
            }
            SessionStatus::InTraining | SessionStatus::InMain => {
                return Err(ServiceError::Conflict("questionnaire comes after the last trial".into()))
            }
            SessionStatus::Complete => {}
        }
        if let Some(stored) = &session.log.questionnaire {
            if stored.answers == answers {
                return Ok(false);
            }
            return Err(ServiceError::Conflict("questionnaire already submitted".into()));
        }
        answers.validate().map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        let entry = LoggedQuestionnaire { v: LOG_VERSION, answers, server_received_ms: now_ms() };
        session.append(&LogLine::Questionnaire(entry.clone()))?;
        session.log.questionnaire = Some(entry);
        Ok(true)
    }
}

fn same_response(a: &ResponseRecord, b: &ResponseRecord) -> bool {
    a.trial_index == b.trial_index
        && a.answer == b.answer
        && a.confident == b.confident
        && a.response_time == b.response_time
}

/// Replays one log file, trimming a torn tail on disk.
fn recover(path: &Path) -> Result<Option<SessionLog>> {
    let bytes = fs::read(path).map_err(ServiceError::io(format!("read {}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes);
    let durable = text.rfind('\n').map_or(0, |i| i + 1);
    if durable == 0 {
        fs::remove_file(path).map_err(ServiceError::io(format!("remove {}", path.display())))?;
        return Ok(None);
    }
    let (log, durable) = SessionLog::parse(&text)
        .map_err(|e| ServiceError::Core(stresslab::Error::Log(format!("{}: {e}", path.display()))))?;
    if durable < bytes.len() {
        let file = OpenOptions::new()
            .write(true)
            .open(path)
            .map_err(ServiceError::io(format!("open {}", path.display())))?;
        file.set_len(durable as u64)
            .and_then(|()| file.sync_all())
            .map_err(ServiceError::io(format!("truncate {}", path.display())))?;
    }
    Ok(Some(log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use stresslab::experiment::{schedule_session, Answer, Mode, StimulusPool};

    fn config(participant: &str) -> (SessionConfig, Vec<TrialPlan>) {
        let config = SessionConfig { size: 10, mode: Mode::Untrained, seed: 1, participant_id: participant.into() };
        let plans = schedule_session(&config, &StimulusPool::synthetic(&[10])).unwrap();
        (config, plans)
    }

    #[test]
    fn study_ids_are_path_safe() {
        assert!(valid_study_id("pilot_2-b"));
        for bad in ["", "a/b", "..", "a b", &"x".repeat(65)] {
            assert!(!valid_study_id(bad), "{bad:?}");
        }
    }

    #[test]
    fn participants_are_unique_per_study() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let (c, p) = config("ann");
        store.create("s", c.clone(), p.clone()).unwrap();
        assert!(matches!(store.create("s", c.clone(), p.clone()), Err(ServiceError::Conflict(_))));
        store.create("t", c, p).unwrap();
    }

    #[test]
    fn replayed_submission_does_not_write() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let (c, p) = config("ann");
        let id = store.create("s", c, p).unwrap();
        let record = ResponseRecord { trial_index: 1, answer: Answer::Same, confident: false, response_time: 2.0, client_submitted_ms: Some(5) };
        assert!(!store.submit(&id, record.clone()).unwrap().replayed);
        let path = dir.path().join("studies/s").join(format!("{id}.jsonl"));
        let before = fs::read(&path).unwrap();
        assert!(store.submit(&id, record).unwrap().replayed);
        assert_eq!(fs::read(&path).unwrap(), before);
    }
}
