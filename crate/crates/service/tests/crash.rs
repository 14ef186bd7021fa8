//! Crash recovery: a log cut at any byte replays to exactly the records whose
//! lines were complete, and the session continues from there.

use std::fs;
use std::path::Path;

use stresslab::experiment::questionnaire::QuestionnaireAnswers;
use stresslab::experiment::{schedule_session, Answer, Mode, ResponseRecord, SessionConfig, StimulusPool};
use stresslab_service::SessionStore;

fn answers() -> QuestionnaireAnswers {
    QuestionnaireAnswers {
        strategy: "edge lengths".into(),
        overall_confidence: "Very confident".into(),
        difficulty: "Easy".into(),
        familiarity: "Very familiar".into(),
        age_range: "35-44".into(),
        gender: "Female".into(),
    }
}

fn record(trial_index: u32, answer: Answer) -> ResponseRecord {
    ResponseRecord { trial_index, answer, confident: trial_index % 2 == 0, response_time: 0.75 + trial_index as f64, client_submitted_ms: None }
}

/// Runs a full trained session through the store and returns its log text.
fn full_log(dir: &Path) -> (String, String) {
    let store = SessionStore::open(dir).unwrap();
    let config = SessionConfig { size: 10, mode: Mode::TrainedFeedback, seed: 99, participant_id: "p".into() };
    let plans = schedule_session(&config, &StimulusPool::synthetic(&[10])).unwrap();
    let id = store.create("crash", config, plans.clone()).unwrap();
    for plan in &plans {
        store.submit(&id, record(plan.trial_index, plan.correct_answer)).unwrap();
    }
    store.submit_questionnaire(&id, answers()).unwrap();
    let path = dir.join("studies/crash").join(format!("{id}.jsonl"));
    (id, fs::read_to_string(path).unwrap())
}

#[test]
fn every_truncation_point_recovers_the_durable_prefix() {
    let origin = tempfile::tempdir().unwrap();
    let (id, text) = full_log(origin.path());
    let newlines: Vec<usize> = text.match_indices('\n').map(|(i, _)| i + 1).collect();
    assert_eq!(newlines.len(), 1 + 54 + 1);

    let dir = tempfile::tempdir().unwrap();
    let study = dir.path().join("studies/crash");
    let path = study.join(format!("{id}.jsonl"));
    for cut in 0..=text.len() {
        fs::create_dir_all(&study).unwrap();
        fs::write(&path, &text.as_bytes()[..cut]).unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let complete_lines = newlines.iter().filter(|&&n| n <= cut).count();
        if complete_lines == 0 {
            assert!(!path.exists(), "cut {cut}: unacknowledged session left behind");
            assert!(store.with_session(&id, |_| ()).is_err());
            continue;
        }
        let durable = newlines[complete_lines - 1];
        assert_eq!(fs::metadata(&path).unwrap().len() as usize, durable, "cut {cut}");
        let (responses, has_questionnaire) =
            store.with_session(&id, |s| (s.log.responses.len(), s.log.questionnaire.is_some())).unwrap();
        assert_eq!(responses, (complete_lines - 1).min(54), "cut {cut}");
        assert_eq!(has_questionnaire, complete_lines == 56, "cut {cut}");
    }
}

#[test]
fn sessions_continue_after_a_torn_write() {
    let origin = tempfile::tempdir().unwrap();
    let (id, text) = full_log(origin.path());
    let newlines: Vec<usize> = text.match_indices('\n').map(|(i, _)| i + 1).collect();

    for done in [0usize, 8, 9, 30, 53] {
        let dir = tempfile::tempdir().unwrap();
        let study = dir.path().join("studies/crash");
        fs::create_dir_all(&study).unwrap();
        let path = study.join(format!("{id}.jsonl"));
        // Half of the next line made it to disk.
        let cut = (newlines[done] + newlines[done + 1]) / 2;
        fs::write(&path, &text.as_bytes()[..cut]).unwrap();

        let store = SessionStore::open(dir.path()).unwrap();
        let plans = store.with_session(&id, |s| s.log.plans().to_vec()).unwrap();
        for plan in &plans[done..] {
            let reply = store.submit(&id, record(plan.trial_index, plan.correct_answer)).unwrap();
            assert!(!reply.replayed);
        }
        store.submit_questionnaire(&id, answers()).unwrap();

        let resumed = fs::read_to_string(&path).unwrap();
        let strip = |t: &str| -> Vec<serde_json::Value> {
            t.lines()
                .map(|l| {
                    let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                    v.as_object_mut().unwrap().remove("server_received_ms");
                    v
                })
                .collect()
        };
        assert_eq!(strip(&resumed), strip(&text), "resumed after {done}");
    }
}

#[test]
fn corrupt_interior_lines_fail_loudly() {
    let origin = tempfile::tempdir().unwrap();
    let (id, text) = full_log(origin.path());
    let mut lines: Vec<&str> = text.lines().collect();
    lines[3] = "{\"type\":\"response\",";
    let dir = tempfile::tempdir().unwrap();
    let study = dir.path().join("studies/crash");
    fs::create_dir_all(&study).unwrap();
    fs::write(study.join(format!("{id}.jsonl")), lines.join("\n") + "\n").unwrap();
    assert!(SessionStore::open(dir.path()).is_err());
}
