use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use stresslab::experiment::{aggregate, replace_outliers, schedule_session, Mode, ResponseRecord, SessionConfig, SessionLog, StimulusPool, TrialKind, DEFAULT_OUTLIER_SECONDS};
use stresslab::quality::MetricReport;
use stresslab_service::SessionStore;

fn stresslab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stresslab"))
        .args(args)
        .current_dir(dir)
        .env_remove("STRESSLAB_SEED")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = stresslab(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn usage_and_runtime_errors_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stresslab(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(stresslab(dir.path(), &["score"]).status.code(), Some(2));
    assert_eq!(stresslab(dir.path(), &["gen-graphs", "--edge-probability", "1.5"]).status.code(), Some(2));
    let missing = stresslab(dir.path(), &["score", "no-such-corpus"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: "));
    assert!(stresslab(dir.path(), &["--help"]).status.success());
}

#[test]
fn generation_and_scoring_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-stimuli", "--sizes", "10", "--seed", "42", "--out", "corpus", "--jobs", "1"]);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("corpus/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["drawings"].as_array().unwrap().len(), 135);

    ok(d, &["score", "corpus", "--out", "a.jsonl", "--jobs", "1"]);
    ok(d, &["score", "corpus", "--out", "b.jsonl", "--jobs", "2"]);
    let a = fs::read(d.join("a.jsonl")).unwrap();
    assert_eq!(a, fs::read(d.join("b.jsonl")).unwrap());
    let rows: Vec<MetricReport> = String::from_utf8(a).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 135);
    assert!(rows.iter().all(|r| (r.ksm + r.kruskal_stress - 1.0).abs() < 1e-12));

    ok(d, &["correlate", "a.jsonl", "--out", "c1.json"]);
    ok(d, &["correlate", "corpus", "--out", "c2.json"]);
    assert_eq!(fs::read(d.join("c1.json")).unwrap(), fs::read(d.join("c2.json")).unwrap());
    let matrix: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("c1.json")).unwrap()).unwrap();
    assert_eq!(matrix["metrics"][0], "ksm");
    assert_eq!(matrix["pearson"].as_array().unwrap().len(), 5);
    assert_eq!(stresslab(d, &["correlate", "a.jsonl", "--metrics", "ksm,wobble"]).status.code(), Some(1));

    for run in ["g1", "g2"] {
        ok(d, &["--seed", "3", "gen-graphs", "--sizes", "10,25", "--out", run]);
    }
    for file in ["manifest.json", "10/g0.json", "25/g4.json"] {
        assert_eq!(fs::read(d.join("g1").join(file)).unwrap(), fs::read(d.join("g2").join(file)).unwrap());
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |out: &str, seed: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_stresslab"))
            .args(["schedule", "--mode", "trained-feedback", "--out", out])
            .env("STRESSLAB_SEED", seed)
            .current_dir(d)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read_to_string(d.join(out)).unwrap()
    };
    let a = run("a.json", "17");
    assert_eq!(a, run("b.json", "17"));
    assert_ne!(a, run("c.json", "18"));
    let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(parsed["config"]["seed"], 17);
    assert_eq!(parsed["plans"].as_array().unwrap().len(), 54);

    let flag = ok(d, &["--seed", "17", "schedule", "--mode", "trained-feedback", "--out", "d.json"]);
    assert!(flag.contains("seed 17"));
    assert_eq!(a, fs::read_to_string(d.join("d.json")).unwrap());
    let unseeded = ok(d, &["schedule", "--out", "e.json"]);
    assert!(unseeded.contains("no seed given"));
}

/// Writes a study of untrained sessions through the service store. Participant
/// `k` answers correctly when `(trial + k) % 3 != 0` and takes 250 s on its
/// 20th trial.
fn write_study(data: &Path, participants: usize) -> Vec<SessionLog> {
    let store = SessionStore::open(data).unwrap();
    let pool = StimulusPool::synthetic(&[10]);
    let mut ids = Vec::new();
    for k in 0..participants {
        let config = SessionConfig { size: 10, mode: Mode::Untrained, seed: k as u64, participant_id: format!("p{k}") };
        let plans = schedule_session(&config, &pool).unwrap();
        let id = store.create("study", config, plans.clone()).unwrap();
        for plan in &plans {
            let t = plan.trial_index as usize;
            let answer = if (t + k) % 3 != 0 { plan.correct_answer } else { stresslab::experiment::Answer::Same };
            let time = if t == 20 { 250.0 } else { 1.0 + (t % 7) as f64 };
            let record = ResponseRecord { trial_index: plan.trial_index, answer, confident: t % 2 == 0, response_time: time, client_submitted_ms: None };
            store.submit(&id, record).unwrap();
        }
        ids.push(id);
    }
    ids.iter().map(|id| store.with_session(id, |s| s.log.clone()).unwrap()).collect()
}

#[test]
fn aggregate_matches_the_in_process_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut logs = write_study(&d.join("data"), 4);
    logs.sort_by(|a, b| a.header.session_id.cmp(&b.header.session_id));

    let summary = ok(d, &["aggregate", "data/studies/study", "--group", "trained", "--out", "agg.csv", "--audit", "audit.csv"]);
    assert!(summary.contains("4 participants"));
    let (cleaned, audit) = replace_outliers(&logs, DEFAULT_OUTLIER_SECONDS).unwrap();
    assert_eq!(audit.len(), 4);
    let expected = aggregate("trained", &cleaned).unwrap().to_csv().unwrap();
    assert_eq!(fs::read_to_string(d.join("agg.csv")).unwrap(), expected);
    assert_eq!(fs::read_to_string(d.join("audit.csv")).unwrap().lines().count(), 5);

    ok(d, &["export", "--data", "data", "--study", "study", "--out", "study.tar"]);
    assert_eq!(fs::read(d.join("study.tar")).unwrap(), stresslab_service::export_study(&d.join("data"), "study").unwrap());
    ok(d, &["aggregate", "study.tar", "--group", "trained", "--out", "from-tar.csv"]);
    assert_eq!(fs::read_to_string(d.join("from-tar.csv")).unwrap(), expected);

    ok(d, &["aggregate", "study.tar", "--group", "raw", "--keep-outliers", "--out", "raw.csv"]);
    let raw = aggregate("raw", &logs).unwrap().to_csv().unwrap();
    assert_eq!(fs::read_to_string(d.join("raw.csv")).unwrap(), raw);

    ok(d, &["plot", "agg.csv", "raw.csv", "--out", "plots"]);
    for metric in ["accuracy", "time", "confidence"] {
        let svg = fs::read_to_string(d.join("plots").join(format!("{metric}.svg"))).unwrap();
        assert_eq!(svg.matches(r#"class="series""#).count(), 2, "{metric}");
    }
}

#[test]
fn grade_reports_training_and_main_scores() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let logs = write_study(&d.join("data"), 1);
    let path = d.join("data/studies/study").join(format!("{}.jsonl", logs[0].header.session_id));
    let out = ok(d, &["grade", path.to_str().unwrap(), "--out", "grades.csv"]);

    let plans = logs[0].plans();
    let correct = |p: &&stresslab::experiment::TrialPlan| p.trial_index % 3 != 0 || p.correct_answer == stresslab::experiment::Answer::Same;
    let main_correct = plans.iter().filter(|p| p.kind == TrialKind::Main).filter(correct).count();
    let training_correct = plans.iter().filter(|p| p.kind == TrialKind::Training).filter(correct).count();
    assert!(out.contains(&format!("main n=10: {main_correct}/45 correct")), "{out}");
    assert!(out.contains(&format!("training: {training_correct}/9 correct")), "{out}");
    let csv = fs::read_to_string(d.join("grades.csv")).unwrap();
    assert_eq!(csv.lines().count(), 55);
}
