//! Two-alternative (plus "same") stress-comparison experiments: trial
//! scheduling, grading, session logs and analysis.

pub mod analysis;
pub mod log;
pub mod plot;
pub mod questionnaire;
pub mod schedule;
pub mod stats;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stimulus::DrawingRef;

pub use analysis::{aggregate, replace_outliers, AggregateTable, GroupDeltaRow, OutlierReplacement, ParticipantDeltaRow, DEFAULT_OUTLIER_SECONDS};
pub use log::{read_logs, LogLine, LoggedQuestionnaire, LoggedResponse, SessionHeader, SessionLog, SessionStatus};
pub use schedule::{schedule_main, schedule_session, schedule_training, StimulusPool};
pub use stats::{paired_t_test, t_test, student_t_test, welch_t_test, TTest};

/// Number of distinct deltas: 0.00 to 0.40 in steps of 0.05.
pub const DELTA_STEPS: u8 = 9;
pub const TRAINING_TRIALS: usize = 9;
pub const MAIN_TRIALS_PER_SIZE: usize = 45;
/// Training trials that must be answered correctly to continue.
pub const GATE_PASS_MIN: usize = 5;

pub fn delta_value(steps: u8) -> f64 {
    (steps as u32 * 5) as f64 / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Left,
    Same,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    TrainedFeedback,
    Untrained,
    Expert,
}

impl Mode {
    pub fn has_training(self) -> bool {
        self != Mode::Expert
    }

    pub fn gives_feedback(self) -> bool {
        self == Mode::TrainedFeedback
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    /// Graph size; ignored in expert mode, which runs 10, 25 then 50.
    pub size: usize,
    pub mode: Mode,
    pub seed: u64,
    pub participant_id: String,
}

impl SessionConfig {
    /// Sizes covered by the main block, in presentation order.
    pub fn sizes(&self) -> Vec<usize> {
        match self.mode {
            Mode::Expert => crate::stimulus::corpus::STIMULUS_SIZES.to_vec(),
            _ => vec![self.size],
        }
    }

    pub fn expected_trials(&self) -> usize {
        let training = if self.mode.has_training() { TRAINING_TRIALS } else { 0 };
        training + MAIN_TRIALS_PER_SIZE * self.sizes().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialKind {
    Training,
    Main,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shown {
    pub drawing: DrawingRef,
    pub ksm: f64,
}

/// One scheduled comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    /// 1-based position within the session.
    pub trial_index: u32,
    pub kind: TrialKind,
    pub size: usize,
    pub graph: usize,
    pub left: Shown,
    pub right: Shown,
    /// KSM difference in 0.05 grid steps.
    pub delta_steps: u8,
    pub delta: f64,
    pub correct_answer: Answer,
    /// Whether the participant is told the result after answering.
    pub feedback: bool,
}

impl TrialPlan {
    /// The correct answer given the grid levels of both drawings: the higher
    /// KSM (lower stress) side, or "same" when the levels match.
    pub fn answer_for(left: &DrawingRef, right: &DrawingRef) -> Answer {
        match left.level.cmp(&right.level) {
            std::cmp::Ordering::Greater => Answer::Left,
            std::cmp::Ordering::Less => Answer::Right,
            std::cmp::Ordering::Equal => Answer::Same,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub trial_index: u32,
    pub answer: Answer,
    pub confident: bool,
    /// Seconds from presentation to submission, as measured by the client.
    pub response_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_submitted_ms: Option<u64>,
}

impl ResponseRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.response_time > 0.0 && self.response_time.is_finite()) {
            return Err(Error::Log(format!(
                "trial {}: response time must be positive, got {}",
                self.trial_index, self.response_time
            )));
        }
        Ok(())
    }
}

pub fn grade(plan: &TrialPlan, response: &ResponseRecord) -> Result<bool> {
    if plan.trial_index != response.trial_index {
        return Err(Error::TrialMismatch {
            plan: plan.trial_index,
            response: response.trial_index,
        });
    }
    Ok(response.answer == plan.correct_answer)
}

/// Passes when at least five of the nine training trials were correct.
pub fn training_gate(graded: &[bool]) -> Result<bool> {
    if graded.len() != TRAINING_TRIALS {
        return Err(Error::RecordCount {
            expected: TRAINING_TRIALS,
            got: graded.len(),
        });
    }
    Ok(graded.iter().filter(|&&c| c).count() >= GATE_PASS_MIN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(left_level: usize, right_level: usize) -> TrialPlan {
        let l = DrawingRef { size: 10, graph: 0, set: 0, level: left_level };
        let r = DrawingRef { size: 10, graph: 0, set: 1, level: right_level };
        let steps = left_level.abs_diff(right_level) as u8;
        TrialPlan {
            trial_index: 3,
            kind: TrialKind::Main,
            size: 10,
            graph: 0,
            left: Shown { drawing: l, ksm: l.target() },
            right: Shown { drawing: r, ksm: r.target() },
            delta_steps: steps,
            delta: delta_value(steps),
            correct_answer: TrialPlan::answer_for(&l, &r),
            feedback: false,
        }
    }

    fn response(answer: Answer) -> ResponseRecord {
        ResponseRecord { trial_index: 3, answer, confident: true, response_time: 4.0, client_submitted_ms: None }
    }

    #[test]
    fn zero_delta_same_is_correct() {
        assert!(grade(&plan(4, 4), &response(Answer::Same)).unwrap());
    }

    #[test]
    fn higher_ksm_side_is_lower_stress() {
        // 0.45 on the left, 0.70 on the right.
        let p = plan(1, 6);
        assert_eq!(p.delta, 0.25);
        assert!(grade(&p, &response(Answer::Right)).unwrap());
        assert!(!grade(&p, &response(Answer::Left)).unwrap());
    }

    #[test]
    fn mismatched_index_errors() {
        let mut r = response(Answer::Same);
        r.trial_index = 4;
        assert!(matches!(grade(&plan(0, 0), &r), Err(Error::TrialMismatch { .. })));
    }

    #[test]
    fn gate_threshold() {
        let with = |k: usize| (0..9).map(|i| i < k).collect::<Vec<_>>();
        assert!(training_gate(&with(5)).unwrap());
        assert!(!training_gate(&with(4)).unwrap());
        assert!(training_gate(&with(9)).unwrap());
        assert!(training_gate(&with(9)[..8]).is_err());
    }

    #[test]
    fn mode_wire_names() {
        assert_eq!(serde_json::to_string(&Mode::TrainedFeedback).unwrap(), "\"trained-feedback\"");
        assert_eq!(serde_json::to_string(&Answer::Same).unwrap(), "\"same\"");
    }
}
