//! The follow-up questionnaire shown after the last main trial.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONFIDENCE_OPTIONS: [&str; 4] =
    ["Not confident at all", "Slightly confident", "Fairly confident", "Very confident"];
pub const DIFFICULTY_OPTIONS: [&str; 4] = ["Very difficult", "Difficult", "Easy", "Very Easy"];
pub const FAMILIARITY_OPTIONS: [&str; 4] =
    ["Not familiar", "Slightly familiar", "Moderately familiar", "Very familiar"];
pub const AGE_OPTIONS: [&str; 6] = ["18-24", "25-34", "35-44", "45-54", "55-64", "65+"];
pub const GENDER_OPTIONS: [&str; 4] = ["Female", "Male", "Non-binary", "Prefer not to say"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    FreeText,
    Choice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub prompt: String,
    pub kind: QuestionKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<String>,
}

fn choice(id: &str, prompt: &str, options: &[&str]) -> Question {
    Question {
        id: id.to_owned(),
        prompt: prompt.to_owned(),
        kind: QuestionKind::Choice,
        options: options.iter().map(|s| s.to_string()).collect(),
    }
}

/// The six questions, in display order.
pub fn questions() -> Vec<Question> {
    vec![
        Question {
            id: "strategy".into(),
            prompt: "What overall strategy did you use to decide which drawing had lower stress?".into(),
            kind: QuestionKind::FreeText,
            options: Vec::new(),
        },
        choice("overall_confidence", "How confident were you in your answers overall?", &CONFIDENCE_OPTIONS),
        choice("difficulty", "How difficult did you find the task?", &DIFFICULTY_OPTIONS),
        choice("familiarity", "How familiar are you with network drawings?", &FAMILIARITY_OPTIONS),
        choice("age_range", "Age range", &AGE_OPTIONS),
        choice("gender", "Gender", &GENDER_OPTIONS),
    ]
}

/// A participant's questionnaire answers. Choice answers hold option text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionnaireAnswers {
    pub strategy: String,
    pub overall_confidence: String,
    pub difficulty: String,
    pub familiarity: String,
    pub age_range: String,
    pub gender: String,
}

impl QuestionnaireAnswers {
    pub fn validate(&self) -> Result<()> {
        if self.strategy.trim().is_empty() {
            return Err(Error::InvalidConfig("strategy must not be empty".into()));
        }
        let checks: [(&str, &str, &[&str]); 5] = [
            ("overall_confidence", &self.overall_confidence, &CONFIDENCE_OPTIONS),
            ("difficulty", &self.difficulty, &DIFFICULTY_OPTIONS),
            ("familiarity", &self.familiarity, &FAMILIARITY_OPTIONS),
            ("age_range", &self.age_range, &AGE_OPTIONS),
            ("gender", &self.gender, &GENDER_OPTIONS),
        ];
        for (field, value, options) in checks {
            if !options.contains(&value) {
                return Err(Error::InvalidConfig(format!("{field}: {value:?} is not an option")));
            }
        }
        Ok(())
    }
}
