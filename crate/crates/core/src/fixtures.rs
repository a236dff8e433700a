//! Bundled data sets: the evaluation tables as CSV and the eight-task trace.

use crate::evalstats::{EvalError, SurveyTable, TaskMatrix};

pub const TASK_TIMES_CSV: &str = include_str!("../fixtures/task_times.csv");
pub const TASK_DIFFICULTY_CSV: &str = include_str!("../fixtures/task_difficulty.csv");
pub const SURVEY_SUBSERVIENTNESS_CSV: &str = include_str!("../fixtures/survey_subservientness.csv");
pub const SURVEY_USER_FRIENDLINESS_CSV: &str =
    include_str!("../fixtures/survey_user_friendliness.csv");
pub const SURVEY_USABILITY_CSV: &str = include_str!("../fixtures/survey_usability.csv");
pub const TASKS8_TRACE: &str = include_str!("../fixtures/tasks8.trace");

/// Survey factors in table order.
pub const SURVEY_FACTORS: [&str; 3] = ["subservientness", "user-friendliness", "usability"];

pub fn task_times() -> TaskMatrix {
    TaskMatrix::from_csv(TASK_TIMES_CSV.as_bytes()).expect("bundled fixture parses")
}

pub fn task_difficulty() -> TaskMatrix {
    TaskMatrix::from_csv(TASK_DIFFICULTY_CSV.as_bytes()).expect("bundled fixture parses")
}

/// Survey table for one of [`SURVEY_FACTORS`].
pub fn survey(factor: &str) -> Option<SurveyTable> {
    let csv = match factor {
        "subservientness" => SURVEY_SUBSERVIENTNESS_CSV,
        "user-friendliness" => SURVEY_USER_FRIENDLINESS_CSV,
        "usability" => SURVEY_USABILITY_CSV,
        _ => return None,
    };
    Some(SurveyTable::from_csv(csv.as_bytes()).expect("bundled fixture parses"))
}

pub fn surveys() -> Result<Vec<(&'static str, SurveyTable)>, EvalError> {
    Ok(SURVEY_FACTORS
        .iter()
        .map(|&f| (f, survey(f).expect("known factor")))
        .collect())
}
