//! Per-delta aggregation and response-time outlier replacement.
//!
//! Per participant and delta: accuracy is the number of correct answers
//! (0 to 5), confidence counts 2 per confident answer (0 to 10), time is the
//! mean response time and `same_count` the number of "same" answers. Group
//! rows average these over participants.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::log::SessionLog;
use super::{delta_value, grade, Answer, ResponseRecord, TrialKind};
use crate::error::{Error, Result};

pub const DEFAULT_OUTLIER_SECONDS: f64 = 200.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticipantDeltaRow {
    pub participant: String,
    pub size: usize,
    pub delta: f64,
    pub accuracy: u32,
    pub confidence: u32,
    pub mean_time: f64,
    pub same_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDeltaRow {
    pub group: String,
    pub size: usize,
    pub delta: f64,
    pub mean_accuracy: f64,
    pub mean_confidence: f64,
    pub mean_time: f64,
    pub same_count: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateTable {
    pub participants: Vec<ParticipantDeltaRow>,
    pub groups: Vec<GroupDeltaRow>,
}

#[derive(Default)]
struct Cell {
    trials: u32,
    correct: u32,
    confident: u32,
    same: u32,
    time: f64,
}

impl AggregateTable {
    /// Group rows as CSV: group, size, delta, mean_accuracy, mean_confidence,
    /// mean_time, same_count.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.groups {
            w.serialize(row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads group rows written by [`AggregateTable::write_csv`]. Participant
    /// rows are not part of the CSV and come back empty.
    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let groups = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<std::result::Result<Vec<GroupDeltaRow>, _>>()?;
        Ok(Self { participants: Vec::new(), groups })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Total main-trial accuracy per participant for one size, in row order.
    pub fn participant_totals(&self, size: usize) -> Vec<(String, u32)> {
        let mut totals: BTreeMap<&str, u32> = BTreeMap::new();
        for r in self.participants.iter().filter(|r| r.size == size) {
            *totals.entry(&r.participant).or_default() += r.accuracy;
        }
        totals.into_iter().map(|(p, a)| (p.to_owned(), a)).collect()
    }
}

fn missing_main(log: &SessionLog) -> Vec<u32> {
    let answered: std::collections::BTreeSet<u32> =
        log.responses.iter().map(|r| r.record.trial_index).collect();
    log.plans()
        .iter()
        .filter(|p| p.kind == TrialKind::Main && !answered.contains(&p.trial_index))
        .map(|p| p.trial_index)
        .collect()
}

/// Aggregates the main trials of complete session logs into per-participant
/// and per-group rows, keyed by (size, delta).
pub fn aggregate(group: &str, logs: &[SessionLog]) -> Result<AggregateTable> {
    let mut table = AggregateTable::default();
    let mut pooled: BTreeMap<(usize, u8), Vec<usize>> = BTreeMap::new();
    for log in logs {
        let missing = missing_main(log);
        if !missing.is_empty() {
            return Err(Error::IncompleteLog { participant: log.participant().to_owned(), missing });
        }
        let answers: BTreeMap<u32, &ResponseRecord> =
            log.responses.iter().map(|r| (r.record.trial_index, &r.record)).collect();
        let mut cells: BTreeMap<(usize, u8), Cell> = BTreeMap::new();
        // Plan order, not arrival order, so sums are independent of how the
        // log lines were arranged.
        for plan in log.plans().iter().filter(|p| p.kind == TrialKind::Main) {
            let record = answers[&plan.trial_index];
            let cell = cells.entry((plan.size, plan.delta_steps)).or_default();
            cell.trials += 1;
            cell.correct += grade(plan, record)? as u32;
            cell.confident += record.confident as u32;
            cell.same += (record.answer == Answer::Same) as u32;
            cell.time += record.response_time;
        }
        for ((size, steps), cell) in cells {
            pooled.entry((size, steps)).or_default().push(table.participants.len());
            table.participants.push(ParticipantDeltaRow {
                participant: log.participant().to_owned(),
                size,
                delta: delta_value(steps),
                accuracy: cell.correct,
                confidence: 2 * cell.confident,
                mean_time: cell.time / cell.trials as f64,
                same_count: cell.same,
            });
        }
    }
    for ((size, steps), rows) in pooled {
        let k = rows.len() as f64;
        let mean = |f: &dyn Fn(&ParticipantDeltaRow) -> f64| {
            rows.iter().map(|&i| f(&table.participants[i])).sum::<f64>() / k
        };
        table.groups.push(GroupDeltaRow {
            group: group.to_owned(),
            size,
            delta: delta_value(steps),
            mean_accuracy: mean(&|r| r.accuracy as f64),
            mean_confidence: mean(&|r| r.confidence as f64),
            mean_time: mean(&|r| r.mean_time),
            same_count: mean(&|r| r.same_count as f64),
        });
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReplacement {
    pub participant: String,
    pub trial_index: u32,
    pub original: f64,
    pub replacement: f64,
}

/// Replaces every main-trial response time above `threshold` seconds with the
/// mean of the same participant's main-trial times at or below it.
pub fn replace_outliers(
    logs: &[SessionLog],
    threshold: f64,
) -> Result<(Vec<SessionLog>, Vec<OutlierReplacement>)> {
    let mut cleaned = logs.to_vec();
    let mut audit = Vec::new();
    for log in &mut cleaned {
        let missing = missing_main(log);
        if !missing.is_empty() {
            return Err(Error::IncompleteLog { participant: log.participant().to_owned(), missing });
        }
        let main: std::collections::BTreeSet<u32> = log
            .plans()
            .iter()
            .filter(|p| p.kind == TrialKind::Main)
            .map(|p| p.trial_index)
            .collect();
        let (mut sum, mut count) = (0.0, 0usize);
        let mut outliers = Vec::new();
        for (k, r) in log.responses.iter().enumerate() {
            if !main.contains(&r.record.trial_index) {
                continue;
            }
            if r.record.response_time > threshold {
                outliers.push(k);
            } else {
                sum += r.record.response_time;
                count += 1;
            }
        }
        if outliers.is_empty() {
            continue;
        }
        if count == 0 {
            return Err(Error::NoInlierTimes(log.participant().to_owned()));
        }
        let replacement = sum / count as f64;
        for k in outliers {
            let record = &mut log.responses[k].record;
            audit.push(OutlierReplacement {
                participant: log.header.config.participant_id.clone(),
                trial_index: record.trial_index,
                original: record.response_time,
                replacement,
            });
            record.response_time = replacement;
        }
    }
    Ok((cleaned, audit))
}
