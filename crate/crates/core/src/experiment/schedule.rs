//! Trial scheduling.
//!
//! A main block has one trial per (graph, delta) cell. For a delta of `k`
//! grid steps the lower endpoint level is uniform over the `9 - k` levels
//! that keep both endpoints inside the grid; each endpoint's drawing comes
//! from a uniformly chosen set, and the two drawings of a zero-delta trial
//! come from distinct sets.

use std::collections::BTreeMap;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use super::{delta_value, Mode, SessionConfig, Shown, TrialKind, TrialPlan, DELTA_STEPS};
use crate::error::{Error, Result};
use crate::rng::{stream, Rng};
use crate::stimulus::corpus::{GRAPHS_PER_SIZE, LEVELS, SETS_PER_GRAPH};
use crate::stimulus::{Corpus, DrawingRef};

const TRAINING_STREAM: u64 = 1;
const MAIN_STREAM: u64 = 2;

/// The drawings available to the scheduler with their achieved KSM values.
#[derive(Debug, Clone, Default)]
pub struct StimulusPool {
    ksm: BTreeMap<DrawingRef, f64>,
}

impl StimulusPool {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        Self {
            ksm: corpus
                .manifest()
                .drawings
                .iter()
                .map(|d| (d.id, d.achieved_ksm))
                .collect(),
        }
    }

    /// A complete pool whose drawings sit exactly on their targets.
    pub fn synthetic(sizes: &[usize]) -> Self {
        let mut pool = Self::default();
        for &size in sizes {
            for graph in 0..GRAPHS_PER_SIZE {
                for set in 0..SETS_PER_GRAPH {
                    for level in 0..LEVELS {
                        let id = DrawingRef { size, graph, set, level };
                        pool.insert(id, id.target());
                    }
                }
            }
        }
        pool
    }

    pub fn insert(&mut self, id: DrawingRef, ksm: f64) {
        self.ksm.insert(id, ksm);
    }

    pub fn ksm(&self, id: &DrawingRef) -> Option<f64> {
        self.ksm.get(id).copied()
    }

    pub fn contains(&self, id: &DrawingRef) -> bool {
        self.ksm.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.ksm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ksm.is_empty()
    }

    /// Every drawing of the size that the scheduler might pick.
    pub fn require_size(&self, size: usize) -> Result<()> {
        let missing = (0..GRAPHS_PER_SIZE)
            .flat_map(|graph| {
                (0..SETS_PER_GRAPH)
                    .flat_map(move |set| (0..LEVELS).map(move |level| DrawingRef { size, graph, set, level }))
            })
            .filter(|id| !self.contains(id))
            .count();
        if missing > 0 {
            return Err(Error::Schedule(format!(
                "stimulus pool lacks {missing} drawings of size {size}"
            )));
        }
        Ok(())
    }

    fn shown(&self, id: DrawingRef) -> Result<Shown> {
        let ksm = self
            .ksm(&id)
            .ok_or_else(|| Error::Schedule(format!("no drawing {id}")))?;
        Ok(Shown { drawing: id, ksm })
    }
}

fn pair(
    pool: &StimulusPool,
    rng: &mut Rng,
    kind: TrialKind,
    size: usize,
    graph: usize,
    steps: u8,
    feedback: bool,
) -> Result<TrialPlan> {
    let steps_usize = steps as usize;
    let low = rng.random_range(0..LEVELS - steps_usize);
    let high = low + steps_usize;
    let (low_set, high_set) = if steps == 0 {
        let sets = index::sample(rng, SETS_PER_GRAPH, 2);
        (sets.index(0), sets.index(1))
    } else {
        (rng.random_range(0..SETS_PER_GRAPH), rng.random_range(0..SETS_PER_GRAPH))
    };
    let lo = DrawingRef { size, graph, set: low_set, level: low };
    let hi = DrawingRef { size, graph, set: high_set, level: high };
    let (left, right) = if rng.random_bool(0.5) { (lo, hi) } else { (hi, lo) };
    Ok(TrialPlan {
        trial_index: 0,
        kind,
        size,
        graph,
        left: pool.shown(left)?,
        right: pool.shown(right)?,
        delta_steps: steps,
        delta: delta_value(steps),
        correct_answer: TrialPlan::answer_for(&left, &right),
        feedback,
    })
}

fn number_from(plans: &mut [TrialPlan], first: u32) {
    for (k, p) in plans.iter_mut().enumerate() {
        p.trial_index = first + k as u32;
    }
}

/// Nine training trials with deltas 0.40 down to 0.00, numbered from 1.
/// Empty in expert mode.
pub fn schedule_training(config: &SessionConfig, pool: &StimulusPool) -> Result<Vec<TrialPlan>> {
    if !config.mode.has_training() {
        return Ok(Vec::new());
    }
    pool.require_size(config.size)?;
    let mut rng = stream(config.seed, &[TRAINING_STREAM, config.size as u64]);
    let feedback = config.mode == Mode::TrainedFeedback;
    let mut plans = (0..DELTA_STEPS)
        .rev()
        .map(|steps| {
            let graph = rng.random_range(0..GRAPHS_PER_SIZE);
            pair(pool, &mut rng, TrialKind::Training, config.size, graph, steps, feedback)
        })
        .collect::<Result<Vec<_>>>()?;
    number_from(&mut plans, 1);
    Ok(plans)
}

/// The 45-trial main block for one size, numbered from `first_index`.
pub fn schedule_main(
    config: &SessionConfig,
    size: usize,
    pool: &StimulusPool,
    first_index: u32,
) -> Result<Vec<TrialPlan>> {
    pool.require_size(size)?;
    let mut rng = stream(config.seed, &[MAIN_STREAM, size as u64]);
    let mut plans = Vec::with_capacity(GRAPHS_PER_SIZE * DELTA_STEPS as usize);
    for graph in 0..GRAPHS_PER_SIZE {
        for steps in 0..DELTA_STEPS {
            plans.push(pair(pool, &mut rng, TrialKind::Main, size, graph, steps, false)?);
        }
    }
    plans.shuffle(&mut rng);
    number_from(&mut plans, first_index);
    Ok(plans)
}

/// Training followed by every main block of the session, indexed 1.. in
/// presentation order.
pub fn schedule_session(config: &SessionConfig, pool: &StimulusPool) -> Result<Vec<TrialPlan>> {
    let mut plans = schedule_training(config, pool)?;
    for size in config.sizes() {
        let first = plans.len() as u32 + 1;
        plans.extend(schedule_main(config, size, pool, first)?);
    }
    Ok(plans)
}
