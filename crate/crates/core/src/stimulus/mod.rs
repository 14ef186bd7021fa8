//! Stimulus synthesis: hill climbing node positions until a drawing's KSM
//! sits within tolerance of a target, and assembly of the full corpus.

pub mod corpus;

use std::sync::Arc;

use rand::Rng as _;

use crate::drawing::{BoundingBox, Drawing, Point};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;
use crate::stress::StressEvaluator;

pub use corpus::{build_corpus, stimulus_graphs, Corpus, CorpusOptions, DrawingRef, Manifest};

/// Linearly shrinking move radius: `max(min, initial * (1 - t / horizon))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSchedule {
    pub initial: f64,
    pub min: f64,
}

impl Default for RadiusSchedule {
    fn default() -> Self {
        Self {
            initial: std::f64::consts::SQRT_2 / 2.0,
            min: 0.02,
        }
    }
}

impl RadiusSchedule {
    pub fn radius(&self, iteration: u64, horizon: u64) -> f64 {
        let frac = 1.0 - iteration as f64 / horizon.max(1) as f64;
        (self.initial * frac).max(self.min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillClimbConfig {
    pub target_ksm: f64,
    pub tolerance: f64,
    pub radius: RadiusSchedule,
    pub max_iterations: u64,
    pub seed: u64,
}

impl HillClimbConfig {
    pub fn new(target_ksm: f64, seed: u64) -> Self {
        Self {
            target_ksm,
            tolerance: 0.01,
            radius: RadiusSchedule::default(),
            max_iterations: 200_000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if !(0.0..=1.0).contains(&self.target_ksm) {
            return bad("target KSM must lie in [0, 1]");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.radius.min > 0.0 && self.radius.initial >= self.radius.min) {
            return bad("radii must be positive and non-increasing");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HillClimbOutcome {
    pub drawing: Drawing,
    pub ksm: f64,
    /// Candidate moves evaluated.
    pub iterations: u64,
    /// Evaluation value `|ksm - target|` after the initial layout and after
    /// every accepted move.
    pub trace: Vec<f64>,
}

const MAX_POSITION_TRIES: usize = 64;

/// Uniform sample from the intersection of the unit square and the disc of
/// radius `r` about `center`, by rejection.
fn sample_move(rng: &mut rng::Rng, center: Point, r: f64) -> Option<Point> {
    for _ in 0..MAX_POSITION_TRIES {
        let dx = rng.random_range(-r..=r);
        let dy = rng.random_range(-r..=r);
        if dx * dx + dy * dy > r * r {
            continue;
        }
        let p = Point::new(center.x + dx, center.y + dy);
        if BoundingBox::UNIT.contains(p) {
            return Some(p);
        }
    }
    None
}

/// Moves one random node at a time within a shrinking radius, keeping a move
/// only if it strictly brings the KSM closer to the target.
pub fn hill_climb(graph: Arc<Graph>, config: &HillClimbConfig) -> Result<HillClimbOutcome> {
    config.validate()?;
    let n = graph.n();
    if n < 2 {
        return Err(Error::InvalidConfig("graph needs at least two nodes".into()));
    }
    let mut rng = rng::rng_from_seed(config.seed);
    let mut pos: Vec<Point> = (0..n)
        .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let mut evaluator = StressEvaluator::new(&graph);
    let score = |ev: &mut StressEvaluator, pos: &[Point]| -> Option<(f64, f64)> {
        let ksm = ev.ksm(pos).ok()?;
        Some((ksm, (ksm - config.target_ksm).abs()))
    };
    let (mut ksm, mut eval) = score(&mut evaluator, &pos).ok_or(Error::DegenerateDrawing)?;
    let mut trace = vec![eval];
    let mut iterations = 0;

    while eval > config.tolerance && iterations < config.max_iterations {
        let r = config.radius.radius(iterations, config.max_iterations);
        let (node, candidate) = loop {
            let node = rng.random_range(0..n);
            if let Some(p) = sample_move(&mut rng, pos[node], r) {
                break (node, p);
            }
        };
        iterations += 1;
        if pos.contains(&candidate) {
            continue;
        }
        let previous = std::mem::replace(&mut pos[node], candidate);
        match score(&mut evaluator, &pos) {
            Some((k, e)) if e < eval => {
                ksm = k;
                eval = e;
                trace.push(e);
            }
            _ => pos[node] = previous,
        }
    }

    if eval > config.tolerance {
        return Err(Error::NonConvergence {
            target: config.target_ksm,
            best_ksm: ksm,
            iterations,
        });
    }
    let drawing = Drawing::new(graph, pos)?.with_cached_ksm(ksm);
    Ok(HillClimbOutcome {
        drawing,
        ksm,
        iterations,
        trace,
    })
}
