//! On-disk stimulus corpus.
//!
//! Layout:
//!
//! ```text
//! corpus/manifest.json
//! corpus/<size>/<graph-id>/graph.json
//! corpus/<size>/<graph-id>/<set-id>/<target>.json
//! ```
//!
//! Generation is resumable: drawings already listed in the manifest with a
//! file on disk are skipped, so re-running over a complete corpus changes
//! nothing.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{hill_climb, HillClimbConfig};
use crate::drawing::{Drawing, DrawingRecord};
use crate::error::{Error, IoContext, Result};
use crate::quality::MetricReport;
use crate::graph::{default_edge_probability, Graph, GraphGenerator, GraphSpec};
use crate::rng::derive_seed;

pub const GRAPHS_PER_SIZE: usize = 5;
pub const SETS_PER_GRAPH: usize = 3;
pub const LEVELS: usize = 9;
pub const STIMULUS_SIZES: [usize; 3] = [10, 25, 50];

/// KSM target of grid level `k`: 0.40 + 0.05 k.
pub fn target_ksm(level: usize) -> f64 {
    (40 + 5 * level) as f64 / 100.0
}

pub fn level_label(level: usize) -> String {
    format!("{:.2}", target_ksm(level))
}

/// Address of one stimulus drawing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DrawingRef {
    pub size: usize,
    pub graph: usize,
    pub set: usize,
    pub level: usize,
}

impl DrawingRef {
    pub fn graph_id(&self) -> String {
        format!("g{}", self.graph)
    }

    pub fn set_id(&self) -> String {
        format!("s{}", self.set)
    }

    pub fn target(&self) -> f64 {
        target_ksm(self.level)
    }

    pub fn relative_path(&self) -> PathBuf {
        PathBuf::from(self.size.to_string())
            .join(self.graph_id())
            .join(self.set_id())
            .join(format!("{}.json", level_label(self.level)))
    }
}

impl fmt::Display for DrawingRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/g{}/s{}/{}",
            self.size,
            self.graph,
            self.set,
            level_label(self.level)
        )
    }
}

impl FromStr for DrawingRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("malformed drawing reference {s:?}"));
        let parts: Vec<&str> = s.split('/').collect();
        let [size, graph, set, target] = parts.as_slice() else {
            return Err(bad());
        };
        let size = size.parse().map_err(|_| bad())?;
        let graph = graph.strip_prefix('g').and_then(|g| g.parse().ok()).ok_or_else(bad)?;
        let set = set.strip_prefix('s').and_then(|g| g.parse().ok()).ok_or_else(bad)?;
        let level = (0..LEVELS).find(|&l| level_label(l) == *target).ok_or_else(bad)?;
        Ok(Self { size, graph, set, level })
    }
}

impl Serialize for DrawingRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DrawingRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEntry {
    pub size: usize,
    pub graph_id: String,
    pub seed: u64,
    pub edge_probability: f64,
    pub m: usize,
}

/// Fields that legitimately differ between otherwise identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nondeterministic {
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawingEntry {
    pub id: DrawingRef,
    pub target: f64,
    pub achieved_ksm: f64,
    pub iterations: u64,
    pub restarts: u32,
    pub seed: u64,
    pub nondeterministic: Nondeterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub v: u32,
    pub seed: u64,
    pub tolerance: f64,
    pub graphs: Vec<GraphEntry>,
    pub drawings: Vec<DrawingEntry>,
}

impl Manifest {
    fn empty(seed: u64, tolerance: f64) -> Self {
        Self {
            v: 1,
            seed,
            tolerance,
            graphs: Vec::new(),
            drawings: Vec::new(),
        }
    }

    pub fn load(root: &Path) -> Result<Option<Self>> {
        let path = root.join("manifest.json");
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).at(&path)?;
        Ok(Some(serde_json::from_str(&text)?))
    }

    fn sort(&mut self) {
        self.graphs
            .sort_by(|a, b| (a.size, &a.graph_id).cmp(&(b.size, &b.graph_id)));
        self.drawings.sort_by_key(|d| d.id);
    }

    fn store(&self, root: &Path) -> Result<()> {
        write_atomic(&root.join("manifest.json"), &to_json(self)?)
    }

    pub fn drawing(&self, id: &DrawingRef) -> Option<&DrawingEntry> {
        self.drawings
            .binary_search_by_key(id, |d| d.id)
            .ok()
            .map(|i| &self.drawings[i])
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).at(parent)?;
    }
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, contents).at(&tmp)?;
    fs::rename(&tmp, path).at(path)
}

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub sizes: Vec<usize>,
    pub seed: u64,
    /// Edge probability per size; defaults to [`default_edge_probability`].
    pub edge_probability: Option<f64>,
    pub tolerance: f64,
    pub max_iterations: u64,
    /// Fresh-seed restarts allowed per drawing after a failed climb.
    pub restarts: u32,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

impl CorpusOptions {
    pub fn new(sizes: Vec<usize>, seed: u64) -> Self {
        Self {
            sizes,
            seed,
            edge_probability: None,
            tolerance: 0.01,
            max_iterations: 200_000,
            restarts: 5,
            jobs: None,
        }
    }
}

fn graph_seed(seed: u64, size: usize, graph: usize) -> u64 {
    derive_seed(seed, &[0, size as u64, graph as u64])
}

fn climb_seed(seed: u64, id: &DrawingRef, restart: u32) -> u64 {
    derive_seed(
        seed,
        &[
            1,
            id.size as u64,
            id.graph as u64,
            id.set as u64,
            id.level as u64,
            restart as u64,
        ],
    )
}

/// The stimulus graphs for `sizes`: five per size, each from its own derived
/// seed. `edge_probability` overrides the per-size default.
pub fn stimulus_graphs(
    sizes: &[usize],
    seed: u64,
    edge_probability: Option<f64>,
) -> Result<Vec<(GraphEntry, Graph)>> {
    let mut out = Vec::new();
    for &size in sizes {
        let p = edge_probability.unwrap_or_else(|| default_edge_probability(size));
        for g in 0..GRAPHS_PER_SIZE {
            let graph_seed = graph_seed(seed, size, g);
            let graph = GraphGenerator::default().generate(size, p, graph_seed)?;
            let entry = GraphEntry {
                size,
                graph_id: format!("g{g}"),
                seed: graph_seed,
                edge_probability: p,
                m: graph.m(),
            };
            out.push((entry, graph));
        }
    }
    Ok(out)
}

/// Generates (or completes) the corpus under `root` and returns its manifest.
pub fn build_corpus(root: &Path, options: &CorpusOptions) -> Result<Manifest> {
    let mut manifest = match Manifest::load(root)? {
        Some(m) if m.seed != options.seed => {
            return Err(Error::InvalidConfig(format!(
                "corpus at {} was generated with seed {}, not {}",
                root.display(),
                m.seed,
                options.seed
            )))
        }
        Some(m) => m,
        None => Manifest::empty(options.seed, options.tolerance),
    };
    fs::create_dir_all(root).at(root)?;

    let mut graphs = BTreeMap::new();
    for (entry, graph) in stimulus_graphs(&options.sizes, options.seed, options.edge_probability)? {
        let path = root.join(entry.size.to_string()).join(&entry.graph_id).join("graph.json");
        if !path.exists() {
            write_atomic(&path, &to_json(&graph.spec())?)?;
        }
        let index = graphs.len() % GRAPHS_PER_SIZE;
        if !manifest.graphs.iter().any(|e| e.size == entry.size && e.graph_id == entry.graph_id) {
            manifest.graphs.push(entry.clone());
        }
        graphs.insert((entry.size, index), Arc::new(graph));
    }
    manifest.sort();

    let pending: Vec<DrawingRef> = graphs
        .keys()
        .flat_map(|&(size, graph)| {
            (0..SETS_PER_GRAPH).flat_map(move |set| {
                (0..LEVELS).map(move |level| DrawingRef { size, graph, set, level })
            })
        })
        .filter(|id| manifest.drawing(id).is_none() || !root.join(id.relative_path()).exists())
        .collect();

    let shared = Mutex::new(manifest);
    let work = || {
        pending.par_iter().try_for_each(|id| -> Result<()> {
            let graph = graphs[&(id.size, id.graph)].clone();
            let entry = synthesize(root, graph, id, options)?;
            let mut m = shared.lock().expect("manifest lock poisoned");
            m.drawings.retain(|d| d.id != *id);
            m.drawings.push(entry);
            m.sort();
            m.store(root)
        })
    };
    match options.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(work)?,
        None => work()?,
    }

    let manifest = shared.into_inner().expect("manifest lock poisoned");
    manifest.store(root)?;
    Ok(manifest)
}

fn synthesize(
    root: &Path,
    graph: Arc<Graph>,
    id: &DrawingRef,
    options: &CorpusOptions,
) -> Result<DrawingEntry> {
    let start = Instant::now();
    let mut last_err = None;
    for restart in 0..=options.restarts {
        let seed = climb_seed(options.seed, id, restart);
        let config = HillClimbConfig {
            tolerance: options.tolerance,
            max_iterations: options.max_iterations,
            ..HillClimbConfig::new(id.target(), seed)
        };
        match hill_climb(graph.clone(), &config) {
            Ok(outcome) => {
                let record = outcome.drawing.record(&id.graph_id());
                write_atomic(&root.join(id.relative_path()), &to_json(&record)?)?;
                return Ok(DrawingEntry {
                    id: *id,
                    target: id.target(),
                    achieved_ksm: outcome.ksm,
                    iterations: outcome.iterations,
                    restarts: restart,
                    seed,
                    nondeterministic: Nondeterministic {
                        wall_ms: start.elapsed().as_millis() as u64,
                    },
                });
            }
            Err(e @ Error::NonConvergence { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Read-only view of a generated corpus.
#[derive(Debug, Clone)]
pub struct Corpus {
    root: PathBuf,
    manifest: Manifest,
    graphs: BTreeMap<(usize, usize), Arc<Graph>>,
}

impl Corpus {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        let manifest = Manifest::load(&root)?.ok_or_else(|| Error::Io {
            path: root.join("manifest.json"),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no corpus manifest"),
        })?;
        let mut graphs = BTreeMap::new();
        for entry in &manifest.graphs {
            let path = root
                .join(entry.size.to_string())
                .join(&entry.graph_id)
                .join("graph.json");
            let spec: GraphSpec = serde_json::from_str(&fs::read_to_string(&path).at(&path)?)?;
            let index = entry.graph_id.trim_start_matches('g').parse().map_err(|_| {
                Error::InvalidConfig(format!("bad graph id {:?}", entry.graph_id))
            })?;
            graphs.insert((entry.size, index), Arc::new(Graph::ingest(&spec)?));
        }
        Ok(Self {
            root,
            manifest,
            graphs,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn graph(&self, size: usize, graph: usize) -> Option<&Arc<Graph>> {
        self.graphs.get(&(size, graph))
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.graphs.keys().map(|k| k.0).collect();
        sizes.dedup();
        sizes
    }

    /// Achieved KSM recorded for a drawing.
    pub fn ksm(&self, id: &DrawingRef) -> Option<f64> {
        self.manifest.drawing(id).map(|d| d.achieved_ksm)
    }

    pub fn has_size(&self, size: usize) -> bool {
        self.manifest.drawings.iter().any(|d| d.id.size == size)
    }

    pub fn drawing_refs(&self) -> impl Iterator<Item = DrawingRef> + '_ {
        self.manifest.drawings.iter().map(|d| d.id)
    }

    /// Metric rows for every drawing, in manifest order. Runs on the current
    /// rayon pool.
    pub fn score(&self) -> Result<Vec<MetricReport>> {
        let ids: Vec<DrawingRef> = self.drawing_refs().collect();
        ids.par_iter()
            .map(|id| MetricReport::compute(id.to_string(), &self.load(id)?))
            .collect()
    }

    pub fn load(&self, id: &DrawingRef) -> Result<Drawing> {
        let graph = self
            .graph(id.size, id.graph)
            .ok_or_else(|| Error::InvalidConfig(format!("no graph for {id}")))?;
        let path = self.root.join(id.relative_path());
        let record: DrawingRecord = serde_json::from_str(&fs::read_to_string(&path).at(&path)?)?;
        Drawing::ingest(graph.clone(), &record)
    }
}
