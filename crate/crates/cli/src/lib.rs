//! The `stresslab` command line.
//!
//! Machine-readable outputs go to the paths given by `--out`; a short human
//! summary goes to standard output.

pub mod logs;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use stresslab::experiment::plot::{render_line_chart, PlotMetric};
use stresslab::experiment::{
    aggregate, grade, replace_outliers, schedule_session, training_gate, AggregateTable, Mode,
    SessionConfig, SessionStatus, StimulusPool, TrialKind, DEFAULT_OUTLIER_SECONDS,
};
use stresslab::quality::{correlation_matrix, MetricReport};
use stresslab::stimulus::corpus::STIMULUS_SIZES;
use stresslab::stimulus::{build_corpus, stimulus_graphs, Corpus, CorpusOptions};

pub use logs::collect_logs;

#[derive(Debug, Parser)]
#[command(name = "stresslab", version, about = "Graph-drawing stress metrics, stimuli and perception experiments")]
pub struct Cli {
    /// Seed for stochastic subcommands. A random seed is drawn and reported
    /// when none is given.
    #[arg(long, global = true, env = "STRESSLAB_SEED")]
    pub seed: Option<u64>,

    /// Print per-item progress.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the connected random stimulus graphs.
    GenGraphs(GenGraphs),
    /// Synthesize the stimulus corpus: 5 graphs x 3 sets x 9 stress levels per size.
    GenStimuli(GenStimuli),
    /// Compute every metric for every drawing of a corpus, one JSONL row each.
    Score(Score),
    /// Pearson correlation matrix over metric columns.
    Correlate(Correlate),
    /// Build a participant's trial schedule.
    Schedule(ScheduleCmd),
    /// Re-grade a session log against its schedule.
    Grade(Grade),
    /// Per-delta table of a group's session logs as CSV.
    Aggregate(Aggregate),
    /// Per-delta line charts from aggregate CSVs.
    Plot(Plot),
    /// Run the HTTP session service.
    Serve(Serve),
    /// Write a study's session logs as a tar archive.
    Export(Export),
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if p > 0.0 && p <= 1.0 {
        Ok(p)
    } else {
        Err(format!("must be in (0, 1], got {p}"))
    }
}

#[derive(Debug, Args)]
pub struct GenGraphs {
    /// Graph sizes.
    #[arg(long, value_delimiter = ',', default_values_t = STIMULUS_SIZES)]
    pub sizes: Vec<usize>,
    /// Edge probability for every size (default: mean degree 3.5).
    #[arg(long, value_parser = parse_probability)]
    pub edge_probability: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "graphs")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenStimuli {
    /// Graph sizes.
    #[arg(long, value_delimiter = ',', default_values_t = STIMULUS_SIZES)]
    pub sizes: Vec<usize>,
    /// Corpus directory; an existing corpus with the same seed is completed.
    #[arg(long, default_value = "corpus")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Largest accepted |achieved KSM - target|.
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
    /// Hill-climbing iterations per attempt.
    #[arg(long, default_value_t = 200_000)]
    pub max_iterations: u64,
    /// Fresh restarts per drawing after a failed climb.
    #[arg(long, default_value_t = 5)]
    pub restarts: u32,
    /// Edge probability for every size (default: mean degree 3.5).
    #[arg(long, value_parser = parse_probability)]
    pub edge_probability: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Score {
    /// Corpus directory.
    pub corpus: PathBuf,
    /// Report file (JSONL).
    #[arg(long, default_value = "report.jsonl")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Correlate {
    /// Report file from `score`, or a corpus directory to score first.
    pub input: PathBuf,
    /// Metric columns to correlate.
    #[arg(long, value_delimiter = ',', default_values_t = MetricReport::CORRELATED.map(String::from))]
    pub metrics: Vec<String>,
    /// Output JSON file.
    #[arg(long, default_value = "correlation.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScheduleCmd {
    /// Corpus supplying stimulus KSM values. Without one, every drawing is
    /// assumed to sit exactly on its target.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Graph size (ignored in expert mode).
    #[arg(long, default_value_t = 10)]
    pub size: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Untrained)]
    pub mode: ModeArg,
    #[arg(long, default_value = "participant")]
    pub participant: String,
    /// Output JSON file.
    #[arg(long, default_value = "schedule.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    TrainedFeedback,
    Untrained,
    Expert,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::TrainedFeedback => Mode::TrainedFeedback,
            ModeArg::Untrained => Mode::Untrained,
            ModeArg::Expert => Mode::Expert,
        }
    }
}

#[derive(Debug, Args)]
pub struct Grade {
    /// Session log (JSONL).
    pub log: PathBuf,
    /// Per-trial CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Aggregate {
    /// Session logs, export archives, or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Group label written to every row.
    #[arg(long)]
    pub group: String,
    /// Response times above this many seconds are replaced.
    #[arg(long, default_value_t = DEFAULT_OUTLIER_SECONDS)]
    pub outlier_seconds: f64,
    /// Keep response times as recorded.
    #[arg(long)]
    pub keep_outliers: bool,
    /// Output CSV.
    #[arg(long, default_value = "aggregate.csv")]
    pub out: PathBuf,
    /// CSV listing each replaced response time.
    #[arg(long)]
    pub audit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Plot {
    /// Aggregate CSVs; their groups share each chart.
    #[arg(required = true)]
    pub tables: Vec<PathBuf>,
    /// Output directory for accuracy.svg, time.svg and confidence.svg.
    #[arg(long, default_value = "plots")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Serve {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Directory holding session logs.
    #[arg(long, default_value = "data")]
    pub data: PathBuf,
    /// Stimulus corpus.
    #[arg(long, default_value = "corpus")]
    pub corpus: PathBuf,
}

#[derive(Debug, Args)]
pub struct Export {
    /// Directory holding session logs.
    #[arg(long, default_value = "data")]
    pub data: PathBuf,
    #[arg(long)]
    pub study: String,
    /// Output archive.
    #[arg(long)]
    pub out: PathBuf,
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        println!("no seed given; using {s}");
        s
    })
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenGraphs(args) => gen_graphs(args, resolve_seed(cli.seed)),
        Command::GenStimuli(args) => gen_stimuli(args, resolve_seed(cli.seed)),
        Command::Score(args) => score(args),
        Command::Correlate(args) => correlate(args),
        Command::Schedule(args) => schedule(args, resolve_seed(cli.seed)),
        Command::Grade(args) => grade_log(args),
        Command::Aggregate(args) => aggregate_logs(args),
        Command::Plot(args) => plot(args),
        Command::Serve(args) => serve(args),
        Command::Export(args) => export(args),
    }
}

#[derive(Serialize)]
struct GraphManifest {
    v: u32,
    seed: u64,
    graphs: Vec<stresslab::stimulus::corpus::GraphEntry>,
}

pub fn gen_graphs(args: GenGraphs, seed: u64) -> Result<()> {
    let graphs = stimulus_graphs(&args.sizes, seed, args.edge_probability)?;
    for (entry, graph) in &graphs {
        let path = args.out.join(entry.size.to_string()).join(format!("{}.json", entry.graph_id));
        write_file(&path, pretty(&graph.spec())?)?;
        println!("n={:<3} {}  m={:<3} p={:.4}", entry.size, entry.graph_id, entry.m, entry.edge_probability);
    }
    let manifest = GraphManifest { v: 1, seed, graphs: graphs.into_iter().map(|(e, _)| e).collect() };
    write_file(&args.out.join("manifest.json"), pretty(&manifest)?)?;
    println!("{} graphs written to {} (seed {seed})", manifest.graphs.len(), args.out.display());
    Ok(())
}

pub fn gen_stimuli(args: GenStimuli, seed: u64) -> Result<()> {
    let options = CorpusOptions {
        edge_probability: args.edge_probability,
        tolerance: args.tolerance,
        max_iterations: args.max_iterations,
        restarts: args.restarts,
        jobs: args.jobs,
        ..CorpusOptions::new(args.sizes.clone(), seed)
    };
    if args.jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }
    let manifest = build_corpus(&args.out, &options)?;
    let mut worst = 0.0f64;
    for size in &args.sizes {
        let drawings: Vec<_> = manifest.drawings.iter().filter(|d| d.id.size == *size).collect();
        let err = drawings.iter().map(|d| (d.achieved_ksm - d.target).abs()).fold(0.0, f64::max);
        let restarts: u32 = drawings.iter().map(|d| d.restarts).sum();
        worst = worst.max(err);
        println!("n={size:<3} {} drawings, max |ksm - target| = {err:.5}, restarts {restarts}", drawings.len());
    }
    println!("corpus at {} (seed {seed}), max deviation {worst:.5}", args.out.display());
    Ok(())
}

fn score_corpus(corpus: &Path, jobs: Option<usize>) -> Result<Vec<MetricReport>> {
    let corpus = Corpus::open(corpus).with_context(|| format!("opening corpus {}", corpus.display()))?;
    Ok(with_jobs(jobs, || corpus.score())??)
}

pub fn score(args: Score) -> Result<()> {
    let rows = score_corpus(&args.corpus, args.jobs)?;
    let mut out = String::new();
    for row in &rows {
        out.push_str(&serde_json::to_string(row)?);
        out.push('\n');
    }
    write_file(&args.out, out)?;
    let mean_ksm = rows.iter().map(|r| r.ksm).sum::<f64>() / rows.len().max(1) as f64;
    println!("scored {} drawings (mean ksm {mean_ksm:.4}) -> {}", rows.len(), args.out.display());
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Vec<MetricReport>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, l)| serde_json::from_str(l).with_context(|| format!("{} line {}", path.display(), k + 1)))
        .collect()
}

pub fn correlate(args: Correlate) -> Result<()> {
    let rows = if args.input.is_dir() { score_corpus(&args.input, None)? } else { read_report(&args.input)? };
    let mut columns = Vec::new();
    for name in &args.metrics {
        let column: Option<Vec<f64>> = rows.iter().map(|r| r.column(name)).collect();
        columns.push(column.with_context(|| format!("unknown metric {name:?}"))?);
    }
    let names: Vec<&str> = args.metrics.iter().map(String::as_str).collect();
    let matrix = correlation_matrix(&names, &columns)?;
    write_file(&args.out, pretty(&matrix)?)?;
    println!("{} drawings", rows.len());
    let width = names.iter().map(|n| n.len()).max().unwrap_or(0);
    for (i, name) in names.iter().enumerate() {
        let cells: Vec<String> = matrix.pearson[i]
            .iter()
            .map(|r| r.map_or_else(|| "    -".to_owned(), |r| format!("{r:+.2}")))
            .collect();
        println!("{name:>width$}  {}", cells.join("  "));
    }
    Ok(())
}

#[derive(Serialize)]
struct ScheduleFile {
    v: u32,
    config: SessionConfig,
    plans: Vec<stresslab::experiment::TrialPlan>,
}

pub fn schedule(args: ScheduleCmd, seed: u64) -> Result<()> {
    let config = SessionConfig { size: args.size, mode: args.mode.into(), seed, participant_id: args.participant };
    let pool = match &args.corpus {
        Some(dir) => StimulusPool::from_corpus(&Corpus::open(dir).with_context(|| format!("opening corpus {}", dir.display()))?),
        None => StimulusPool::synthetic(&config.sizes()),
    };
    let plans = schedule_session(&config, &pool)?;
    let mut per_delta: BTreeMap<(TrialKind, u8), usize> = BTreeMap::new();
    for p in &plans {
        *per_delta.entry((p.kind, p.delta_steps)).or_default() += 1;
    }
    write_file(&args.out, pretty(&ScheduleFile { v: 1, config, plans })?)?;
    for ((kind, steps), count) in per_delta {
        println!("{kind:?} delta {:.2}: {count}", stresslab::experiment::delta_value(steps));
    }
    println!("schedule (seed {seed}) -> {}", args.out.display());
    Ok(())
}

pub fn grade_log(args: Grade) -> Result<()> {
    let log = stresslab::experiment::SessionLog::read(&args.log)
        .with_context(|| format!("reading {}", args.log.display()))?;
    let plans: BTreeMap<u32, _> = log.plans().iter().map(|p| (p.trial_index, p)).collect();
    let mut csv = String::from("trial_index,kind,size,delta,answer,correct_answer,correct,confident,response_time\n");
    let mut training = Vec::new();
    let mut main: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for r in &log.responses {
        let plan = plans
            .get(&r.record.trial_index)
            .with_context(|| format!("trial {} is not scheduled", r.record.trial_index))?;
        let correct = grade(plan, &r.record)?;
        if correct != r.correct {
            bail!("trial {}: stored grade disagrees with the schedule", plan.trial_index);
        }
        match plan.kind {
            TrialKind::Training => training.push(correct),
            TrialKind::Main => {
                let cell = main.entry(plan.size).or_default();
                cell.0 += correct as usize;
                cell.1 += 1;
            }
        }
        let kind = serde_json::to_value(plan.kind)?;
        let answer = serde_json::to_value(r.record.answer)?;
        let expected = serde_json::to_value(plan.correct_answer)?;
        csv.push_str(&format!(
            "{},{},{},{:.2},{},{},{},{},{}\n",
            plan.trial_index,
            kind.as_str().unwrap_or_default(),
            plan.size,
            plan.delta,
            answer.as_str().unwrap_or_default(),
            expected.as_str().unwrap_or_default(),
            correct,
            r.record.confident,
            r.record.response_time
        ));
    }
    if let Some(out) = &args.out {
        write_file(out, csv)?;
    }
    println!("participant {} ({:?}), status {:?}", log.participant(), log.header.config.mode, log.status());
    if !training.is_empty() {
        let correct = training.iter().filter(|&&c| c).count();
        let gate = if training.len() == stresslab::experiment::TRAINING_TRIALS {
            if training_gate(&training)? { "passed" } else { "failed" }
        } else {
            "pending"
        };
        println!("training: {correct}/{} correct, gate {gate}", training.len());
    }
    for (size, (correct, total)) in main {
        println!("main n={size}: {correct}/{total} correct");
    }
    Ok(())
}

pub fn aggregate_logs(args: Aggregate) -> Result<()> {
    let all = collect_logs(&args.inputs)?;
    let total = all.len();
    let logs: Vec<_> = all.into_iter().filter(|l| l.status() != SessionStatus::FailedGate).collect();
    if logs.is_empty() {
        bail!("no session logs to aggregate");
    }
    let (logs, audit) = if args.keep_outliers {
        (logs, Vec::new())
    } else {
        replace_outliers(&logs, args.outlier_seconds)?
    };
    let table = aggregate(&args.group, &logs)?;
    write_file(&args.out, table.to_csv()?)?;
    if let Some(path) = &args.audit {
        let mut csv = String::from("participant,trial_index,original,replacement\n");
        for a in &audit {
            csv.push_str(&format!("{},{},{},{}\n", a.participant, a.trial_index, a.original, a.replacement));
        }
        write_file(path, csv)?;
    }
    println!(
        "{}: {} participants ({} failed the gate), {} response times replaced -> {}",
        args.group,
        logs.len(),
        total - logs.len(),
        audit.len(),
        args.out.display()
    );
    for row in &table.groups {
        println!(
            "n={:<3} delta {:.2}  accuracy {:.2}  confidence {:.2}  time {:.2}s  same {:.2}",
            row.size, row.delta, row.mean_accuracy, row.mean_confidence, row.mean_time, row.same_count
        );
    }
    Ok(())
}

pub fn plot(args: Plot) -> Result<()> {
    let mut table = AggregateTable::default();
    for path in &args.tables {
        let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        table.groups.extend(AggregateTable::read_csv(file)?.groups);
    }
    for metric in PlotMetric::ALL {
        let path = args.out.join(format!("{}.svg", metric.name()));
        write_file(&path, render_line_chart(&table, metric))?;
        println!("{}", path.display());
    }
    Ok(())
}

pub fn serve(args: Serve) -> Result<()> {
    let config = stresslab_service::ServiceConfig { data_dir: args.data, corpus_dir: Some(args.corpus) };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(stresslab_service::serve(args.addr, config))?;
    Ok(())
}

pub fn export(args: Export) -> Result<()> {
    let archive = stresslab_service::export_study(&args.data, &args.study)?;
    let (manifest, _) = stresslab_service::read_export(&archive)?;
    write_file(&args.out, &archive)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{} sessions of study {} -> {}", manifest.sessions.len(), args.study, args.out.display())?;
    Ok(())
}
