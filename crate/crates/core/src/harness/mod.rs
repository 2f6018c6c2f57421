//! Experiment driver: builds the snapshot stream from a configuration, runs
//! the agent and its baselines, and writes every artifact with a report.
//!
//! Layout of an output directory:
//!
//! ```text
//! config.toml                  echoed configuration (no output_dir)
//! snapshots/snapshot_NNN.txt   edge list of each snapshot
//! episodes.csv                 per-step log
//! qtable.tsv                   final Q-table
//! partition_best.tsv           best partition found
//! plot_accumulated_reward.csv  per-episode accumulated reward
//! plot_mean_step_reward.csv    per-episode mean step reward
//! null/                        same files for the ε = 1 agent
//! static_baselines.csv         one row per detector and snapshot
//! report.json                  summary, wall-clock and artifact hashes
//! ```

mod config;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{BaselineConfig, DatasetConfig, ErdosRenyiSpec, ExperimentConfig, SnapshotConfig};

use crate::agent::{run_agent_with_cache, AgentRun, DetectionCache, EpisodeLog};
use crate::detectors::{detect, ActionSpace, DetectorId, ParamAssignment};
use crate::error::{Error, Result};
use crate::graph::{build_snapshots, erdos_renyi, load_edge_list, Graph, SnapshotStream};
use crate::scoring::Metric;
use crate::seed;

pub const REPORT_FILE: &str = "report.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const EPISODES_FILE: &str = "episodes.csv";
pub const QTABLE_FILE: &str = "qtable.tsv";
pub const PARTITION_FILE: &str = "partition_best.tsv";
pub const STATIC_FILE: &str = "static_baselines.csv";
pub const PLOT_ACCUMULATED_FILE: &str = "plot_accumulated_reward.csv";
pub const PLOT_MEAN_STEP_FILE: &str = "plot_mean_step_reward.csv";
pub const NULL_DIR: &str = "null";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub nodes: usize,
    pub edges: usize,
    pub raw_arcs: usize,
    pub snapshots: Vec<(usize, usize)>,
}

/// Summary of one agent run (the learning agent or the null model).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSummary {
    pub label: String,
    pub episodes: usize,
    pub steps: usize,
    /// Mean over episodes of each episode's best reward.
    pub average_metric: f64,
    pub best_metric: f64,
    pub best_episode: Option<usize>,
    pub best_action: Option<String>,
    pub best_communities: Option<usize>,
    pub mean_accumulated_reward: f64,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticDetectorSummary {
    pub detector: DetectorId,
    pub skipped: bool,
    pub notice: Option<String>,
    /// Metric on each snapshot, in snapshot order; empty when skipped.
    pub per_snapshot: Vec<f64>,
    pub average_metric: f64,
    pub best_metric: f64,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticSummary {
    pub detectors: Vec<StaticDetectorSummary>,
    /// Largest per-detector average among the detectors that ran.
    pub best_static: Option<f64>,
    pub best_detector: Option<DetectorId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub metric: Metric,
    pub config_sha256: String,
    pub dataset: DatasetSummary,
    pub agent: Option<AgentSummary>,
    pub null_model: Option<AgentSummary>,
    pub static_baselines: Option<StaticSummary>,
    pub wall_clock_seconds: f64,
    pub artifacts: Vec<Artifact>,
}

impl RunReport {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Graph and snapshot stream described by `config`.
pub fn load_stream(config: &ExperimentConfig) -> Result<SnapshotStream> {
    let g = load_graph(config)?;
    build_snapshots(
        &g,
        config.snapshots.count,
        config.snapshots.order,
        seed::derive(config.agent.seed, "snapshots"),
    )
}

fn load_graph(config: &ExperimentConfig) -> Result<Graph> {
    let d = &config.dataset;
    let g = match (&d.path, &d.erdos_renyi) {
        (Some(path), None) => {
            let f = File::open(path).map_err(|e| Error::io(path, e))?;
            load_edge_list(BufReader::new(f)).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", path.display()),
                },
                other => other,
            })?
        }
        (None, Some(er)) => erdos_renyi(er.n, er.p, seed::derive(config.agent.seed, "dataset"))?,
        _ => return Err(Error::Config(config.validate())),
    };
    Ok(match d.max_nodes {
        Some(k) => g.induced_prefix(k),
        None => g,
    })
}

fn checked(config: &ExperimentConfig) -> Result<()> {
    let problems = config.validate();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(problems))
    }
}

fn space_for(config: &ExperimentConfig) -> Result<ActionSpace> {
    ActionSpace::new(config.grids.clone(), config.walktrap_max_nodes)
}

/// Runs the agent and every enabled baseline, writing all artifacts under
/// `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    checked(config)?;
    let space = space_for(config)?;
    let stream = load_stream(config)?;
    let out = &config.output_dir;
    let mut report = prepare_dir(config, &stream)?;
    let cache = DetectionCache::new();

    report.agent = Some(agent_into(out, "agent", &config.agent, &stream, &space, &cache)?);
    if config.baselines.null_model {
        let null = null_config(config);
        let dir = out.join(NULL_DIR);
        create_dir(&dir)?;
        write_file(&dir.join(CONFIG_FILE), null.echo().as_bytes())?;
        report.null_model = Some(agent_into(&dir, "null", &null.agent, &stream, &space, &cache)?);
    }
    if !config.baselines.static_detectors.is_empty() {
        report.static_baselines = Some(static_into(out, config, &stream, &space)?);
    }
    finish(out, report, start)
}

/// The agent with ε forced to 1: actions drawn uniformly from the allowed
/// set, learning disabled in effect. Outputs are labelled `null` and the
/// echoed configuration shows the forced ε.
pub fn run_null_model(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    checked(config)?;
    let null = null_config(config);
    let space = space_for(&null)?;
    let stream = load_stream(&null)?;
    let mut report = prepare_dir(&null, &stream)?;
    report.null_model = Some(agent_into(
        &null.output_dir,
        "null",
        &null.agent,
        &stream,
        &space,
        &DetectionCache::new(),
    )?);
    finish(&null.output_dir, report, start)
}

/// Each configured detector once per snapshot at default parameters.
pub fn run_static_baselines(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    checked(config)?;
    let mut config = config.clone();
    if config.baselines.static_detectors.is_empty() {
        config.baselines.static_detectors = DetectorId::ALL.to_vec();
    }
    let space = space_for(&config)?;
    let stream = load_stream(&config)?;
    let mut report = prepare_dir(&config, &stream)?;
    report.static_baselines = Some(static_into(&config.output_dir, &config, &stream, &space)?);
    finish(&config.output_dir, report, start)
}

fn null_config(config: &ExperimentConfig) -> ExperimentConfig {
    let mut null = config.clone();
    null.agent.epsilon = 1.0;
    null.baselines = BaselineConfig::none();
    null
}

/// Writes the per-episode plot series into `dir`: accumulated reward and
/// mean step reward against the episode index.
pub fn emit_plot_data(log: &EpisodeLog, dir: &Path) -> Result<Vec<PathBuf>> {
    if log.episodes.is_empty() {
        return Err(Error::Refused("episode log is empty; nothing to plot".into()));
    }
    let mut acc = String::from("episode,accumulated_reward\n");
    let mut mean = String::from("episode,mean_step_reward\n");
    for e in &log.episodes {
        acc.push_str(&format!("{},{}\n", e.episode, e.accumulated_reward));
        let m = if e.steps == 0 {
            0.0
        } else {
            e.accumulated_reward / e.steps as f64
        };
        mean.push_str(&format!("{},{}\n", e.episode, m));
    }
    let a = dir.join(PLOT_ACCUMULATED_FILE);
    let b = dir.join(PLOT_MEAN_STEP_FILE);
    write_file(&a, acc.as_bytes())?;
    write_file(&b, mean.as_bytes())?;
    Ok(vec![a, b])
}

fn prepare_dir(config: &ExperimentConfig, stream: &SnapshotStream) -> Result<RunReport> {
    let out = &config.output_dir;
    create_dir(out)?;
    let echo = config.echo();
    write_file(&out.join(CONFIG_FILE), echo.as_bytes())?;
    stream.write_to_dir(&out.join("snapshots"))?;
    let last = stream.last();
    Ok(RunReport {
        metric: config.agent.metric,
        config_sha256: sha256_hex(echo.as_bytes()),
        dataset: DatasetSummary {
            nodes: last.node_count(),
            edges: last.edge_count(),
            raw_arcs: last.raw_arc_count(),
            snapshots: stream.iter().map(|g| (g.node_count(), g.edge_count())).collect(),
        },
        agent: None,
        null_model: None,
        static_baselines: None,
        wall_clock_seconds: 0.0,
        artifacts: Vec::new(),
    })
}

fn agent_into(
    dir: &Path,
    label: &str,
    agent: &crate::agent::AgentConfig,
    stream: &SnapshotStream,
    space: &ActionSpace,
    cache: &DetectionCache,
) -> Result<AgentSummary> {
    let start = Instant::now();
    let AgentRun { log, qtable } = run_agent_with_cache(stream, agent, space, cache)?;

    let mut csv = Vec::new();
    log.write_csv(space, &mut csv)?;
    write_file(&dir.join(EPISODES_FILE), &csv)?;
    let mut dump = Vec::new();
    qtable
        .write_dump(space, &mut dump)
        .map_err(|e| Error::io(dir.join(QTABLE_FILE), e))?;
    write_file(&dir.join(QTABLE_FILE), &dump)?;
    emit_plot_data(&log, dir)?;

    let best = log.best_step();
    if let Some(b) = best {
        let part = b.partition.as_ref().expect("best step has a partition");
        let mut tsv = Vec::new();
        part.write_tsv(stream.get(b.snapshot), &mut tsv)
            .map_err(|e| Error::io(dir.join(PARTITION_FILE), e))?;
        write_file(&dir.join(PARTITION_FILE), &tsv)?;
    }
    let average = log.average_metric();
    let best_metric = best.map_or(0.0, |b| b.reward);
    if average > best_metric + 1e-12 {
        return Err(Error::Invariant(format!(
            "{label}: average metric {average} exceeds best {best_metric}"
        )));
    }
    let episodes = log.episodes.len();
    Ok(AgentSummary {
        label: label.to_string(),
        episodes,
        steps: log.steps.len(),
        average_metric: average,
        best_metric,
        best_episode: best.map(|b| b.episode),
        best_action: best.map(|b| space.encode(b.action)),
        best_communities: best.and_then(|b| b.partition.as_ref()).map(|p| p.community_count()),
        mean_accumulated_reward: log.episodes.iter().map(|e| e.accumulated_reward).sum::<f64>()
            / episodes.max(1) as f64,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

fn static_into(
    dir: &Path,
    config: &ExperimentConfig,
    stream: &SnapshotStream,
    space: &ActionSpace,
) -> Result<StaticSummary> {
    let metric = config.agent.metric;
    let mut rows = String::from("detector,snapshot,nodes,edges,communities,metric\n");
    let mut detectors = Vec::new();
    for &d in &config.baselines.static_detectors {
        let start = Instant::now();
        let largest = stream.last().node_count();
        if d == DetectorId::Walktrap && largest > space.walktrap_max_nodes() {
            detectors.push(StaticDetectorSummary {
                detector: d,
                skipped: true,
                notice: Some(format!(
                    "walktrap skipped: {largest} nodes exceeds the limit of {}",
                    space.walktrap_max_nodes()
                )),
                per_snapshot: Vec::new(),
                average_metric: 0.0,
                best_metric: 0.0,
                wall_clock_seconds: 0.0,
            });
            continue;
        }
        let mut scores = Vec::with_capacity(stream.len());
        for (i, g) in stream.iter().enumerate() {
            let s = seed::derive(config.agent.seed, &format!("static/{}/{i}", d.name()));
            let part = detect(g, &ParamAssignment::default_for(d, s));
            let score = metric.score(g, &part)?;
            rows.push_str(&format!(
                "{},{i},{},{},{},{score}\n",
                d.name(),
                g.node_count(),
                g.edge_count(),
                part.community_count()
            ));
            scores.push(score);
        }
        detectors.push(StaticDetectorSummary {
            detector: d,
            skipped: false,
            notice: None,
            average_metric: scores.iter().sum::<f64>() / scores.len() as f64,
            best_metric: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            per_snapshot: scores,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        });
    }
    write_file(&dir.join(STATIC_FILE), rows.as_bytes())?;
    let best =
        detectors
            .iter()
            .filter(|d| !d.skipped)
            .fold(None, |best: Option<&StaticDetectorSummary>, d| match best {
                Some(b) if b.average_metric >= d.average_metric => Some(b),
                _ => Some(d),
            });
    Ok(StaticSummary {
        best_static: best.map(|b| b.average_metric),
        best_detector: best.map(|b| b.detector),
        detectors,
    })
}

fn finish(out: &Path, mut report: RunReport, start: Instant) -> Result<RunReport> {
    report.artifacts = hash_tree(out)?;
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&out.join(REPORT_FILE), json.as_bytes())?;
    Ok(report)
}

/// SHA-256 of every file under `root` except the report, sorted by path.
pub fn hash_tree(root: &Path) -> Result<Vec<Artifact>> {
    let mut files = Vec::new();
    collect_files(root, root, &mut files)?;
    files.sort();
    files
        .into_iter()
        .filter(|rel| rel != REPORT_FILE)
        .map(|rel| {
            let path = root.join(&rel);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            Ok(Artifact {
                path: rel,
                sha256: sha256_hex(&bytes),
            })
        })
        .collect()
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            let rel = path.strip_prefix(root).expect("under root");
            let parts: Vec<_> = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect();
            out.push(parts.join("/"));
        }
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    w.write_all(bytes)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{EpisodeSummary, StepRecord};

    fn small(dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::erdos_renyi(40, 0.15);
        c.snapshots.count = 3;
        c.agent.max_episodes = 6;
        c.agent.steps_per_episode = 5;
        c.agent.seed = 3;
        c.output_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn experiment_writes_every_artifact() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = small(tmp.path());
        c.baselines = BaselineConfig::all();
        let r = run_experiment(&c).unwrap();
        let names: Vec<_> = r.artifacts.iter().map(|a| a.path.as_str()).collect();
        for f in [
            CONFIG_FILE,
            EPISODES_FILE,
            QTABLE_FILE,
            PARTITION_FILE,
            STATIC_FILE,
            PLOT_ACCUMULATED_FILE,
            PLOT_MEAN_STEP_FILE,
            "null/episodes.csv",
            "null/config.toml",
            "snapshots/snapshot_000.txt",
            "snapshots/snapshot_002.txt",
        ] {
            assert!(names.contains(&f), "missing {f}");
        }
        assert!(tmp.path().join(REPORT_FILE).exists());
        let a = r.agent.unwrap();
        assert!(a.average_metric <= a.best_metric);
        assert_eq!(a.steps, 30);
        assert_eq!(r.static_baselines.unwrap().detectors.len(), 4);
        assert_eq!(r.config_sha256, sha256_hex(c.echo().as_bytes()));
        let back = RunReport::load(&tmp.path().join(REPORT_FILE)).unwrap();
        assert_eq!(back.artifacts, r.artifacts);
    }

    #[test]
    fn null_model_echo_forces_epsilon() {
        let tmp = tempfile::tempdir().unwrap();
        let c = small(tmp.path());
        let r = run_null_model(&c).unwrap();
        assert_eq!(r.null_model.unwrap().label, "null");
        let echoed = ExperimentConfig::load(&tmp.path().join(CONFIG_FILE)).unwrap();
        assert_eq!(echoed.agent.epsilon, 1.0);
        let text = fs::read_to_string(tmp.path().join(CONFIG_FILE)).unwrap();
        assert!(text.contains("epsilon = 1.0"));
    }

    #[test]
    fn plot_data_refuses_empty_log() {
        let tmp = tempfile::tempdir().unwrap();
        let log = EpisodeLog {
            metric: Metric::ModularityDensity,
            steps: Vec::<StepRecord>::new(),
            episodes: Vec::<EpisodeSummary>::new(),
        };
        assert!(matches!(emit_plot_data(&log, tmp.path()), Err(Error::Refused(_))));
    }

    #[test]
    fn missing_dataset_is_io() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::edge_list(tmp.path().join("nope.txt"));
        c.output_dir = tmp.path().join("out");
        let e = run_experiment(&c).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn invalid_config_is_validation() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = small(tmp.path());
        c.agent.gamma = 1.0;
        let e = run_experiment(&c).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn walktrap_skipped_above_limit() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = small(tmp.path());
        c.walktrap_max_nodes = 10;
        let r = run_static_baselines(&c).unwrap();
        let s = r.static_baselines.unwrap();
        let wt = s.detectors.iter().find(|d| d.detector == DetectorId::Walktrap).unwrap();
        assert!(wt.skipped && wt.notice.is_some());
        assert!(s.best_static.is_some());
    }
}
