use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rlcomm::graph::EdgeOrder;
use rlcomm::harness::{self, BaselineConfig, ErdosRenyiSpec, ExperimentConfig, RunReport};
use rlcomm::{Error, Metric, Result};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Baselines {
    None,
    Null,
    Static,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Order {
    AsRead,
    Shuffled,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Q,
    Qds,
}

/// Detector selection by a SARSA agent on a growing network.
///
/// Flags override values from `--config`. Exit codes: 0 success,
/// 1 validation, 2 I/O, 3 internal invariant.
#[derive(Debug, Parser)]
#[command(name = "rlcomm", version)]
struct Cli {
    /// Base configuration (TOML), e.g. an echoed config.toml.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// SNAP edge list.
    #[arg(long, value_name = "PATH", conflicts_with = "er")]
    dataset: Option<PathBuf>,
    /// Erdős–Rényi graph G(N, P) instead of a dataset.
    #[arg(long, num_args = 2, value_names = ["N", "P"])]
    er: Option<Vec<String>>,
    /// Keep only the first N nodes of the dataset.
    #[arg(long, value_name = "N")]
    max_nodes: Option<usize>,
    #[arg(long, value_name = "K")]
    snapshots: Option<usize>,
    #[arg(long, value_enum)]
    order: Option<Order>,
    #[arg(long, value_name = "N")]
    episodes: Option<usize>,
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    #[arg(long, value_name = "F")]
    alpha: Option<f64>,
    #[arg(long, value_name = "F")]
    gamma: Option<f64>,
    #[arg(long, value_name = "F")]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    baselines: Option<Baselines>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Print graph statistics of the dataset as JSON and exit.
    #[arg(long)]
    stats: bool,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut c = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => match (&cli.dataset, &cli.er) {
            (Some(p), _) => ExperimentConfig::edge_list(p),
            _ => ExperimentConfig::erdos_renyi(0, 0.0),
        },
    };
    if let Some(p) = &cli.dataset {
        c.dataset.path = Some(p.clone());
        c.dataset.erdos_renyi = None;
    }
    if let Some(er) = &cli.er {
        let n = er[0]
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("--er: node count {:?} is not an integer", er[0])))?;
        let p = er[1]
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("--er: probability {:?} is not a number", er[1])))?;
        c.dataset.erdos_renyi = Some(ErdosRenyiSpec { n, p });
        c.dataset.path = None;
    }
    if cli.config.is_none() && cli.dataset.is_none() && cli.er.is_none() {
        return Err(Error::InvalidArgument(
            "one of --dataset, --er or --config is required".into(),
        ));
    }
    if cli.max_nodes.is_some() {
        c.dataset.max_nodes = cli.max_nodes;
    }
    if let Some(k) = cli.snapshots {
        c.snapshots.count = k;
    }
    if let Some(o) = cli.order {
        c.snapshots.order = match o {
            Order::AsRead => EdgeOrder::AsRead,
            Order::Shuffled => EdgeOrder::Shuffled,
        };
    }
    let a = &mut c.agent;
    a.max_episodes = cli.episodes.unwrap_or(a.max_episodes);
    a.steps_per_episode = cli.steps.unwrap_or(a.steps_per_episode);
    a.alpha = cli.alpha.unwrap_or(a.alpha);
    a.gamma = cli.gamma.unwrap_or(a.gamma);
    a.epsilon = cli.epsilon.unwrap_or(a.epsilon);
    a.seed = cli.seed.unwrap_or(a.seed);
    if let Some(m) = cli.metric {
        a.metric = match m {
            MetricArg::Q => Metric::Modularity,
            MetricArg::Qds => Metric::ModularityDensity,
        };
    }
    if let Some(b) = cli.baselines {
        c.baselines = match b {
            Baselines::None => BaselineConfig::none(),
            Baselines::Null => BaselineConfig {
                null_model: true,
                ..BaselineConfig::none()
            },
            Baselines::Static => BaselineConfig {
                null_model: false,
                ..BaselineConfig::all()
            },
            Baselines::All => BaselineConfig::all(),
        };
    }
    if let Some(out) = &cli.out {
        c.output_dir = out.clone();
    }
    Ok(c)
}

fn summarize(r: &RunReport) {
    let line = |s: &harness::AgentSummary| {
        println!(
            "{}: average {} best {} ({} episodes, {:.2}s)",
            s.label, s.average_metric, s.best_metric, s.episodes, s.wall_clock_seconds
        )
    };
    r.agent.iter().for_each(line);
    r.null_model.iter().for_each(line);
    if let Some(s) = &r.static_baselines {
        for d in &s.detectors {
            match &d.notice {
                Some(n) => eprintln!("notice: {n}"),
                None => println!("static {}: average {}", d.detector, d.average_metric),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let config = build_config(cli)?;
    if cli.stats {
        let g = harness::load_stream(&ExperimentConfig {
            snapshots: harness::SnapshotConfig {
                count: 1,
                ..config.snapshots.clone()
            },
            ..config
        })?;
        let stats = rlcomm::graph::compute_stats(g.last());
        println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
        return Ok(());
    }
    let report = harness::run_experiment(&config)?;
    summarize(&report);
    println!("report: {}", config.output_dir.join(harness::REPORT_FILE).display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
