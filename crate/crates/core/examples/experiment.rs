//! Full experiment from a configuration: agent, null model and static
//! baselines, with every artifact written under the output directory.
//!
//! ```text
//! cargo run --release --example experiment -- runs/er
//! ```

use rlcomm::harness::{run_experiment, BaselineConfig, ExperimentConfig};

fn main() -> rlcomm::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "runs/example".into());
    let mut config = ExperimentConfig::erdos_renyi(400, 0.02);
    config.snapshots.count = 5;
    config.agent.seed = 42;
    config.baselines = BaselineConfig::all();
    config.output_dir = out.into();

    print!("{}", config.echo());
    let report = run_experiment(&config)?;

    println!();
    for s in report.agent.iter().chain(&report.null_model) {
        println!(
            "{:<6} average {:.4} best {:.4} ({:.2}s)",
            s.label, s.average_metric, s.best_metric, s.wall_clock_seconds
        );
    }
    if let Some(st) = &report.static_baselines {
        for d in &st.detectors {
            println!("static {:<20} average {:.4}", d.detector.name(), d.average_metric);
        }
        println!(
            "best static: {:?} {:?}",
            st.best_detector.map(|d| d.name()),
            st.best_static
        );
    }
    println!(
        "\n{} artifacts in {}",
        report.artifacts.len(),
        config.output_dir.display()
    );
    for a in &report.artifacts {
        println!("  {}  {}", &a.sha256[..12], a.path);
    }
    Ok(())
}
