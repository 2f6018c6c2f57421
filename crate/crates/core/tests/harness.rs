use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use rlcomm::agent::{run_agent, AgentConfig};
use rlcomm::detectors::{ActionSpace, DetectorId};
use rlcomm::harness::{self, BaselineConfig, ExperimentConfig, RunReport};
use rlcomm::Metric;
use statrs::distribution::{ContinuousCDF, Normal};

fn read_csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            headers
                .iter()
                .map(String::from)
                .zip(rec.unwrap().iter().map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

#[test]
fn defaults_on_erdos_renyi_give_fifty_episodes() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::erdos_renyi(200, 0.05);
    c.output_dir = tmp.path().to_path_buf();
    let r = harness::run_experiment(&c).unwrap();
    let agent = r.agent.as_ref().unwrap();
    assert_eq!(agent.episodes, 50);

    let steps = read_csv(&tmp.path().join(harness::EPISODES_FILE));
    let plot = read_csv(&tmp.path().join(harness::PLOT_ACCUMULATED_FILE));
    let mean = read_csv(&tmp.path().join(harness::PLOT_MEAN_STEP_FILE));
    assert_eq!(plot.len(), 50);
    assert_eq!(mean.len(), 50);

    let mut per_episode: BTreeMap<u64, (f64, f64, usize, f64)> = BTreeMap::new();
    for row in &steps {
        let e = per_episode
            .entry(num(row, "episode") as u64)
            .or_insert((f64::NEG_INFINITY, 0.0, 0, 0.0));
        e.0 = e.0.max(num(row, "reward"));
        e.1 = num(row, "accumulated_reward");
        e.2 += 1;
        e.3 += num(row, "reward");
    }
    assert_eq!(per_episode.len(), 50);
    for (row, (ep, (_, last_acc, n, sum))) in plot.iter().zip(&per_episode) {
        assert_eq!(num(row, "episode") as u64, *ep);
        assert_eq!(num(row, "accumulated_reward"), *last_acc);
        assert!((last_acc - sum).abs() <= 1e-9);
        let m = mean.iter().find(|r| num(r, "episode") as u64 == *ep).unwrap();
        assert!((num(m, "mean_step_reward") - last_acc / *n as f64).abs() <= 1e-12);
    }

    let average = per_episode.values().map(|v| v.0).sum::<f64>() / 50.0;
    let best = per_episode.values().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    assert!((agent.average_metric - average).abs() <= 1e-12);
    assert!((agent.best_metric - best).abs() <= 1e-12);
    assert!(agent.average_metric <= agent.best_metric);
}

#[test]
fn every_artifact_is_listed_with_its_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::erdos_renyi(80, 0.08);
    c.agent.max_episodes = 8;
    c.baselines = BaselineConfig::all();
    c.output_dir = tmp.path().to_path_buf();
    harness::run_experiment(&c).unwrap();
    let r = RunReport::load(&tmp.path().join(harness::REPORT_FILE)).unwrap();
    let on_disk = harness::hash_tree(tmp.path()).unwrap();
    assert_eq!(r.artifacts, on_disk);
    for a in &r.artifacts {
        let bytes = fs::read(tmp.path().join(&a.path)).unwrap();
        assert_eq!(harness::sha256_hex(&bytes), a.sha256);
    }
    let echo = fs::read_to_string(tmp.path().join(harness::CONFIG_FILE)).unwrap();
    assert_eq!(r.config_sha256, harness::sha256_hex(echo.as_bytes()));
}

#[test]
fn static_baselines_agree_on_two_triangles() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("two_triangles.txt");
    fs::write(&data, "# two triangles\n1\t2\n2\t3\n3\t1\n4\t5\n5\t6\n6\t4\n").unwrap();
    let mut c = ExperimentConfig::edge_list(&data);
    c.snapshots.count = 1;
    c.agent.metric = Metric::Modularity;
    c.output_dir = tmp.path().join("out");
    let r = harness::run_static_baselines(&c).unwrap();
    let s = r.static_baselines.unwrap();
    assert_eq!(s.detectors.len(), 4);
    for d in &s.detectors {
        assert!(!d.skipped);
        assert!(
            (d.average_metric - 0.5).abs() <= 1e-12,
            "{}: {}",
            d.detector,
            d.average_metric
        );
    }
    let max = s
        .detectors
        .iter()
        .map(|d| d.average_metric)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(s.best_static, Some(max));
    let rows = read_csv(&tmp.path().join("out").join(harness::STATIC_FILE));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["communities"] == "2"));
}

#[test]
fn all_detectors_skippable_lists_them() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::erdos_renyi(30, 0.2);
    c.walktrap_max_nodes = 5;
    c.baselines.static_detectors = vec![DetectorId::Walktrap];
    c.output_dir = tmp.path().to_path_buf();
    let s = harness::run_static_baselines(&c).unwrap().static_baselines.unwrap();
    assert_eq!(s.detectors.len(), 1);
    assert!(s.detectors[0].skipped);
    assert_eq!(s.best_static, None);
}

fn mann_kendall(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = xs[j] - xs[i];
            if d > 0.0 {
                s += 1.0;
            } else if d < 0.0 {
                s -= 1.0;
            }
        }
    }
    let mut ties: BTreeMap<u64, usize> = BTreeMap::new();
    for x in xs {
        *ties.entry(x.to_bits()).or_default() += 1;
    }
    let nf = n as f64;
    let tie_term: f64 = ties.values().map(|&t| (t * (t - 1) * (2 * t + 5)) as f64).sum();
    (s, (nf * (nf - 1.0) * (2.0 * nf + 5.0) - tie_term) / 18.0)
}

#[test]
fn null_model_has_no_trend() {
    let space = ActionSpace::default();
    let (mut s_total, mut var_total) = (0.0, 0.0);
    for seed in 0..20 {
        let mut c = ExperimentConfig::erdos_renyi(120, 0.05);
        c.snapshots.count = 1;
        c.agent.seed = seed;
        c.agent.epsilon = 1.0;
        let stream = harness::load_stream(&c).unwrap();
        let run = run_agent(&stream, &c.agent, &space).unwrap();
        let trace: Vec<f64> = run.log.episodes.iter().map(|e| e.accumulated_reward).collect();
        let (s, var) = mann_kendall(&trace);
        s_total += s;
        var_total += var;
    }
    let z = if s_total > 0.0 {
        (s_total - 1.0) / var_total.sqrt()
    } else if s_total < 0.0 {
        (s_total + 1.0) / var_total.sqrt()
    } else {
        0.0
    };
    let p = 2.0 * (1.0 - Normal::new(0.0, 1.0).unwrap().cdf(z.abs()));
    assert!(p > 0.05, "aggregated Mann-Kendall z = {z}, p = {p}");
}

#[test]
fn null_model_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::erdos_renyi(60, 0.1);
    c.agent.max_episodes = 6;
    c.agent.epsilon = 0.3;
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        c.output_dir = tmp.path().join(name);
        let r = harness::run_null_model(&c).unwrap();
        assert_eq!(r.null_model.as_ref().unwrap().label, "null");
        runs.push(r.artifacts);
    }
    assert_eq!(runs[0], runs[1]);
    let echoed = ExperimentConfig::load(&tmp.path().join("a").join(harness::CONFIG_FILE)).unwrap();
    assert_eq!(
        echoed.agent,
        AgentConfig {
            epsilon: 1.0,
            ..c.agent.clone()
        }
    );
}

fn rlcomm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rlcomm"))
}

#[test]
fn cli_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    let ok = rlcomm()
        .args(["--er", "40", "0.1", "--episodes", "3", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(ok.code(), Some(0));

    let bad_alpha = rlcomm()
        .args(["--er", "40", "0.1", "--alpha", "1.5", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(bad_alpha.code(), Some(1));

    let both = tmp.path().join("both.toml");
    fs::write(
        &both,
        "[dataset]\npath = \"x.txt\"\n[dataset.erdos_renyi]\nn = 10\np = 0.5\n",
    )
    .unwrap();
    let o = rlcomm()
        .arg("--config")
        .arg(&both)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("both"));

    let missing = tmp.path().join("missing.txt");
    let o = rlcomm()
        .arg("--dataset")
        .arg(&missing)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.txt"));

    let malformed = tmp.path().join("malformed.txt");
    fs::write(&malformed, "1 2\n3\n").unwrap();
    let o = rlcomm()
        .arg("--dataset")
        .arg(&malformed)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
