use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agent::AgentConfig;
use crate::detectors::{DetectorId, ParamGrids, WALKTRAP_MAX_NODES};
use crate::error::{Error, Result};
use crate::graph::EdgeOrder;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErdosRenyiSpec {
    pub n: usize,
    pub p: f64,
}

/// Where the graph comes from. Exactly one of `path` and `erdos_renyi` must
/// be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erdos_renyi: Option<ErdosRenyiSpec>,
    /// Keep only the first `max_nodes` nodes (in order of first appearance).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotConfig {
    pub count: usize,
    pub order: EdgeOrder,
}

impl Default for SnapshotConfig {
    fn default() -> Self {
        SnapshotConfig {
            count: 5,
            order: EdgeOrder::AsRead,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    /// Run the ε = 1 agent alongside.
    pub null_model: bool,
    /// Detectors to run once per snapshot at default parameters.
    pub static_detectors: Vec<DetectorId>,
}

impl BaselineConfig {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        BaselineConfig {
            null_model: true,
            static_detectors: DetectorId::ALL.to_vec(),
        }
    }
}

/// Everything that determines an experiment. `agent.seed` is the root seed
/// of every random stream in the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub snapshots: SnapshotConfig,
    #[serde(default)]
    pub agent: AgentConfig,
    #[serde(default)]
    pub baselines: BaselineConfig,
    #[serde(default)]
    pub grids: ParamGrids,
    #[serde(default = "default_walktrap_max_nodes")]
    pub walktrap_max_nodes: usize,
    /// Not part of the echoed configuration; results do not depend on it.
    #[serde(default, skip_serializing_if = "path_is_empty")]
    pub output_dir: PathBuf,
}

fn default_walktrap_max_nodes() -> usize {
    WALKTRAP_MAX_NODES
}

fn path_is_empty(p: &Path) -> bool {
    p.as_os_str().is_empty()
}

impl ExperimentConfig {
    pub fn erdos_renyi(n: usize, p: f64) -> Self {
        ExperimentConfig {
            dataset: DatasetConfig {
                erdos_renyi: Some(ErdosRenyiSpec { n, p }),
                ..DatasetConfig::default()
            },
            ..Self::blank()
        }
    }

    pub fn edge_list(path: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            dataset: DatasetConfig {
                path: Some(path.into()),
                ..DatasetConfig::default()
            },
            ..Self::blank()
        }
    }

    fn blank() -> Self {
        ExperimentConfig {
            dataset: DatasetConfig::default(),
            snapshots: SnapshotConfig::default(),
            agent: AgentConfig::default(),
            baselines: BaselineConfig::none(),
            grids: ParamGrids::default(),
            walktrap_max_nodes: WALKTRAP_MAX_NODES,
            output_dir: PathBuf::new(),
        }
    }

    /// Every problem with the configuration, empty when valid.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        match (&self.dataset.path, &self.dataset.erdos_renyi) {
            (Some(_), Some(_)) => problems.push("dataset: both an edge-list path and erdos_renyi are set".into()),
            (None, None) => problems.push("dataset: neither an edge-list path nor erdos_renyi is set".into()),
            (None, Some(er)) if !(0.0..=1.0).contains(&er.p) => {
                problems.push(format!("dataset.erdos_renyi.p = {} is outside [0, 1]", er.p))
            }
            _ => {}
        }
        if self.snapshots.count == 0 {
            problems.push("snapshots.count must be at least 1".into());
        }
        problems.extend(self.agent.validate().into_iter().map(|p| format!("agent: {p}")));
        problems.extend(self.grids.validate().into_iter().map(|p| format!("grids: {p}")));
        if path_is_empty(&self.output_dir) {
            problems.push("output_dir is not set".into());
        }
        problems
    }

    /// TOML text of the configuration without its output directory.
    pub fn echo(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        toml::to_string(&c).expect("configuration serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_sources_rejected() {
        let mut c = ExperimentConfig::erdos_renyi(10, 0.5);
        c.output_dir = "out".into();
        assert!(c.validate().is_empty());
        c.dataset.path = Some("x.txt".into());
        let problems = c.validate();
        assert_eq!(problems.len(), 1);
        assert!(problems[0].contains("both"));
    }

    #[test]
    fn lists_every_problem() {
        let mut c = ExperimentConfig::erdos_renyi(10, 1.5);
        c.snapshots.count = 0;
        c.agent.alpha = 2.0;
        assert_eq!(c.validate().len(), 4);
    }

    #[test]
    fn echo_round_trips_without_output_dir() {
        let mut c = ExperimentConfig::erdos_renyi(200, 0.05);
        c.baselines = BaselineConfig::all();
        c.agent.patience = Some(4);
        c.output_dir = "somewhere".into();
        let text = c.echo();
        assert!(!text.contains("somewhere"));
        let mut back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert!(path_is_empty(&back.output_dir));
        back.output_dir = c.output_dir.clone();
        assert_eq!(back, c);
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let c = ExperimentConfig::from_toml_str("[dataset]\npath = \"cit-HepTh.txt\"\n").unwrap();
        assert_eq!(c.agent, AgentConfig::default());
        assert_eq!(c.agent.max_episodes, 50);
        assert_eq!((c.agent.alpha, c.agent.gamma, c.agent.epsilon), (0.8, 0.5, 0.2));
        assert_eq!(c.walktrap_max_nodes, 50_000);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_toml_str("[dataset]\npath = \"a\"\nbogus = 1\n").is_err());
    }
}
