//! The four community detectors and the discrete action space built from
//! their parameter grids.
//!
//! An [`Action`] is a detector plus a position in that detector's grid. Seeds
//! for the randomized detectors are not part of the action; the caller
//! supplies one per run.

mod label_propagation;
mod leading_eigenvector;
mod multilevel;
mod walktrap;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use label_propagation::{detect_label_propagation, LabelPropagationParams};
pub use leading_eigenvector::{default_power_max_iter, detect_leading_eigenvector, LeadingEigenvectorParams};
pub use multilevel::{detect_multilevel, MultilevelParams};
pub use walktrap::{detect_walktrap, walktrap_dendrograms, Dendrogram, Merge, WalktrapParams};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scoring::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorId {
    LeadingEigenvector,
    Walktrap,
    LabelPropagation,
    Multilevel,
}

impl DetectorId {
    pub const ALL: [DetectorId; 4] = [
        DetectorId::LeadingEigenvector,
        DetectorId::Walktrap,
        DetectorId::LabelPropagation,
        DetectorId::Multilevel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorId::LeadingEigenvector => "leading_eigenvector",
            DetectorId::Walktrap => "walktrap",
            DetectorId::LabelPropagation => "label_propagation",
            DetectorId::Multilevel => "multilevel",
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DetectorId::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown detector {s:?}")))
    }
}

/// Split budget of the leading-eigenvector detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MaxSplits {
    Limit(usize),
    Unbounded,
}

impl MaxSplits {
    pub fn as_option(self) -> Option<usize> {
        match self {
            MaxSplits::Limit(k) => Some(k),
            MaxSplits::Unbounded => None,
        }
    }
}

impl fmt::Display for MaxSplits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxSplits::Limit(k) => write!(f, "{k}"),
            MaxSplits::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for MaxSplits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "unbounded" {
            return Ok(MaxSplits::Unbounded);
        }
        s.parse()
            .map(MaxSplits::Limit)
            .map_err(|_| Error::InvalidArgument(format!("invalid max_splits {s:?}")))
    }
}

impl From<MaxSplits> for String {
    fn from(m: MaxSplits) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for MaxSplits {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Parameter values each detector may be run with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrids {
    pub leading_eigenvector_max_splits: Vec<MaxSplits>,
    pub walktrap_walk_lengths: Vec<usize>,
    pub label_propagation_max_sweeps: Vec<usize>,
    pub multilevel_resolutions: Vec<f64>,
    pub power_tol: f64,
}

impl Default for ParamGrids {
    fn default() -> Self {
        ParamGrids {
            leading_eigenvector_max_splits: vec![MaxSplits::Limit(4), MaxSplits::Limit(16), MaxSplits::Unbounded],
            walktrap_walk_lengths: (2..=8).collect(),
            label_propagation_max_sweeps: vec![10, 50, 100],
            multilevel_resolutions: vec![0.5, 0.8, 1.0, 1.2, 1.5],
            power_tol: 1e-10,
        }
    }
}

impl ParamGrids {
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                problems.push(msg.to_string());
            }
        };
        need(
            !self.leading_eigenvector_max_splits.is_empty(),
            "leading_eigenvector_max_splits is empty",
        );
        need(!self.walktrap_walk_lengths.is_empty(), "walktrap_walk_lengths is empty");
        need(
            self.walktrap_walk_lengths.iter().all(|&t| t >= 1),
            "walk lengths must be at least 1",
        );
        need(
            !self.label_propagation_max_sweeps.is_empty(),
            "label_propagation_max_sweeps is empty",
        );
        need(
            self.label_propagation_max_sweeps.iter().all(|&s| s >= 1),
            "max_sweeps must be at least 1",
        );
        need(
            !self.multilevel_resolutions.is_empty(),
            "multilevel_resolutions is empty",
        );
        need(
            self.multilevel_resolutions.iter().all(|&r| r.is_finite() && r > 0.0),
            "resolutions must be positive",
        );
        need(
            self.power_tol.is_finite() && self.power_tol > 0.0,
            "power_tol must be positive",
        );
        problems
    }

    fn len(&self, detector: DetectorId) -> usize {
        match detector {
            DetectorId::LeadingEigenvector => self.leading_eigenvector_max_splits.len(),
            DetectorId::Walktrap => self.walktrap_walk_lengths.len(),
            DetectorId::LabelPropagation => self.label_propagation_max_sweeps.len(),
            DetectorId::Multilevel => self.multilevel_resolutions.len(),
        }
    }
}

/// Fully specified detector invocation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ParamAssignment {
    LeadingEigenvector(LeadingEigenvectorParams),
    Walktrap(WalktrapParams),
    LabelPropagation(LabelPropagationParams),
    Multilevel(MultilevelParams),
}

impl ParamAssignment {
    pub fn detector(&self) -> DetectorId {
        match self {
            ParamAssignment::LeadingEigenvector(_) => DetectorId::LeadingEigenvector,
            ParamAssignment::Walktrap(_) => DetectorId::Walktrap,
            ParamAssignment::LabelPropagation(_) => DetectorId::LabelPropagation,
            ParamAssignment::Multilevel(_) => DetectorId::Multilevel,
        }
    }

    /// Conventional defaults, used for the static baselines.
    pub fn default_for(detector: DetectorId, seed: u64) -> Self {
        match detector {
            DetectorId::LeadingEigenvector => ParamAssignment::LeadingEigenvector(LeadingEigenvectorParams {
                max_splits: None,
                power_tol: 1e-10,
                power_max_iter: None,
            }),
            DetectorId::Walktrap => ParamAssignment::Walktrap(WalktrapParams { walk_length: 4 }),
            DetectorId::LabelPropagation => {
                ParamAssignment::LabelPropagation(LabelPropagationParams { max_sweeps: 100, seed })
            }
            DetectorId::Multilevel => ParamAssignment::Multilevel(MultilevelParams { resolution: 1.0, seed }),
        }
    }
}

/// Runs the detector described by `params` on `g`.
pub fn detect(g: &Graph, params: &ParamAssignment) -> Partition {
    match params {
        ParamAssignment::LeadingEigenvector(p) => detect_leading_eigenvector(g, p),
        ParamAssignment::Walktrap(p) => detect_walktrap(g, p),
        ParamAssignment::LabelPropagation(p) => detect_label_propagation(g, p),
        ParamAssignment::Multilevel(p) => detect_multilevel(g, p),
    }
}

/// A detector and a position in its parameter grid. Orders as the action
/// space enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub detector: DetectorId,
    pub index: usize,
}

/// Default node count above which walktrap is masked out.
pub const WALKTRAP_MAX_NODES: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpace {
    grids: ParamGrids,
    walktrap_max_nodes: usize,
}

impl Default for ActionSpace {
    fn default() -> Self {
        ActionSpace {
            grids: ParamGrids::default(),
            walktrap_max_nodes: WALKTRAP_MAX_NODES,
        }
    }
}

impl ActionSpace {
    pub fn new(grids: ParamGrids, walktrap_max_nodes: usize) -> Result<Self> {
        let problems = grids.validate();
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        Ok(ActionSpace {
            grids,
            walktrap_max_nodes,
        })
    }

    pub fn grids(&self) -> &ParamGrids {
        &self.grids
    }

    pub fn walktrap_max_nodes(&self) -> usize {
        self.walktrap_max_nodes
    }

    /// Every action: detectors in [`DetectorId::ALL`] order, each followed by
    /// its grid in declared order.
    pub fn enumerate(&self) -> Vec<Action> {
        DetectorId::ALL
            .into_iter()
            .flat_map(|detector| (0..self.grids.len(detector)).map(move |index| Action { detector, index }))
            .collect()
    }

    pub fn len(&self) -> usize {
        DetectorId::ALL.into_iter().map(|d| self.grids.len(d)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether `action` may run on a graph with `nodes` nodes.
    pub fn allowed(&self, action: Action, nodes: usize) -> bool {
        action.detector != DetectorId::Walktrap || nodes <= self.walktrap_max_nodes
    }

    pub fn allowed_actions(&self, nodes: usize) -> Vec<Action> {
        self.enumerate()
            .into_iter()
            .filter(|&a| self.allowed(a, nodes))
            .collect()
    }

    /// One grid step up or down, clamped at the ends of the grid.
    pub fn neighbor(&self, action: Action, up: bool) -> Action {
        let len = self.grids.len(action.detector);
        let index = if up {
            (action.index + 1).min(len - 1)
        } else {
            action.index.saturating_sub(1)
        };
        Action { index, ..action }
    }

    /// `detector(key=value)`; stable, used in logs and Q-table dumps.
    pub fn encode(&self, action: Action) -> String {
        let g = &self.grids;
        let (key, value) = match action.detector {
            DetectorId::LeadingEigenvector => {
                ("max_splits", g.leading_eigenvector_max_splits[action.index].to_string())
            }
            DetectorId::Walktrap => ("walk_length", g.walktrap_walk_lengths[action.index].to_string()),
            DetectorId::LabelPropagation => ("max_sweeps", g.label_propagation_max_sweeps[action.index].to_string()),
            DetectorId::Multilevel => ("resolution", format!("{:?}", g.multilevel_resolutions[action.index])),
        };
        format!("{}({key}={value})", action.detector)
    }

    pub fn decode(&self, text: &str) -> Result<Action> {
        let bad = || Error::InvalidArgument(format!("malformed action {text:?}"));
        let (name, rest) = text.split_once('(').ok_or_else(bad)?;
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        let (key, value) = body.split_once('=').ok_or_else(bad)?;
        let detector: DetectorId = name.parse()?;
        let g = &self.grids;
        let index = match (detector, key) {
            (DetectorId::LeadingEigenvector, "max_splits") => {
                let v: MaxSplits = value.parse()?;
                g.leading_eigenvector_max_splits.iter().position(|&x| x == v)
            }
            (DetectorId::Walktrap, "walk_length") => {
                let v: usize = value.parse().map_err(|_| bad())?;
                g.walktrap_walk_lengths.iter().position(|&x| x == v)
            }
            (DetectorId::LabelPropagation, "max_sweeps") => {
                let v: usize = value.parse().map_err(|_| bad())?;
                g.label_propagation_max_sweeps.iter().position(|&x| x == v)
            }
            (DetectorId::Multilevel, "resolution") => {
                let v: f64 = value.parse().map_err(|_| bad())?;
                g.multilevel_resolutions.iter().position(|&x| x == v)
            }
            _ => None,
        };
        index
            .map(|index| Action { detector, index })
            .ok_or_else(|| Error::InvalidArgument(format!("action {text:?} is not in the grid")))
    }

    /// Concrete parameters for `action` on a graph of `nodes` nodes.
    pub fn assignment(&self, action: Action, seed: u64) -> ParamAssignment {
        let g = &self.grids;
        match action.detector {
            DetectorId::LeadingEigenvector => ParamAssignment::LeadingEigenvector(LeadingEigenvectorParams {
                max_splits: g.leading_eigenvector_max_splits[action.index].as_option(),
                power_tol: g.power_tol,
                power_max_iter: None,
            }),
            DetectorId::Walktrap => ParamAssignment::Walktrap(WalktrapParams {
                walk_length: g.walktrap_walk_lengths[action.index],
            }),
            DetectorId::LabelPropagation => ParamAssignment::LabelPropagation(LabelPropagationParams {
                max_sweeps: g.label_propagation_max_sweeps[action.index],
                seed,
            }),
            DetectorId::Multilevel => ParamAssignment::Multilevel(MultilevelParams {
                resolution: g.multilevel_resolutions[action.index],
                seed,
            }),
        }
    }

    /// Whether the action's output depends on the seed.
    pub fn is_seeded(action: Action) -> bool {
        matches!(action.detector, DetectorId::LabelPropagation | DetectorId::Multilevel)
    }

    /// Runs `action` on `g`, or refuses if the action is masked for `g`.
    pub fn run(&self, action: Action, g: &Graph, seed: u64) -> Result<Partition> {
        if !self.allowed(action, g.node_count()) {
            return Err(Error::Refused(format!(
                "{} is masked for graphs above {} nodes",
                self.encode(action),
                self.walktrap_max_nodes
            )));
        }
        Ok(detect(g, &self.assignment(action, seed)))
    }
}

/// The default action space, enumerated.
pub fn enumerate_actions() -> Vec<Action> {
    ActionSpace::default().enumerate()
}
