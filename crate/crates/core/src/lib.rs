//! Community detection on growing networks.
//!
//! Four classical detectors (leading eigenvector, walktrap, label propagation
//! and multilevel/Louvain) form the action space of a tabular SARSA agent
//! that learns which detector and parameter setting maximizes modularity
//! density on each snapshot of a dynamic graph.

pub mod agent;
pub mod detectors;
pub mod error;
pub mod graph;
pub mod harness;
pub mod scoring;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{Graph, SnapshotStream};
pub use scoring::{Metric, Partition};
