//! Partition quality: Newman modularity and Chen et al. modularity density.
//!
//! Both metrics are computed from a [`CommunityTally`]: per-community internal
//! edge counts `m_c`, external edge counts `e_c`, node counts `n_c` and the
//! edge counts `m_cc'` between every pair of communities.

mod exact;

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use exact::{exact_best_partition, EXACT_MAX_NODES};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Disjoint, total assignment of nodes to dense community ids `0..c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    communities: usize,
}

impl Partition {
    /// Accepts an assignment whose ids are already dense.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let communities = assignment.iter().max().map_or(0, |&c| c + 1);
        let mut used = vec![false; communities];
        for &c in &assignment {
            used[c] = true;
        }
        if used.iter().any(|u| !u) {
            return Err(Error::Contract("community ids are not dense".into()));
        }
        Ok(Partition {
            assignment,
            communities,
        })
    }

    /// Renumbers arbitrary labels to `0..c` in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = HashMap::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            communities: map.len(),
        }
    }

    /// Everything in one community (none when `n == 0`).
    pub fn single(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            communities: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            communities: n,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.communities
    }

    pub fn community_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Node lists per community.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.communities];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Same grouping, ignoring community ids.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.len() == other.len()
            && Partition::from_labels(&self.assignment) == Partition::from_labels(&other.assignment)
    }

    /// `original_node_id<TAB>community_id`, one line per node.
    pub fn write_tsv<W: Write>(&self, g: &Graph, mut w: W) -> std::io::Result<()> {
        for (v, &c) in self.assignment.iter().enumerate() {
            writeln!(w, "{}\t{}", g.original_id(v), c)?;
        }
        Ok(())
    }
}

/// Per-community edge and node counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityTally {
    pub edges: usize,
    /// `m_c`
    pub internal: Vec<usize>,
    /// `e_c`
    pub external: Vec<usize>,
    /// `n_c`
    pub nodes: Vec<usize>,
    /// `(c, c', m_cc')` for `c < c'` and `m_cc' > 0`.
    pub cross: Vec<(usize, usize, usize)>,
}

impl CommunityTally {
    pub fn new(g: &Graph, part: &Partition) -> Result<Self> {
        check_cover(g, part)?;
        let c = part.community_count();
        let mut internal = vec![0; c];
        let mut external = vec![0; c];
        let mut nodes = vec![0; c];
        let mut cross: HashMap<(usize, usize), usize> = HashMap::new();
        for &a in part.assignment() {
            nodes[a] += 1;
        }
        for &(u, v) in g.edges() {
            let (a, b) = (part.community_of(u), part.community_of(v));
            if a == b {
                internal[a] += 1;
            } else {
                external[a] += 1;
                external[b] += 1;
                *cross.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut cross: Vec<_> = cross.into_iter().map(|((a, b), k)| (a, b, k)).collect();
        cross.sort_unstable();
        Ok(CommunityTally {
            edges: g.edge_count(),
            internal,
            external,
            nodes,
            cross,
        })
    }

    /// Density of links inside community `c`; 0 for communities of < 2 nodes.
    pub fn internal_density(&self, c: usize) -> f64 {
        let n = self.nodes[c];
        if n <= 1 {
            0.0
        } else {
            2.0 * self.internal[c] as f64 / (n as f64 * (n as f64 - 1.0))
        }
    }

    /// Density of links between `c` and `d` given `m_cd` edges between them.
    pub fn cross_density(&self, c: usize, d: usize, between: usize) -> f64 {
        let denom = self.nodes[c] * self.nodes[d];
        if denom == 0 {
            0.0
        } else {
            between as f64 / denom as f64
        }
    }

    pub fn modularity(&self) -> f64 {
        if self.edges == 0 {
            return 0.0;
        }
        let m = self.edges as f64;
        (0..self.internal.len())
            .map(|c| {
                let mc = self.internal[c] as f64;
                let deg = (2 * self.internal[c] + self.external[c]) as f64;
                mc / m - (deg / (2.0 * m)).powi(2)
            })
            .sum()
    }

    pub fn modularity_density(&self) -> f64 {
        if self.edges == 0 {
            return 0.0;
        }
        let m = self.edges as f64;
        let mut total: f64 = (0..self.internal.len())
            .map(|c| {
                let p = self.internal_density(c);
                let mc = self.internal[c] as f64;
                let deg = (2 * self.internal[c] + self.external[c]) as f64;
                mc / m * p - (deg / (2.0 * m) * p).powi(2)
            })
            .sum();
        // Each unordered pair appears once here and twice in the double sum.
        for &(c, d, k) in &self.cross {
            total -= 2.0 * (k as f64 / (2.0 * m)) * self.cross_density(c, d, k);
        }
        total
    }
}

fn check_cover(g: &Graph, part: &Partition) -> Result<()> {
    if part.len() != g.node_count() {
        return Err(Error::Contract(format!(
            "partition covers {} nodes but the graph has {}",
            part.len(),
            g.node_count()
        )));
    }
    Ok(())
}

/// `Q = Σ_c [ m_c/m − ((2m_c + e_c)/(2m))² ]`; 0 when the graph has no edges.
pub fn modularity(g: &Graph, part: &Partition) -> Result<f64> {
    Ok(CommunityTally::new(g, part)?.modularity())
}

/// Modularity density `Q_ds`; 0 when the graph has no edges.
pub fn modularity_density(g: &Graph, part: &Partition) -> Result<f64> {
    Ok(CommunityTally::new(g, part)?.modularity_density())
}

/// Which partition-quality function to optimize or report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "q")]
    Modularity,
    #[serde(rename = "qds")]
    ModularityDensity,
}

impl Metric {
    pub fn score(self, g: &Graph, part: &Partition) -> Result<f64> {
        let tally = CommunityTally::new(g, part)?;
        Ok(self.of_tally(&tally))
    }

    pub fn of_tally(self, tally: &CommunityTally) -> f64 {
        match self {
            Metric::Modularity => tally.modularity(),
            Metric::ModularityDensity => tally.modularity_density(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Modularity => "q",
            Metric::ModularityDensity => "qds",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(Metric::Modularity),
            "qds" => Ok(Metric::ModularityDensity),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}
