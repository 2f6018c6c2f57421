use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{write_edge_list, Graph};
use crate::error::{Error, Result};
use crate::seed;

/// How edges are sequenced before cutting them into cumulative prefixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeOrder {
    /// Keep the order edges were first read in.
    AsRead,
    /// Seeded shuffle.
    Shuffled,
}

impl FromStr for EdgeOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-read" => Ok(EdgeOrder::AsRead),
            "shuffled" => Ok(EdgeOrder::Shuffled),
            other => Err(Error::InvalidArgument(format!("unknown edge order {other:?}"))),
        }
    }
}

/// Growing sequence of graphs; every snapshot's nodes and edges are contained
/// in the next one's.
#[derive(Debug, Clone)]
pub struct SnapshotStream {
    snapshots: Vec<Graph>,
}

impl SnapshotStream {
    /// Wraps explicit snapshots after checking the growth-only invariant.
    pub fn new(snapshots: Vec<Graph>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InvalidArgument(
                "a snapshot stream needs at least one graph".into(),
            ));
        }
        for pair in snapshots.windows(2) {
            if !contained_in(&pair[0], &pair[1]) {
                return Err(Error::InvalidArgument(
                    "snapshot is not contained in its successor".into(),
                ));
            }
        }
        Ok(SnapshotStream { snapshots })
    }

    pub fn single(g: Graph) -> Self {
        SnapshotStream { snapshots: vec![g] }
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> &Graph {
        &self.snapshots[i]
    }

    pub fn last(&self) -> &Graph {
        self.snapshots.last().expect("stream is non-empty")
    }

    pub fn iter(&self) -> impl Iterator<Item = &Graph> {
        self.snapshots.iter()
    }

    /// Writes `snapshot_000.txt`, `snapshot_001.txt`, ... into `dir`,
    /// creating it if needed.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let width = (self.len().saturating_sub(1)).to_string().len().max(3);
        let mut out = Vec::with_capacity(self.len());
        for (i, g) in self.snapshots.iter().enumerate() {
            let path = dir.join(format!("snapshot_{i:0width$}.txt"));
            let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_edge_list(g, std::io::BufWriter::new(file)).map_err(|e| Error::io(&path, e))?;
            out.push(path);
        }
        Ok(out)
    }
}

fn contained_in(a: &Graph, b: &Graph) -> bool {
    use std::collections::HashSet;
    let ids: HashSet<u64> = b.original_ids().iter().copied().collect();
    if !a.original_ids().iter().all(|id| ids.contains(id)) {
        return false;
    }
    let key = |g: &Graph, (u, v): (usize, usize)| {
        let (x, y) = (g.original_id(u), g.original_id(v));
        (x.min(y), x.max(y))
    };
    let edges: HashSet<(u64, u64)> = b.edges().iter().map(|&e| key(b, e)).collect();
    a.edges().iter().all(|&e| edges.contains(&key(a, e)))
}

/// Cuts the edges of `g` into `k` cumulative prefixes.
///
/// Snapshot `i` holds the first `floor((i + 1) * m / k)` edges of the
/// sequence and the nodes they touch; the final snapshot is `g` itself,
/// isolated nodes included. Node ids inside each snapshot follow `g`'s order.
pub fn build_snapshots(g: &Graph, k: usize, order: EdgeOrder, seed: u64) -> Result<SnapshotStream> {
    if k == 0 {
        return Err(Error::InvalidArgument("snapshot count must be at least 1".into()));
    }
    let mut sequence = g.edges().to_vec();
    if order == EdgeOrder::Shuffled {
        sequence.shuffle(&mut seed::rng(seed));
    }
    let m = sequence.len();
    let mut snapshots = Vec::with_capacity(k);
    for i in 0..k - 1 {
        let end = (i + 1) * m / k;
        let prefix = &sequence[..end];
        let mut touched = vec![false; g.node_count()];
        for &(u, v) in prefix {
            touched[u] = true;
            touched[v] = true;
        }
        let nodes: Vec<usize> = (0..g.node_count()).filter(|&v| touched[v]).collect();
        snapshots.push(g.restrict(&nodes, prefix));
    }
    snapshots.push(g.clone());
    Ok(SnapshotStream { snapshots })
}
