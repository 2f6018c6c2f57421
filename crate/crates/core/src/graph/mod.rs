//! Undirected simple graphs, SNAP edge-list I/O, generators, snapshot streams
//! and dataset statistics.
//!
//! Node ids are dense `0..n`. The external id each node was read under is
//! kept alongside so partitions and snapshots can be written back in the
//! caller's id space.

mod generate;
mod snapshot;
mod stats;

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

pub use generate::{erdos_renyi, ring_of_cliques};
pub use snapshot::{build_snapshots, EdgeOrder, SnapshotStream};
pub(crate) use stats::connected_components;
pub use stats::{compute_stats, GraphStats};

use crate::error::{Error, Result};

/// Immutable undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    /// Unordered pairs stored as `(min, max)`, in insertion order.
    edges: Vec<(usize, usize)>,
    original_ids: Vec<u64>,
    raw_arcs: usize,
}

impl Graph {
    /// Builds a graph on `node_count` nodes. Self-loops are dropped and
    /// repeated pairs (in either direction) are collapsed to one edge; the
    /// first occurrence fixes the edge's position in [`Graph::edges`].
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let ids = (0..node_count as u64).collect();
        Self::with_original_ids(ids, edges)
    }

    /// Like [`Graph::from_edges`] but with an explicit external id per node.
    pub fn with_original_ids<I>(original_ids: Vec<u64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = original_ids.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut raw_arcs = 0;
        for (u, v) in edges {
            raw_arcs += 1;
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key) {
                kept.push(key);
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            adjacency,
            edges: kept,
            original_ids,
            raw_arcs,
        })
    }

    pub fn empty() -> Self {
        Graph {
            adjacency: Vec::new(),
            edges: Vec::new(),
            original_ids: Vec::new(),
            raw_arcs: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of undirected edges `m`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of arcs ingested before self-loop removal and symmetrization.
    pub fn raw_arc_count(&self) -> usize {
        self.raw_arcs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degree_sum(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn original_id(&self, v: usize) -> u64 {
        self.original_ids[v]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Subgraph induced by the nodes `0..max_nodes`, keeping edge order.
    ///
    /// With ids assigned in order of first appearance (as the loader does),
    /// this is the part of the network that existed once `max_nodes` distinct
    /// nodes had been seen.
    pub fn induced_prefix(&self, max_nodes: usize) -> Graph {
        let n = max_nodes.min(self.node_count());
        let edges: Vec<_> = self.edges.iter().copied().filter(|&(u, v)| u < n && v < n).collect();
        Graph::with_original_ids(self.original_ids[..n].to_vec(), edges).expect("prefix edges are in range")
    }

    /// Subgraph on `nodes` (sorted, distinct dense ids of `self`) with the
    /// given edges, which must lie inside `nodes`.
    pub(crate) fn restrict(&self, nodes: &[usize], edges: &[(usize, usize)]) -> Graph {
        let mut local = vec![usize::MAX; self.node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let ids = nodes.iter().map(|&v| self.original_ids[v]).collect();
        Graph::with_original_ids(ids, edges.iter().map(|&(u, v)| (local[u], local[v])))
            .expect("restricted edges are in range")
    }
}

/// Reads a SNAP-style edge list.
///
/// Lines starting with `#` and blank lines are skipped. Every other line must
/// hold exactly two non-negative integer ids separated by tabs or spaces.
/// Dense ids are assigned in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut ids = Vec::new();
    let mut arcs = Vec::new();
    let mut intern = |id: u64| {
        *index.entry(id).or_insert_with(|| {
            ids.push(id);
            ids.len() - 1
        })
    };
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two node ids, got {trimmed:?}"),
            });
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        let u = intern(a);
        let v = intern(b);
        arcs.push((u, v));
    }
    Graph::with_original_ids(ids, arcs)
}

/// Writes `g` as an edge list in original ids, readable by [`load_edge_list`].
///
/// Isolated nodes are written as self-loop lines so the node set survives a
/// round trip; the loader keeps the node and drops the loop.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# Undirected graph")?;
    writeln!(w, "# Nodes: {} Edges: {}", g.node_count(), g.edge_count())?;
    writeln!(w, "# FromNodeId\tToNodeId")?;
    for &(u, v) in g.edges() {
        writeln!(w, "{}\t{}", g.original_id(u), g.original_id(v))?;
    }
    for v in 0..g.node_count() {
        if g.degree(v) == 0 {
            let id = g.original_id(v);
            writeln!(w, "{id}\t{id}")?;
        }
    }
    Ok(())
}
