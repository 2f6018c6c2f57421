//! Exhaustive search over all set partitions of a small graph.

use super::{CommunityTally, Metric, Partition};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph [`exact_best_partition`] will enumerate (Bell(12) ≈ 4.2M).
pub const EXACT_MAX_NODES: usize = 12;

/// Scores an assignment in restricted-growth form using dense counters.
fn tally_rgs(g: &Graph, rgs: &[usize], communities: usize) -> CommunityTally {
    let c = communities;
    let mut internal = vec![0; c];
    let mut external = vec![0; c];
    let mut nodes = vec![0; c];
    let mut between = vec![0usize; c * c];
    for &a in rgs {
        nodes[a] += 1;
    }
    for &(u, v) in g.edges() {
        let (a, b) = (rgs[u], rgs[v]);
        if a == b {
            internal[a] += 1;
        } else {
            external[a] += 1;
            external[b] += 1;
            between[a.min(b) * c + a.max(b)] += 1;
        }
    }
    let mut cross = Vec::new();
    for a in 0..c {
        for b in (a + 1)..c {
            let k = between[a * c + b];
            if k > 0 {
                cross.push((a, b, k));
            }
        }
    }
    CommunityTally {
        edges: g.edge_count(),
        internal,
        external,
        nodes,
        cross,
    }
}

/// Returns a partition maximizing `metric` and its value.
///
/// Partitions are visited as restricted growth strings in lexicographic
/// order and only a strictly better score (by more than 1e-12) replaces the
/// incumbent, so ties resolve to the lexicographically smallest assignment.
pub fn exact_best_partition(g: &Graph, metric: Metric) -> Result<(Partition, f64)> {
    let n = g.node_count();
    if n > EXACT_MAX_NODES {
        return Err(Error::Refused(format!(
            "exhaustive search over {n} nodes exceeds the limit of {EXACT_MAX_NODES}"
        )));
    }
    if n == 0 {
        return Ok((Partition::single(0), 0.0));
    }
    let mut rgs = vec![0usize; n];
    // prefix_max[i] = max(rgs[0..=i])
    let mut prefix_max = vec![0usize; n];
    let mut best = (rgs.clone(), f64::NEG_INFINITY);
    loop {
        let communities = prefix_max[n - 1] + 1;
        let value = metric.of_tally(&tally_rgs(g, &rgs, communities));
        if value > best.1 + 1e-12 {
            best = (rgs.clone(), value);
        }
        if !advance(&mut rgs, &mut prefix_max) {
            break;
        }
    }
    let part = Partition::new(best.0).expect("restricted growth strings are dense");
    Ok((part, best.1))
}

/// Steps to the next restricted growth string; false after the last one.
fn advance(rgs: &mut [usize], prefix_max: &mut [usize]) -> bool {
    let n = rgs.len();
    for i in (1..n).rev() {
        if rgs[i] <= prefix_max[i - 1] {
            rgs[i] += 1;
            prefix_max[i] = prefix_max[i - 1].max(rgs[i]);
            for j in (i + 1)..n {
                rgs[j] = 0;
                prefix_max[j] = prefix_max[i];
            }
            return true;
        }
    }
    false
}
