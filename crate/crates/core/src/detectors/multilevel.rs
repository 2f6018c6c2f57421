use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::scoring::Partition;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultilevelParams {
    pub resolution: f64,
    pub seed: u64,
}

const GAIN_EPS: f64 = 1e-10;
const MAX_PASSES: usize = 10_000;

/// Weighted graph of one aggregation level.
struct Level {
    /// Neighbor lists without self entries, sorted by neighbor id.
    adj: Vec<Vec<(usize, f64)>>,
    /// Diagonal entry `A_ii` (twice the weight of edges folded into `i`).
    loops: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph) -> Self {
        let adj = (0..g.node_count())
            .map(|v| g.neighbors(v).iter().map(|&u| (u, 1.0)).collect())
            .collect();
        Level {
            adj,
            loops: vec![0.0; g.node_count()],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn strength(&self, v: usize) -> f64 {
        self.loops[v] + self.adj[v].iter().map(|&(_, w)| w).sum::<f64>()
    }

    /// Collapses each community (dense ids `0..c`) into one node.
    fn aggregate(&self, comm: &[usize], c: usize) -> Level {
        let mut loops = vec![0.0; c];
        let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); c];
        for v in 0..self.len() {
            let cv = comm[v];
            loops[cv] += self.loops[v];
            for &(u, w) in &self.adj[v] {
                let cu = comm[u];
                if cu == cv {
                    loops[cv] += w;
                } else {
                    *links[cv].entry(cu).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adj: links.into_iter().map(|m| m.into_iter().collect()).collect(),
            loops,
        }
    }
}

/// Local-moving phase. Returns dense community ids and whether any node moved.
fn move_nodes(level: &Level, resolution: f64, rng: &mut seed::Rng) -> (Vec<usize>, bool) {
    let n = level.len();
    let strength: Vec<f64> = (0..n).map(|v| level.strength(v)).collect();
    let m2: f64 = strength.iter().sum();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut total = strength.clone();
    let mut link = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut any_move = false;

    for _ in 0..MAX_PASSES {
        order.shuffle(rng);
        let mut moved = false;
        for &v in &order {
            let own = comm[v];
            let k = strength[v];
            for &(u, w) in &level.adj[v] {
                let c = comm[u];
                if link[c] == 0.0 {
                    touched.push(c);
                }
                link[c] += w;
            }
            total[own] -= k;
            let gain = |c: usize, link: &[f64]| link[c] - resolution * total[c] * k / m2;
            let stay = gain(own, &link);
            let mut best = own;
            let mut best_gain = stay;
            touched.sort_unstable();
            for &c in &touched {
                if c == own {
                    continue;
                }
                let g = gain(c, &link);
                // `touched` is ascending, so near-ties keep the lowest id
                if g > best_gain + GAIN_EPS {
                    best = c;
                    best_gain = g;
                }
            }
            total[best] += k;
            if best != own {
                comm[v] = best;
                moved = true;
            }
            for &c in &touched {
                link[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        any_move = true;
    }
    let p = Partition::from_labels(&comm);
    (p.assignment().to_vec(), any_move)
}

/// Louvain multilevel modularity optimization at the given resolution.
///
/// Each level repeatedly moves single nodes, in seeded random order, to the
/// neighboring community with the largest positive modularity gain (lowest
/// community id on ties), then contracts communities into weighted
/// super-nodes. Stops once a level produces no move.
pub fn detect_multilevel(g: &Graph, params: &MultilevelParams) -> Partition {
    let mut rng = seed::rng(params.seed);
    let mut assignment: Vec<usize> = (0..g.node_count()).collect();
    let mut level = Level::from_graph(g);
    loop {
        let (comm, moved) = move_nodes(&level, params.resolution, &mut rng);
        if !moved {
            break;
        }
        let c = comm.iter().max().map_or(0, |&x| x + 1);
        for a in &mut assignment {
            *a = comm[*a];
        }
        level = level.aggregate(&comm, c);
    }
    Partition::from_labels(&assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{erdos_renyi, ring_of_cliques};
    use crate::scoring::modularity;

    fn params(resolution: f64, seed: u64) -> MultilevelParams {
        MultilevelParams { resolution, seed }
    }

    #[test]
    fn two_triangles() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        for seed in 0..20 {
            let p = detect_multilevel(&g, &params(1.0, seed));
            assert_eq!(p.assignment(), &[0, 0, 0, 1, 1, 1]);
            assert!((modularity(&g, &p).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_graph_is_one_community() {
        let g = erdos_renyi(5, 1.0, 0).unwrap();
        for seed in 0..20 {
            assert_eq!(detect_multilevel(&g, &params(1.0, seed)).community_count(), 1);
        }
    }

    #[test]
    fn finds_ring_of_cliques() {
        let g = ring_of_cliques(4, 5);
        let cliques = Partition::new((0..20).map(|v| v / 5).collect()).unwrap();
        let q_cliques = modularity(&g, &cliques).unwrap();
        for seed in 0..20 {
            let p = detect_multilevel(&g, &params(1.0, seed));
            assert_eq!(p.community_count(), 4);
            assert!(modularity(&g, &p).unwrap() >= q_cliques - 1e-12);
            assert!(p.same_grouping(&cliques));
        }
    }

    #[test]
    fn edgeless_graph_stays_singletons() {
        let g = Graph::from_edges(4, []).unwrap();
        assert_eq!(detect_multilevel(&g, &params(1.0, 0)).community_count(), 4);
        assert!(detect_multilevel(&Graph::empty(), &params(1.0, 0)).is_empty());
    }

    #[test]
    fn aggregation_preserves_total_weight() {
        let g = erdos_renyi(60, 0.1, 5).unwrap();
        let level = Level::from_graph(&g);
        let mut rng = seed::rng(1);
        let (comm, _) = move_nodes(&level, 1.0, &mut rng);
        let c = comm.iter().max().unwrap() + 1;
        let next = level.aggregate(&comm, c);
        let before: f64 = (0..level.len()).map(|v| level.strength(v)).sum();
        let after: f64 = (0..next.len()).map(|v| next.strength(v)).sum();
        assert_eq!(before, 2.0 * g.edge_count() as f64);
        assert!((before - after).abs() < 1e-9);
    }
}
