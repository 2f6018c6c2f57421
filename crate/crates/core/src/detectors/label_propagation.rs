use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::scoring::Partition;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPropagationParams {
    pub max_sweeps: usize,
    pub seed: u64,
}

/// Asynchronous label propagation.
///
/// Every node starts with its own label. Each sweep visits the nodes in a
/// freshly shuffled order; a node whose label is not among the most frequent
/// labels of its neighbors adopts one of those, chosen uniformly at random.
/// Stops after a sweep without changes or after `max_sweeps` sweeps.
pub fn detect_label_propagation(g: &Graph, params: &LabelPropagationParams) -> Partition {
    let n = g.node_count();
    let mut rng = seed::rng(params.seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut counts = vec![0usize; n];
    let mut seen = Vec::new();
    let mut best = Vec::new();

    for _ in 0..params.max_sweeps {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            if g.degree(v) == 0 {
                continue;
            }
            for &u in g.neighbors(v) {
                let l = labels[u];
                if counts[l] == 0 {
                    seen.push(l);
                }
                counts[l] += 1;
            }
            let top = seen.iter().map(|&l| counts[l]).max().unwrap_or(0);
            best.clear();
            best.extend(seen.iter().copied().filter(|&l| counts[l] == top));
            if !best.contains(&labels[v]) {
                labels[v] = best[rng.gen_range(0..best.len())];
                changed = true;
            }
            for &l in &seen {
                counts[l] = 0;
            }
            seen.clear();
        }
        if !changed {
            break;
        }
    }
    Partition::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn two_triangles_any_seed() {
        let g = two_triangles();
        for seed in 0..200 {
            for max_sweeps in [10, 50, 100] {
                let p = detect_label_propagation(&g, &LabelPropagationParams { max_sweeps, seed });
                assert_eq!(p.assignment(), &[0, 0, 0, 1, 1, 1], "seed {seed}");
            }
        }
    }

    #[test]
    fn trivial_graphs() {
        let params = LabelPropagationParams {
            max_sweeps: 10,
            seed: 1,
        };
        assert_eq!(
            detect_label_propagation(&Graph::from_edges(1, []).unwrap(), &params).community_count(),
            1
        );
        assert!(detect_label_propagation(&Graph::empty(), &params).is_empty());
        let isolated = detect_label_propagation(&Graph::from_edges(3, []).unwrap(), &params);
        assert_eq!(isolated.community_count(), 3);
    }

    #[test]
    fn deterministic_for_seed() {
        let g = crate::graph::erdos_renyi(120, 0.05, 3).unwrap();
        let p = LabelPropagationParams {
            max_sweeps: 50,
            seed: 17,
        };
        assert_eq!(detect_label_propagation(&g, &p), detect_label_propagation(&g, &p));
    }
}
