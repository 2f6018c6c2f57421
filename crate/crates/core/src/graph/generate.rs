use rand::Rng as _;

use super::Graph;
use crate::error::{Error, Result};
use crate::seed;

/// G(n, p): every unordered pair is an edge independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// `count` cliques of `size` nodes, consecutive cliques joined by one edge
/// (last node of clique i to first node of clique i+1, wrapping around).
pub fn ring_of_cliques(count: usize, size: usize) -> Graph {
    let mut edges = Vec::new();
    for c in 0..count {
        let base = c * size;
        for i in 0..size {
            for j in (i + 1)..size {
                edges.push((base + i, base + j));
            }
        }
    }
    if count > 1 && size > 0 {
        for c in 0..count {
            let next = (c + 1) % count;
            edges.push((c * size + size - 1, next * size));
        }
    }
    Graph::from_edges(count * size, edges).expect("generated edges are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_probabilities() {
        let g = erdos_renyi(10, 0.0, 3).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (10, 0));
        let g = erdos_renyi(10, 1.0, 3).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (10, 45));
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(erdos_renyi(10, 1.5, 0).is_err());
        assert!(erdos_renyi(10, -0.1, 0).is_err());
        assert!(erdos_renyi(10, f64::NAN, 0).is_err());
    }

    #[test]
    fn seed_reproducible() {
        assert_eq!(erdos_renyi(50, 0.1, 9).unwrap(), erdos_renyi(50, 0.1, 9).unwrap());
        assert_ne!(erdos_renyi(50, 0.1, 9).unwrap(), erdos_renyi(50, 0.1, 10).unwrap());
    }

    #[test]
    fn edge_count_near_binomial_mean() {
        // Binomial(C(1000,2), 0.01): mean 4995, sd = sqrt(4995 * 0.99) ~ 70.3.
        let (mean, sd) = (4995.0, (4995.0f64 * 0.99).sqrt());
        let g = erdos_renyi(1000, 0.01, 42).unwrap();
        assert!((g.edge_count() as f64 - mean).abs() < 4.0 * sd);
        // Across seeds the sample mean should sit close to the expectation too.
        let counts: Vec<f64> = (0..20)
            .map(|s| erdos_renyi(1000, 0.01, s).unwrap().edge_count() as f64)
            .collect();
        let avg = counts.iter().sum::<f64>() / counts.len() as f64;
        assert!((avg - mean).abs() < 4.0 * sd / (counts.len() as f64).sqrt());
    }

    #[test]
    fn ring_shape() {
        let g = ring_of_cliques(4, 5);
        assert_eq!(g.node_count(), 20);
        assert_eq!(g.edge_count(), 4 * 10 + 4);
        assert!(g.has_edge(4, 5));
        assert!(g.has_edge(19, 0));
    }
}
