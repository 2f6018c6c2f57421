use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Graph;

/// Summary statistics of an undirected graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub raw_arcs: usize,
    pub largest_cc_nodes: usize,
    pub largest_cc_edges: usize,
    pub triangles: u64,
    /// Mean local clustering coefficient; nodes of degree < 2 count as 0.
    pub avg_clustering: f64,
}

/// Component label of every node (BFS, labels in order of discovery).
pub(crate) fn connected_components(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Triangles through each node, by degree-ordered edge orientation.
fn triangles_per_node(g: &Graph) -> Vec<u64> {
    let n = g.node_count();
    let rank = |v: usize| (g.degree(v), v);
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|u| g.neighbors(u).iter().copied().filter(|&v| rank(v) > rank(u)).collect())
        .collect();
    let mut count = vec![0u64; n];
    let mut mark = vec![usize::MAX; n];
    for u in 0..n {
        for &v in &forward[u] {
            mark[v] = u;
        }
        for &v in &forward[u] {
            for &w in &forward[v] {
                if mark[w] == u {
                    count[u] += 1;
                    count[v] += 1;
                    count[w] += 1;
                }
            }
        }
    }
    count
}

pub fn compute_stats(g: &Graph) -> GraphStats {
    let n = g.node_count();
    let (label, k) = connected_components(g);
    let mut comp_nodes = vec![0usize; k];
    let mut comp_edges = vec![0usize; k];
    for &l in &label {
        comp_nodes[l] += 1;
    }
    for &(u, _) in g.edges() {
        comp_edges[label[u]] += 1;
    }
    let largest = (0..k).max_by_key(|&c| (comp_nodes[c], std::cmp::Reverse(c)));

    let per_node = triangles_per_node(g);
    let triangles = per_node.iter().sum::<u64>() / 3;
    let clustering_sum: f64 = (0..n)
        .filter(|&v| g.degree(v) >= 2)
        .map(|v| {
            let d = g.degree(v) as f64;
            2.0 * per_node[v] as f64 / (d * (d - 1.0))
        })
        .sum();

    GraphStats {
        nodes: n,
        edges: g.edge_count(),
        raw_arcs: g.raw_arc_count(),
        largest_cc_nodes: largest.map_or(0, |c| comp_nodes[c]),
        largest_cc_edges: largest.map_or(0, |c| comp_edges[c]),
        triangles,
        avg_clustering: if n == 0 { 0.0 } else { clustering_sum / n as f64 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi;

    #[test]
    fn triangle_graph() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = compute_stats(&g);
        assert_eq!(s.triangles, 1);
        assert_eq!(s.avg_clustering, 1.0);
        assert_eq!((s.largest_cc_nodes, s.largest_cc_edges), (3, 3));
    }

    #[test]
    fn path_graph() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = compute_stats(&g);
        assert_eq!(s.triangles, 0);
        assert_eq!(s.avg_clustering, 0.0);
    }

    #[test]
    fn empty_graph() {
        let s = compute_stats(&Graph::empty());
        assert_eq!(s.nodes, 0);
        assert_eq!(s.largest_cc_nodes, 0);
        assert_eq!(s.avg_clustering, 0.0);
    }

    #[test]
    fn largest_component() {
        let g = Graph::from_edges(7, [(0, 1), (2, 3), (3, 4), (4, 2), (5, 6)]).unwrap();
        let s = compute_stats(&g);
        assert_eq!((s.largest_cc_nodes, s.largest_cc_edges), (3, 3));
    }

    /// All-triples enumeration, independent of the oriented counter.
    fn brute_triangles(g: &Graph) -> (u64, f64) {
        let n = g.node_count();
        let mut total = 0;
        let mut per = vec![0u64; n];
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        total += 1;
                        per[a] += 1;
                        per[b] += 1;
                        per[c] += 1;
                    }
                }
            }
        }
        let cc: f64 = (0..n)
            .map(|v| {
                let d = g.degree(v) as f64;
                if d < 2.0 {
                    0.0
                } else {
                    per[v] as f64 / (d * (d - 1.0) / 2.0)
                }
            })
            .sum::<f64>()
            / n.max(1) as f64;
        (total, cc)
    }

    #[test]
    fn triangles_match_enumeration_on_random_graphs() {
        for seed in 0..20 {
            let n = 20 + 4 * seed as usize;
            let g = erdos_renyi(n, 0.15 + 0.01 * seed as f64, seed).unwrap();
            let s = compute_stats(&g);
            let (t, cc) = brute_triangles(&g);
            assert_eq!(s.triangles, t, "seed {seed}");
            assert!((s.avg_clustering - cc).abs() < 1e-12);
        }
    }
}
