//! Walktrap (Pons & Latapy): agglomerative clustering on random-walk
//! distances, cut at the modularity-maximizing level.
//!
//! Every node gets a self-loop for the walk, so `d(k) = degree(k) + 1`.
//! Communities are compared through their `t`-step transition profiles
//! scaled by `D^{-1/2}`:
//!
//! `Δσ(C1, C2) = (1/n) · |C1||C2| / (|C1| + |C2|) · ‖D^{-1/2}(P^t_C1 − P^t_C2)‖²`
//!
//! and the adjacent pair with the smallest `Δσ` merges first. Each connected
//! component is clustered on its own.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::graph::{connected_components, Graph};
use crate::scoring::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalktrapParams {
    pub walk_length: usize,
}

/// One agglomeration step inside a component, in component-local ids.
/// Ids `0..size` are the initial singletons; merge `i` creates id `size + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub delta_sigma: f64,
}

/// Merge history of one connected component.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    /// Graph node ids of the component, ascending.
    pub nodes: Vec<usize>,
    pub merges: Vec<Merge>,
    /// Number of merges applied at the modularity-maximizing cut.
    pub best_cut: usize,
}

#[derive(PartialEq)]
struct Candidate {
    delta: f64,
    a: usize,
    b: usize,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.delta
            .total_cmp(&other.delta)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

struct Community {
    size: usize,
    /// `D^{-1/2} P^t_C`, dense over the component.
    profile: Vec<f64>,
    /// Adjacent community id → number of edges between them.
    links: BTreeMap<usize, usize>,
    internal: usize,
    degree: usize,
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn delta_sigma(c1: &Community, c2: &Community, n: f64) -> f64 {
    let (s1, s2) = (c1.size as f64, c2.size as f64);
    s1 * s2 / (s1 + s2) * squared_distance(&c1.profile, &c2.profile) / n
}

/// Scaled `t`-step profile of every node of a (connected) local graph.
fn profiles(adj: &[Vec<usize>], t: usize) -> Vec<Vec<f64>> {
    let n = adj.len();
    let d: Vec<f64> = adj.iter().map(|a| a.len() as f64 + 1.0).collect();
    let scale: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut next = vec![0.0; n];
    (0..n)
        .map(|i| {
            let mut p = vec![0.0; n];
            p[i] = 1.0;
            for _ in 0..t {
                next.iter_mut().for_each(|v| *v = 0.0);
                for j in 0..n {
                    if p[j] == 0.0 {
                        continue;
                    }
                    let share = p[j] / d[j];
                    next[j] += share;
                    for &k in &adj[j] {
                        next[k] += share;
                    }
                }
                std::mem::swap(&mut p, &mut next);
            }
            p.iter_mut().zip(&scale).for_each(|(v, s)| *v *= s);
            p
        })
        .collect()
}

fn contribution(c: &Community, m: f64) -> f64 {
    c.internal as f64 / m - (c.degree as f64 / (2.0 * m)).powi(2)
}

/// Clusters one component. `nodes` are graph ids; `m` is the edge count of the
/// whole graph so modularity contributions add up across components.
fn cluster_component(g: &Graph, nodes: Vec<usize>, t: usize, n_total: usize, m: f64) -> Dendrogram {
    let size = nodes.len();
    let mut local = std::collections::HashMap::with_capacity(size);
    for (i, &v) in nodes.iter().enumerate() {
        local.insert(v, i);
    }
    let adj: Vec<Vec<usize>> = nodes
        .iter()
        .map(|&v| g.neighbors(v).iter().map(|u| local[u]).collect())
        .collect();

    let mut communities: Vec<Option<Community>> = profiles(&adj, t)
        .into_iter()
        .enumerate()
        .map(|(i, profile)| {
            Some(Community {
                size: 1,
                profile,
                links: adj[i].iter().map(|&j| (j, 1)).collect(),
                internal: 0,
                degree: adj[i].len(),
            })
        })
        .collect();

    let n = n_total as f64;
    let mut heap = BinaryHeap::new();
    for (i, a) in adj.iter().enumerate() {
        for &j in a {
            if i < j {
                let d = delta_sigma(communities[i].as_ref().unwrap(), communities[j].as_ref().unwrap(), n);
                heap.push(Reverse(Candidate { delta: d, a: i, b: j }));
            }
        }
    }

    let mut merges = Vec::with_capacity(size.saturating_sub(1));
    let mut q: f64 = if m > 0.0 {
        communities.iter().flatten().map(|c| contribution(c, m)).sum()
    } else {
        0.0
    };
    let (mut best_q, mut best_cut) = (q, 0);

    while let Some(Reverse(Candidate { delta, a, b })) = heap.pop() {
        if communities[a].is_none() || communities[b].is_none() {
            continue;
        }
        let c1 = communities[a].take().unwrap();
        let c2 = communities[b].take().unwrap();
        let id = communities.len();
        let between = c1.links[&b];
        let s = (c1.size + c2.size) as f64;
        let profile = c1
            .profile
            .iter()
            .zip(&c2.profile)
            .map(|(x, y)| (c1.size as f64 * x + c2.size as f64 * y) / s)
            .collect();
        let mut links = c1.links.clone();
        for (&k, &w) in &c2.links {
            *links.entry(k).or_insert(0) += w;
        }
        links.remove(&a);
        links.remove(&b);
        let merged = Community {
            size: c1.size + c2.size,
            profile,
            links,
            internal: c1.internal + c2.internal + between,
            degree: c1.degree + c2.degree,
        };
        if m > 0.0 {
            q += contribution(&merged, m) - contribution(&c1, m) - contribution(&c2, m);
        }
        for (&k, &w) in &merged.links {
            let other = communities[k].as_mut().expect("linked community is alive");
            other.links.remove(&a);
            other.links.remove(&b);
            other.links.insert(id, w);
        }
        for &k in merged.links.keys() {
            let d = delta_sigma(communities[k].as_ref().unwrap(), &merged, n);
            heap.push(Reverse(Candidate { delta: d, a: k, b: id }));
        }
        communities.push(Some(merged));
        merges.push(Merge {
            a,
            b,
            delta_sigma: delta,
        });
        if q > best_q + 1e-12 {
            best_q = q;
            best_cut = merges.len();
        }
    }

    Dendrogram {
        nodes,
        merges,
        best_cut,
    }
}

/// Merge dendrogram of every connected component, in order of each
/// component's smallest node.
pub fn walktrap_dendrograms(g: &Graph, params: &WalktrapParams) -> Vec<Dendrogram> {
    let (label, count) = connected_components(g);
    let mut members = vec![Vec::new(); count];
    for (v, &c) in label.iter().enumerate() {
        members[c].push(v);
    }
    let m = g.edge_count() as f64;
    members
        .into_iter()
        .map(|nodes| cluster_component(g, nodes, params.walk_length, g.node_count(), m))
        .collect()
}

pub fn detect_walktrap(g: &Graph, params: &WalktrapParams) -> Partition {
    let mut labels = vec![0usize; g.node_count()];
    let mut next_label = 0;
    for dendrogram in walktrap_dendrograms(g, params) {
        let size = dendrogram.nodes.len();
        // union-find over local ids 0..size + merges
        let total = size + dendrogram.merges.len();
        let mut parent: Vec<usize> = (0..total).collect();
        for (i, merge) in dendrogram.merges.iter().take(dendrogram.best_cut).enumerate() {
            parent[merge.a] = size + i;
            parent[merge.b] = size + i;
        }
        let find = |mut x: usize| {
            while parent[x] != x {
                x = parent[x];
            }
            x
        };
        let mut root_label = std::collections::HashMap::new();
        for (i, &v) in dendrogram.nodes.iter().enumerate() {
            let root = find(i);
            labels[v] = *root_label.entry(root).or_insert_with(|| {
                next_label += 1;
                next_label - 1
            });
        }
    }
    Partition::from_labels(&labels)
}
