use std::collections::VecDeque;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::scoring::Partition;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingEigenvectorParams {
    /// Accepted bisections before stopping; `None` splits until every group
    /// is indivisible.
    pub max_splits: Option<usize>,
    pub power_tol: f64,
    /// Iteration cap per eigenvector; `None` uses [`default_power_max_iter`].
    pub power_max_iter: Option<usize>,
}

/// `10 · n`, but never fewer than 1000 iterations.
pub fn default_power_max_iter(n: usize) -> usize {
    (10 * n).max(1000)
}

/// Generalized modularity matrix of one group, applied matrix-free:
/// `B_ij = A_ij − k_i k_j / 2m − δ_ij Σ_{l∈g} (A_il − k_i k_l / 2m)`.
pub(crate) struct GroupMatrix<'a> {
    g: &'a Graph,
    nodes: &'a [usize],
    /// Position of each graph node inside `nodes`, `usize::MAX` if absent.
    local: Vec<usize>,
    degree: Vec<f64>,
    row_sum: Vec<f64>,
    two_m: f64,
}

impl<'a> GroupMatrix<'a> {
    pub(crate) fn new(g: &'a Graph, nodes: &'a [usize]) -> Self {
        let two_m = 2.0 * g.edge_count() as f64;
        let mut local = vec![usize::MAX; g.node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let degree: Vec<f64> = nodes.iter().map(|&v| g.degree(v) as f64).collect();
        let group_degree: f64 = degree.iter().sum();
        let row_sum = nodes
            .iter()
            .zip(&degree)
            .map(|(&v, &k)| {
                let inside = g.neighbors(v).iter().filter(|&&u| local[u] != usize::MAX).count();
                inside as f64 - k * group_degree / two_m
            })
            .collect();
        GroupMatrix {
            g,
            nodes,
            local,
            degree,
            row_sum,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    pub(crate) fn apply(&self, x: &[f64], out: &mut [f64]) {
        let kx: f64 = self.degree.iter().zip(x).map(|(k, xi)| k * xi).sum();
        for (i, &v) in self.nodes.iter().enumerate() {
            let ax: f64 = self
                .g
                .neighbors(v)
                .iter()
                .filter_map(|&u| {
                    let j = self.local[u];
                    (j != usize::MAX).then(|| x[j])
                })
                .sum();
            out[i] = ax - self.degree[i] * kx / self.two_m - self.row_sum[i] * x[i];
        }
    }

    /// Gershgorin bound on the spectral radius.
    fn radius_bound(&self) -> f64 {
        let group_degree: f64 = self.degree.iter().sum();
        (0..self.len())
            .map(|i| {
                let inside = self
                    .g
                    .neighbors(self.nodes[i])
                    .iter()
                    .filter(|&&u| self.local[u] != usize::MAX)
                    .count();
                inside as f64 + self.degree[i] * group_degree / self.two_m + self.row_sum[i].abs()
            })
            .fold(0.0, f64::max)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Shift that makes the algebraically largest eigenvalue of `B + shift·I`
/// dominant: anything above `(|λ_min| − λ_max) / 2` works and the smaller
/// it is the faster the iteration converges. A short unshifted power run
/// estimates the spectral radius (capped by the Gershgorin bound) and
/// bounds `λ_max` from below by the largest Rayleigh quotient it meets.
fn shift_for(m: &GroupMatrix<'_>, start: &[f64], scratch: &mut [f64]) -> f64 {
    let bound = m.radius_bound();
    let mut x = start.to_vec();
    let mut radius = 0.0f64;
    let mut rayleigh = 0.0f64;
    for _ in 0..50 {
        m.apply(&x, scratch);
        let nb = norm(scratch);
        if nb == 0.0 {
            break;
        }
        radius = radius.max(nb);
        rayleigh = rayleigh.max(x.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum());
        for (xi, bi) in x.iter_mut().zip(scratch.iter()) {
            *xi = bi / nb;
        }
    }
    let r = (1.05 * radius).min(bound);
    ((r - rayleigh) / 2.0).max(0.0) + 0.05 * r
}

fn start_vector(n: usize) -> Vec<f64> {
    let mut rng = seed::rng(0x1ead_e16e ^ n as u64);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    x
}

/// Algebraically largest eigenpair of the group's modularity matrix by
/// shifted power iteration. Returns `None` if the residual
/// `‖Bx − λx‖ / ‖x‖` does not fall to `tol` within `max_iter` iterations.
pub(crate) fn leading_eigenpair(m: &GroupMatrix<'_>, tol: f64, max_iter: usize) -> Option<(f64, Vec<f64>)> {
    let x = start_vector(m.len());
    let mut scratch = vec![0.0; m.len()];
    let shift = shift_for(m, &x, &mut scratch);
    match power_iteration(m, x.clone(), shift, tol, max_iter) {
        Some((lambda, v)) if lambda > tol => Some((lambda, v)),
        // the estimated shift may have been too small to separate λ_max
        // from λ_min; the Gershgorin bound always does
        _ => power_iteration(m, x, m.radius_bound(), tol, max_iter),
    }
}

fn power_iteration(
    m: &GroupMatrix<'_>,
    mut x: Vec<f64>,
    shift: f64,
    tol: f64,
    max_iter: usize,
) -> Option<(f64, Vec<f64>)> {
    let mut bx = vec![0.0; m.len()];
    for _ in 0..max_iter {
        m.apply(&x, &mut bx);
        let lambda: f64 = x.iter().zip(&bx).map(|(a, b)| a * b).sum();
        let residual = x
            .iter()
            .zip(&bx)
            .map(|(a, b)| (b - lambda * a).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol {
            return Some((lambda, x));
        }
        for (xi, bi) in x.iter_mut().zip(&bx) {
            *xi = bi + shift * *xi;
        }
        let nx = norm(&x);
        if nx == 0.0 {
            return None;
        }
        x.iter_mut().for_each(|v| *v /= nx);
    }
    None
}

/// Splits `nodes` by the sign of the leading eigenvector, if that raises
/// modularity.
fn try_split(g: &Graph, nodes: &[usize], tol: f64, max_iter: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    if nodes.len() < 2 {
        return None;
    }
    let matrix = GroupMatrix::new(g, nodes);
    let (lambda, x) = leading_eigenpair(&matrix, tol, max_iter)?;
    if lambda <= tol {
        return None;
    }
    let s: Vec<f64> = x.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
    let mut bs = vec![0.0; s.len()];
    matrix.apply(&s, &mut bs);
    let delta_q = s.iter().zip(&bs).map(|(a, b)| a * b).sum::<f64>() / (2.0 * matrix.two_m);
    if delta_q <= 1e-12 {
        return None;
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (&v, &si) in nodes.iter().zip(&s) {
        if si > 0.0 {
            pos.push(v);
        } else {
            neg.push(v);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    Some((pos, neg))
}

/// Newman's leading-eigenvector method: recursive spectral bisection of the
/// modularity matrix, stopping at indivisible groups or after `max_splits`
/// accepted splits. Graphs without edges come back as one community.
pub fn detect_leading_eigenvector(g: &Graph, params: &LeadingEigenvectorParams) -> Partition {
    let n = g.node_count();
    if g.edge_count() == 0 {
        return Partition::single(n);
    }
    let max_iter = params.power_max_iter.unwrap_or_else(|| default_power_max_iter(n));
    let mut groups: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut queue = VecDeque::from([0usize]);
    let mut splits = 0;
    while let Some(i) = queue.pop_front() {
        if params.max_splits.is_some_and(|cap| splits >= cap) {
            break;
        }
        if let Some((a, b)) = try_split(g, &groups[i], params.power_tol, max_iter) {
            groups[i] = a;
            groups.push(b);
            queue.push_back(i);
            queue.push_back(groups.len() - 1);
            splits += 1;
        }
    }
    let mut labels = vec![0usize; n];
    for (c, group) in groups.iter().enumerate() {
        for &v in group {
            labels[v] = c;
        }
    }
    Partition::from_labels(&labels)
}
