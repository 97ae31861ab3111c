//! Vertex centralities used to guide the annealing moves.
//!
//! Automorphisms preserve every centrality here, which is what makes them
//! useful as a proxy for "which vertices may be swapped".

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_PAGERANK_MAX_ITER: usize = 1000;
/// Power iteration on grid-like graphs has a tiny spectral gap, so the
/// eigenvector budget is larger than the PageRank one.
pub const DEFAULT_EIGENVECTOR_MAX_ITER: usize = 10_000;
pub const DEFAULT_DAMPING: f64 = 0.85;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityKind {
    Degree,
    Eigenvector,
    PageRank,
    Clustering,
    Betweenness,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 5] = [
        CentralityKind::Degree,
        CentralityKind::Eigenvector,
        CentralityKind::PageRank,
        CentralityKind::Clustering,
        CentralityKind::Betweenness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CentralityKind::Degree => "degree",
            CentralityKind::Eigenvector => "eigenvector",
            CentralityKind::PageRank => "pagerank",
            CentralityKind::Clustering => "clustering",
            CentralityKind::Betweenness => "betweenness",
        }
    }

    /// Computes this centrality with default convergence settings.
    pub fn compute(self, g: &Graph) -> Result<CentralityVector> {
        match self {
            CentralityKind::Degree => Ok(degree_centrality(g)),
            CentralityKind::Eigenvector => eigenvector_centrality(g, DEFAULT_TOLERANCE, DEFAULT_EIGENVECTOR_MAX_ITER),
            CentralityKind::PageRank => pagerank(g, DEFAULT_DAMPING, DEFAULT_TOLERANCE, DEFAULT_PAGERANK_MAX_ITER),
            CentralityKind::Clustering => Ok(clustering_coefficient(g)),
            CentralityKind::Betweenness => Ok(betweenness_centrality(g)),
        }
    }
}

impl fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CentralityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CentralityKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown centrality {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralityVector {
    pub kind: CentralityKind,
    pub values: Vec<f64>,
}

impl CentralityVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn degree_centrality(g: &Graph) -> CentralityVector {
    CentralityVector { kind: CentralityKind::Degree, values: (0..g.n()).map(|v| g.degree(v) as f64).collect() }
}

/// Dominant eigenvector of the adjacency matrix, unit L2 norm, non-negative.
///
/// Iterates `(A + I)x` rather than `Ax`: the shift leaves the eigenvectors
/// alone but stops the iterate from oscillating on bipartite graphs, where
/// `−λ` is also an eigenvalue. Disconnected graphs converge to a vector
/// supported on the component(s) with the largest spectral radius.
pub fn eigenvector_centrality(g: &Graph, tol: f64, max_iter: usize) -> Result<CentralityVector> {
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let n = g.n();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for _ in 0..max_iter {
        for v in 0..n {
            next[v] = x[v] + g.neighbors(v).iter().map(|&w| x[w]).sum::<f64>();
        }
        let norm = next.iter().map(|y| y * y).sum::<f64>().sqrt();
        let mut change = 0.0f64;
        for (y, old) in next.iter_mut().zip(&x) {
            *y /= norm;
            change = change.max((*y - old).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if change < tol {
            return Ok(CentralityVector { kind: CentralityKind::Eigenvector, values: x });
        }
    }
    Err(Error::NoConvergence { what: "eigenvector centrality", iterations: max_iter })
}

/// PageRank with uniform teleportation; mass sitting on isolated vertices is
/// spread uniformly over all vertices.
pub fn pagerank(g: &Graph, alpha: f64, tol: f64, max_iter: usize) -> Result<CentralityVector> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("damping factor must lie in (0, 1), got {alpha}")));
    }
    let n = g.n();
    if n == 0 {
        return Ok(CentralityVector { kind: CentralityKind::PageRank, values: Vec::new() });
    }
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut share = vec![0.0; n];
    for _ in 0..max_iter {
        let mut dangling = 0.0;
        for v in 0..n {
            match g.degree(v) {
                0 => {
                    dangling += x[v];
                    share[v] = 0.0;
                }
                k => share[v] = x[v] / k as f64,
            }
        }
        let base = (1.0 - alpha) / nf + alpha * dangling / nf;
        for v in 0..n {
            next[v] = base + alpha * g.neighbors(v).iter().map(|&w| share[w]).sum::<f64>();
        }
        // Renormalize away rounding drift so the sum stays at 1.
        let total: f64 = next.iter().sum();
        let mut change = 0.0;
        for (y, old) in next.iter_mut().zip(&x) {
            *y /= total;
            change += (*y - old).abs();
        }
        std::mem::swap(&mut x, &mut next);
        if change < tol {
            return Ok(CentralityVector { kind: CentralityKind::PageRank, values: x });
        }
    }
    Err(Error::NoConvergence { what: "pagerank", iterations: max_iter })
}

/// Local clustering: fraction of neighbor pairs that are themselves
/// adjacent. Degree < 2 yields 0.
pub fn clustering_coefficient(g: &Graph) -> CentralityVector {
    let values = (0..g.n())
        .map(|v| {
            let nb = g.neighbors(v);
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &x) in nb.iter().enumerate() {
                links += nb[i + 1..].iter().filter(|&&y| g.has_edge(x, y)).count();
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect();
    CentralityVector { kind: CentralityKind::Clustering, values }
}

/// Exact betweenness over unordered vertex pairs, endpoints excluded.
///
/// One BFS plus dependency accumulation per source. Sources are processed
/// in parallel and the per-source contributions are summed in source order,
/// so the result does not depend on thread scheduling.
pub fn betweenness_centrality(g: &Graph) -> CentralityVector {
    let n = g.n();
    let partials: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| single_source_dependency(g, s)).collect();
    let mut values = vec![0.0; n];
    for delta in &partials {
        for (acc, d) in values.iter_mut().zip(delta) {
            *acc += d;
        }
    }
    // Each unordered pair was counted from both endpoints.
    for v in &mut values {
        *v /= 2.0;
    }
    CentralityVector { kind: CentralityKind::Betweenness, values }
}

fn single_source_dependency(g: &Graph, s: usize) -> Vec<f64> {
    let n = g.n();
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        let coeff = (1.0 + delta[w]) / sigma[w];
        for &v in g.neighbors(w) {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                delta[v] += sigma[v] * coeff;
            }
        }
    }
    delta[s] = 0.0;
    delta
}
