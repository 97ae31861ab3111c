//! Seeded constructors for the benchmark graph families: grids,
//! Erdős–Rényi, Barabási–Albert and duplication–divergence.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Consecutive failed duplications after which generation gives up.
pub const DD_RETRY_CAP: u64 = 1_000_000;

/// A graph family with its parameters. The seed is supplied separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    /// Cartesian product of paths with the given side lengths.
    Grid { dims: Vec<usize> },
    /// `G(n, p)`.
    Er { n: usize, p: f64 },
    /// Preferential attachment with `k` links per arriving vertex, grown from
    /// a path on `m0` vertices (`m0 = k` when omitted).
    Ba {
        n: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m0: Option<usize>,
    },
    /// Duplication–divergence with retention probability `sigma`.
    Dd { n: usize, sigma: f64 },
}

impl ModelSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::Grid { .. } => "grid",
            ModelSpec::Er { .. } => "er",
            ModelSpec::Ba { .. } => "ba",
            ModelSpec::Dd { .. } => "dd",
        }
    }

    /// Canonical parameter string used in result tables, e.g. `n=150;k=5;m0=5`.
    pub fn params(&self) -> String {
        match self {
            ModelSpec::Grid { dims } => {
                let dims: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                format!("dims={}", dims.join("x"))
            }
            ModelSpec::Er { n, p } => format!("n={n};p={p}"),
            ModelSpec::Ba { n, k, m0 } => format!("n={n};k={k};m0={}", m0.unwrap_or(*k)),
            ModelSpec::Dd { n, sigma } => format!("n={n};sigma={sigma}"),
        }
    }

    /// Vertex count of generated instances.
    pub fn n(&self) -> Result<usize> {
        match self {
            ModelSpec::Grid { dims } => grid_size(dims),
            ModelSpec::Er { n, .. } | ModelSpec::Ba { n, .. } | ModelSpec::Dd { n, .. } => Ok(*n),
        }
    }

    /// The two-dimensional `5 × (n/5)` grid used for the grid benchmarks.
    pub fn grid_2d(n: usize) -> Self {
        ModelSpec::Grid { dims: vec![5, n / 5] }
    }

    /// The three-dimensional `2 × 5 × (n/10)` grid.
    pub fn grid_3d(n: usize) -> Self {
        ModelSpec::Grid { dims: vec![2, 5, n / 10] }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::Grid { ref dims } => {
                if dims.is_empty() || dims.contains(&0) {
                    return Err(Error::invalid(format!("grid side lengths must be >= 1, got {dims:?}")));
                }
                grid_size(dims).map(|_| ())
            }
            ModelSpec::Er { p, .. } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!("edge probability must lie in [0, 1], got {p}")));
                }
                Ok(())
            }
            ModelSpec::Ba { n, k, m0 } => {
                let m0 = m0.unwrap_or(k);
                if !(1 <= k && k <= m0 && m0 < n) {
                    return Err(Error::invalid(format!(
                        "preferential attachment needs 1 <= k <= m0 < n, got n={n}, k={k}, m0={m0}"
                    )));
                }
                Ok(())
            }
            ModelSpec::Dd { n, sigma } => {
                if !(sigma > 0.0 && sigma <= 1.0) {
                    return Err(Error::invalid(format!("sigma must lie in (0, 1], got {sigma}")));
                }
                if n < 2 {
                    return Err(Error::invalid("duplication-divergence needs n >= 2"));
                }
                Ok(())
            }
        }
    }

    /// Builds an instance. The generator is ChaCha8 seeded with `seed`.
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match *self {
            ModelSpec::Grid { ref dims } => grid_graph(dims),
            ModelSpec::Er { n, p } => erdos_renyi(n, p, &mut rng),
            ModelSpec::Ba { n, k, m0 } => barabasi_albert(n, k, m0.unwrap_or(k), &mut rng),
            ModelSpec::Dd { n, sigma } => duplication_divergence(n, sigma, &mut rng),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family(), self.params())
    }
}

fn grid_size(dims: &[usize]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::invalid(format!("grid with sides {dims:?} has too many vertices")))
}

/// Product of paths. Vertex indices are mixed-radix with the first side
/// varying fastest.
pub fn grid_graph(dims: &[usize]) -> Result<Graph> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::invalid(format!("grid side lengths must be >= 1, got {dims:?}")));
    }
    let n = grid_size(dims)?;
    let mut edges = Vec::new();
    let mut stride = 1;
    for &len in dims {
        for v in 0..n {
            if (v / stride) % len + 1 < len {
                edges.push((v, v + stride));
            }
        }
        stride *= len;
    }
    Graph::from_edges(n, edges)
}

pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Preferential attachment from a path seed on `m0` vertices. Each arriving
/// vertex draws `k` distinct targets with probability proportional to degree,
/// redrawing duplicates.
pub fn barabasi_albert<R: Rng + ?Sized>(n: usize, k: usize, m0: usize, rng: &mut R) -> Result<Graph> {
    if !(1 <= k && k <= m0 && m0 < n) {
        return Err(Error::invalid(format!(
            "preferential attachment needs 1 <= k <= m0 < n, got n={n}, k={k}, m0={m0}"
        )));
    }
    let mut edges: Vec<(usize, usize)> = (1..m0).map(|i| (i - 1, i)).collect();
    // Each edge endpoint appears once, so a uniform pick is degree-weighted.
    let mut endpoints: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let mut targets = Vec::with_capacity(k);
    for v in m0..n {
        targets.clear();
        while targets.len() < k {
            let t = if endpoints.is_empty() {
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

/// Grows from `K₂`: a uniformly chosen vertex is copied together with its
/// links, each link kept with probability `sigma`. Copies that keep no link
/// are discarded and do not count towards `n`. The copy is never linked to
/// its original.
pub fn duplication_divergence<R: Rng + ?Sized>(n: usize, sigma: f64, rng: &mut R) -> Result<Graph> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    if n < 2 {
        return Err(Error::invalid("duplication-divergence needs n >= 2"));
    }
    let mut adjacency: Vec<Vec<usize>> = vec![vec![1], vec![0]];
    let mut failures = 0u64;
    let mut kept = Vec::new();
    while adjacency.len() < n {
        let original = rng.random_range(0..adjacency.len());
        kept.clear();
        kept.extend(adjacency[original].iter().copied().filter(|_| rng.random_bool(sigma)));
        if kept.is_empty() {
            failures += 1;
            if failures >= DD_RETRY_CAP {
                return Err(Error::Generation(format!(
                    "{failures} consecutive duplications lost every link (sigma={sigma})"
                )));
            }
            continue;
        }
        failures = 0;
        let copy = adjacency.len();
        for &w in &kept {
            adjacency[w].push(copy);
        }
        adjacency.push(kept.clone());
    }
    let edges =
        adjacency.iter().enumerate().flat_map(|(u, nb)| nb.iter().filter(move |&&w| u < w).map(move |&w| (u, w)));
    Graph::from_edges(n, edges)
}
