//! The approximate-symmetry objective.
//!
//! For a permutation `π` the energy `ε(π)` is a quarter of the entrywise L1
//! distance between the adjacency matrix and its permuted copy. Because a
//! permutation preserves the edge count, that equals the number of edges
//! whose image is a non-edge, which is how [`energy`] evaluates it.

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};

/// Largest graph for which [`energy_dense_oracle`] materializes matrices.
pub const DENSE_ORACLE_LIMIT: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Energy {
    /// Number of edges mapped onto non-edges.
    pub epsilon: u64,
    /// Vertex count, needed for normalization.
    pub n: usize,
}

impl Energy {
    pub fn new(epsilon: u64, n: usize) -> Self {
        Energy { epsilon, n }
    }

    /// `4ε / (n(n-1))`; zero exactly for automorphisms.
    pub fn normalized(&self) -> Result<f64> {
        normalized_symmetry(*self)
    }

    pub fn is_automorphism(&self) -> bool {
        self.epsilon == 0
    }
}

fn check_dims(g: &Graph, p: &Permutation) -> Result<()> {
    if g.n() != p.len() {
        return Err(Error::DimensionMismatch { graph: g.n(), perm: p.len() });
    }
    Ok(())
}

/// Exact mismatch count, O(m) membership tests.
pub fn energy(g: &Graph, p: &Permutation) -> Result<Energy> {
    check_dims(g, p)?;
    Ok(Energy::new(mismatched_edges(g, p.as_slice()), g.n()))
}

#[inline]
pub(crate) fn mismatched_edges(g: &Graph, forward: &[usize]) -> u64 {
    g.edges().iter().filter(|&&(u, v)| !g.has_edge(forward[u], forward[v])).count() as u64
}

/// Literal `¼‖A − PAPᵀ‖₁` with dense integer matrices, `P[i][j] = 1` iff
/// `i = π(j)`. Reference implementation for tests; O(n³).
pub fn energy_dense_oracle(g: &Graph, p: &Permutation) -> Result<Energy> {
    check_dims(g, p)?;
    let n = g.n();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::TooLarge { what: "the dense energy oracle", n, limit: DENSE_ORACLE_LIMIT });
    }
    let mut a = vec![0i64; n * n];
    for &(u, v) in g.edges() {
        a[u * n + v] = 1;
        a[v * n + u] = 1;
    }
    let mut perm = vec![0i64; n * n];
    for j in 0..n {
        perm[p.image(j) * n + j] = 1;
    }
    let pa = matmul(&perm, &a, n);
    let perm_t: Vec<i64> = (0..n * n).map(|k| perm[(k % n) * n + k / n]).collect();
    let papt = matmul(&pa, &perm_t, n);

    let l1: i64 = a.iter().zip(&papt).map(|(x, y)| (x - y).abs()).sum();
    debug_assert_eq!(l1 % 4, 0, "mismatch matrix entries come in groups of four");
    Ok(Energy::new((l1 / 4) as u64, n))
}

fn matmul(x: &[i64], y: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let xik = x[i * n + k];
            if xik == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += xik * y[k * n + j];
            }
        }
    }
    out
}

/// Change in ε caused by swapping the images of `a` and `b`, without
/// recomputing the objective.
pub fn energy_delta(g: &Graph, p: &Permutation, a: usize, b: usize) -> Result<i64> {
    check_dims(g, p)?;
    p.check_pair(a, b)?;
    Ok(delta_unchecked(g, p.as_slice(), a, b))
}

/// Only edges incident to `a` or `b` change image; the edge `{a, b}` itself
/// maps to the same unordered pair before and after the swap.
#[inline]
pub(crate) fn delta_unchecked(g: &Graph, forward: &[usize], a: usize, b: usize) -> i64 {
    let (pa, pb) = (forward[a], forward[b]);
    let mut delta = 0i64;
    for &j in g.neighbors(a) {
        if j == b {
            continue;
        }
        let pj = forward[j];
        delta += g.has_edge(pa, pj) as i64 - g.has_edge(pb, pj) as i64;
    }
    for &j in g.neighbors(b) {
        if j == a {
            continue;
        }
        let pj = forward[j];
        delta += g.has_edge(pb, pj) as i64 - g.has_edge(pa, pj) as i64;
    }
    delta
}

/// Normalized symmetry `4ε / (n(n−1))`.
pub fn normalized_symmetry(e: Energy) -> Result<f64> {
    if e.n < 2 {
        return Err(Error::TooFewVertices { n: e.n, min: 2 });
    }
    Ok(4.0 * e.epsilon as f64 / (e.n as f64 * (e.n as f64 - 1.0)))
}
