//! Centrality-guided transposition proposals.
//!
//! Each vertex pair gets a similarity `m_ij = 1 / (|Γ̂(i) − Γ̂(j)| + β)`
//! where `Γ̂` is the centrality rescaled to `[0, 1]`. A guided move picks a
//! vertex `a` uniformly and then a partner `b` with probability proportional
//! to `max(ΔM_b, φ)`, where `ΔM_b` is the similarity gained by swapping the
//! images of `a` and `b`:
//!
//! ```text
//! ΔM_b = m[a][π(b)] + m[b][π(a)] − m[a][π(a)] − m[b][π(b)]
//! ```

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::centrality::{CentralityKind, CentralityVector};
use crate::error::{Error, Result};
use crate::graph::Permutation;

pub const DEFAULT_BETA: f64 = 0.05;
pub const DEFAULT_PHI: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuidanceParams {
    pub centrality: CentralityKind,
    /// Division constant; larger values flatten the similarity matrix.
    pub beta: f64,
    /// Probability floor for every candidate partner.
    pub phi: f64,
}

impl GuidanceParams {
    pub fn new(centrality: CentralityKind) -> Self {
        GuidanceParams { centrality, beta: DEFAULT_BETA, phi: DEFAULT_PHI }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(Error::invalid(format!("phi must be positive, got {}", self.phi)));
        }
        Ok(())
    }
}

/// Dense symmetric `n × n` similarity matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    beta: f64,
    m: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.m[i * self.n..(i + 1) * self.n]
    }
}

/// Min–max rescales the centrality, then inverts shifted differences.
/// A constant centrality rescales to all zeros.
pub fn build_similarity(c: &CentralityVector, beta: f64) -> Result<SimilarityMatrix> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    if let Some(bad) = c.values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite centrality value {bad}")));
    }
    let n = c.len();
    let lo = c.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = c.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let scaled: Vec<f64> =
        if n == 0 || span <= 0.0 { vec![0.0; n] } else { c.values.iter().map(|v| (v - lo) / span).collect() };
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = 1.0 / ((scaled[i] - scaled[j]).abs() + beta);
        }
    }
    Ok(SimilarityMatrix { n, beta, m })
}

/// Unnormalized partner weights `max(ΔM_b, φ)` for first vertex `a`; the
/// entry for `b = a` is zero.
pub fn guided_weights(p: &Permutation, sim: &SimilarityMatrix, phi: f64, a: usize) -> Vec<f64> {
    let self_sim: Vec<f64> = (0..p.len()).map(|b| sim.get(b, p.image(b))).collect();
    let mut out = vec![0.0; p.len()];
    fill_weights(&mut out, p.as_slice(), &self_sim, sim, phi, a);
    out
}

#[inline]
fn fill_weights(
    out: &mut [f64],
    forward: &[usize],
    self_sim: &[f64],
    sim: &SimilarityMatrix,
    phi: f64,
    a: usize,
) -> f64 {
    let pa = forward[a];
    let row_a = sim.row(a);
    // m[b][π(a)] == m[π(a)][b]
    let row_pa = sim.row(pa);
    let base = self_sim[a];
    for (((w, &pb), &m_pa_b), &own) in out.iter_mut().zip(forward).zip(row_pa).zip(self_sim) {
        *w = (row_a[pb] + m_pa_b - base - own).max(phi);
    }
    out[a] = 0.0;
    blocked_sum(out)
}

const BLOCK: usize = 8;

#[inline]
fn block_sum(block: &[f64]) -> f64 {
    ((block[0] + block[1]) + (block[2] + block[3])) + ((block[4] + block[5]) + (block[6] + block[7]))
}

/// Sum in fixed blocks of eight; [`draw_weighted`] walks the blocks in the
/// same order so both agree on the total bit for bit.
#[inline]
fn blocked_sum(weights: &[f64]) -> f64 {
    let blocks = weights.chunks_exact(BLOCK);
    let tail: f64 = blocks.remainder().iter().sum();
    blocks.map(block_sum).sum::<f64>() + tail
}

fn draw_weighted<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut offset = 0;
    for block in weights.chunks_exact(BLOCK) {
        let s = block_sum(block);
        if target < acc + s {
            let mut inner = acc;
            for (i, &w) in block.iter().enumerate() {
                inner += w;
                if w > 0.0 && target < inner {
                    return offset + i;
                }
            }
        }
        acc += s;
        offset += BLOCK;
    }
    for (i, &w) in weights[offset..].iter().enumerate() {
        acc += w;
        if w > 0.0 && target < acc {
            return offset + i;
        }
    }
    // rounding left `target` at or past the end; take the last candidate
    weights.iter().rposition(|&w| w > 0.0).expect("at least one positive weight")
}

/// One guided proposal: `a` uniform, `b ≠ a` drawn by normalized weights.
pub fn guided_move<R: Rng + ?Sized>(
    p: &Permutation,
    sim: &SimilarityMatrix,
    phi: f64,
    rng: &mut R,
) -> Result<(usize, usize)> {
    let n = p.len();
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    if sim.n() != n {
        return Err(Error::DimensionMismatch { graph: sim.n(), perm: n });
    }
    if !(phi > 0.0) {
        return Err(Error::invalid(format!("phi must be positive, got {phi}")));
    }
    let a = rng.random_range(0..n);
    let weights = guided_weights(p, sim, phi, a);
    let total = blocked_sum(&weights);
    Ok((a, draw_weighted(&weights, total, rng)))
}

/// A uniformly random unordered pair of distinct vertices, returned with
/// the smaller index first.
pub fn uniform_move<R: Rng + ?Sized>(p: &Permutation, rng: &mut R) -> Result<(usize, usize)> {
    let n = p.len();
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    Ok(uniform_pair(n, rng))
}

#[inline]
pub(crate) fn uniform_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a.min(b), a.max(b))
}

/// Reusable guided proposer for the annealing loop. Caches `m[b][π(b)]`
/// and must be told about every accepted transposition.
pub(crate) struct GuidedSampler<'a> {
    sim: &'a SimilarityMatrix,
    phi: f64,
    self_sim: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a> GuidedSampler<'a> {
    pub(crate) fn new(sim: &'a SimilarityMatrix, phi: f64) -> Self {
        let n = sim.n();
        GuidedSampler { sim, phi, self_sim: vec![0.0; n], weights: vec![0.0; n] }
    }

    pub(crate) fn reset(&mut self, forward: &[usize]) {
        for (b, s) in self.self_sim.iter_mut().enumerate() {
            *s = self.sim.get(b, forward[b]);
        }
    }

    /// `forward` is the permutation after the swap.
    #[inline]
    pub(crate) fn swapped(&mut self, forward: &[usize], a: usize, b: usize) {
        self.self_sim[a] = self.sim.get(a, forward[a]);
        self.self_sim[b] = self.sim.get(b, forward[b]);
    }

    #[inline]
    pub(crate) fn propose<R: Rng + ?Sized>(&mut self, forward: &[usize], rng: &mut R) -> (usize, usize) {
        let a = rng.random_range(0..forward.len());
        let total = fill_weights(&mut self.weights, forward, &self.self_sim, self.sim, self.phi, a);
        (a, draw_weighted(&self.weights, total, rng))
    }
}
