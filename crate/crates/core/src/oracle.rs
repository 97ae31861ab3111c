//! Exact approximate symmetry by exhaustive enumeration, for small graphs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::mismatched_edges;
use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};

/// Largest graph the oracle accepts (10! ≈ 3.6·10⁶ permutations).
pub const ORACLE_LIMIT: usize = 10;

/// Which permutations the minimum ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Every permutation except the identity.
    NonIdentity,
    /// Only permutations without fixed points.
    DerangementsOnly,
}

impl SearchMode {
    fn admits(self, forward: &[usize]) -> bool {
        let fixed = forward.iter().enumerate().filter(|&(i, &v)| i == v).count();
        match self {
            SearchMode::NonIdentity => fixed < forward.len(),
            SearchMode::DerangementsOnly => fixed == 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SearchMode::NonIdentity => "non-identity",
            SearchMode::DerangementsOnly => "derangements-only",
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "non-identity" => Ok(SearchMode::NonIdentity),
            "derangements-only" => Ok(SearchMode::DerangementsOnly),
            other => Err(Error::invalid(format!("unknown search mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactResult {
    pub exact_epsilon: u64,
    /// Lexicographically smallest permutation attaining the minimum.
    pub witness: Permutation,
    /// Permutations of the mode's class that were evaluated.
    pub searched: u64,
    pub mode: SearchMode,
}

/// Minimum ε over every permutation in `mode`'s class.
///
/// The search is split by the image of vertex 0; each part is enumerated in
/// lexicographic order and the parts are merged by `(ε, part)`, so the
/// witness is the lexicographically first minimizer regardless of threading.
pub fn exact_symmetry(g: &Graph, mode: SearchMode) -> Result<ExactResult> {
    let n = g.n();
    if n > ORACLE_LIMIT {
        return Err(Error::TooLarge { what: "exhaustive search", n, limit: ORACLE_LIMIT });
    }
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let parts: Vec<(Option<(u64, Vec<usize>)>, u64)> =
        (0..n).into_par_iter().map(|first| search_part(g, mode, first)).collect();

    let searched = parts.iter().map(|(_, count)| count).sum();
    let (exact_epsilon, witness) = parts
        .into_iter()
        .filter_map(|(best, _)| best)
        .min_by_key(|(eps, _)| *eps)
        .expect("every graph with n >= 2 has a non-identity derangement");
    Ok(ExactResult { exact_epsilon, witness: Permutation::from_forward(witness)?, searched, mode })
}

fn search_part(g: &Graph, mode: SearchMode, first: usize) -> (Option<(u64, Vec<usize>)>, u64) {
    let n = g.n();
    let mut forward: Vec<usize> = std::iter::once(first).chain((0..n).filter(|&v| v != first)).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut searched = 0;
    loop {
        if mode.admits(&forward) {
            searched += 1;
            let eps = mismatched_edges(g, &forward);
            if best.as_ref().is_none_or(|(b, _)| eps < *b) {
                best = Some((eps, forward.clone()));
            }
        }
        if !next_permutation(&mut forward[1..]) {
            break;
        }
    }
    (best, searched)
}

/// Advances to the next permutation in lexicographic order; false when
/// `xs` was already the last one.
fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs.iter().rposition(|&x| x > xs[i]).expect("a larger element exists right of i");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}
