//! Undirected simple graphs and vertex permutations.
//!
//! Vertices are dense `0..n` indices. Adjacency is kept as sorted neighbor
//! arrays; graphs with at most [`BITSET_LIMIT`] vertices additionally carry a
//! packed adjacency bitset so that edge membership is a single word lookup.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Largest vertex count for which the dense adjacency bitset is built.
pub const BITSET_LIMIT: usize = 4096;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    bits: Option<AdjacencyBits>,
}

#[derive(Clone, PartialEq, Eq)]
struct AdjacencyBits {
    words_per_row: usize,
    words: Vec<u64>,
}

impl AdjacencyBits {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let words_per_row = n.div_ceil(64);
        let mut words = vec![0u64; words_per_row * n];
        for &(u, v) in edges {
            words[u * words_per_row + v / 64] |= 1 << (v % 64);
            words[v * words_per_row + u / 64] |= 1 << (u % 64);
        }
        AdjacencyBits { words_per_row, words }
    }

    #[inline]
    fn contains(&self, u: usize, v: usize) -> bool {
        self.words[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) are merged; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop on vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();

        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &list {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for adj in &mut neighbors {
            adj.sort_unstable();
        }
        let bits = (n <= BITSET_LIMIT).then(|| AdjacencyBits::new(n, &list));
        Ok(Graph { n, neighbors, edges: list, bits })
    }

    pub fn empty(n: usize) -> Self {
        Graph::from_edges(n, std::iter::empty()).expect("edgeless graph is valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph is valid")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewVertices { n, min: 3 });
        }
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path graph is valid")
    }

    /// Star with vertex 0 as the center and `n - 1` leaves.
    pub fn star(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (0, i))).expect("star graph is valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match &self.bits {
            Some(bits) => bits.contains(u, v),
            None => self.neighbors[u].binary_search(&v).is_ok(),
        }
    }

    /// True when every vertex can reach every other one.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Parses the plain-text edge-list format.
    ///
    /// One `u v` pair per line, 0-based. `#` starts a comment. An optional
    /// `n <count>` header fixes the vertex count; otherwise it is the largest
    /// index plus one.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared_n = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: cannot parse {:?}", lineno + 1, raw.trim()));
            match fields.as_slice() {
                ["n", count] => {
                    if declared_n.is_some() || !edges.is_empty() {
                        return Err(Error::Parse(format!(
                            "line {}: `n` header must come first and only once",
                            lineno + 1
                        )));
                    }
                    declared_n = Some(count.parse::<usize>().map_err(|_| bad())?);
                }
                [u, v] => {
                    let u = u.parse::<usize>().map_err(|_| bad())?;
                    let v = v.parse::<usize>().map_err(|_| bad())?;
                    edges.push((u, v));
                }
                _ => return Err(bad()),
            }
        }
        let n = match declared_n {
            Some(n) => n,
            None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
        };
        Graph::from_edges(n, edges).map_err(|e| match e {
            Error::VertexOutOfRange { .. } | Error::InvalidParameter(_) => Error::Parse(e.to_string()),
            other => other,
        })
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Graph::parse_edge_list(&fs::read_to_string(path)?)
    }

    /// Writes the edge-list format, always including the `n` header so that
    /// trailing isolated vertices survive a round trip.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n {}", self.n)?;
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edges).finish()
    }
}

/// A bijection on `0..n`, stored together with its inverse.
///
/// `forward[i]` is the image of vertex `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { forward: (0..n).collect(), inverse: (0..n).collect() }
    }

    /// Validates that `forward` is a bijection on `0..forward.len()`.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (i, &img) in forward.iter().enumerate() {
            if img >= n {
                return Err(Error::VertexOutOfRange { vertex: img, n });
            }
            if inverse[img] != usize::MAX {
                return Err(Error::invalid(format!("{img} appears twice in permutation")));
            }
            inverse[img] = i;
        }
        Ok(Permutation { forward, inverse })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.forward.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    #[inline]
    pub fn image(&self, v: usize) -> usize {
        self.forward[v]
    }

    #[inline]
    pub fn preimage(&self, v: usize) -> usize {
        self.inverse[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse_slice(&self) -> &[usize] {
        &self.inverse
    }

    pub fn inverse(&self) -> Permutation {
        Permutation { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    pub fn fixed_points(&self) -> usize {
        self.forward.iter().enumerate().filter(|&(i, &img)| i == img).count()
    }

    pub fn is_identity(&self) -> bool {
        self.fixed_points() == self.len()
    }

    pub fn is_derangement(&self) -> bool {
        self.fixed_points() == 0
    }

    /// Swaps the images of `a` and `b` in place.
    pub fn transpose_images(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        self.transpose_unchecked(a, b);
        Ok(())
    }

    /// Returns a copy with the images of `a` and `b` swapped: the result maps
    /// `a` to the old image of `b` and vice versa.
    pub fn apply_transposition(&self, a: usize, b: usize) -> Result<Permutation> {
        let mut next = self.clone();
        next.transpose_images(a, b)?;
        Ok(next)
    }

    #[inline]
    pub(crate) fn transpose_unchecked(&mut self, a: usize, b: usize) {
        let (pa, pb) = (self.forward[a], self.forward[b]);
        self.forward[a] = pb;
        self.forward[b] = pa;
        self.inverse[pb] = a;
        self.inverse[pa] = b;
    }

    pub(crate) fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        let n = self.len();
        for v in [a, b] {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
        }
        if a == b {
            return Err(Error::SameVertex(a));
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.forward)
    }
}
