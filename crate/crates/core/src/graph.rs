//! Binary undirected networks.
//!
//! A [`Network`] stores one adjacency bitset per node. Tie lookup and toggling
//! are O(1); the number of common neighbours of two nodes (the triangle change
//! statistic) is a word-wise AND + popcount over `ceil(n / 64)` words.
//!
//! Dyads are unordered node pairs `{i, j}` with `i < j`. They also have a
//! linear index in row-major order over the strict upper triangle, which the
//! exact enumerator uses to map Gray-code bits onto dyads.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} out of range for a network on {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0} is not a valid dyad")]
    SelfLoop(usize),
    #[error("operation needs at least {needed} nodes, network has {n}")]
    TooFewNodes { needed: usize, n: usize },
    #[error("permutation has length {len}, expected {n}")]
    BadPermutation { len: usize, n: usize },
}

/// Number of unordered node pairs on `n` nodes, `n(n-1)/2`.
pub fn dyad_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// An unordered node pair, normalized so that `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dyad {
    i: usize,
    j: usize,
}

impl Dyad {
    /// Builds the dyad `{a, b}` for a network on `n` nodes, in either order.
    pub fn new(a: usize, b: usize, n: usize) -> Result<Self, GraphError> {
        for node in [a, b] {
            if node >= n {
                return Err(GraphError::NodeOutOfRange { node, n });
            }
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        Ok(Self::ordered(a, b))
    }

    /// Caller guarantees `a != b`; no range check.
    #[inline]
    pub(crate) fn ordered(a: usize, b: usize) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            Dyad { i: a, j: b }
        } else {
            Dyad { i: b, j: a }
        }
    }

    #[inline]
    pub fn i(&self) -> usize {
        self.i
    }

    #[inline]
    pub fn j(&self) -> usize {
        self.j
    }

    /// Row-major position of this dyad among all `i < j` pairs.
    pub fn linear_index(&self, n: usize) -> usize {
        self.i * n - self.i * (self.i + 1) / 2 + (self.j - self.i - 1)
    }

    /// Inverse of [`Dyad::linear_index`].
    pub fn from_linear_index(mut k: usize, n: usize) -> Option<Self> {
        if k >= dyad_count(n) {
            return None;
        }
        let mut i = 0;
        loop {
            let row = n - i - 1;
            if k < row {
                return Some(Dyad { i, j: i + 1 + k });
            }
            k -= row;
            i += 1;
        }
    }

    /// All dyads on `n` nodes in linear-index order.
    pub fn all(n: usize) -> impl Iterator<Item = Dyad> {
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| Dyad { i, j }))
    }
}

impl fmt::Display for Dyad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// A simple undirected graph on nodes `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Network {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    degrees: Vec<u32>,
    edge_count: usize,
}

impl Network {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Network {
            n,
            words,
            rows: vec![0; n * words],
            degrees: vec![0; n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut net = Self::empty(n);
        for d in Dyad::all(n) {
            net.toggle(d);
        }
        net
    }

    /// Builds a network from an edge iterator. Duplicate pairs are collapsed.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut net = Self::empty(n);
        for (a, b) in edges {
            let d = Dyad::new(a, b, n)?;
            net.set(d, true);
        }
        Ok(net)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn dyad_count(&self) -> usize {
        dyad_count(self.n)
    }

    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.degrees[node] as usize
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.degrees.iter().map(|&d| d as usize)
    }

    /// Sorted (descending) degree sequence; an isomorphism invariant.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut seq: Vec<usize> = self.degrees().collect();
        seq.sort_unstable_by(|a, b| b.cmp(a));
        seq
    }

    #[inline]
    fn row(&self, node: usize) -> &[u64] {
        &self.rows[node * self.words..(node + 1) * self.words]
    }

    #[inline]
    fn bit(&self, a: usize, b: usize) -> bool {
        (self.rows[a * self.words + b / 64] >> (b % 64)) & 1 == 1
    }

    #[inline]
    fn flip_bit(&mut self, a: usize, b: usize) {
        self.rows[a * self.words + b / 64] ^= 1u64 << (b % 64);
    }

    #[inline]
    pub fn has_tie(&self, d: Dyad) -> bool {
        self.bit(d.i, d.j)
    }

    /// Range-checked tie lookup for arbitrary node pairs. Self pairs are never tied.
    pub fn has_edge(&self, a: usize, b: usize) -> Result<bool, GraphError> {
        for node in [a, b] {
            if node >= self.n {
                return Err(GraphError::NodeOutOfRange { node, n: self.n });
            }
        }
        Ok(a != b && self.bit(a, b))
    }

    /// Flips the tie at `d` and returns its new value.
    ///
    /// `d` must belong to this network; [`Network::toggle_checked`] validates
    /// raw node indices first.
    #[inline]
    pub fn toggle(&mut self, d: Dyad) -> bool {
        debug_assert!(d.j < self.n);
        self.flip_bit(d.i, d.j);
        self.flip_bit(d.j, d.i);
        let now = self.bit(d.i, d.j);
        if now {
            self.degrees[d.i] += 1;
            self.degrees[d.j] += 1;
            self.edge_count += 1;
        } else {
            self.degrees[d.i] -= 1;
            self.degrees[d.j] -= 1;
            self.edge_count -= 1;
        }
        now
    }

    pub fn toggle_checked(&mut self, a: usize, b: usize) -> Result<bool, GraphError> {
        let d = Dyad::new(a, b, self.n)?;
        Ok(self.toggle(d))
    }

    /// Sets the tie at `d`; returns whether anything changed.
    pub fn set(&mut self, d: Dyad, value: bool) -> bool {
        if self.has_tie(d) != value {
            self.toggle(d);
            true
        } else {
            false
        }
    }

    /// Number of nodes adjacent to both `a` and `b`.
    #[inline]
    pub fn common_neighbors(&self, a: usize, b: usize) -> usize {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(node).iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// Ties as dyads in linear-index order.
    pub fn edges(&self) -> impl Iterator<Item = Dyad> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&j| j > i)
                .map(move |j| Dyad { i, j })
        })
    }

    /// Fraction of dyads that are ties.
    pub fn density(&self) -> Result<f64, GraphError> {
        if self.n < 2 {
            return Err(GraphError::TooFewNodes { needed: 2, n: self.n });
        }
        Ok(self.edge_count as f64 / self.dyad_count() as f64)
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadPermutation { len: perm.len(), n: self.n });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(GraphError::BadPermutation { len: perm.len(), n: self.n });
            }
        }
        Network::from_edges(self.n, self.edges().map(|d| (perm[d.i], perm[d.j])))
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<(usize, usize)> = self.edges().map(|d| (d.i, d.j)).collect();
        f.debug_struct("Network")
            .field("n", &self.n)
            .field("edge_count", &self.edge_count)
            .field("edges", &edges)
            .finish()
    }
}
