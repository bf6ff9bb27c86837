//! Simple undirected graphs on at most 64 vertices.
//!
//! Each adjacency row is a single `u64` bitmask, so neighbourhood queries and
//! relabelings are word operations.

mod canon;
mod graph6;

pub use canon::{automorphism_generators, canonical_form, is_asymmetric, CanonicalLabel};
pub use graph6::{emit_graph6, parse_graph6};

use num_bigint::BigInt;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::linalg::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex count {0} outside supported range 1..=64")]
    Order(usize),
    #[error("adjacency matrix is not square: row {row} has {len} entries, expected {n}")]
    Ragged { row: usize, len: usize, n: usize },
    #[error("adjacency entry ({i},{j}) = {value} is not 0 or 1")]
    Entry { i: usize, j: usize, value: i64 },
    #[error("adjacency matrix is not symmetric at ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("nonzero diagonal entry at vertex {0}")]
    Loop(usize),
    #[error("graph6 parse error at byte {offset}: {message}")]
    Graph6 { offset: usize, message: String },
    #[error("graph6 emission supports 1..=62 vertices, got {0}")]
    Graph6Order(usize),
    #[error("adjacency file: {0}")]
    AdjacencyText(String),
}

/// A simple undirected graph with vertex set `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graph {
    n: usize,
    rows: Vec<u64>,
}

impl Graph {
    pub const MAX_ORDER: usize = 64;

    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 || n > Self::MAX_ORDER {
            return Err(GraphError::Order(n));
        }
        Ok(Graph { n, rows: vec![0; n] })
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            g.rows[i] = g.full_mask() & !(1u64 << i);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(GraphError::Order(i.max(j) + 1));
            }
            if i == j {
                return Err(GraphError::Loop(i));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Builds a graph from a dense 0/1 adjacency matrix, validating symmetry
    /// and the zero diagonal.
    pub fn from_adjacency<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, GraphError> {
        let n = rows.len();
        let mut g = Self::empty(n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(GraphError::Ragged { row: i, len: row.len(), n });
            }
            for (j, &value) in row.iter().enumerate() {
                match value {
                    0 => {}
                    1 if i == j => return Err(GraphError::Loop(i)),
                    1 => g.rows[i] |= 1 << j,
                    _ => return Err(GraphError::Entry { i, j, value }),
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                if g.has_edge(i, j) != g.has_edge(j, i) {
                    return Err(GraphError::Asymmetric(i, j));
                }
            }
        }
        Ok(g)
    }

    /// Parses the adjacency text format: the vertex count on the first line,
    /// followed by `n` rows of `n` whitespace-separated 0/1 entries.
    pub fn parse_adjacency_text(text: &str) -> Result<Self, GraphError> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| GraphError::AdjacencyText("empty input".into()))?
            .parse()
            .map_err(|_| GraphError::AdjacencyText("first token must be the vertex count".into()))?;
        if n == 0 || n > Self::MAX_ORDER {
            return Err(GraphError::Order(n));
        }
        let mut rows = vec![vec![0i64; n]; n];
        for (k, slot) in rows.iter_mut().flatten().enumerate() {
            let tok = tokens
                .next()
                .ok_or_else(|| GraphError::AdjacencyText(format!("expected {} entries, found {}", n * n, k)))?;
            *slot = tok.parse().map_err(|_| GraphError::AdjacencyText(format!("bad entry {tok:?}")))?;
        }
        if tokens.next().is_some() {
            return Err(GraphError::AdjacencyText("trailing data after matrix".into()));
        }
        Self::from_adjacency(&rows)
    }

    pub fn to_adjacency_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<&str> = (0..self.n).map(|j| if self.has_edge(i, j) { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    /// Neighbourhood of `i` as a bitmask.
    #[inline]
    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        debug_assert!(i != j);
        self.rows[i] |= 1 << j;
        self.rows[j] |= 1 << i;
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.rows[i] &= !(1 << j);
        self.rows[j] &= !(1 << i);
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.rows[i].count_ones()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let mut bits = self.rows[i];
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(j)
        })
    }

    fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn complement(&self) -> Graph {
        let full = self.full_mask();
        let rows = (0..self.n).map(|i| !self.rows[i] & full & !(1u64 << i)).collect();
        Graph { n: self.n, rows }
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut rows = vec![0u64; self.n];
        for i in 0..self.n {
            for j in self.neighbors(i) {
                rows[perm[i]] |= 1 << perm[j];
            }
        }
        Graph { n: self.n, rows }
    }

    pub fn adjacency_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.n, self.n, |i, j| BigInt::from(self.has_edge(i, j) as i64))
    }

    /// `(A v)_i = sum of v_j over neighbours j of i`.
    pub fn mul_vec<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Clone + Default + for<'a> std::ops::AddAssign<&'a T>,
    {
        (0..self.n)
            .map(|i| {
                let mut acc = T::default();
                for j in self.neighbors(i) {
                    acc += &v[j];
                }
                acc
            })
            .collect()
    }
}

/// Draws an Erdős–Rényi graph with edge probability 1/2.
///
/// The generator is ChaCha8 (`rand_chacha`, value-stable across releases)
/// seeded with `seed_from_u64(seed)`. Successive `next_u64` outputs are
/// consumed least-significant bit first, one bit per vertex pair, pairs taken
/// in graph6 order: `(0,1), (0,2), (1,2), (0,3), ...`. A set bit is an edge.
pub fn random_gnp_half(n: usize, seed: u64) -> Result<Graph, GraphError> {
    let mut g = Graph::empty(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut word = 0u64;
    let mut left = 0u32;
    for j in 1..n {
        for i in 0..j {
            if left == 0 {
                word = rng.next_u64();
                left = 64;
            }
            if word & 1 == 1 {
                g.add_edge(i, j);
            }
            word >>= 1;
            left -= 1;
        }
    }
    Ok(g)
}
