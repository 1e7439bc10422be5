//! Tournaments, tournament sets and the `S_k` predicate.

mod paley;
mod schutte;
mod subset;

pub use paley::{is_prime, paley};
pub use schutte::{dominates, find_dominator, is_sk, undominated_witness};
pub use subset::{binomial, lex_rank, lex_unrank, Combinations, VertexSubset};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TournamentError {
    #[error("no orientation given for pair ({0}, {1})")]
    MissingPair(usize, usize),
    #[error("pair ({0}, {1}) oriented more than once")]
    DuplicatePair(usize, usize),
    #[error("self edge on vertex {0}")]
    SelfEdge(usize),
    #[error("vertex {vertex} out of range for order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} is a member of the subset it should dominate")]
    VertexInSubset(usize),
    #[error("a tournament set needs at least one tournament")]
    EmptySet,
    #[error("tournament {index} has order {found}, expected {expected}")]
    OrderMismatch { index: usize, expected: usize, found: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not congruent to 3 mod 4, so the Paley digraph is not a tournament")]
    BadResidueClass(u64),
}

/// A tournament on vertices `0..n`: exactly one of `i -> j`, `j -> i` for
/// every pair of distinct vertices.
///
/// Stored as out- and in-neighbourhood bitmasks per vertex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    out: Vec<Vec<u64>>,
    inn: Vec<Vec<u64>>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl Tournament {
    /// Builds a tournament from an explicit list of `(winner, loser)` pairs.
    pub fn new(n: usize, beats: &[(usize, usize)]) -> Result<Self, TournamentError> {
        let w = words_for(n);
        let mut out = vec![vec![0u64; w]; n];
        for &(i, j) in beats {
            for v in [i, j] {
                if v >= n {
                    return Err(TournamentError::VertexOutOfRange { vertex: v, n });
                }
            }
            if i == j {
                return Err(TournamentError::SelfEdge(i));
            }
            let seen = bit(&out[i], j) || bit(&out[j], i);
            if seen {
                return Err(TournamentError::DuplicatePair(i.min(j), i.max(j)));
            }
            out[i][j / 64] |= 1 << (j % 64);
        }
        for i in 0..n {
            for j in i + 1..n {
                if !bit(&out[i], j) && !bit(&out[j], i) {
                    return Err(TournamentError::MissingPair(i, j));
                }
            }
        }
        Ok(Self::from_out_rows(n, out))
    }

    /// Builds a tournament from a rule deciding, for each `i < j`, whether
    /// `i` beats `j`.
    pub fn from_fn(n: usize, mut i_beats_j: impl FnMut(usize, usize) -> bool) -> Self {
        let w = words_for(n);
        let mut out = vec![vec![0u64; w]; n];
        for i in 0..n {
            for j in i + 1..n {
                if i_beats_j(i, j) {
                    out[i][j / 64] |= 1 << (j % 64);
                } else {
                    out[j][i / 64] |= 1 << (i % 64);
                }
            }
        }
        Self::from_out_rows(n, out)
    }

    /// The transitive tournament where lower labels beat higher ones.
    pub fn transitive(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    fn from_out_rows(n: usize, out: Vec<Vec<u64>>) -> Self {
        let w = words_for(n);
        let mut inn = vec![vec![0u64; w]; n];
        for (i, row) in out.iter().enumerate() {
            for (j, col) in inn.iter_mut().enumerate() {
                if bit(row, j) {
                    col[i / 64] |= 1 << (i % 64);
                }
            }
        }
        Self { n, out, inn }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// True iff `i` beats `j`. Always false for `i == j` or out-of-range labels.
    pub fn edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && bit(&self.out[i], j)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn out_neighbors(&self, v: usize) -> VertexSubset {
        VertexSubset::from_words(self.out[v].clone())
    }

    /// All `(winner, loser)` pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.edge(i, j) {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    pub(crate) fn out_row(&self, v: usize) -> &[u64] {
        &self.out[v]
    }

    pub(crate) fn in_row(&self, v: usize) -> &[u64] {
        &self.inn[v]
    }
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tournament").field("n", &self.n).field("edges", &self.edges()).finish()
    }
}

fn bit(row: &[u64], j: usize) -> bool {
    row[j / 64] & (1 << (j % 64)) != 0
}

/// An ordered list of tournaments on one shared vertex set `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TournamentSet {
    n: usize,
    members: Vec<Tournament>,
}

impl TournamentSet {
    pub fn new(members: Vec<Tournament>) -> Result<Self, TournamentError> {
        let first = members.first().ok_or(TournamentError::EmptySet)?;
        let n = first.order();
        if let Some((index, t)) = members.iter().enumerate().find(|(_, t)| t.order() != n) {
            return Err(TournamentError::OrderMismatch { index, expected: n, found: t.order() });
        }
        Ok(Self { n, members })
    }

    pub fn single(t: Tournament) -> Self {
        Self { n: t.order(), members: vec![t] }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of member tournaments, `m`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Tournament] {
        &self.members
    }

    pub fn get(&self, index: usize) -> Option<&Tournament> {
        self.members.get(index)
    }

    pub fn into_members(self) -> Vec<Tournament> {
        self.members
    }
}

impl From<Tournament> for TournamentSet {
    fn from(t: Tournament) -> Self {
        Self::single(t)
    }
}
