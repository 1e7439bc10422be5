//! Explicit `S_k` set constructions: padding, the rotational `(k+1)`-set and
//! the disjoint-union combine.
//!
//! Every construction leaves some edges unconstrained; a [`FillPolicy`]
//! decides them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tournament::{Tournament, TournamentError, TournamentSet};

/// How unconstrained edges are oriented.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FillPolicy {
    /// Lower label beats higher label.
    #[default]
    LowBeatsHigh,
    /// Independent fair coin per edge from a ChaCha8 stream.
    Seeded(u64),
}

impl FillPolicy {
    fn orienter(self) -> Orienter {
        match self {
            FillPolicy::LowBeatsHigh => Orienter::Low,
            FillPolicy::Seeded(seed) => Orienter::Random(Box::new(ChaCha8Rng::seed_from_u64(seed))),
        }
    }
}

enum Orienter {
    Low,
    Random(Box<ChaCha8Rng>),
}

impl Orienter {
    /// Whether the lower of two free vertices beats the higher.
    fn low_wins(&mut self) -> bool {
        match self {
            Orienter::Low => true,
            Orienter::Random(rng) => rng.random(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("target size {target} is smaller than the current {current} tournaments")]
    TargetTooSmall { target: usize, current: usize },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

/// Appends tournaments chosen by `fill` until the set has `m_target` members.
/// The existing members are untouched, so `S_k` is preserved.
pub fn pad_set(tau: &TournamentSet, m_target: usize, fill: FillPolicy) -> Result<TournamentSet, ConstructionError> {
    if m_target < tau.len() {
        return Err(ConstructionError::TargetTooSmall { target: m_target, current: tau.len() });
    }
    let mut orient = fill.orienter();
    let mut members = tau.members().to_vec();
    while members.len() < m_target {
        members.push(Tournament::from_fn(tau.order(), |_, _| orient.low_wins()));
    }
    Ok(TournamentSet::new(members)?)
}

/// The `S_k` `(k+1)`-set of order `k+1`: in tournament `i`, vertex `i`
/// beats every other vertex.
pub fn rotational_set(k: usize, fill: FillPolicy) -> TournamentSet {
    let n = k + 1;
    let mut orient = fill.orienter();
    let members = (0..n)
        .map(|hub| {
            Tournament::from_fn(n, |i, j| {
                if i == hub {
                    true
                } else if j == hub {
                    false
                } else {
                    orient.low_wins()
                }
            })
        })
        .collect();
    TournamentSet::new(members).expect("rotational members share one order")
}

/// Joins an `S_{k1}` `m1`-set and an `S_{k2}` `m2`-set into an
/// `S_{k1+k2+1}` `(m1+m2)`-set of order `n1+n2`.
///
/// `tau1` keeps labels `0..n1` and `tau2` is shifted to `n1..n1+n2`. In the
/// first `m1` tournaments the `tau1` block beats the `tau2` block; in the
/// last `m2` the `tau2` block wins. The other block's internal edges are
/// left to `fill`.
pub fn combine(tau1: &TournamentSet, tau2: &TournamentSet, fill: FillPolicy) -> TournamentSet {
    let n1 = tau1.order();
    let n = n1 + tau2.order();
    let mut orient = fill.orienter();
    let mut members = Vec::with_capacity(tau1.len() + tau2.len());
    for t in tau1.members() {
        members.push(Tournament::from_fn(n, |i, j| match (i < n1, j < n1) {
            (true, true) => t.edge(i, j),
            (true, false) => true,
            (false, true) => false,
            (false, false) => orient.low_wins(),
        }));
    }
    for t in tau2.members() {
        members.push(Tournament::from_fn(n, |i, j| match (i < n1, j < n1) {
            (false, false) => t.edge(i - n1, j - n1),
            (true, false) => false,
            (false, true) => true,
            (true, true) => orient.low_wins(),
        }));
    }
    TournamentSet::new(members).expect("combined members share one order")
}
