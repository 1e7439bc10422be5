//! Bounded search for dice realizing given tournaments.
//!
//! Dice are assigned one at a time in index order. Every candidate die is a
//! sorted multiset of faces from the alphabet, so no candidate is visited
//! twice on a branch. After a die is placed, each later die keeps only the
//! candidates that beat or lose to it exactly as every target prescribes
//! (ties are never compatible). Anything found is re-verified with
//! [`crate::dice::realized_set`] before it is returned.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dice::{realized_set, win_odds, DiceSet, Die};
use crate::tournament::{Tournament, TournamentSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiceSearchError {
    #[error("faces_per_die must be at least 1")]
    NoFaces,
    #[error("the face alphabet is empty")]
    EmptyAlphabet,
    #[error("{faces}^{rolls} outcomes per die exceed the search's counting range")]
    TooManyOutcomes { faces: usize, rolls: usize },
    #[error("candidate list of {0} dice is too large; narrow the alphabet")]
    TooManyCandidates(u64),
}

/// The dice considered by a search and its budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpace {
    pub faces_per_die: usize,
    /// Faces range over `0..=max_face` unless `alphabet` is given.
    pub max_face: i64,
    /// Explicit face values, overriding `max_face`.
    pub alphabet: Option<Vec<i64>>,
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
    /// Shuffles candidate order with this seed; `None` keeps lex order.
    pub shuffle_seed: Option<u64>,
    /// Every target edge must also win with probability above 1/2, not
    /// merely more often than it loses.
    pub require_majority: bool,
}

impl SearchSpace {
    pub fn new(faces_per_die: usize, max_face: i64) -> Self {
        SearchSpace {
            faces_per_die,
            max_face,
            alphabet: None,
            max_nodes: None,
            max_time: None,
            shuffle_seed: None,
            require_majority: true,
        }
    }

    fn faces(&self) -> Vec<i64> {
        let mut f = match &self.alphabet {
            Some(a) => a.clone(),
            None => (0..=self.max_face.max(0)).collect(),
        };
        f.sort_unstable();
        f.dedup();
        f
    }
}

/// Largest candidate list the search will materialize.
pub const MAX_CANDIDATES: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiceSearchOutcome {
    Found(DiceSet),
    /// The whole space was searched without success.
    Exhausted,
    /// The budget ran out first.
    Unknown,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiceSearchStats {
    /// Dice placed.
    pub nodes: u64,
    pub candidates: u64,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiceSearchResult {
    pub outcome: DiceSearchOutcome,
    pub stats: DiceSearchStats,
}

/// Dice whose one-roll tournament is `target`.
pub fn search_realization(target: &Tournament, space: &SearchSpace) -> Result<DiceSearchResult, DiceSearchError> {
    search_multiroll(&TournamentSet::single(target.clone()), space)
}

/// Dice whose `r`-roll tournament is member `r - 1` of `targets` for every
/// `r` up to the number of members.
pub fn search_multiroll(targets: &TournamentSet, space: &SearchSpace) -> Result<DiceSearchResult, DiceSearchError> {
    let start = Instant::now();
    let faces = space.faces();
    if space.faces_per_die == 0 {
        return Err(DiceSearchError::NoFaces);
    }
    if faces.is_empty() {
        return Err(DiceSearchError::EmptyAlphabet);
    }
    let rolls = targets.len();
    let per_die = (space.faces_per_die as u128).checked_pow(rolls as u32);
    if per_die.is_none_or(|p| p > u64::MAX as u128) {
        return Err(DiceSearchError::TooManyOutcomes { faces: space.faces_per_die, rolls });
    }
    let count = multiset_count(faces.len() as u64, space.faces_per_die as u64);
    if count > MAX_CANDIDATES {
        return Err(DiceSearchError::TooManyCandidates(count));
    }

    let mut candidates: Vec<Candidate> = Multisets::new(faces.len(), space.faces_per_die)
        .map(|idx| Candidate::new(idx.iter().map(|&i| faces[i]).collect(), rolls))
        .collect();
    if let Some(seed) = space.shuffle_seed {
        candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    let mut search = Search {
        targets,
        candidates: &candidates,
        n: targets.order(),
        assignment: Vec::new(),
        nodes: 0,
        max_nodes: space.max_nodes,
        deadline: space.max_time.map(|d| start + d),
        out_of_budget: false,
        found: None,
        majority: space.require_majority,
    };
    let domains = vec![(0..candidates.len()).collect::<Vec<_>>(); search.n];
    search.dfs(domains);

    let outcome = match search.found.take() {
        Some(ds) => DiceSearchOutcome::Found(ds),
        None if search.out_of_budget => DiceSearchOutcome::Unknown,
        None => DiceSearchOutcome::Exhausted,
    };
    Ok(DiceSearchResult {
        outcome,
        stats: DiceSearchStats {
            nodes: search.nodes,
            candidates: count,
            elapsed_ms: start.elapsed().as_millis() as u64,
        },
    })
}

fn multiset_count(alphabet: u64, size: u64) -> u64 {
    // C(alphabet + size - 1, size), saturating
    let mut acc: u128 = 1;
    for i in 0..size as u128 {
        acc = acc * (alphabet as u128 + i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Nondecreasing index sequences of length `size` over `0..alphabet`, in
/// lexicographic order.
struct Multisets {
    alphabet: usize,
    current: Option<Vec<usize>>,
}

impl Multisets {
    fn new(alphabet: usize, size: usize) -> Self {
        Multisets { alphabet, current: (alphabet > 0).then(|| vec![0; size]) }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        match cur.iter().rposition(|&x| x + 1 < self.alphabet) {
            Some(p) => {
                let v = cur[p] + 1;
                cur[p..].iter_mut().for_each(|x| *x = v);
            }
            None => self.current = None,
        }
        Some(out)
    }
}

struct Candidate {
    faces: Vec<i64>,
    /// Sum distribution for each roll count, as sorted `(sum, count)`.
    dists: Vec<Vec<(i64, u64)>>,
}

impl Candidate {
    fn new(faces: Vec<i64>, rolls: usize) -> Self {
        let mut dists = Vec::with_capacity(rolls);
        let mut acc: Vec<(i64, u64)> = vec![(0, 1)];
        for _ in 0..rolls {
            let mut next: Vec<(i64, u64)> =
                acc.iter().flat_map(|&(s, c)| faces.iter().map(move |&f| (s + f, c))).collect();
            next.sort_unstable_by_key(|&(s, _)| s);
            next.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            dists.push(next.clone());
            acc = next;
        }
        Candidate { faces, dists }
    }
}

/// `Some(true)` if `a` beats `b`, `Some(false)` if `b` beats `a`, `None`
/// otherwise. With `majority` the winner's probability must exceed 1/2.
fn compare(a: &[(i64, u64)], b: &[(i64, u64)], majority: bool) -> Option<bool> {
    let (mut win, mut loss) = (0u128, 0u128);
    let mut below = 0u128;
    let mut j = 0;
    let total_b: u128 = b.iter().map(|&(_, c)| c as u128).sum();
    for &(x, ca) in a {
        while j < b.len() && b[j].0 < x {
            below += b[j].1 as u128;
            j += 1;
        }
        let equal = if j < b.len() && b[j].0 == x { b[j].1 as u128 } else { 0 };
        win += ca as u128 * below;
        loss += ca as u128 * (total_b - below - equal);
    }
    if majority {
        let total = a.iter().map(|&(_, c)| c as u128).sum::<u128>() * total_b;
        return if 2 * win > total {
            Some(true)
        } else if 2 * loss > total {
            Some(false)
        } else {
            None
        };
    }
    match win.cmp(&loss) {
        std::cmp::Ordering::Greater => Some(true),
        std::cmp::Ordering::Less => Some(false),
        std::cmp::Ordering::Equal => None,
    }
}

struct Search<'a> {
    targets: &'a TournamentSet,
    candidates: &'a [Candidate],
    n: usize,
    assignment: Vec<usize>,
    nodes: u64,
    max_nodes: Option<u64>,
    deadline: Option<Instant>,
    out_of_budget: bool,
    found: Option<DiceSet>,
    majority: bool,
}

impl Search<'_> {
    fn compatible(&self, i: usize, ci: usize, j: usize, cj: usize) -> bool {
        let (a, b) = (&self.candidates[ci], &self.candidates[cj]);
        self.targets
            .members()
            .iter()
            .enumerate()
            .all(|(r, t)| compare(&a.dists[r], &b.dists[r], self.majority) == Some(t.edge(i, j)))
    }

    fn budget_spent(&mut self) -> bool {
        if self.max_nodes.is_some_and(|m| self.nodes >= m)
            || self.deadline.is_some_and(|d| self.nodes.is_multiple_of(64) && Instant::now() >= d)
        {
            self.out_of_budget = true;
        }
        self.out_of_budget
    }

    /// `domains[j]` lists the candidates still open for die `j`; entries
    /// before `assignment.len()` are unused.
    fn dfs(&mut self, domains: Vec<Vec<usize>>) -> bool {
        let i = self.assignment.len();
        if i == self.n {
            return self.accept();
        }
        for &c in &domains[i] {
            if self.budget_spent() {
                return true;
            }
            self.nodes += 1;
            let mut next = domains.clone();
            let mut dead = false;
            for (j, dom) in next.iter_mut().enumerate().skip(i + 1) {
                dom.retain(|&cj| self.compatible(i, c, j, cj));
                if dom.is_empty() {
                    dead = true;
                    break;
                }
            }
            if dead {
                continue;
            }
            self.assignment.push(c);
            let stop = self.dfs(next);
            self.assignment.pop();
            if stop {
                return true;
            }
        }
        false
    }

    fn majority_holds(&self, ds: &DiceSet) -> bool {
        self.targets.members().iter().enumerate().all(|(r, t)| {
            t.edges()
                .into_iter()
                .all(|(i, j)| win_odds(&ds.dice()[i], &ds.dice()[j], r as u32 + 1).is_ok_and(|o| o.beats()))
        })
    }

    fn accept(&mut self) -> bool {
        let dice = self
            .assignment
            .iter()
            .enumerate()
            .map(|(i, &c)| Die::new(label(i), self.candidates[c].faces.clone()).expect("nonempty faces"))
            .collect();
        let ds = DiceSet::new("search", dice).expect("distinct labels");
        let verified = realized_set(&ds, self.targets.len() as u32, &BigRational::zero())
            .is_ok_and(|set| set == *self.targets)
            && (!self.majority || self.majority_holds(&ds));
        if verified {
            self.found = Some(ds);
        }
        verified
    }
}

/// `A`..`Z`, then `D26`, `D27`, ...
pub fn label(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("D{i}")
    }
}
