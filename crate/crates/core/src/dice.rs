//! Exact multi-roll dice odds, realized tournaments and the game advisor.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::tournament::{Tournament, TournamentSet};

/// Largest roll count any operation accepts.
pub const MAX_ROLLS: u32 = 64;

/// Largest absolute face value; keeps every `r`-roll sum inside `i64`.
pub const MAX_FACE_MAGNITUDE: i64 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiceError {
    #[error("die {0:?} has no faces")]
    EmptyDie(String),
    #[error("die {label:?} has face {face} outside the supported range")]
    FaceOutOfRange { label: String, face: i64 },
    #[error("duplicate die label {0:?}")]
    DuplicateLabel(String),
    #[error("a dice set needs at least {needed} dice, found {found}")]
    TooFewDice { needed: usize, found: usize },
    #[error("roll count {0} is outside 1..={MAX_ROLLS}")]
    RollsOutOfRange(u32),
    #[error("dice {i} and {j} are tied at {r} rolls")]
    TiedPair { i: usize, j: usize, r: u32 },
    #[error("dice {i} and {j} are within the margin at {r} rolls")]
    MarginViolation { i: usize, j: usize, r: u32 },
    #[error("margin must be nonnegative")]
    NegativeMargin,
    #[error("unknown die label {0:?}")]
    UnknownLabel(String),
    #[error("opponent {0:?} listed twice")]
    DuplicateOpponent(String),
    #[error("{opponents} opponents leave no die to choose from a set of {dice}")]
    TooManyOpponents { opponents: usize, dice: usize },
    #[error("no die beats every opponent within the allowed roll counts")]
    NoDominatingChoice(Box<OddsMatrix>),
    #[error("trial count must be at least 1")]
    ZeroTrials,
}

/// A die with uniformly likely integer faces, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Die {
    label: String,
    faces: Vec<i64>,
}

impl Die {
    pub fn new(label: impl Into<String>, mut faces: Vec<i64>) -> Result<Self, DiceError> {
        let label = label.into();
        if faces.is_empty() {
            return Err(DiceError::EmptyDie(label));
        }
        if let Some(&face) = faces.iter().find(|f| f.abs() > MAX_FACE_MAGNITUDE) {
            return Err(DiceError::FaceOutOfRange { label, face });
        }
        faces.sort_unstable();
        Ok(Self { label, faces })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn faces(&self) -> &[i64] {
        &self.faces
    }
}

/// An ordered collection of dice with distinct labels; die `i` is vertex `i`
/// of every realized tournament.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiceSet {
    name: String,
    dice: Vec<Die>,
}

impl DiceSet {
    pub fn new(name: impl Into<String>, dice: Vec<Die>) -> Result<Self, DiceError> {
        if dice.is_empty() {
            return Err(DiceError::TooFewDice { needed: 1, found: 0 });
        }
        let mut seen = HashSet::new();
        for d in &dice {
            if !seen.insert(d.label.as_str()) {
                return Err(DiceError::DuplicateLabel(d.label.clone()));
            }
        }
        Ok(Self { name: name.into(), dice })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dice(&self) -> &[Die] {
        &self.dice
    }

    pub fn len(&self) -> usize {
        self.dice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dice.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.dice.iter().position(|d| d.label == label)
    }

    pub fn by_label(&self, label: &str) -> Option<&Die> {
        self.dice.iter().find(|d| d.label == label)
    }
}

fn check_rolls(r: u32) -> Result<(), DiceError> {
    if (1..=MAX_ROLLS).contains(&r) {
        Ok(())
    } else {
        Err(DiceError::RollsOutOfRange(r))
    }
}

/// Outcome counts of the sum of `r` independent rolls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumDistribution {
    r: u32,
    counts: BTreeMap<i64, BigUint>,
    total: BigUint,
}

impl SumDistribution {
    pub fn rolls(&self) -> u32 {
        self.r
    }

    pub fn counts(&self) -> &BTreeMap<i64, BigUint> {
        &self.counts
    }

    /// `|faces|^r`.
    pub fn total(&self) -> &BigUint {
        &self.total
    }
}

pub fn sum_distribution(d: &Die, r: u32) -> Result<SumDistribution, DiceError> {
    check_rolls(r)?;
    let mut single: BTreeMap<i64, BigUint> = BTreeMap::new();
    for &f in &d.faces {
        *single.entry(f).or_default() += 1u32;
    }
    let mut acc = single.clone();
    for _ in 1..r {
        let mut next: BTreeMap<i64, BigUint> = BTreeMap::new();
        for (s, c) in &acc {
            for (f, cf) in &single {
                *next.entry(s + f).or_default() += c * cf;
            }
        }
        acc = next;
    }
    Ok(SumDistribution { r, counts: acc, total: BigUint::from(d.faces.len()).pow(r) })
}

/// Exact probabilities that the first die's sum is higher, equal or lower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinOdds {
    pub win: BigRational,
    pub tie: BigRational,
    pub loss: BigRational,
}

impl WinOdds {
    pub fn beats(&self) -> bool {
        self.win > half()
    }

    /// The same comparison seen from the other die.
    pub fn reversed(&self) -> WinOdds {
        WinOdds { win: self.loss.clone(), tie: self.tie.clone(), loss: self.win.clone() }
    }
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

pub fn odds_between(a: &SumDistribution, b: &SumDistribution) -> WinOdds {
    let mut win = BigUint::zero();
    let mut tie = BigUint::zero();
    // walk a's support upward while accumulating b's mass strictly below
    let mut below = BigUint::zero();
    let mut b_iter = b.counts.iter().peekable();
    for (x, ca) in &a.counts {
        while let Some((y, cb)) = b_iter.peek() {
            if *y < x {
                below += *cb;
                b_iter.next();
            } else {
                break;
            }
        }
        win += ca * &below;
        if let Some(cb) = b.counts.get(x) {
            tie += ca * cb;
        }
    }
    let total = &a.total * &b.total;
    let loss = &total - &win - &tie;
    let ratio = |n: BigUint| BigRational::new(n.into(), total.clone().into());
    WinOdds { win: ratio(win), tie: ratio(tie), loss: ratio(loss) }
}

pub fn win_odds(a: &Die, b: &Die, r: u32) -> Result<WinOdds, DiceError> {
    Ok(odds_between(&sum_distribution(a, r)?, &sum_distribution(b, r)?))
}

/// Every pairwise comparison at `r` rolls; `matrix[i][j]` is die `i` against
/// die `j` (the diagonal is an exact tie).
pub fn odds_matrix(ds: &DiceSet, r: u32) -> Result<Vec<Vec<WinOdds>>, DiceError> {
    let dists = ds.dice.iter().map(|d| sum_distribution(d, r)).collect::<Result<Vec<_>, _>>()?;
    Ok(dists.iter().map(|a| dists.iter().map(|b| odds_between(a, b)).collect()).collect())
}

/// The tournament on the dice at `r` rolls: `i -> j` when die `i`'s sum beats
/// die `j`'s with `win - loss > 2 * margin`.
pub fn tournament_at(ds: &DiceSet, r: u32, margin: &BigRational) -> Result<Tournament, DiceError> {
    let matrix = odds_matrix(ds, r)?;
    tournament_from_matrix(&matrix, r, margin)
}

fn tournament_from_matrix(matrix: &[Vec<WinOdds>], r: u32, margin: &BigRational) -> Result<Tournament, DiceError> {
    if margin.is_negative_value() {
        return Err(DiceError::NegativeMargin);
    }
    let two_margin = margin * BigRational::from_integer(2.into());
    let n = matrix.len();
    let mut failure = None;
    let t = Tournament::from_fn(n, |i, j| {
        let o = &matrix[i][j];
        let diff = &o.win - &o.loss;
        if diff.is_zero() {
            failure.get_or_insert(DiceError::TiedPair { i, j, r });
        } else if diff.abs() <= two_margin {
            failure.get_or_insert(DiceError::MarginViolation { i, j, r });
        }
        diff.is_positive_value()
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(t),
    }
}

trait Sign {
    fn is_negative_value(&self) -> bool;
    fn is_positive_value(&self) -> bool;
    fn abs(&self) -> BigRational;
}

impl Sign for BigRational {
    fn is_negative_value(&self) -> bool {
        *self < BigRational::zero()
    }
    fn is_positive_value(&self) -> bool {
        *self > BigRational::zero()
    }
    fn abs(&self) -> BigRational {
        if self.is_negative_value() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Member `t` (0-based) is the tournament at `t + 1` rolls.
pub fn realized_set(ds: &DiceSet, m: u32, margin: &BigRational) -> Result<TournamentSet, DiceError> {
    if m == 0 {
        return Err(DiceError::RollsOutOfRange(0));
    }
    let members = (1..=m).map(|r| tournament_at(ds, r, margin)).collect::<Result<Vec<_>, _>>()?;
    Ok(TournamentSet::new(members).expect("all members share the dice count"))
}

/// The smallest winning probability along any edge of the realized set.
pub fn min_edge_probability(ds: &DiceSet, m: u32) -> Result<BigRational, DiceError> {
    let mut best: Option<BigRational> = None;
    for r in 1..=m {
        let matrix = odds_matrix(ds, r)?;
        tournament_from_matrix(&matrix, r, &BigRational::zero())?;
        for (i, row) in matrix.iter().enumerate() {
            for (j, o) in row.iter().enumerate() {
                if i != j && o.win > o.loss && best.as_ref().is_none_or(|b| o.win < *b) {
                    best = Some(o.win.clone());
                }
            }
        }
    }
    Ok(best.unwrap_or_else(BigRational::one))
}

/// The smallest winning probability of a die that beats every other die,
/// over roll counts `1..=m`; `None` if no roll count has such a die.
pub fn min_dominator_probability(ds: &DiceSet, m: u32) -> Result<Option<BigRational>, DiceError> {
    let mut best: Option<BigRational> = None;
    for r in 1..=m {
        let matrix = odds_matrix(ds, r)?;
        let t = tournament_from_matrix(&matrix, r, &BigRational::zero())?;
        for d in (0..ds.len()).filter(|&d| t.out_degree(d) + 1 == ds.len()) {
            for (j, o) in matrix[d].iter().enumerate() {
                if j != d && best.as_ref().is_none_or(|b| o.win < *b) {
                    best = Some(o.win.clone());
                }
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddsRow {
    pub die: String,
    pub rolls: u32,
    /// One entry per opponent, in the order the opponents were given.
    pub odds: Vec<WinOdds>,
}

/// Every candidate die against every opponent at every allowed roll count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddsMatrix {
    pub opponents: Vec<String>,
    pub rows: Vec<OddsRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Advice {
    pub die: String,
    pub rolls: u32,
    /// Odds of the chosen die against each opponent, in the given order.
    pub odds: Vec<WinOdds>,
}

/// Picks the die and roll count (at most `m`) that beats every opponent with
/// probability above 1/2, preferring fewer rolls and then lower die index.
pub fn advise(ds: &DiceSet, opponents: &[&str], m: u32) -> Result<Advice, DiceError> {
    if ds.len() < 2 {
        return Err(DiceError::TooFewDice { needed: 2, found: ds.len() });
    }
    check_rolls(m)?;
    let mut opp_idx = Vec::with_capacity(opponents.len());
    for &label in opponents {
        let i = ds.index_of(label).ok_or_else(|| DiceError::UnknownLabel(label.to_string()))?;
        if opp_idx.contains(&i) {
            return Err(DiceError::DuplicateOpponent(label.to_string()));
        }
        opp_idx.push(i);
    }
    if opp_idx.len() >= ds.len() {
        return Err(DiceError::TooManyOpponents { opponents: opp_idx.len(), dice: ds.len() });
    }
    let mut rows = Vec::new();
    for r in 1..=m {
        let dists = ds.dice.iter().map(|d| sum_distribution(d, r)).collect::<Result<Vec<_>, _>>()?;
        for (c, die) in ds.dice.iter().enumerate() {
            if opp_idx.contains(&c) {
                continue;
            }
            let odds: Vec<WinOdds> = opp_idx.iter().map(|&o| odds_between(&dists[c], &dists[o])).collect();
            if odds.iter().all(WinOdds::beats) {
                return Ok(Advice { die: die.label.clone(), rolls: r, odds });
            }
            rows.push(OddsRow { die: die.label.clone(), rolls: r, odds });
        }
    }
    Err(DiceError::NoDominatingChoice(Box::new(OddsMatrix {
        opponents: opponents.iter().map(|s| s.to_string()).collect(),
        rows,
    })))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub wins: u64,
    pub ties: u64,
    pub losses: u64,
}

impl Tally {
    pub fn trials(&self) -> u64 {
        self.wins + self.ties + self.losses
    }
}

/// Rolls `a` against `b` `trials` times, `r` rolls each; reproducible per seed.
pub fn simulate(a: &Die, b: &Die, r: u32, trials: u64, seed: u64) -> Result<Tally, DiceError> {
    check_rolls(r)?;
    if trials == 0 {
        return Err(DiceError::ZeroTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roll = |d: &Die| -> i64 { (0..r).map(|_| d.faces[rng.random_range(0..d.faces.len())]).sum() };
    let mut tally = Tally::default();
    for _ in 0..trials {
        let (x, y) = (roll(a), roll(b));
        match x.cmp(&y) {
            std::cmp::Ordering::Greater => tally.wins += 1,
            std::cmp::Ordering::Equal => tally.ties += 1,
            std::cmp::Ordering::Less => tally.losses += 1,
        }
    }
    Ok(tally)
}
