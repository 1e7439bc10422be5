//! JSON payloads of the HTTP API, shared by the server and the client.
//!
//! Exact rationals travel as decimal strings; `approx` is a convenience float
//! and never used for decisions.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dice::{
    min_edge_probability, odds_matrix, tournament_at, Advice, DiceError, DiceSet, OddsMatrix, Tally, WinOdds,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub num: String,
    pub den: String,
    pub approx: f64,
}

impl From<&BigRational> for Rational {
    fn from(q: &BigRational) -> Self {
        Rational { num: q.numer().to_string(), den: q.denom().to_string(), approx: q.to_f64().unwrap_or(f64::NAN) }
    }
}

impl Rational {
    /// The exact value, ignoring `approx`; `None` for malformed strings or a
    /// zero denominator.
    pub fn exact(&self) -> Option<BigRational> {
        let num = BigInt::from_str(&self.num).ok()?;
        let den = BigInt::from_str(&self.den).ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Odds {
    pub win: Rational,
    pub tie: Rational,
    pub loss: Rational,
}

impl From<&WinOdds> for Odds {
    fn from(o: &WinOdds) -> Self {
        Odds { win: (&o.win).into(), tie: (&o.tie).into(), loss: (&o.loss).into() }
    }
}

impl Odds {
    pub fn exact(&self) -> Option<WinOdds> {
        Some(WinOdds { win: self.win.exact()?, tie: self.tie.exact()?, loss: self.loss.exact()? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub labels: Vec<String>,
}

impl From<&DiceSet> for CatalogEntry {
    fn from(ds: &DiceSet) -> Self {
        CatalogEntry { name: ds.name().to_string(), labels: ds.dice().iter().map(|d| d.label().to_string()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub sets: Vec<CatalogEntry>,
}

/// Odds of die `i` against die `j` (`i < j`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairOdds {
    pub i: usize,
    pub j: usize,
    pub odds: Odds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizedTournament {
    pub rolls: u32,
    /// `[winner, loser]`, sorted.
    pub edges: Vec<[usize; 2]>,
    pub pairs: Vec<PairOdds>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentsResponse {
    pub name: String,
    pub labels: Vec<String>,
    pub tournaments: Vec<RealizedTournament>,
    pub min_edge_probability: Rational,
}

impl TournamentsResponse {
    /// Tournaments at roll counts `1..=m` with zero margin.
    pub fn compute(ds: &DiceSet, m: u32) -> Result<Self, DiceError> {
        let mut tournaments = Vec::with_capacity(m as usize);
        for r in 1..=m {
            let matrix = odds_matrix(ds, r)?;
            let t = tournament_at(ds, r, &BigRational::zero())?;
            let pairs = matrix
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter().enumerate().skip(i + 1).map(move |(j, o)| PairOdds { i, j, odds: o.into() })
                })
                .collect();
            tournaments.push(RealizedTournament {
                rolls: r,
                edges: t.edges().into_iter().map(|(i, j)| [i, j]).collect(),
                pairs,
            });
        }
        Ok(TournamentsResponse {
            name: ds.name().to_string(),
            labels: ds.dice().iter().map(|d| d.label().to_string()).collect(),
            tournaments,
            min_edge_probability: (&min_edge_probability(ds, m)?).into(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdviseRequest {
    pub set: String,
    pub opponents: Vec<String>,
    pub m: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpponentOdds {
    pub opponent: String,
    pub odds: Odds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdviseResponse {
    pub die: String,
    pub rolls: u32,
    pub odds: Vec<OpponentOdds>,
}

impl AdviseResponse {
    pub fn new(advice: &Advice, opponents: &[String]) -> Self {
        AdviseResponse {
            die: advice.die.clone(),
            rolls: advice.rolls,
            odds: opponents
                .iter()
                .zip(&advice.odds)
                .map(|(o, odds)| OpponentOdds { opponent: o.clone(), odds: odds.into() })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub set: String,
    pub a: String,
    pub b: String,
    pub r: u32,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateResponse {
    pub wins: u64,
    pub ties: u64,
    pub losses: u64,
    /// The exact odds the tally estimates.
    pub exact: Odds,
}

impl SimulateResponse {
    pub fn new(tally: Tally, exact: &WinOdds) -> Self {
        SimulateResponse { wins: tally.wins, ties: tally.ties, losses: tally.losses, exact: exact.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub die: String,
    pub rolls: u32,
    pub odds: Vec<Odds>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub opponents: Vec<String>,
    pub rows: Vec<MatrixRow>,
}

impl From<&OddsMatrix> for Matrix {
    fn from(m: &OddsMatrix) -> Self {
        Matrix {
            opponents: m.opponents.clone(),
            rows: m
                .rows
                .iter()
                .map(|r| MatrixRow {
                    die: r.die.clone(),
                    rolls: r.rolls,
                    odds: r.odds.iter().map(Odds::from).collect(),
                })
                .collect(),
        }
    }
}

/// Body of every non-2xx response.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    /// Stable machine-readable kind, e.g. `unknown_set`.
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
}
