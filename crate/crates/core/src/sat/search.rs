use serde::Serialize;
use sha2::{Digest, Sha256};

use super::cnf::{to_dimacs, CnfFormula, ExternalOutput};
use super::encode::{decode, encode, SymmetryOptions, VarMap};
use super::solver::{solve, Budget, Model, SolveStats, SolveStatus};
use super::SatError;
use crate::tournament::{binomial, is_sk, Combinations, TournamentSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    /// A certificate that passed `is_sk`.
    Sat(TournamentSet),
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchVerdict {
    pub status: SearchStatus,
    pub stats: SolveStats,
    /// Digest of the exact formula handed to the solver plus the solver
    /// configuration; recorded alongside every UNSAT attestation.
    pub config_hash: String,
}

/// Decides whether an `S_k` `m`-set of order `n` exists with the embedded
/// solver. A SAT answer is always re-checked with `is_sk`.
pub fn search_set(
    m: usize,
    k: usize,
    n: usize,
    sym: SymmetryOptions,
    budget: &Budget,
) -> Result<SearchVerdict, SatError> {
    let (formula, vm) = encode(m, k, n, sym)?;
    let config_hash = config_hash(&formula, sym);
    let result = solve(&formula, budget);
    let status = match result.status {
        SolveStatus::Sat(model) => SearchStatus::Sat(certify(&model, &vm)?),
        SolveStatus::Unsat => SearchStatus::Unsat,
        SolveStatus::Unknown => SearchStatus::Unknown,
    };
    Ok(SearchVerdict { status, stats: result.stats, config_hash })
}

fn certify(model: &Model, vm: &VarMap) -> Result<TournamentSet, SatError> {
    let set = decode(model, vm)?;
    if !is_sk(&set, vm.k()) {
        return Err(SatError::CertificateRejected);
    }
    Ok(set)
}

fn config_hash(formula: &CnfFormula, sym: SymmetryOptions) -> String {
    let mut h = Sha256::new();
    h.update(to_dimacs(formula).as_bytes());
    h.update(format!("cdcl-luby100-vsids0.95;{sym:?}").as_bytes());
    hex::encode(&h.finalize()[..8])
}

/// One probe of [`f_exact`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FStep {
    pub n: usize,
    pub status: StepStatus,
    pub stats: SolveStats,
    pub config_hash: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FOutcome {
    /// Every smaller order was refuted and `value` has a certificate.
    Exact { value: usize, certificate: TournamentSet },
    /// Some probe ran out of budget: `f(m,k)` lies in `lower..=upper`
    /// (`upper` absent if no certificate was found up to `n_max`).
    Bracketed { lower: usize, upper: Option<usize>, certificate: Option<TournamentSet> },
    /// Every order up to `n_max` was refuted.
    AboveLimit { n_max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FExactReport {
    pub m: usize,
    pub k: usize,
    pub steps: Vec<FStep>,
    pub outcome: FOutcome,
}

impl FExactReport {
    pub fn exact(&self) -> Option<usize> {
        match self.outcome {
            FOutcome::Exact { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Computes `f(m,k)` by probing `n = k+1, k+2, ...` up to `n_max`.
///
/// The first SAT order is exact only if every smaller order came back
/// UNSAT; an Unknown probe turns the answer into a bracket.
pub fn f_exact(m: usize, k: usize, n_max: usize, sym: SymmetryOptions, budget: &Budget) -> FExactReport {
    let mut steps = Vec::new();
    let mut first_unknown = None;
    if m > 0 {
        for n in k + 1..=n_max {
            let verdict = search_set(m, k, n, sym, budget).expect("m >= 1 and n > k");
            let status = match &verdict.status {
                SearchStatus::Sat(_) => StepStatus::Sat,
                SearchStatus::Unsat => StepStatus::Unsat,
                SearchStatus::Unknown => StepStatus::Unknown,
            };
            steps.push(FStep { n, status, stats: verdict.stats, config_hash: verdict.config_hash });
            match verdict.status {
                SearchStatus::Sat(certificate) => {
                    let outcome = match first_unknown {
                        None => FOutcome::Exact { value: n, certificate },
                        Some(lower) => FOutcome::Bracketed { lower, upper: Some(n), certificate: Some(certificate) },
                    };
                    return FExactReport { m, k, steps, outcome };
                }
                SearchStatus::Unknown => {
                    first_unknown.get_or_insert(n);
                }
                SearchStatus::Unsat => {}
            }
        }
    }
    let outcome = match first_unknown {
        Some(lower) => FOutcome::Bracketed { lower, upper: None, certificate: None },
        None => FOutcome::AboveLimit { n_max },
    };
    FExactReport { m, k, steps, outcome }
}

/// Largest `m * C(n,2)` that [`brute_force_exists`] will enumerate.
pub const BRUTE_FORCE_CAP: u64 = 22;

/// Exhaustive search over every orientation of every member; independent of
/// the CNF encoding and the solver.
pub fn brute_force_exists(m: usize, k: usize, n: usize) -> Result<bool, SatError> {
    let pairs = binomial(n, 2);
    let bits = (m as u64).saturating_mul(pairs);
    if bits > BRUTE_FORCE_CAP {
        return Err(SatError::CapExceeded { m, n, bits });
    }
    if m == 0 || k >= n {
        return Ok(false);
    }
    let subsets: Vec<u64> = Combinations::new(n, k).map(|c| c.iter().fold(0u64, |acc, &v| acc | 1 << v)).collect();
    let pair_list: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    // every tournament on n vertices as out-neighbour masks
    let tournaments: Vec<Vec<u64>> = (0u64..1 << pairs)
        .map(|code| {
            let mut rows = vec![0u64; n];
            for (b, &(i, j)) in pair_list.iter().enumerate() {
                if code >> b & 1 == 1 {
                    rows[i] |= 1 << j;
                } else {
                    rows[j] |= 1 << i;
                }
            }
            rows
        })
        .collect();
    let count = tournaments.len();
    let mut choice = vec![0usize; m];
    loop {
        let all_dominated = subsets.iter().all(|&a| {
            choice.iter().any(|&c| tournaments[c].iter().enumerate().any(|(v, &row)| a >> v & 1 == 0 && row & a == a))
        });
        if all_dominated {
            return Ok(true);
        }
        // odometer over m-tuples
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(false);
            }
            choice[pos] += 1;
            if choice[pos] < count {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Outcome of checking an external solver's answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExternalVerdict {
    /// The model decoded to a set that passed `is_sk`.
    Verified(TournamentSet),
    /// The external solver claims UNSAT; not an internal attestation.
    UnsatClaim,
    Unknown,
}

/// Accepts an external SAT answer only after decoding and re-checking it.
pub fn verify_external(vm: &VarMap, output: &ExternalOutput) -> Result<ExternalVerdict, SatError> {
    match output {
        ExternalOutput::Satisfiable(lits) => {
            let model = Model::from_literals(vm.total_vars(), lits);
            Ok(ExternalVerdict::Verified(certify(&model, vm)?))
        }
        ExternalOutput::Unsatisfiable => Ok(ExternalVerdict::UnsatClaim),
        ExternalOutput::Unknown => Ok(ExternalVerdict::Unknown),
    }
}
