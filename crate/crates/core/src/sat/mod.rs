//! SAT formulation of "an `S_k` set of `m` tournaments on `n` vertices
//! exists", an embedded solver, DIMACS I/O and exact `f(m,k)`.

mod cnf;
mod encode;
mod search;
mod solver;

pub use cnf::{parse_dimacs, parse_solver_output, to_dimacs, CnfFormula, ExternalOutput};
pub use encode::{decode, encode, SymmetryOptions, VarKind, VarMap};
pub use search::{
    brute_force_exists, f_exact, search_set, verify_external, ExternalVerdict, FExactReport, FOutcome, FStep,
    SearchStatus, SearchVerdict, StepStatus, BRUTE_FORCE_CAP,
};
pub use solver::{solve, Budget, Model, SolveResult, SolveStats, SolveStatus};

use thiserror::Error;

use crate::tournament::TournamentError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("clauses must be nonempty")]
    EmptyClause,
    #[error("literal {literal} out of range for {var_count} variables")]
    LiteralOutOfRange { literal: i32, var_count: u32 },
    #[error("order n = {n} is too small for S_{k} (need n > k)")]
    TooSmall { n: usize, k: usize },
    #[error("m must be at least 1")]
    InvalidM,
    #[error("tournament {t}: edge variables for ({i}, {j}) are not exactly one-hot")]
    InconsistentEdges { t: usize, i: usize, j: usize },
    #[error("decoded certificate does not have the property")]
    CertificateRejected,
    #[error("m * C(n,2) = {bits} for m = {m}, n = {n} exceeds the enumeration cap")]
    CapExceeded { m: usize, n: usize, bits: u64 },
    #[error("DIMACS line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}
