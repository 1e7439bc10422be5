//! Schütte's property `S_k` for tournaments and sets of tournaments.
//!
//! A tournament has `S_k` if every `k` vertices are dominated by some other
//! vertex. A set of tournaments on one vertex set has `S_k` if every `k`
//! vertices are dominated by some vertex in at least one member. This crate
//! provides:
//!
//! * [`tournament`]: tournaments, tournament sets, the `S_k` predicate and
//!   Paley tournaments;
//! * [`constructions`] and [`bounds`]: padding, rotational and combine
//!   constructions plus every known bound on `f(k)` and `f(m,k)`;
//! * [`sat`]: a CNF encoding of "an `S_k` `m`-set of order `n` exists", an
//!   embedded CDCL solver and exact `f(m,k)` computation;
//! * [`dice`] and [`dice_search`]: exact multi-roll dice odds, realized
//!   tournaments, the unfair game advisor and dice search;
//! * [`io`] and [`wire`]: JSON file formats, DOT export and the HTTP API
//!   payloads shared by the server and client.

pub mod bounds;
pub mod constructions;
pub mod dice;
pub mod dice_search;
pub mod fixtures;
pub mod io;
pub mod sat;
pub mod tournament;
pub mod wire;

pub use tournament::{Tournament, TournamentError, TournamentSet, VertexSubset};
