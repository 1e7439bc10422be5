use super::{Tournament, TournamentError};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The Paley tournament `P_p`: `i -> j` iff `j - i` is a nonzero quadratic
/// residue mod `p`.
///
/// Only primes `p ≡ 3 (mod 4)` give a tournament, since then exactly one of
/// `x`, `-x` is a residue.
pub fn paley(p: u64) -> Result<Tournament, TournamentError> {
    if !is_prime(p) {
        return Err(TournamentError::NotPrime(p));
    }
    if p % 4 != 3 {
        return Err(TournamentError::BadResidueClass(p));
    }
    let mut residue = vec![false; p as usize];
    for x in 1..p {
        residue[(x * x % p) as usize] = true;
    }
    let n = p as usize;
    Ok(Tournament::from_fn(n, |i, j| residue[(j - i) % n]))
}
