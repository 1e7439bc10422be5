use rayon::prelude::*;

use super::{binomial, Tournament, TournamentError, TournamentSet, VertexSubset};

/// Whether `v` beats every member of `subset` in `t`. The empty set is
/// dominated by every vertex.
pub fn dominates(t: &Tournament, v: usize, subset: &VertexSubset) -> Result<bool, TournamentError> {
    let n = t.order();
    if v >= n {
        return Err(TournamentError::VertexOutOfRange { vertex: v, n });
    }
    if subset.bound() > n {
        return Err(TournamentError::VertexOutOfRange { vertex: subset.bound() - 1, n });
    }
    if subset.contains(v) {
        return Err(TournamentError::VertexInSubset(v));
    }
    Ok(subset.is_covered_by(t.out_row(v)))
}

/// Lexicographically least `(tournament index, vertex)` such that the vertex
/// dominates `subset` in that tournament.
///
/// Subsets reaching outside the vertex set are never dominated.
pub fn find_dominator(tau: &TournamentSet, subset: &VertexSubset) -> Option<(usize, usize)> {
    if subset.bound() > tau.order() {
        return None;
    }
    tau.members().iter().enumerate().find_map(|(ti, t)| {
        (0..t.order()).find(|&v| !subset.contains(v) && subset.is_covered_by(t.out_row(v))).map(|v| (ti, v))
    })
}

/// Schütte's property `S_k` for a tournament set (a single tournament is the
/// one-member case).
///
/// `S_0` holds for every nonempty vertex set; `S_k` never holds when
/// `k >= n` since no vertex lies outside a `k`-set covering everything.
pub fn is_sk(tau: &TournamentSet, k: usize) -> bool {
    let n = tau.order();
    if k >= n {
        return false;
    }
    first_undominated(tau, k).is_none()
}

/// Lexicographically least `k`-subset with no dominator in any member, or
/// `None` if every `k`-subset is dominated (or there are no `k`-subsets).
pub fn undominated_witness(tau: &TournamentSet, k: usize) -> Option<VertexSubset> {
    first_undominated(tau, k).map(VertexSubset::from_members)
}

const PARALLEL_THRESHOLD: u64 = 20_000;

/// Depth-first walk over `k`-subsets in lexicographic order. Each node
/// carries, per tournament, the mask of vertices beating the whole prefix;
/// the walk stops at the first leaf where every mask is empty.
fn first_undominated(tau: &TournamentSet, k: usize) -> Option<Vec<usize>> {
    let n = tau.order();
    if k > n {
        return None;
    }
    let words = n.div_ceil(64);
    let m = tau.len();
    let mut full = vec![0u64; words * m];
    for t in 0..m {
        for v in 0..n {
            full[t * words + v / 64] |= 1 << (v % 64);
        }
    }
    if k == 0 {
        return full.iter().all(|&w| w == 0).then(Vec::new);
    }

    let search_from = |first: usize| {
        let mut cand = full.clone();
        narrow(tau, &mut cand, words, first);
        let mut prefix = vec![first];
        descend(tau, k, &mut prefix, &cand, words)
    };

    let firsts = 0..=n - k;
    if binomial(n, k) > PARALLEL_THRESHOLD {
        // find_map_first keeps the lexicographic minimum regardless of scheduling
        firsts.into_par_iter().find_map_first(search_from)
    } else {
        firsts.into_iter().find_map(search_from)
    }
}

fn narrow(tau: &TournamentSet, cand: &mut [u64], words: usize, v: usize) {
    for (t, member) in tau.members().iter().enumerate() {
        let row = member.in_row(v);
        for w in 0..words {
            cand[t * words + w] &= row[w];
        }
    }
}

fn descend(tau: &TournamentSet, k: usize, prefix: &mut Vec<usize>, cand: &[u64], words: usize) -> Option<Vec<usize>> {
    let n = tau.order();
    let depth = prefix.len();
    let next = prefix.last().map_or(0, |&v| v + 1);
    if cand.iter().all(|&w| w == 0) {
        // every completion is undominated; the least one takes the next labels
        let need = k - depth;
        if next + need > n {
            return None;
        }
        let mut out = prefix.clone();
        out.extend(next..next + need);
        return Some(out);
    }
    if depth == k {
        return None;
    }
    let mut child = cand.to_vec();
    for v in next..=n - (k - depth) {
        child.copy_from_slice(cand);
        narrow(tau, &mut child, words, v);
        prefix.push(v);
        let found = descend(tau, k, prefix, &child, words);
        prefix.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::{paley, Combinations};
    use super::*;
    use proptest::prelude::*;

    fn three_cycle() -> Tournament {
        Tournament::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn subset(v: &[usize]) -> VertexSubset {
        VertexSubset::from_members(v.iter().copied())
    }

    /// Plain enumeration over every k-subset and every (t, v).
    fn brute_witness(tau: &TournamentSet, k: usize) -> Option<Vec<usize>> {
        Combinations::new(tau.order(), k).find(|u| {
            let s = subset(u);
            !tau.members().iter().any(|t| (0..t.order()).any(|v| !s.contains(v) && u.iter().all(|&x| t.edge(v, x))))
        })
    }

    fn random_set(n: usize, m: usize, seed: u64) -> TournamentSet {
        let mut state = seed | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state & 1 == 1
        };
        let members = (0..m).map(|_| Tournament::from_fn(n, |_, _| next())).collect();
        TournamentSet::new(members).unwrap()
    }

    #[test]
    fn domination_on_cycle() {
        let c = three_cycle();
        assert_eq!(dominates(&c, 0, &subset(&[1])), Ok(true));
        assert_eq!(dominates(&c, 0, &subset(&[1, 2])), Ok(false));
        assert_eq!(dominates(&c, 2, &VertexSubset::empty()), Ok(true));
        assert_eq!(dominates(&c, 1, &subset(&[1])), Err(TournamentError::VertexInSubset(1)));
    }

    #[test]
    fn dominator_lookup() {
        let tau = TournamentSet::single(three_cycle());
        assert_eq!(find_dominator(&tau, &subset(&[1])), Some((0, 0)));
        assert_eq!(find_dominator(&tau, &subset(&[0, 1, 2])), None);
        assert_eq!(find_dominator(&tau, &subset(&[5])), None);
    }

    #[test]
    fn sk_conventions() {
        let tau = TournamentSet::single(three_cycle());
        assert!(is_sk(&tau, 0));
        assert!(is_sk(&tau, 1));
        assert!(!is_sk(&tau, 2));
        assert!(!is_sk(&tau, 3));
        assert!(!is_sk(&tau, 7));
        let one = TournamentSet::single(Tournament::new(1, &[]).unwrap());
        assert!(is_sk(&one, 0));
        assert!(!is_sk(&one, 1));
    }

    #[test]
    fn witness_examples() {
        let tau = TournamentSet::single(three_cycle());
        assert_eq!(undominated_witness(&tau, 2), Some(subset(&[0, 1])));
        assert_eq!(undominated_witness(&tau, 3), Some(subset(&[0, 1, 2])));
        assert_eq!(undominated_witness(&tau, 4), None);
        let p7 = TournamentSet::single(paley(7).unwrap());
        assert_eq!(undominated_witness(&p7, 2), None);
        let p19 = TournamentSet::single(paley(19).unwrap());
        let w = undominated_witness(&p19, 4).expect("P19 is not S_4");
        assert_eq!(w.len(), 4);
        assert_eq!(find_dominator(&p19, &w), None);
        assert_eq!(Some(w.members()), brute_witness(&p19, 4));
    }

    #[test]
    fn paley_golden_facts() {
        for (p, k) in [(3, 1), (7, 2), (19, 3)] {
            let tau = TournamentSet::single(paley(p).unwrap());
            assert!(is_sk(&tau, k), "P{p} should be S_{k}");
            assert!(!is_sk(&tau, k + 1), "P{p} should not be S_{}", k + 1);
        }
    }

    #[test]
    fn parallel_path_matches_sequential() {
        // C(67,4) is above the parallel threshold
        let tau = TournamentSet::single(paley(67).unwrap());
        let fast = first_undominated(&tau, 4);
        assert_eq!(fast, None);
        let tau = random_set(40, 2, 99);
        assert_eq!(first_undominated(&tau, 4), brute_witness(&tau, 4));
    }

    proptest! {
        #[test]
        fn witness_matches_brute_force(n in 1usize..9, m in 1usize..4, k in 0usize..6, seed: u64) {
            let tau = random_set(n, m, seed);
            let w = undominated_witness(&tau, k).map(|s| s.members());
            prop_assert_eq!(&w, &brute_witness(&tau, k));
            if k < n {
                prop_assert_eq!(is_sk(&tau, k), w.is_none());
            }
        }

        #[test]
        fn sk_is_monotone_in_k(n in 1usize..10, m in 1usize..4, seed: u64) {
            let tau = random_set(n, m, seed);
            for k in 0..n {
                if is_sk(&tau, k) {
                    for smaller in 0..=k {
                        prop_assert!(is_sk(&tau, smaller));
                    }
                }
            }
        }

        #[test]
        fn padding_keeps_sk(n in 1usize..9, m in 1usize..3, seed: u64, extra_seed: u64) {
            let tau = random_set(n, m, seed);
            let extra = random_set(n, 1, extra_seed).into_members();
            let mut members = tau.members().to_vec();
            members.extend(extra);
            let padded = TournamentSet::new(members).unwrap();
            for k in 0..n {
                if is_sk(&tau, k) {
                    prop_assert!(is_sk(&padded, k));
                }
            }
        }
    }
}
