use serde::Serialize;

use super::cnf::CnfFormula;
use super::solver::Model;
use super::SatError;
use crate::tournament::{binomial, lex_rank, lex_unrank, Combinations, Tournament, TournamentSet};

/// Optional symmetry-breaking clauses. Each is satisfiability-preserving on
/// its own and together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SymmetryOptions {
    /// Vertex 0 beats vertex 1 in the first tournament.
    pub fix_first_edge: bool,
    /// Members are ordered lexicographically non-increasing by their upper
    /// triangle edge vector, `(0,1)` most significant.
    pub lex_order: bool,
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        Self { fix_first_edge: true, lex_order: true }
    }
}

impl SymmetryOptions {
    pub fn none() -> Self {
        Self { fix_first_edge: false, lex_order: false }
    }
}

/// What a CNF variable stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// `i -> j` in tournament `t` (0-based `t`).
    Edge { t: usize, i: usize, j: usize },
    /// `i` dominates the `k`-subset `subset` in tournament `t`.
    Dominates { t: usize, i: usize, subset: Vec<usize> },
    /// Auxiliary variable introduced by symmetry breaking.
    Aux,
}

/// Variable layout of the encoding: edge variables first, then dominance
/// variables, then auxiliaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    m: usize,
    k: usize,
    n: usize,
    subsets: u64,
    d_base: u32,
    aux_base: u32,
    var_count: u32,
    total_vars: u32,
}

impl VarMap {
    fn new(m: usize, k: usize, n: usize) -> Self {
        let subsets = binomial(n, k);
        let e_count = (m * n * (n - 1)) as u32;
        let d_count = (m as u64 * subsets * (n - k) as u64) as u32;
        let d_base = 1 + e_count;
        let aux_base = d_base + d_count;
        Self { m, k, n, subsets, d_base, aux_base, var_count: aux_base - 1, total_vars: aux_base - 1 }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_var_count(&self) -> u32 {
        self.d_base - 1
    }

    pub fn dominance_var_count(&self) -> u32 {
        self.aux_base - self.d_base
    }

    /// Number of edge and dominance variables.
    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    /// All variables of the formula, auxiliaries included.
    pub fn total_vars(&self) -> u32 {
        self.total_vars
    }

    /// Variable for `i -> j` in tournament `t`.
    pub fn e_index(&self, t: usize, i: usize, j: usize) -> i32 {
        assert!(t < self.m && i < self.n && j < self.n && i != j);
        let col = if j < i { j } else { j - 1 };
        (1 + t * self.n * (self.n - 1) + i * (self.n - 1) + col) as i32
    }

    /// Variable for "`i` dominates `subset` in tournament `t`"; `subset`
    /// must be sorted, of size `k`, and not contain `i`.
    pub fn d_index(&self, t: usize, i: usize, subset: &[usize]) -> Option<i32> {
        if t >= self.m || i >= self.n || subset.len() != self.k || subset.contains(&i) {
            return None;
        }
        let below = subset.iter().filter(|&&a| a < i).count();
        let rank = lex_rank(self.n, subset);
        let slot = (t as u64 * self.subsets + rank) * (self.n - self.k) as u64 + (i - below) as u64;
        Some(self.d_base as i32 + slot as i32)
    }

    /// Inverse lookup.
    pub fn kind(&self, var: i32) -> Option<VarKind> {
        let v = u32::try_from(var).ok().filter(|&v| v >= 1 && v <= self.total_vars)?;
        if v < self.d_base {
            let idx = (v - 1) as usize;
            let per_t = self.n * (self.n - 1);
            let (t, rest) = (idx / per_t, idx % per_t);
            let (i, col) = (rest / (self.n - 1), rest % (self.n - 1));
            let j = if col < i { col } else { col + 1 };
            Some(VarKind::Edge { t, i, j })
        } else if v < self.aux_base {
            let slot = (v - self.d_base) as u64;
            let width = (self.n - self.k) as u64;
            let pos = (slot % width) as usize;
            let ts = slot / width;
            let (t, rank) = ((ts / self.subsets) as usize, ts % self.subsets);
            let subset = lex_unrank(self.n, self.k, rank);
            let i = (0..self.n).filter(|x| !subset.contains(x)).nth(pos)?;
            Some(VarKind::Dominates { t, i, subset })
        } else {
            Some(VarKind::Aux)
        }
    }
}

/// CNF for "an `S_k` set of `m` tournaments on `n` vertices exists".
///
/// Clause groups, in order: the two pair clauses per tournament and
/// unordered pair; `¬D(t,i,A) ∨ e(t,i,j)` for every `j ∈ A`; one covering
/// clause `∨ D(t,i,A)` per `k`-subset `A`; then symmetry clauses.
pub fn encode(m: usize, k: usize, n: usize, sym: SymmetryOptions) -> Result<(CnfFormula, VarMap), SatError> {
    if m == 0 {
        return Err(SatError::InvalidM);
    }
    if n <= k {
        return Err(SatError::TooSmall { n, k });
    }
    let mut vm = VarMap::new(m, k, n);
    let mut f = CnfFormula::new(vm.var_count());
    let add = |f: &mut CnfFormula, c: &[i32]| f.add_clause(c).expect("encoder emits valid clauses");

    for t in 0..m {
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (vm.e_index(t, i, j), vm.e_index(t, j, i));
                add(&mut f, &[a, b]);
                add(&mut f, &[-a, -b]);
            }
        }
    }
    for subset in Combinations::new(n, k) {
        for t in 0..m {
            for i in (0..n).filter(|i| !subset.contains(i)) {
                let d = vm.d_index(t, i, &subset).unwrap();
                for &j in &subset {
                    add(&mut f, &[-d, vm.e_index(t, i, j)]);
                }
            }
        }
    }
    let vmr = &vm;
    for subset in Combinations::new(n, k) {
        let cover: Vec<i32> = (0..m)
            .flat_map(|t| {
                let subset = &subset;
                (0..n).filter(move |i| !subset.contains(i)).map(move |i| vmr.d_index(t, i, subset).unwrap())
            })
            .collect();
        add(&mut f, &cover);
    }

    if sym.fix_first_edge && n >= 2 {
        add(&mut f, &[vm.e_index(0, 0, 1)]);
    }
    if sym.lex_order && m >= 2 && n >= 2 {
        let positions: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for t in 0..m - 1 {
            let x: Vec<i32> = positions.iter().map(|&(i, j)| vm.e_index(t, i, j)).collect();
            let y: Vec<i32> = positions.iter().map(|&(i, j)| vm.e_index(t + 1, i, j)).collect();
            add_lex_geq(&mut f, &x, &y);
        }
    }
    vm.total_vars = f.var_count();
    Ok((f, vm))
}

/// `x >=_lex y` with one "prefix equal so far" auxiliary per position.
fn add_lex_geq(f: &mut CnfFormula, x: &[i32], y: &[i32]) {
    let mut eq_prev: Option<i32> = None;
    for p in 0..x.len() {
        let guard: Vec<i32> = eq_prev.map(|e| -e).into_iter().collect();
        let clause = |extra: &[i32]| -> Vec<i32> { guard.iter().chain(extra).copied().collect() };
        f.add_clause(&clause(&[x[p], -y[p]])).unwrap();
        if p + 1 < x.len() {
            let eq = f.new_var();
            f.add_clause(&clause(&[-x[p], -y[p], eq])).unwrap();
            f.add_clause(&clause(&[x[p], y[p], eq])).unwrap();
            eq_prev = Some(eq);
        }
    }
}

/// Reads the tournament set off the edge variables of a model.
pub fn decode(model: &Model, vm: &VarMap) -> Result<TournamentSet, SatError> {
    let mut members = Vec::with_capacity(vm.m);
    for t in 0..vm.m {
        let mut beats = Vec::new();
        for i in 0..vm.n {
            for j in i + 1..vm.n {
                let ij = model.value(vm.e_index(t, i, j));
                let ji = model.value(vm.e_index(t, j, i));
                match (ij, ji) {
                    (true, false) => beats.push((i, j)),
                    (false, true) => beats.push((j, i)),
                    _ => return Err(SatError::InconsistentEdges { t, i, j }),
                }
            }
        }
        members.push(Tournament::new(vm.n, &beats)?);
    }
    Ok(TournamentSet::new(members)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::cnf::{parse_dimacs, to_dimacs};
    use crate::tournament::{binomial, paley};
    use proptest::prelude::*;

    #[test]
    fn small_counts() {
        let (f, vm) = encode(1, 1, 3, SymmetryOptions::none()).unwrap();
        assert_eq!(vm.edge_var_count(), 6);
        assert_eq!(vm.dominance_var_count(), 6);
        assert_eq!(f.var_count(), 12);
        assert_eq!(f.num_clauses(), 15);
        assert_eq!(encode(1, 2, 2, SymmetryOptions::default()), Err(SatError::TooSmall { n: 2, k: 2 }));
        assert_eq!(encode(0, 1, 3, SymmetryOptions::default()), Err(SatError::InvalidM));
    }

    #[test]
    fn dimacs_round_trip_of_encoding() {
        let (f, _) = encode(1, 1, 3, SymmetryOptions::default()).unwrap();
        let back = parse_dimacs(&to_dimacs(&f)).unwrap();
        let mut a = f.clauses().to_vec();
        let mut b = back.clauses().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(back.var_count(), f.var_count());
    }

    #[test]
    fn decode_rejects_inconsistent_edges() {
        let (_, vm) = encode(1, 1, 3, SymmetryOptions::none()).unwrap();
        let model = Model::from_literals(vm.var_count(), &[1, 2, 3, 4, 5, 6]);
        assert!(matches!(decode(&model, &vm), Err(SatError::InconsistentEdges { t: 0, .. })));
        let model = Model::from_literals(vm.var_count(), &[]);
        assert!(matches!(decode(&model, &vm), Err(SatError::InconsistentEdges { .. })));
    }

    #[test]
    fn decode_of_planted_model() {
        let p7 = paley(7).unwrap();
        let (f, vm) = encode(1, 2, 7, SymmetryOptions::none()).unwrap();
        let mut values = vec![false; f.var_count() as usize + 1];
        for (i, j) in p7.edges() {
            values[vm.e_index(0, i, j) as usize] = true;
        }
        for subset in Combinations::new(7, 2) {
            for i in 0..7 {
                if let Some(d) = vm.d_index(0, i, &subset) {
                    values[d as usize] = subset.iter().all(|&j| p7.edge(i, j));
                }
            }
        }
        let model = Model::new(values);
        assert!(f.is_satisfied_by(model.as_slice()));
        assert_eq!(decode(&model, &vm).unwrap(), TournamentSet::single(p7));
    }

    proptest! {
        #[test]
        fn counts_and_bijection(m in 1usize..4, n in 1usize..7, k_raw in 0usize..6) {
            let k = k_raw % n;
            let (f, vm) = encode(m, k, n, SymmetryOptions::none()).unwrap();
            let e = (m * n * (n - 1)) as u64;
            let d = m as u64 * binomial(n, k) * (n - k) as u64;
            prop_assert_eq!(vm.edge_var_count() as u64, e);
            prop_assert_eq!(vm.dominance_var_count() as u64, d);
            let pairs = m as u64 * binomial(n, 2);
            let clauses = 2 * pairs + d * k as u64 + binomial(n, k);
            prop_assert_eq!(f.num_clauses() as u64, clauses);

            let mut seen = std::collections::HashSet::new();
            for t in 0..m {
                for i in 0..n {
                    for j in (0..n).filter(|&j| j != i) {
                        let v = vm.e_index(t, i, j);
                        prop_assert!(seen.insert(v));
                        prop_assert_eq!(vm.kind(v), Some(VarKind::Edge { t, i, j }));
                    }
                }
                for subset in Combinations::new(n, k) {
                    for i in (0..n).filter(|i| !subset.contains(i)) {
                        let v = vm.d_index(t, i, &subset).unwrap();
                        prop_assert!(seen.insert(v));
                        prop_assert_eq!(vm.kind(v), Some(VarKind::Dominates { t, i, subset: subset.clone() }));
                    }
                }
            }
            prop_assert_eq!(seen.len() as u32, vm.var_count());
            prop_assert!(seen.iter().all(|&v| v >= 1 && v as u32 <= vm.var_count()));
        }
    }
}
