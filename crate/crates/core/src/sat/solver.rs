//! A complete CDCL solver: two-watched-literal propagation, first-UIP
//! learning, activity-based branching, phase saving and Luby restarts.
//!
//! Literals are encoded internally as `2 * var + sign` with 0-based
//! variables; `sign = 1` is the negative literal.

use std::time::{Duration, Instant};

use serde::Serialize;

use super::cnf::CnfFormula;

/// Resource caps. Exhausting any of them yields [`SolveStatus::Unknown`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_conflicts: Option<u64>,
    pub max_decisions: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn decisions(max: u64) -> Self {
        Self { max_decisions: Some(max), ..Self::default() }
    }

    pub fn time(max: Duration) -> Self {
        Self { max_time: Some(max), ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learnt_clauses: u64,
    pub elapsed_ms: u64,
}

/// A total assignment indexed by DIMACS variable; slot 0 is unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Self(values)
    }

    /// Builds a model from signed literals; unmentioned variables are false.
    pub fn from_literals(var_count: u32, lits: &[i32]) -> Self {
        let mut values = vec![false; var_count as usize + 1];
        for &l in lits {
            if let Some(slot) = values.get_mut(l.unsigned_abs() as usize) {
                *slot = l > 0;
            }
        }
        Self(values)
    }

    pub fn value(&self, var: i32) -> bool {
        self.0.get(var.unsigned_abs() as usize).copied().unwrap_or(false)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Signed literals for variables `1..`.
    pub fn literals(&self) -> Vec<i32> {
        (1..self.0.len()).map(|v| if self.0[v] { v as i32 } else { -(v as i32) }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Sat(Model),
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub stats: SolveStats,
}

/// Solves `formula` within `budget`.
pub fn solve(formula: &CnfFormula, budget: &Budget) -> SolveResult {
    let start = Instant::now();
    let mut solver = Solver::new(formula.var_count() as usize);
    let mut ok = true;
    for c in formula.clauses() {
        if !solver.add_input_clause(c) {
            ok = false;
            break;
        }
    }
    let status = if !ok { SolveStatus::Unsat } else { solver.search(budget, start) };
    if let SolveStatus::Sat(model) = &status {
        assert!(formula.is_satisfied_by(model.as_slice()), "solver produced a non-model");
    }
    let mut stats = solver.stats;
    stats.elapsed_ms = start.elapsed().as_millis() as u64;
    SolveResult { status, stats }
}

const UNDEF: u8 = 2;

#[inline]
fn var_of(lit: u32) -> usize {
    (lit >> 1) as usize
}

#[inline]
fn from_dimacs(l: i32) -> u32 {
    let v = l.unsigned_abs() - 1;
    2 * v + u32::from(l < 0)
}

struct Clause {
    lits: Vec<u32>,
    learnt: bool,
    activity: f64,
    lbd: u32,
}

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: u32,
}

struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    /// Per variable: 0 false, 1 true, 2 unassigned.
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    num_learnts: usize,
    stats: SolveStats,
}

impl Solver {
    fn new(num_vars: usize) -> Self {
        // tiny index-decreasing bias: until conflicts reshape activity, the
        // lowest-numbered unassigned variable is branched on first
        let activity: Vec<f64> = (0..num_vars).map(|v| 1e-6 * (num_vars - v) as f64 / num_vars.max(1) as f64).collect();
        let mut heap = VarHeap::new(num_vars);
        for v in 0..num_vars {
            heap.insert(v, &activity);
        }
        Self {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assigns: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![None; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            clause_inc: 1.0,
            heap,
            phase: vec![false; num_vars],
            seen: vec![false; num_vars],
            num_learnts: 0,
            stats: SolveStats::default(),
        }
    }

    #[inline]
    fn lit_value(&self, lit: u32) -> u8 {
        let a = self.assigns[var_of(lit)];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ (lit & 1) as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds an input clause at level 0. Returns false on an immediate
    /// contradiction.
    fn add_input_clause(&mut self, dimacs: &[i32]) -> bool {
        let mut lits: Vec<u32> = dimacs.iter().map(|&l| from_dimacs(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return true; // tautology
        }
        lits.retain(|&l| self.lit_value(l) != 0);
        if lits.iter().any(|&l| self.lit_value(l) == 1) {
            return true;
        }
        match lits.len() {
            0 => false,
            1 => {
                self.enqueue(lits[0], None);
                self.propagate().is_none()
            }
            _ => {
                self.attach(lits, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<u32>, learnt: bool, lbd: u32) -> u32 {
        let idx = self.clauses.len() as u32;
        self.watches[lits[0] as usize].push(Watcher { clause: idx, blocker: lits[1] });
        self.watches[lits[1] as usize].push(Watcher { clause: idx, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, activity: 0.0, lbd });
        if learnt {
            self.num_learnts += 1;
            self.stats.learnt_clauses += 1;
        }
        idx
    }

    fn enqueue(&mut self, lit: u32, reason: Option<u32>) {
        let v = var_of(lit);
        self.assigns[v] = 1 ^ (lit & 1) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let ci = w.clause as usize;
                {
                    let lits = &mut self.clauses[ci].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[ci].lits[0];
                if first != w.blocker && self.lit_value(first) == 1 {
                    ws[j] = Watcher { clause: w.clause, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[ci].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let cand = self.clauses[ci].lits[k];
                    if self.lit_value(cand) != 0 {
                        self.clauses[ci].lits.swap(1, k);
                        self.watches[cand as usize].push(Watcher { clause: w.clause, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { clause: w.clause, blocker: first };
                j += 1;
                if self.lit_value(first) == 0 {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.clause));
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, u32) {
        let mut learnt = vec![0u32];
        let mut path = 0usize;
        let mut p: Option<u32> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl);
            let start = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[start..] {
                let v = var_of(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[var_of(self.trail[index])] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = var_of(lit);
            self.seen[v] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                learnt[0] = lit ^ 1;
                break;
            }
            confl = self.reason[v].expect("implied literal has a reason");
        }

        // drop literals implied by the rest of the clause
        let keep: Vec<bool> = learnt.iter().enumerate().map(|(i, &l)| i == 0 || !self.redundant(l)).collect();
        for &l in &learnt[1..] {
            self.seen[var_of(l)] = false;
        }
        let mut learnt: Vec<u32> = learnt.into_iter().zip(keep).filter_map(|(l, k)| k.then_some(l)).collect();

        let bt = if learnt.len() == 1 {
            0
        } else {
            let (mi, _) = learnt.iter().enumerate().skip(1).max_by_key(|(_, &l)| self.level[var_of(l)]).unwrap();
            learnt.swap(1, mi);
            self.level[var_of(learnt[1])]
        };
        (learnt, bt)
    }

    /// A learnt literal is redundant if its reason's other literals are all
    /// already in the clause (or fixed at level 0).
    fn redundant(&self, lit: u32) -> bool {
        let v = var_of(lit);
        match self.reason[v] {
            None => false,
            Some(r) => self.clauses[r as usize].lits.iter().all(|&q| {
                let u = var_of(q);
                u == v || self.seen[u] || self.level[u] == 0
            }),
        }
    }

    fn lbd(&mut self, lits: &[u32]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|&l| self.level[var_of(l)]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, ci: u32) {
        let c = &mut self.clauses[ci as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = var_of(lit);
            self.phase[v] = lit & 1 == 0;
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            if !self.heap.contains(v) {
                self.heap.insert(v, &self.activity);
            }
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.trail.len();
    }

    fn pick_branch(&mut self) -> Option<u32> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(2 * v as u32 + u32::from(!self.phase[v]));
            }
        }
        None
    }

    /// Deletes the less useful half of the learnt clauses. Only called at
    /// decision level 0, where no learnt clause is a reason that analysis
    /// can reach.
    fn reduce_db(&mut self) {
        debug_assert_eq!(self.decision_level(), 0);
        let mut learnt_idx: Vec<usize> =
            (0..self.clauses.len()).filter(|&i| self.clauses[i].learnt && self.clauses[i].lbd > 2).collect();
        learnt_idx.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a], &self.clauses[b]);
            cb.lbd.cmp(&ca.lbd).then(ca.activity.partial_cmp(&cb.activity).unwrap())
        });
        let mut remove = vec![false; self.clauses.len()];
        for &i in learnt_idx.iter().take(learnt_idx.len() / 2) {
            remove[i] = true;
        }
        let old = std::mem::take(&mut self.clauses);
        let mut remap = vec![u32::MAX; old.len()];
        for (i, c) in old.into_iter().enumerate() {
            if remove[i] {
                self.num_learnts -= 1;
                continue;
            }
            remap[i] = self.clauses.len() as u32;
            self.clauses.push(c);
        }
        for r in self.reason.iter_mut() {
            *r = r.and_then(|ci| {
                let m = remap[ci as usize];
                (m != u32::MAX).then_some(m)
            });
        }
        for w in &mut self.watches {
            w.clear();
        }
        for (i, c) in self.clauses.iter().enumerate() {
            self.watches[c.lits[0] as usize].push(Watcher { clause: i as u32, blocker: c.lits[1] });
            self.watches[c.lits[1] as usize].push(Watcher { clause: i as u32, blocker: c.lits[0] });
        }
    }

    fn search(&mut self, budget: &Budget, start: Instant) -> SolveStatus {
        if self.propagate().is_some() {
            return SolveStatus::Unsat;
        }
        let deadline = budget.max_time.map(|d| start + d);
        let mut restart_index = 1u64;
        let mut conflicts_left = 100 * luby(restart_index);
        let mut max_learnts = (self.clauses.len() / 3).max(2000) as f64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    return SolveStatus::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let lbd = self.lbd(&learnt);
                    let asserting = learnt[0];
                    let ci = self.attach(learnt, true, lbd);
                    self.bump_clause(ci);
                    self.enqueue(asserting, Some(ci));
                }
                self.var_inc /= 0.95;
                self.clause_inc /= 0.999;
                conflicts_left = conflicts_left.saturating_sub(1);
                if budget.max_conflicts.is_some_and(|m| self.stats.conflicts >= m) {
                    return SolveStatus::Unknown;
                }
                if self.stats.conflicts.is_multiple_of(256) && deadline.is_some_and(|d| Instant::now() >= d) {
                    return SolveStatus::Unknown;
                }
                continue;
            }

            if conflicts_left == 0 {
                self.stats.restarts += 1;
                restart_index += 1;
                conflicts_left = 100 * luby(restart_index);
                self.cancel_until(0);
                if self.num_learnts as f64 >= max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    max_learnts *= 1.1;
                }
                continue;
            }

            match self.pick_branch() {
                None => {
                    let mut values = vec![false; self.num_vars + 1];
                    for v in 0..self.num_vars {
                        values[v + 1] = self.assigns[v] == 1;
                    }
                    return SolveStatus::Sat(Model(values));
                }
                Some(lit) => {
                    self.stats.decisions += 1;
                    if budget.max_decisions.is_some_and(|m| self.stats.decisions > m) {
                        return SolveStatus::Unknown;
                    }
                    if self.stats.decisions.is_multiple_of(1024) && deadline.is_some_and(|d| Instant::now() >= d) {
                        return SolveStatus::Unknown;
                    }
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(lit, None);
                }
            }
        }
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut i: u64) -> u64 {
    loop {
        let mut k = 1;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Binary max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        Self { heap: Vec::with_capacity(n), pos: vec![None; n] }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        self.pos[v] = Some(self.heap.len());
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let pv = self.heap[parent];
            if act[pv] >= act[v] {
                break;
            }
            self.heap[i] = pv;
            self.pos[pv] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && act[self.heap[r]] > act[self.heap[l]] { r } else { l };
            if act[self.heap[child]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn formula(vars: u32, clauses: &[&[i32]]) -> CnfFormula {
        let mut f = CnfFormula::new(vars);
        for c in clauses {
            f.add_clause(c).unwrap();
        }
        f
    }

    fn brute_sat(f: &CnfFormula) -> bool {
        let n = f.var_count() as usize;
        (0u64..1 << n).any(|bits| {
            let model: Vec<bool> = std::iter::once(false).chain((0..n).map(|i| bits >> i & 1 == 1)).collect();
            f.is_satisfied_by(&model)
        })
    }

    #[test]
    fn trivial_instances() {
        let unsat = formula(1, &[&[1], &[-1]]);
        assert_eq!(solve(&unsat, &Budget::unlimited()).status, SolveStatus::Unsat);
        let sat = formula(2, &[&[1, 2]]);
        assert!(matches!(solve(&sat, &Budget::unlimited()).status, SolveStatus::Sat(_)));
        let empty = CnfFormula::new(0);
        assert!(matches!(solve(&empty, &Budget::unlimited()).status, SolveStatus::Sat(_)));
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (1..=15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    /// Pigeonhole PHP(n+1, n) is unsatisfiable and needs real search.
    fn pigeonhole(holes: usize) -> CnfFormula {
        let pigeons = holes + 1;
        let var = |p: usize, h: usize| (p * holes + h + 1) as i32;
        let mut f = CnfFormula::new((pigeons * holes) as u32);
        for p in 0..pigeons {
            let c: Vec<i32> = (0..holes).map(|h| var(p, h)).collect();
            f.add_clause(&c).unwrap();
        }
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    f.add_clause(&[-var(p, h), -var(q, h)]).unwrap();
                }
            }
        }
        f
    }

    #[test]
    fn pigeonhole_is_unsat() {
        for holes in 1..=7 {
            let r = solve(&pigeonhole(holes), &Budget::unlimited());
            assert_eq!(r.status, SolveStatus::Unsat, "PHP({},{holes})", holes + 1);
        }
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let r = solve(&pigeonhole(9), &Budget { max_conflicts: Some(10), ..Budget::default() });
        assert_eq!(r.status, SolveStatus::Unknown);
        let r = solve(&pigeonhole(9), &Budget::decisions(5));
        assert_eq!(r.status, SolveStatus::Unknown);
    }

    #[test]
    fn deterministic() {
        let f = pigeonhole(6);
        let a = solve(&f, &Budget::unlimited());
        let b = solve(&f, &Budget::unlimited());
        assert_eq!(a.status, b.status);
        assert_eq!(a.stats.decisions, b.stats.decisions);
        assert_eq!(a.stats.conflicts, b.stats.conflicts);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn agrees_with_truth_table(vars in 1u32..12, raw in proptest::collection::vec(proptest::collection::vec((1i32..13, any::<bool>()), 1..4), 1..60)) {
            let mut f = CnfFormula::new(vars);
            for c in raw {
                let lits: Vec<i32> = c.into_iter().map(|(v, s)| {
                    let v = (v - 1) % vars as i32 + 1;
                    if s { v } else { -v }
                }).collect();
                f.add_clause(&lits).unwrap();
            }
            let r = solve(&f, &Budget::unlimited());
            match r.status {
                SolveStatus::Sat(m) => prop_assert!(f.is_satisfied_by(m.as_slice())),
                SolveStatus::Unsat => prop_assert!(!brute_sat(&f)),
                SolveStatus::Unknown => prop_assert!(false, "unlimited budget returned unknown"),
            }
        }
    }
}
