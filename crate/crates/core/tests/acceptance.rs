//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p schutte-core --test acceptance`. Every tolerance
//! is pinned below; exact values are compared with exact equality.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schutte_core::bounds::{bounds_table, erdos_lower, erdos_upper, szekeres_lower};
use schutte_core::constructions::{combine, rotational_set, FillPolicy};
use schutte_core::dice::{
    min_dominator_probability, min_edge_probability, realized_set, tournament_at, win_odds, DiceSet, Die,
};
use schutte_core::dice_search::{search_multiroll, search_realization, DiceSearchOutcome, SearchSpace};
use schutte_core::fixtures::five_dice;
use schutte_core::sat::{
    brute_force_exists, f_exact, search_set, Budget, SearchStatus, SymmetryOptions, BRUTE_FORCE_CAP,
};
use schutte_core::tournament::{binomial, is_sk, paley, Tournament, TournamentSet};

const TABLE_LIMIT: Duration = Duration::from_secs(1);
const PALEY_LIMIT: Duration = Duration::from_secs(5);
const QUICK_LIMIT: Duration = Duration::from_secs(60);
const STRETCH_LIMIT: Duration = Duration::from_secs(30 * 60);
const FIVE_DICE_LIMIT: Duration = Duration::from_secs(5);
const COMBINE_TRIALS: u64 = 100;
const INVARIANCE_CASES: u64 = 1000;

type Check = Result<String, String>;
type Named = (&'static str, Box<dyn Fn() -> Check>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The reference grid: `(m, k) -> (value, starred)`.
fn reference_table() -> BTreeMap<(usize, usize), (u64, bool)> {
    let rows: [&[&str]; 9] = [
        &["1*"],
        &["3*", "2*"],
        &["7*", "4*", "3*"],
        &["19*", "6*", "5*", "4*"],
        &["67", "10*", "7*", "6*", "5*"],
        &["331", "14", "9*", "8*", "7*"],
        &["1163", "26", "13", "10", "9*"],
        &["", "38", "17", "12", "11"],
        &["", "86", "21", "16", "13"],
    ];
    let mut out = BTreeMap::new();
    for (k, row) in rows.iter().enumerate() {
        for (i, cell) in row.iter().enumerate().filter(|(_, c)| !c.is_empty()) {
            let starred = cell.ends_with('*');
            let value = cell.trim_end_matches('*').parse().unwrap();
            out.insert((i + 1, k), (value, starred));
        }
    }
    out
}

fn bound_table() -> Check {
    let start = Instant::now();
    let table = bounds_table(5, 8);
    let elapsed = start.elapsed();
    let got: BTreeMap<_, _> =
        table.populated().map(|c| ((c.m, c.k), (c.entry.unwrap().upper, c.confirmed_exact))).collect();
    let want = reference_table();
    ensure(want.len() == 33, || format!("expected grid has {} cells", want.len()))?;
    for (cell, value) in &want {
        ensure(got.get(cell) == Some(value), || format!("cell {cell:?}: got {:?}, want {value:?}", got.get(cell)))?;
    }
    ensure(got.len() == want.len(), || format!("{} populated cells, want 33", got.len()))?;
    within(elapsed, TABLE_LIMIT)?;
    Ok(format!("33/33 cells and stars equal, {elapsed:.2?}"))
}

fn paley_facts() -> Check {
    let start = Instant::now();
    let cases = [(3, 1, true), (7, 2, true), (19, 3, true), (3, 2, false), (7, 3, false), (19, 4, false)];
    for (p, k, want) in cases {
        let set = TournamentSet::single(paley(p).map_err(|e| e.to_string())?);
        ensure(is_sk(&set, k) == want, || format!("is_sk(P_{p}, {k}) != {want}"))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, PALEY_LIMIT)?;
    Ok(format!("6/6 facts, {elapsed:.2?}"))
}

fn exact_values(cases: &[(usize, usize, usize)], limit: Duration) -> Check {
    let mut report = Vec::new();
    for &(m, k, want) in cases {
        let start = Instant::now();
        let r = f_exact(m, k, want, SymmetryOptions::default(), &Budget::unlimited());
        let elapsed = start.elapsed();
        ensure(r.exact() == Some(want), || format!("f({m},{k}): {:?}", r.outcome))?;
        within(elapsed, limit).map_err(|e| format!("f({m},{k}) {e}"))?;
        report.push(format!("f({m},{k})={want} {:.1}s", elapsed.as_secs_f64()));
    }
    Ok(report.join(", "))
}

fn oracle_equivalence() -> Check {
    let mut instances = 0;
    for n in 2..=7 {
        for m in 1..=BRUTE_FORCE_CAP as usize {
            if m as u64 * binomial(n, 2) > BRUTE_FORCE_CAP {
                break;
            }
            for k in 1..n {
                let truth = brute_force_exists(m, k, n).map_err(|e| e.to_string())?;
                for sym in [SymmetryOptions::default(), SymmetryOptions::none()] {
                    let v = search_set(m, k, n, sym, &Budget::unlimited()).map_err(|e| e.to_string())?;
                    let sat = match v.status {
                        SearchStatus::Sat(_) => true,
                        SearchStatus::Unsat => false,
                        SearchStatus::Unknown => return Err(format!("({m},{k},{n}) unknown")),
                    };
                    ensure(sat == truth, || format!("({m},{k},{n}) {sym:?}: solver {sat}, oracle {truth}"))?;
                    instances += 1;
                }
            }
        }
    }
    Ok(format!("{instances}/{instances} solver runs agree"))
}

fn combine_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let seed_set = |rng: &mut ChaCha8Rng| -> (TournamentSet, usize) {
        match rng.random_range(0..4) {
            0 => (TournamentSet::single(paley(3).unwrap()), 1),
            1 => (TournamentSet::single(paley(7).unwrap()), 2),
            _ => {
                let k = rng.random_range(0..=3);
                (rotational_set(k, FillPolicy::Seeded(rng.random())), k)
            }
        }
    };
    for trial in 0..COMBINE_TRIALS {
        let (a, k1) = seed_set(&mut rng);
        let (b, k2) = seed_set(&mut rng);
        let fill = FillPolicy::Seeded(rng.random());
        let c = combine(&a, &b, fill);
        ensure(c.order() == a.order() + b.order() && c.len() == a.len() + b.len(), || {
            format!("trial {trial}: wrong shape")
        })?;
        ensure(is_sk(&c, k1 + k2 + 1), || format!("trial {trial}: not S_{}", k1 + k2 + 1))?;
    }
    let p3 = TournamentSet::single(paley(3).unwrap());
    let twice = combine(&combine(&p3, &p3, FillPolicy::default()), &p3, FillPolicy::default());
    ensure(twice.order() == 9 && twice.len() == 3 && is_sk(&twice, 5), || {
        "iterated P_3 construction is not an S_5 3-set of order 9".into()
    })?;
    Ok(format!("{COMBINE_TRIALS}/{COMBINE_TRIALS} trials, iterated S_5 3-set of order 9"))
}

fn five_dice_verification() -> Check {
    let start = Instant::now();
    let ds = five_dice();
    let set = realized_set(&ds, 5, &BigRational::zero()).map_err(|e| e.to_string())?;
    ensure(is_sk(&set, 4), || "realized set is not S_4".into())?;
    for r in 1..=5u32 {
        let t = &set.members()[r as usize - 1];
        let d = r as usize - 1;
        ensure(t.out_degree(d) == 4, || format!("die {d} does not dominate at {r} rolls"))?;
    }
    let dominator = min_dominator_probability(&ds, 5).map_err(|e| e.to_string())?;
    ensure(dominator == Some(q(41, 81)), || format!("dominator minimum {dominator:?}"))?;
    let all = min_edge_probability(&ds, 5).map_err(|e| e.to_string())?;
    ensure(all == q(8, 27), || format!("all-edge minimum {all}"))?;
    let elapsed = start.elapsed();
    within(elapsed, FIVE_DICE_LIMIT)?;
    Ok(format!("S_4, dominators 0..4, min 41/81 (all edges 8/27), {elapsed:.2?}"))
}

fn bound_calculators() -> Check {
    let e = |r: Result<u64, _>| r.map_err(|e: schutte_core::bounds::BoundsError| e.to_string());
    ensure(e(erdos_lower(2))? == 7, || "erdos_lower(2) != 7".into())?;
    ensure(e(szekeres_lower(3))? == 19, || "szekeres_lower(3) != 19".into())?;
    ensure(e(szekeres_lower(5))? == 111, || "szekeres_lower(5) != 111".into())?;
    for k in 3..=10 {
        let (up, low) = (e(erdos_upper(k))?, e(szekeres_lower(k))?);
        ensure(up >= low, || format!("k={k}: erdos_upper {up} < szekeres_lower {low}"))?;
    }
    Ok("4/4 values, ordering holds for k=3..10".into())
}

fn random_die(rng: &mut ChaCha8Rng, label: &str) -> Die {
    let n = rng.random_range(1..=6);
    Die::new(label, (0..n).map(|_| rng.random_range(0..20)).collect()).unwrap()
}

fn transformed(ds: &DiceSet, shift: i64, scale: i64) -> DiceSet {
    let dice = ds
        .dice()
        .iter()
        .map(|d| Die::new(d.label(), d.faces().iter().map(|f| shift + scale * f).collect()).unwrap())
        .collect();
    DiceSet::new("t", dice).unwrap()
}

fn dice_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let one = BigRational::one();
    for case in 0..INVARIANCE_CASES {
        let (a, b) = (random_die(&mut rng, "a"), random_die(&mut rng, "b"));
        let r = rng.random_range(1..=4);
        let ab = win_odds(&a, &b, r).map_err(|e| e.to_string())?;
        let ba = win_odds(&b, &a, r).map_err(|e| e.to_string())?;
        ensure(&ab.win + &ab.tie + &ab.loss == one, || format!("case {case}: odds do not sum to 1"))?;
        ensure(ba == ab.reversed(), || format!("case {case}: not antisymmetric"))?;
        let c = random_die(&mut rng, "c");
        let ds = DiceSet::new("s", vec![a, b, c]).unwrap();
        let shift = rng.random_range(-50..=50);
        let scale = rng.random_range(1..=7);
        let base: Result<Tournament, _> = tournament_at(&ds, r, &BigRational::zero());
        let moved = tournament_at(&transformed(&ds, shift, scale), r, &BigRational::zero());
        ensure(base == moved, || format!("case {case}: tournament changed under {scale}x+{shift}"))?;
    }
    Ok(format!("{INVARIANCE_CASES}/{INVARIANCE_CASES} cases"))
}

fn dice_search_regression() -> Check {
    let cycle = Tournament::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
    let r = search_realization(&cycle, &SearchSpace::new(3, 9)).map_err(|e| e.to_string())?;
    let DiceSearchOutcome::Found(ds) = r.outcome else {
        return Err(format!("3-cycle: {:?}", r.outcome));
    };
    ensure(ds.dice().iter().all(|d| d.faces().len() == 3 && d.faces().iter().all(|f| (0..=9).contains(f))), || {
        "3-cycle dice outside the space".into()
    })?;
    let half = q(1, 2);
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let o = win_odds(&ds.dice()[i], &ds.dice()[j], 1).map_err(|e| e.to_string())?;
        ensure(o.win > half, || format!("3-cycle edge {i}->{j} wins only {}", o.win))?;
    }

    let planted = five_dice();
    let targets = realized_set(&planted, 5, &BigRational::zero()).map_err(|e| e.to_string())?;
    let mut alphabet: Vec<i64> = planted.dice().iter().flat_map(|d| d.faces().to_vec()).collect();
    alphabet.sort_unstable();
    alphabet.dedup();
    let mut space = SearchSpace::new(3, 30);
    space.alphabet = Some(alphabet);
    space.require_majority = false;
    space.max_time = Some(Duration::from_secs(120));
    let r = search_multiroll(&targets, &space).map_err(|e| e.to_string())?;
    let DiceSearchOutcome::Found(found) = r.outcome else {
        return Err(format!("planted five dice: {:?}", r.outcome));
    };
    let again = realized_set(&found, 5, &BigRational::zero()).map_err(|e| e.to_string())?;
    ensure(again == targets, || "recovered dice realize a different set".into())?;
    Ok(format!(
        "3-cycle {:?}, planted five-dice target recovered",
        ds.dice().iter().map(Die::faces).collect::<Vec<_>>()
    ))
}

fn main() -> ExitCode {
    let checks: Vec<Named> = vec![
        ("bound table reproduction", Box::new(bound_table)),
        ("paley facts", Box::new(paley_facts)),
        (
            "exact values, quick tier",
            Box::new(|| {
                exact_values(
                    &[
                        (2, 1, 2),
                        (3, 2, 3),
                        (2, 2, 4),
                        (4, 3, 4),
                        (3, 3, 5),
                        (2, 3, 6),
                        (5, 4, 5),
                        (4, 4, 6),
                        (3, 4, 7),
                    ],
                    QUICK_LIMIT,
                )
            }),
        ),
        (
            "exact values, stretch tier",
            Box::new(|| exact_values(&[(5, 5, 7), (4, 5, 8), (3, 5, 9), (2, 4, 10)], STRETCH_LIMIT)),
        ),
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("combine property suite", Box::new(combine_suite)),
        ("five-dice verification", Box::new(five_dice_verification)),
        ("bound calculators", Box::new(bound_calculators)),
        ("dice invariance suite", Box::new(dice_invariance)),
        ("dice-search regression", Box::new(dice_search_regression)),
    ];
    let mut failed = 0;
    for (name, check) in &checks {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
