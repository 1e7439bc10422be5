//! Bounds on `f(k)` (smallest `S_k` tournament) and `f(m,k)` (smallest
//! vertex set carrying an `S_k` set of `m` tournaments).

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

/// Best known upper bounds on `f(k)` for `k = 0..=6`, all realized by Paley
/// tournaments (or the single vertex for `k = 0`). Only `k <= 3` are known
/// to be exact.
pub const KNOWN_F: [u64; 7] = [1, 3, 7, 19, 67, 331, 1163];

/// Cells `(m, k)` whose table value has been confirmed exact by computer.
pub const CONFIRMED_EXACT: [(usize, usize); 18] = [
    (1, 0),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 1),
    (2, 2),
    (2, 3),
    (2, 4),
    (3, 2),
    (3, 3),
    (3, 4),
    (3, 5),
    (4, 3),
    (4, 4),
    (4, 5),
    (5, 4),
    (5, 5),
    (5, 6),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("k = {k} is out of range (needs k >= {min})")]
    KOutOfRange { k: usize, min: usize },
    #[error("m must be at least 1")]
    InvalidM,
    #[error("no known bound for f({0})")]
    BaseTableExhausted(usize),
}

/// Known upper bound on `f(k)`, with `f(-1) = 0` (the empty vertex set) so
/// that formulas with `a = 0` evaluate.
fn known_f(k: isize) -> Result<u64, BoundsError> {
    if k < 0 {
        return Ok(0);
    }
    KNOWN_F.get(k as usize).copied().ok_or(BoundsError::BaseTableExhausted(k as usize))
}

/// Which formula produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundSource {
    /// `f(m,k) = k+1` for `m >= k+1`.
    Trivial,
    /// Known Paley bound on `f(k)` (`m = 1`).
    KnownBase,
    /// `b f(a) + (m-b) f(a-1)` with `k+1 = am + b`, `1 <= b <= m`.
    ClosedForm { a: usize, b: usize },
    /// `f(m1,k1) + f(m2,k2)` with `m1+m2 = m`, `k1+k2 = k-1`.
    Split { m1: usize, k1: usize, m2: usize, k2: usize },
    /// Inherited from `f(m-1,k)`.
    Monotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundsTableEntry {
    pub m: usize,
    pub k: usize,
    pub upper: u64,
    pub source: BoundSource,
}

/// `f(k) >= 2^{k+1} - 1`.
pub fn erdos_lower(k: usize) -> Result<u64, BoundsError> {
    if k == 0 || k > 62 {
        return Err(BoundsError::KOutOfRange { k, min: 1 });
    }
    Ok((1u64 << (k + 1)) - 1)
}

/// `f(k) >= (k+2) 2^{k-1} - 1`, valid for `k > 2`.
pub fn szekeres_lower(k: usize) -> Result<u64, BoundsError> {
    if k <= 2 || k > 56 {
        return Err(BoundsError::KOutOfRange { k, min: 3 });
    }
    Ok((k as u64 + 2) * (1u64 << (k - 1)) - 1)
}

/// Smallest `n >= k` with `2^k C(n,k) (1 - 2^{-k})^{n-k} < 1`.
///
/// A floating-point scan finds where the log of the left side first drops
/// near zero; every candidate from there on is decided by the exact integer
/// inequality `2^k C(n,k) (2^k - 1)^{n-k} < 2^{k(n-k)}`.
pub fn erdos_upper(k: usize) -> Result<u64, BoundsError> {
    if k == 0 || k > 24 {
        return Err(BoundsError::KOutOfRange { k, min: 1 });
    }
    const SLACK: f64 = 1e-6;
    let kf = k as f64;
    let log_q = (-(-kf * std::f64::consts::LN_2).exp()).ln_1p();
    let mut n = k;
    let mut log_binom = 0.0f64;
    loop {
        let log_g = kf * std::f64::consts::LN_2 + log_binom + (n - k) as f64 * log_q;
        if log_g < SLACK && erdos_holds_exactly(k, n) {
            return Ok(n as u64);
        }
        n += 1;
        log_binom += (n as f64 / (n - k) as f64).ln();
    }
}

fn erdos_holds_exactly(k: usize, n: usize) -> bool {
    let mut binom = BigUint::one();
    for i in 0..k {
        binom = binom * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    let base = (BigUint::one() << k) - BigUint::one();
    let lhs = (binom << k) * base.pow((n - k) as u32);
    let rhs = BigUint::one() << (k * (n - k));
    lhs < rhs
}

/// `b f(a) + (m-b) f(a-1)` where `k+1 = am + b`, `1 <= b <= m`.
pub fn closed_form_upper(m: usize, k: usize) -> Result<u64, BoundsError> {
    closed_form(m, k).map(|(v, _, _)| v)
}

fn closed_form(m: usize, k: usize) -> Result<(u64, usize, usize), BoundsError> {
    if m == 0 {
        return Err(BoundsError::InvalidM);
    }
    let a = k / m;
    let b = k % m + 1;
    let mut total = b as u64 * known_f(a as isize)?;
    if m > b {
        total += (m - b) as u64 * known_f(a as isize - 1)?;
    }
    Ok((total, a, b))
}

/// `m f(ceil((k-m+1)/m))`, defined for `k >= m-1`.
pub fn coarse_upper(m: usize, k: usize) -> Result<u64, BoundsError> {
    if m == 0 {
        return Err(BoundsError::InvalidM);
    }
    if k + 1 < m {
        return Err(BoundsError::KOutOfRange { k, min: m - 1 });
    }
    let arg = (k + 1 - m).div_ceil(m);
    Ok(m as u64 * known_f(arg as isize)?)
}

/// Best bound from recursively splitting with the combine construction,
/// seeded with the known `f(k)` values and `f(m,k) = k+1` for `m >= k+1`.
pub fn split_dp_upper(m: usize, k: usize) -> Result<BoundsTableEntry, BoundsError> {
    if m == 0 {
        return Err(BoundsError::InvalidM);
    }
    let grid = SplitGrid::build(m, k);
    grid.get(m, k).ok_or({
        // the only unreachable cells are m = 1 beyond the known table
        BoundsError::BaseTableExhausted(k)
    })
}

/// Memo table for [`split_dp_upper`], indexed `[m][k]` with `m >= 1`.
struct SplitGrid {
    cells: Vec<Vec<Option<BoundsTableEntry>>>,
}

impl SplitGrid {
    fn build(m_max: usize, k_max: usize) -> Self {
        let mut cells: Vec<Vec<Option<BoundsTableEntry>>> = vec![vec![None; k_max + 1]; m_max + 1];
        for m in 1..=m_max {
            for k in 0..=k_max {
                let mut best: Option<BoundsTableEntry> = None;
                let mut offer = |upper: u64, source: BoundSource| {
                    if best.is_none_or(|b| upper < b.upper) {
                        best = Some(BoundsTableEntry { m, k, upper, source });
                    }
                };
                if m > k {
                    offer(k as u64 + 1, BoundSource::Trivial);
                }
                if m == 1 {
                    if let Ok(v) = known_f(k as isize) {
                        offer(v, BoundSource::KnownBase);
                    }
                }
                for m1 in 1..m {
                    let m2 = m - m1;
                    for k1 in 0..k {
                        let k2 = k - 1 - k1;
                        if let (Some(x), Some(y)) = (cells[m1][k1], cells[m2][k2]) {
                            offer(x.upper + y.upper, BoundSource::Split { m1, k1, m2, k2 });
                        }
                    }
                }
                if m > 1 {
                    if let Some(prev) = cells[m - 1][k] {
                        offer(prev.upper, BoundSource::Monotone);
                    }
                }
                cells[m][k] = best;
            }
        }
        Self { cells }
    }

    fn get(&self, m: usize, k: usize) -> Option<BoundsTableEntry> {
        self.cells.get(m).and_then(|row| row.get(k)).copied().flatten()
    }
}

/// One cell of [`bounds_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundsCell {
    pub m: usize,
    pub k: usize,
    /// `None` when no known bound reaches this cell.
    pub entry: Option<BoundsTableEntry>,
    /// `m > k+1`: the value is just `k+1` and the rendered table leaves
    /// the cell blank.
    pub redundant: bool,
    /// The value is known to equal `f(m,k)`.
    pub confirmed_exact: bool,
}

impl BoundsCell {
    pub fn is_populated(&self) -> bool {
        self.entry.is_some() && !self.redundant
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsTable {
    pub m_max: usize,
    pub k_max: usize,
    /// Row-major by `k`, then `m`.
    pub cells: Vec<BoundsCell>,
}

impl BoundsTable {
    pub fn cell(&self, m: usize, k: usize) -> Option<&BoundsCell> {
        if m == 0 || m > self.m_max || k > self.k_max {
            return None;
        }
        self.cells.get(k * self.m_max + (m - 1))
    }

    pub fn upper(&self, m: usize, k: usize) -> Option<u64> {
        self.cell(m, k).and_then(|c| c.entry).map(|e| e.upper)
    }

    pub fn populated(&self) -> impl Iterator<Item = &BoundsCell> {
        self.cells.iter().filter(|c| c.is_populated())
    }
}

/// Upper bounds on `f(m,k)` for `1 <= m <= m_max`, `0 <= k <= k_max`: the
/// minimum of the split recursion, the closed form and the trivial bound.
pub fn bounds_table(m_max: usize, k_max: usize) -> BoundsTable {
    let grid = SplitGrid::build(m_max.max(1), k_max);
    let mut cells = Vec::with_capacity(m_max * (k_max + 1));
    for k in 0..=k_max {
        for m in 1..=m_max {
            let mut entry = grid.get(m, k);
            if let Ok((upper, a, b)) = closed_form(m, k) {
                // closed form wins ties so provenance names the simplest formula
                if entry.is_none_or(|e| upper <= e.upper && e.source != BoundSource::Trivial) {
                    let source = if m == 1 { BoundSource::KnownBase } else { BoundSource::ClosedForm { a, b } };
                    entry = Some(BoundsTableEntry { m, k, upper, source });
                }
            }
            cells.push(BoundsCell {
                m,
                k,
                entry,
                redundant: m > k + 1,
                confirmed_exact: CONFIRMED_EXACT.contains(&(m, k)),
            });
        }
    }
    BoundsTable { m_max, k_max, cells }
}
