use std::cmp::Ordering;
use std::fmt;

/// A set of vertex labels stored as a bitmask.
///
/// Trailing zero words are trimmed so equality depends only on the members.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    words: Vec<u64>,
}

impl VertexSubset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut s = Self::empty();
        for v in members {
            s.insert(v);
        }
        s
    }

    pub(crate) fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Self { words }
    }

    pub fn insert(&mut self, v: usize) {
        let w = v / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words.get(v / 64).is_some_and(|w| w & (1 << (v % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest member plus one, or zero for the empty set.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            Some(&w) => (self.words.len() - 1) * 64 + (64 - w.leading_zeros() as usize),
            None => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// True iff every member of `self` is set in `mask`.
    pub(crate) fn is_covered_by(&self, mask: &[u64]) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| {
            let m = mask.get(i).copied().unwrap_or(0);
            w & !m == 0
        })
    }
}

impl fmt::Debug for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for VertexSubset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_members(iter)
    }
}

/// Lexicographic order on the sorted member lists.
impl Ord for VertexSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for VertexSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Iterator over the `k`-subsets of `0..n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let k = cur.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Position of a sorted `k`-subset of `0..n` in lexicographic order.
pub fn lex_rank(n: usize, subset: &[usize]) -> u64 {
    let k = subset.len();
    let mut rank = 0u64;
    let mut prev = 0usize;
    for (pos, &v) in subset.iter().enumerate() {
        for skipped in prev..v {
            rank += binomial(n - skipped - 1, k - pos - 1);
        }
        prev = v + 1;
    }
    rank
}

/// Inverse of [`lex_rank`]: the `rank`-th `k`-subset of `0..n`.
pub fn lex_unrank(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut v = 0;
    while out.len() < k {
        let rest = k - out.len() - 1;
        let with_v = binomial(n - v - 1, rest);
        if rank < with_v {
            out.push(v);
        } else {
            rank -= with_v;
        }
        v += 1;
    }
    out
}
