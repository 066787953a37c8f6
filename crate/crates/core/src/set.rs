//! Integer-set collections and the dyadic decomposition machinery shared by
//! every index in the crate.
//!
//! Ranks are 1-based throughout this module: a set `{s_1 < s_2 < ... < s_m}`
//! has rank range `[1, m]`, and the dyadic subset at level `j`, block `κ`
//! holds ranks `[κ·2^j + 1, (κ+1)·2^j]`.

use crate::error::{Error, Result};

/// Largest universe accepted from user input. Reductions may derive larger
/// universes internally; everything still fits in an `i64`.
pub const MAX_UNIVERSE: i64 = 1 << 40;

/// Upper bound for internally derived universes.
pub(crate) const MAX_DERIVED_UNIVERSE: i64 = 1 << 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Universe(i64);

impl Universe {
    pub fn new(u: i64) -> Result<Self> {
        if (1..=MAX_UNIVERSE).contains(&u) {
            Ok(Universe(u))
        } else {
            Err(Error::UniverseTooLarge(u))
        }
    }

    pub(crate) fn derived(u: i64) -> Result<Self> {
        if (1..=MAX_DERIVED_UNIVERSE).contains(&u) {
            Ok(Universe(u))
        } else {
            Err(Error::Overflow {
                what: "derived universe",
                required_bits: crate::error::bits_needed(u.unsigned_abs() as u128),
                limit_bits: 61,
            })
        }
    }

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn contains(self, v: i64) -> bool {
        (1..=self.0).contains(&v)
    }
}

/// A strictly increasing, nonempty sequence of integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSet {
    id: usize,
    elements: Vec<i64>,
}

impl IntSet {
    /// Caller guarantees `elements` is strictly increasing and nonempty.
    pub(crate) fn from_sorted(id: usize, elements: Vec<i64>) -> Self {
        debug_assert!(!elements.is_empty());
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        IntSet { id, elements }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn min(&self) -> i64 {
        self.elements[0]
    }

    pub fn max(&self) -> i64 {
        self.elements[self.elements.len() - 1]
    }

    pub fn contains(&self, v: i64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    /// 1-based rank of `v`, if present.
    pub fn rank_of(&self, v: i64) -> Option<usize> {
        self.elements.binary_search(&v).ok().map(|r| r + 1)
    }

    /// Elements with 1-based ranks in `[lo, hi]`.
    pub fn rank_slice(&self, lo: usize, hi: usize) -> &[i64] {
        &self.elements[lo - 1..hi]
    }

    /// Ranks `[lo, hi]` (1-based) of the elements lying in `[a, b]`, or
    /// `None` when no element does.
    pub fn value_to_rank_range(&self, a: i64, b: i64) -> Option<(usize, usize)> {
        if a > b {
            return None;
        }
        let lo = self.elements.partition_point(|&x| x < a);
        let hi = self.elements.partition_point(|&x| x <= b);
        (lo < hi).then_some((lo + 1, hi))
    }
}

/// `k` sorted sets over a universe `{1..u}` with total size `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCollection {
    sets: Vec<IntSet>,
    universe: Universe,
    total: usize,
}

impl SetCollection {
    /// Sorts and deduplicates every list, rejecting empty lists and values
    /// outside `[1, u]`.
    pub fn ingest(raw: Vec<Vec<i64>>, u: i64) -> Result<Self> {
        Self::build(raw, Universe::new(u)?)
    }

    /// Like [`SetCollection::ingest`] but for universes produced by internal
    /// reductions, which may exceed [`MAX_UNIVERSE`].
    pub(crate) fn derived(raw: Vec<Vec<i64>>, u: i64) -> Result<Self> {
        Self::build(raw, Universe::derived(u)?)
    }

    fn build(raw: Vec<Vec<i64>>, universe: Universe) -> Result<Self> {
        let mut sets = Vec::with_capacity(raw.len());
        let mut total = 0;
        for (id, mut elems) in raw.into_iter().enumerate() {
            if elems.is_empty() {
                return Err(Error::EmptySet { set: id });
            }
            if let Some(&value) = elems.iter().find(|&&v| !universe.contains(v)) {
                return Err(Error::OutOfUniverse { set: id, value, universe: universe.get() });
            }
            elems.sort_unstable();
            elems.dedup();
            total += elems.len();
            sets.push(IntSet::from_sorted(id, elems));
        }
        Ok(SetCollection { sets, universe, total })
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    pub fn total_size(&self) -> usize {
        self.total
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn sets(&self) -> &[IntSet] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> Result<&IntSet> {
        self.sets.get(i).ok_or(Error::SetIndex { index: i, len: self.sets.len() })
    }

    pub fn to_raw(&self) -> Vec<Vec<i64>> {
        self.sets.iter().map(|s| s.elements.clone()).collect()
    }

    /// Parses the text format: a header line `u k`, then `k` lines of
    /// space-separated integers.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header `u k`"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::parse(1, format!("header must be `u k`, got {:?}", header)));
        }
        let u: i64 = head[0].parse().map_err(|_| Error::parse(1, format!("bad universe {:?}", head[0])))?;
        let k: usize = head[1].parse().map_err(|_| Error::parse(1, format!("bad set count {:?}", head[1])))?;
        let mut raw = Vec::with_capacity(k);
        for (lineno, line) in lines {
            if raw.len() == k {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(Error::parse(lineno + 1, "trailing content after last set"));
            }
            let set = line
                .split_whitespace()
                .map(|tok| tok.parse::<i64>().map_err(|_| Error::parse(lineno + 1, format!("bad integer {:?}", tok))))
                .collect::<Result<Vec<_>>>()?;
            raw.push(set);
        }
        if raw.len() != k {
            return Err(Error::parse(raw.len() + 2, format!("expected {} sets, found {}", k, raw.len())));
        }
        SetCollection::ingest(raw, u)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.universe.get(), self.k());
        for s in &self.sets {
            let line: Vec<String> = s.elements.iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Elements of a parent set whose ranks form one aligned dyadic block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicSubset {
    pub parent: usize,
    pub level: u32,
    pub block: usize,
    pub min: i64,
    pub max: i64,
}

impl DyadicSubset {
    fn of(s: &IntSet, level: u32, block: usize) -> Self {
        let (lo, hi) = block_range(level, block);
        DyadicSubset {
            parent: s.id,
            level,
            block,
            min: s.elements[lo - 1],
            max: s.elements[hi - 1],
        }
    }

    /// 1-based inclusive rank range.
    pub fn rank_range(&self) -> (usize, usize) {
        block_range(self.level, self.block)
    }

    pub fn len(&self) -> usize {
        1 << self.level
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements<'a>(&self, parent: &'a IntSet) -> &'a [i64] {
        let (lo, hi) = self.rank_range();
        parent.rank_slice(lo, hi)
    }
}

/// Position interval `[lo, hi]` of length `2^level` with `lo = 1 + block·2^level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    pub lo: usize,
    pub hi: usize,
    pub level: u32,
    pub block: usize,
}

impl DyadicInterval {
    pub fn new(level: u32, block: usize) -> Self {
        let (lo, hi) = block_range(level, block);
        DyadicInterval { lo, hi, level, block }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn block_range(level: u32, block: usize) -> (usize, usize) {
    let w = 1usize << level;
    (block * w + 1, (block + 1) * w)
}

pub(crate) fn floor_log2(x: usize) -> u32 {
    debug_assert!(x > 0);
    usize::BITS - 1 - x.leading_zeros()
}

pub(crate) fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        floor_log2(x - 1) + 1
    }
}

/// Number of dyadic blocks of all levels over `m` positions.
pub fn dyadic_block_count(m: usize) -> usize {
    if m == 0 {
        return 0;
    }
    (0..=floor_log2(m)).map(|j| m >> j).sum()
}

/// Index of the first block of `level` when blocks are listed level by level.
pub fn dyadic_level_offset(m: usize, level: u32) -> usize {
    (0..level).map(|j| m >> j).sum()
}

/// Total element count over all dyadic blocks of `m` positions.
pub fn dyadic_element_count(m: usize) -> usize {
    if m == 0 {
        return 0;
    }
    (0..=floor_log2(m)).map(|j| (m >> j) << j).sum()
}

/// Greedy left-to-right cover of positions `[lo, hi]` (1-based) by aligned
/// dyadic blocks: at each position take the largest aligned block that
/// fits. Returns `(level, block)` pairs in increasing position order.
pub fn dyadic_cover(lo: usize, hi: usize) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    let mut r = lo;
    while r <= hi {
        let align = if r == 1 { u32::MAX } else { (r - 1).trailing_zeros() };
        let level = align.min(floor_log2(hi - r + 1));
        out.push((level, (r - 1) >> level));
        r += 1 << level;
    }
    out
}

/// All dyadic subsets of `s`, level by level, blocks in rank order.
pub fn dyadic_subsets(s: &IntSet) -> Vec<DyadicSubset> {
    let m = s.len();
    let mut out = Vec::with_capacity(dyadic_block_count(m));
    for level in 0..=floor_log2(m) {
        for block in 0..(m >> level) {
            out.push(DyadicSubset::of(s, level, block));
        }
    }
    out
}

/// Disjoint dyadic subsets whose union is exactly ranks `[lo, hi]`.
pub fn cover_rank_range(s: &IntSet, lo: usize, hi: usize) -> Result<Vec<DyadicSubset>> {
    if lo < 1 || lo > hi || hi > s.len() {
        return Err(Error::InvalidRange { lo: lo as i64, hi: hi as i64, len: s.len() });
    }
    Ok(dyadic_cover(lo, hi)
        .into_iter()
        .map(|(level, block)| DyadicSubset::of(s, level, block))
        .collect())
}

/// Dyadic cover of `{x ∈ s | a ≤ x ≤ b}`; empty when nothing lies in range.
pub fn cover_value_range(s: &IntSet, a: i64, b: i64) -> Vec<DyadicSubset> {
    match s.value_to_rank_range(a, b) {
        Some((lo, hi)) => cover_rank_range(s, lo, hi).expect("rank range derived from set"),
        None => Vec::new(),
    }
}

/// All dyadic intervals `[1 + κ·2^j, (κ+1)·2^j]` inside `[1, n]`.
pub fn dyadic_intervals(n: usize) -> Vec<DyadicInterval> {
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(dyadic_block_count(n));
    for level in 0..=floor_log2(n) {
        for block in 0..(n >> level) {
            out.push(DyadicInterval::new(level, block));
        }
    }
    out
}

/// The bound every cover of a range inside an `m`-element set satisfies.
pub fn cover_bound(m: usize) -> usize {
    2 * ceil_log2(m) as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntSet {
        IntSet::from_sorted(0, v.to_vec())
    }

    fn ranks(cover: &[DyadicSubset]) -> Vec<(usize, usize)> {
        cover.iter().map(|d| d.rank_range()).collect()
    }

    #[test]
    fn ingest_sorts_and_dedupes() {
        let c = SetCollection::ingest(vec![vec![3, 1, 3]], 5).unwrap();
        assert_eq!(c.set(0).unwrap().elements(), &[1, 3]);
        assert_eq!(c.total_size(), 2);

        let c = SetCollection::ingest(vec![vec![1], vec![2, 4]], 4).unwrap();
        assert_eq!((c.k(), c.total_size()), (2, 3));
    }

    #[test]
    fn ingest_rejections() {
        match SetCollection::ingest(vec![vec![6]], 5) {
            Err(Error::OutOfUniverse { set: 0, value: 6, .. }) => {}
            other => panic!("{:?}", other),
        }
        assert!(matches!(SetCollection::ingest(vec![vec![1], vec![]], 5), Err(Error::EmptySet { set: 1 })));
        assert!(matches!(SetCollection::ingest(vec![vec![1]], MAX_UNIVERSE + 1), Err(Error::UniverseTooLarge(_))));
        assert!(matches!(SetCollection::ingest(vec![vec![0]], 5), Err(Error::OutOfUniverse { .. })));
    }

    #[test]
    fn dyadic_subset_counts() {
        let s8 = set(&(1..=8).collect::<Vec<_>>());
        assert_eq!(dyadic_subsets(&s8).len(), 15);
        let s1 = set(&[7]);
        let d = dyadic_subsets(&s1);
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].level, d[0].min, d[0].max), (0, 7, 7));

        let s5 = set(&[10, 20, 30, 40, 50]);
        let d = dyadic_subsets(&s5);
        let per_level: Vec<usize> = (0..3).map(|j| d.iter().filter(|x| x.level == j).count()).collect();
        assert_eq!(per_level, vec![5, 2, 1]);
        assert_eq!(d.len(), 8);
        let l2 = d.iter().find(|x| x.level == 2).unwrap();
        assert_eq!(l2.rank_range(), (1, 4));
        assert_eq!((l2.min, l2.max), (10, 40));
    }

    #[test]
    fn rank_cover_examples() {
        let s = set(&(1..=8).collect::<Vec<_>>());
        assert_eq!(ranks(&cover_rank_range(&s, 1, 8).unwrap()), vec![(1, 8)]);
        assert_eq!(ranks(&cover_rank_range(&s, 2, 7).unwrap()), vec![(2, 2), (3, 4), (5, 6), (7, 7)]);
        assert_eq!(ranks(&cover_rank_range(&s, 5, 5).unwrap()), vec![(5, 5)]);
        assert!(cover_rank_range(&s, 0, 3).is_err());
        assert!(cover_rank_range(&s, 4, 3).is_err());
        assert!(cover_rank_range(&s, 1, 9).is_err());
    }

    /// Smallest cover of `[lo, hi]` by aligned blocks, found by dynamic
    /// programming over every valid block. Independent of the greedy.
    fn min_cover_size(lo: usize, hi: usize) -> usize {
        let mut best = vec![usize::MAX; hi + 2];
        best[lo] = 0;
        for r in lo..=hi {
            if best[r] == usize::MAX {
                continue;
            }
            for level in 0..usize::BITS {
                let w = 1usize << level;
                if (r - 1) % w != 0 || r + w - 1 > hi {
                    continue;
                }
                best[r + w] = best[r + w].min(best[r] + 1);
            }
        }
        best[hi + 1]
    }

    #[test]
    fn greedy_rank_cover_is_minimal_for_small_ranges() {
        for hi in 1..=40 {
            for lo in 1..=hi {
                assert_eq!(dyadic_cover(lo, hi).len(), min_cover_size(lo, hi), "[{}, {}]", lo, hi);
            }
        }
    }

    #[test]
    fn value_cover_examples() {
        let s = set(&[2, 4, 6, 8]);
        let c = cover_value_range(&s, 3, 7);
        let covered: Vec<i64> = c.iter().flat_map(|d| d.elements(&s).to_vec()).collect();
        assert_eq!(covered, vec![4, 6]);
        assert_eq!(ranks(&c), vec![(2, 2), (3, 3)]);

        let s = set(&[2, 4]);
        assert!(cover_value_range(&s, 5, 9).is_empty());
        assert_eq!(ranks(&cover_value_range(&s, 1, 9)), vec![(1, 2)]);
        assert!(cover_value_range(&s, 9, 1).is_empty());
    }

    #[test]
    fn exhaustive_covers_up_to_64() {
        let mut max_seen = vec![0usize; 65];
        for m in 1..=64usize {
            let s = set(&(1..=m as i64).map(|x| 3 * x).collect::<Vec<_>>());
            for lo in 1..=m {
                for hi in lo..=m {
                    let c = cover_rank_range(&s, lo, hi).unwrap();
                    assert!(c.len() <= cover_bound(m), "m={} [{}, {}]", m, lo, hi);
                    max_seen[m] = max_seen[m].max(c.len());
                    let got: Vec<i64> = c.iter().flat_map(|d| d.elements(&s).to_vec()).collect();
                    assert_eq!(got, s.rank_slice(lo, hi));
                    for d in &c {
                        let e = d.elements(&s);
                        assert_eq!((d.min, d.max), (e[0], e[e.len() - 1]));
                    }
                }
            }
            for a in 0..=3 * m as i64 + 1 {
                for b in a..=3 * m as i64 + 1 {
                    let c = cover_value_range(&s, a, b);
                    assert!(c.len() <= cover_bound(m));
                    let got: Vec<i64> = c.iter().flat_map(|d| d.elements(&s).to_vec()).collect();
                    let want: Vec<i64> = s.elements().iter().copied().filter(|&x| a <= x && x <= b).collect();
                    assert_eq!(got, want);
                }
            }
        }
        // Recorded maxima: greedy reaches 2·⌊log₂ m⌋ for m ≥ 4.
        assert_eq!(max_seen[64], 10);
        assert_eq!(max_seen[8], 4);
    }

    #[test]
    fn dyadic_subset_accounting_and_disjointness() {
        for m in 1..=100usize {
            let s = set(&(1..=m as i64).collect::<Vec<_>>());
            let d = dyadic_subsets(&s);
            assert_eq!(d.len(), dyadic_block_count(m));
            let total: usize = d.iter().map(|x| x.len()).sum();
            assert_eq!(total, dyadic_element_count(m));
            assert!(total <= m * (floor_log2(m) as usize + 1));
            for level in 0..=floor_log2(m) {
                let mut seen = vec![false; m + 1];
                for x in d.iter().filter(|x| x.level == level) {
                    let (lo, hi) = x.rank_range();
                    for r in lo..=hi {
                        assert!(!seen[r]);
                        seen[r] = true;
                    }
                }
                let covered = seen.iter().filter(|&&b| b).count();
                assert_eq!(covered, (m >> level) << level);
                let off = dyadic_level_offset(m, level);
                assert_eq!(d[off].level, level);
                assert_eq!(d[off].block, 0);
            }
        }
    }

    #[test]
    fn dyadic_interval_examples() {
        assert_eq!(dyadic_intervals(4).len(), 7);
        assert_eq!(dyadic_intervals(1), vec![DyadicInterval { lo: 1, hi: 1, level: 0, block: 0 }]);
        let d6 = dyadic_intervals(6);
        let per_level: Vec<usize> = (0..3).map(|j| d6.iter().filter(|x| x.level == j).count()).collect();
        assert_eq!(per_level, vec![6, 3, 1]);
        assert_eq!(d6.len(), 10);
        assert!(d6.iter().all(|d| d.hi <= 6 && (d.lo - 1) % d.len() == 0));
    }

    #[test]
    fn text_format_round_trip_and_strictness() {
        let c = SetCollection::parse_text("10 2\n3 1 2\n9\n").unwrap();
        assert_eq!(c.to_raw(), vec![vec![1, 2, 3], vec![9]]);
        assert_eq!(SetCollection::parse_text(&c.to_text()).unwrap(), c);
        assert!(SetCollection::parse_text("10 2 7\n1\n2\n").is_err());
        assert!(SetCollection::parse_text("10 1\n1\n2\n").is_err());
        assert!(SetCollection::parse_text("10 2\n1\n").is_err());
        assert!(SetCollection::parse_text("10 1\n1 x\n").is_err());
        assert!(SetCollection::parse_text("10 1\n\n").is_err());
    }
}
