//! Suffix arrays and gapped pattern queries: report every `(i, j)` such that
//! `P₁` occurs at `i`, `P₂` occurs at `j` and `j − i ∈ [α, β]`.
//!
//! Positions are 1-based throughout.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gapped::GappedIndex;
use crate::set::{ceil_log2, cover_bound, dyadic_cover, dyadic_intervals, dyadic_level_offset, DyadicInterval, SetCollection};
use crate::ssi::{BackendConfig, BackendKind};
use crate::stats::QueryStats;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text(Vec<u8>);

impl Text {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(Error::Format("text is empty".into()));
        }
        Ok(Text(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether `p` occurs at 1-based position `i`.
    pub fn occurs_at(&self, p: &[u8], i: usize) -> bool {
        i >= 1 && self.0.get(i - 1..i - 1 + p.len()) == Some(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixArray {
    /// `sa[r]` is the 1-based start of the `(r+1)`-th smallest suffix.
    pub sa: Vec<u32>,
    /// `lcp[r] = lcp(suffix sa[r−1], suffix sa[r])`, `lcp[0] = 0`.
    pub lcp: Vec<u32>,
}

/// Half-open range `[start, end)` of 0-based suffix-array ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternInterval {
    pub start: usize,
    pub end: usize,
}

impl PatternInterval {
    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }
}

impl SuffixArray {
    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    pub fn interval(&self, text: &Text, p: &[u8]) -> PatternInterval {
        pattern_interval(self, text, p)
    }

    /// Starting positions inside `iv`, in suffix order.
    pub fn positions(&self, iv: PatternInterval) -> &[u32] {
        &self.sa[iv.start..iv.end]
    }
}

/// Prefix doubling: each round sorts by `(rank[i], rank[i+k])` with two
/// counting-sort passes. Rank 0 stands for the implicit sentinel.
pub fn build_suffix_array(text: &Text) -> SuffixArray {
    let s = text.as_bytes();
    let n = s.len();
    let mut rank: Vec<usize> = s.iter().map(|&c| c as usize + 1).collect();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut tmp = vec![0usize; n];
    let mut k = 1;
    loop {
        let buckets = rank.iter().copied().max().unwrap_or(0).max(n) + 1;
        let second = |i: usize, rank: &[usize]| if i + k < n { rank[i + k] } else { 0 };
        counting_sort(&mut sa, &mut tmp, buckets, |i| second(i, &rank));
        counting_sort(&mut sa, &mut tmp, buckets, |i| rank[i]);
        tmp[sa[0]] = 1;
        for r in 1..n {
            let (p, c) = (sa[r - 1], sa[r]);
            let same = rank[p] == rank[c] && second(p, &rank) == second(c, &rank);
            tmp[c] = tmp[p] + usize::from(!same);
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] == n {
            break;
        }
        k *= 2;
    }
    let lcp = kasai(s, &sa, &rank);
    SuffixArray { sa: sa.into_iter().map(|i| i as u32 + 1).collect(), lcp }
}

fn counting_sort(sa: &mut [usize], tmp: &mut [usize], buckets: usize, key: impl Fn(usize) -> usize) {
    let mut count = vec![0usize; buckets + 1];
    for &i in sa.iter() {
        count[key(i) + 1] += 1;
    }
    for b in 1..=buckets {
        count[b] += count[b - 1];
    }
    for &i in sa.iter() {
        let k = key(i);
        tmp[count[k]] = i;
        count[k] += 1;
    }
    sa.copy_from_slice(&tmp[..sa.len()]);
}

/// `rank` holds 1-based suffix ranks of 0-based positions.
fn kasai(s: &[u8], sa: &[usize], rank: &[usize]) -> Vec<u32> {
    let n = s.len();
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] - 1;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1];
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Suffixes having `p` as a prefix. Patterns longer than the text give an
/// empty interval; the empty pattern matches every suffix.
pub fn pattern_interval(sa: &SuffixArray, text: &Text, p: &[u8]) -> PatternInterval {
    let s = text.as_bytes();
    if p.len() > s.len() {
        return PatternInterval { start: 0, end: 0 };
    }
    let prefix_cmp = |pos: u32| {
        let suf = &s[pos as usize - 1..];
        suf[..suf.len().min(p.len())].cmp(p)
    };
    let start = sa.sa.partition_point(|&pos| prefix_cmp(pos) == Ordering::Less);
    let end = start + sa.sa[start..].partition_point(|&pos| prefix_cmp(pos) == Ordering::Equal);
    PatternInterval { start, end }
}

/// One set per dyadic block of suffix-array ranks, holding the text
/// positions in that block.
#[derive(Debug, Clone)]
pub struct GappedStringIndex {
    text: Text,
    sa: SuffixArray,
    index: GappedIndex,
}

impl GappedStringIndex {
    pub fn build(text: Text, kind: BackendKind) -> Result<Self> {
        Self::build_with(text, kind, &BackendConfig::default())
    }

    pub fn build_with(text: Text, kind: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        let sa = build_suffix_array(&text);
        Self::from_parts(text, sa, kind, cfg)
    }

    pub(crate) fn from_parts(text: Text, sa: SuffixArray, kind: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        let n = text.len();
        let raw: Vec<Vec<i64>> = dyadic_intervals(n)
            .iter()
            .map(|iv| sa.sa[iv.lo - 1..iv.hi].iter().map(|&p| p as i64).collect())
            .collect();
        let sets = SetCollection::ingest(raw, n as i64)?;
        let index = GappedIndex::build_with(sets, kind, cfg)?;
        Ok(GappedStringIndex { text, sa, index })
    }

    pub fn text(&self) -> &Text {
        &self.text
    }

    pub fn suffix_array(&self) -> &SuffixArray {
        &self.sa
    }

    pub fn gapped(&self) -> &GappedIndex {
        &self.index
    }

    pub fn set_count(&self) -> usize {
        self.index.collection().k()
    }

    /// Positions stored across all dyadic sets.
    pub fn set_elements(&self) -> usize {
        self.index.collection().total_size()
    }

    /// `n · (⌊log₂ n⌋ + 1)`.
    pub fn set_element_bound(&self) -> usize {
        let n = self.text.len();
        n * (crate::set::floor_log2(n) as usize + 1)
    }

    pub fn set_id(&self, iv: DyadicInterval) -> usize {
        dyadic_level_offset(self.text.len(), iv.level) + iv.block
    }

    /// Set indices covering the suffixes that start with `p`.
    pub fn cover(&self, p: &[u8]) -> Vec<usize> {
        let iv = self.sa.interval(&self.text, p);
        if iv.is_empty() {
            return Vec::new();
        }
        let ids: Vec<usize> = dyadic_cover(iv.start + 1, iv.end)
            .into_iter()
            .map(|(level, block)| self.set_id(DyadicInterval::new(level, block)))
            .collect();
        debug_assert!(ids.len() <= cover_bound(self.text.len()));
        ids
    }

    pub fn report(&self, p1: &[u8], p2: &[u8], alpha: i64, beta: i64) -> Result<Vec<(usize, usize)>> {
        self.report_counted(p1, p2, alpha, beta, &mut QueryStats::default())
    }

    pub fn report_counted(
        &self,
        p1: &[u8],
        p2: &[u8],
        alpha: i64,
        beta: i64,
        stats: &mut QueryStats,
    ) -> Result<Vec<(usize, usize)>> {
        check_range(alpha, beta)?;
        let (ca, cb) = (self.cover(p1), self.cover(p2));
        let mut out = Vec::new();
        let mut raw_pairs = 0;
        for &a in &ca {
            for &b in &cb {
                let pairs = self.index.gapped_report_raw(a, b, alpha, beta, stats)?;
                raw_pairs += pairs.len() as u64;
                out.extend(pairs.into_iter().map(|(i, j)| (i as usize, j as usize)));
            }
        }
        stats.raw_pairs = raw_pairs;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn exists(&self, p1: &[u8], p2: &[u8], alpha: i64, beta: i64) -> Result<Option<(usize, usize)>> {
        self.exists_counted(p1, p2, alpha, beta, &mut QueryStats::default())
    }

    pub fn exists_counted(
        &self,
        p1: &[u8],
        p2: &[u8],
        alpha: i64,
        beta: i64,
        stats: &mut QueryStats,
    ) -> Result<Option<(usize, usize)>> {
        check_range(alpha, beta)?;
        let (ca, cb) = (self.cover(p1), self.cover(p2));
        for &a in &ca {
            for &b in &cb {
                if let Some((i, j)) = self.index.gapped_exists_counted(a, b, alpha, beta, stats)? {
                    return Ok(Some((i as usize, j as usize)));
                }
            }
        }
        Ok(None)
    }
}

fn check_range(alpha: i64, beta: i64) -> Result<()> {
    if alpha < 0 || alpha > beta {
        return Err(Error::InvalidRange { lo: alpha, hi: beta, len: 0 });
    }
    Ok(())
}

/// KMP occurrences of `p` in `s` (1-based), counting character comparisons.
fn kmp_occurrences(s: &[u8], p: &[u8], scans: &mut u64) -> Vec<usize> {
    if p.is_empty() {
        return (1..=s.len()).collect();
    }
    let mut fail = vec![0usize; p.len()];
    let mut k = 0;
    for q in 1..p.len() {
        while k > 0 && p[k] != p[q] {
            k = fail[k - 1];
        }
        if p[k] == p[q] {
            k += 1;
        }
        fail[q] = k;
    }
    let mut out = Vec::new();
    k = 0;
    for (i, &c) in s.iter().enumerate() {
        *scans += 1;
        while k > 0 && p[k] != c {
            k = fail[k - 1];
            *scans += 1;
        }
        if p[k] == c {
            k += 1;
        }
        if k == p.len() {
            out.push(i + 2 - p.len());
            k = fail[k - 1];
        }
    }
    out
}

/// Linear-time matching plus a two-finger merge of the occurrence lists.
/// Returns the pairs and the number of positions scanned.
pub fn baseline_linear_scan(text: &Text, p1: &[u8], p2: &[u8], alpha: i64, beta: i64) -> Result<(Vec<(usize, usize)>, u64)> {
    check_range(alpha, beta)?;
    let mut scans = 0;
    let occ1 = kmp_occurrences(text.as_bytes(), p1, &mut scans);
    let occ2 = kmp_occurrences(text.as_bytes(), p2, &mut scans);
    let mut out = Vec::new();
    let mut lo = 0;
    for &i in &occ1 {
        let first = i as i64 + alpha;
        while lo < occ2.len() && (occ2[lo] as i64) < first {
            lo += 1;
            scans += 1;
        }
        for &j in &occ2[lo..] {
            if j as i64 - i as i64 > beta {
                break;
            }
            out.push((i, j));
        }
    }
    Ok((out, scans))
}

/// Every pair of dyadic suffix-array blocks with all of its `(d, a, b)`
/// triples, `d = b − a ≥ 0`, sorted by `d`.
#[derive(Debug, Clone)]
pub struct QuadraticBaseline {
    text: Text,
    sa: SuffixArray,
    blocks: usize,
    lists: Vec<Vec<(u32, u32, u32)>>,
}

impl QuadraticBaseline {
    pub const ENTRY_BYTES: u64 = 12;

    pub fn build(text: Text, mem_budget: u64) -> Result<Self> {
        let n = text.len();
        let intervals = dyadic_intervals(n);
        let total: u128 = intervals.iter().map(|iv| iv.len() as u128).sum();
        let needed = total * total * Self::ENTRY_BYTES as u128;
        if needed > mem_budget as u128 {
            return Err(Error::BudgetExceeded { what: "quadratic baseline", needed, budget: mem_budget });
        }
        let sa = build_suffix_array(&text);
        let sorted: Vec<Vec<u32>> = intervals
            .iter()
            .map(|iv| {
                let mut v = sa.sa[iv.lo - 1..iv.hi].to_vec();
                v.sort_unstable();
                v
            })
            .collect();
        let blocks = intervals.len();
        let mut lists = Vec::with_capacity(blocks * blocks);
        for a_set in &sorted {
            for b_set in &sorted {
                let mut list = Vec::new();
                for &a in a_set {
                    for &b in b_set {
                        if b >= a {
                            list.push((b - a, a, b));
                        }
                    }
                }
                list.sort_unstable();
                lists.push(list);
            }
        }
        Ok(QuadraticBaseline { text, sa, blocks, lists })
    }

    pub fn stored_pairs(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }

    /// `(a, b)` pairs at distance `d` stored for blocks `x` and `y`.
    pub fn distance_list(&self, x: usize, y: usize, d: u32) -> Vec<(usize, usize)> {
        let list = &self.lists[x * self.blocks + y];
        let lo = list.partition_point(|e| e.0 < d);
        list[lo..].iter().take_while(|e| e.0 == d).map(|e| (e.1 as usize, e.2 as usize)).collect()
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    fn cover(&self, p: &[u8]) -> Vec<usize> {
        let iv = self.sa.interval(&self.text, p);
        if iv.is_empty() {
            return Vec::new();
        }
        let n = self.text.len();
        dyadic_cover(iv.start + 1, iv.end)
            .into_iter()
            .map(|(level, block)| dyadic_level_offset(n, level) + block)
            .collect()
    }

    pub fn query(&self, p1: &[u8], p2: &[u8], alpha: i64, beta: i64) -> Result<Vec<(usize, usize)>> {
        check_range(alpha, beta)?;
        let mut out = Vec::new();
        if alpha >= self.text.len() as i64 {
            return Ok(out);
        }
        let (lo, hi) = (alpha as u32, beta.min(u32::MAX as i64) as u32);
        for &x in &self.cover(p1) {
            for &y in &self.cover(p2) {
                let list = &self.lists[x * self.blocks + y];
                let start = list.partition_point(|e| e.0 < lo);
                out.extend(list[start..].iter().take_while(|e| e.0 <= hi).map(|e| (e.1 as usize, e.2 as usize)));
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// Dyadic covers never exceed `2⌈log₂ n⌉ + 1` blocks.
pub fn sa_cover_bound(n: usize) -> usize {
    2 * ceil_log2(n) as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn text(s: &str) -> Text {
        Text::new(s.as_bytes()).unwrap()
    }

    fn brute_sa(s: &[u8]) -> Vec<u32> {
        let mut v: Vec<usize> = (0..s.len()).collect();
        v.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
        v.into_iter().map(|i| i as u32 + 1).collect()
    }

    fn naive_pairs(s: &[u8], p1: &[u8], p2: &[u8], alpha: i64, beta: i64) -> Vec<(usize, usize)> {
        let t = Text::new(s).unwrap();
        let mut out = Vec::new();
        for i in 1..=s.len() {
            for j in 1..=s.len() {
                let d = j as i64 - i as i64;
                if alpha <= d && d <= beta && t.occurs_at(p1, i) && t.occurs_at(p2, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u8) -> Vec<u8> {
        (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
    }

    #[test]
    fn suffix_array_examples() {
        assert_eq!(build_suffix_array(&text("banana")).sa, vec![6, 4, 2, 1, 5, 3]);
        assert_eq!(build_suffix_array(&text("aaa")).sa, vec![3, 2, 1]);
        assert_eq!(build_suffix_array(&text("banana")).lcp, vec![0, 1, 3, 0, 0, 2]);
    }

    #[test]
    fn suffix_array_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=512 {
            let sigma = [1, 2, 4, 26][n % 4];
            let s = random_text(&mut rng, n, sigma);
            let sa = build_suffix_array(&Text::new(s.clone()).unwrap());
            assert_eq!(sa.sa, brute_sa(&s));
            for r in 1..n {
                let (x, y) = (&s[sa.sa[r - 1] as usize - 1..], &s[sa.sa[r] as usize - 1..]);
                let l = x.iter().zip(y).take_while(|(a, b)| a == b).count();
                assert_eq!(sa.lcp[r] as usize, l);
            }
        }
    }

    #[test]
    fn pattern_intervals() {
        let t = text("banana");
        let sa = build_suffix_array(&t);
        let mut occ = sa.positions(sa.interval(&t, b"ana")).to_vec();
        occ.sort();
        assert_eq!(occ, vec![2, 4]);
        assert!(sa.interval(&t, b"x").is_empty());
        assert!(sa.interval(&t, b"bananas").is_empty());
        assert_eq!(sa.positions(sa.interval(&t, b"banana")), &[1]);
    }

    #[test]
    fn index_accounting() {
        let g = GappedStringIndex::build(text("abca"), BackendKind::LinearScan).unwrap();
        assert_eq!(g.set_count(), 7);
        assert_eq!(g.set_elements(), 12);
        for iv in dyadic_intervals(4) {
            let mut want = g.suffix_array().sa[iv.lo - 1..iv.hi].iter().map(|&p| p as i64).collect::<Vec<_>>();
            want.sort();
            assert_eq!(g.gapped().collection().sets()[g.set_id(iv)].elements(), &want[..]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = GappedStringIndex::build(Text::new(random_text(&mut rng, 100, 3)).unwrap(), BackendKind::LinearScan).unwrap();
        assert!(g.set_elements() <= g.set_element_bound());
    }

    #[test]
    fn report_examples() {
        let cases: [(&str, &str, &str, i64, i64, Vec<(usize, usize)>); 3] = [
            ("abab", "ab", "ab", 2, 2, vec![(1, 3)]),
            ("banana", "an", "na", 1, 3, vec![(2, 3), (2, 5), (4, 5)]),
            ("aaaa", "a", "a", 0, 0, vec![(1, 1), (2, 2), (3, 3), (4, 4)]),
        ];
        for (s, p1, p2, a, b, want) in cases {
            let t = text(s);
            let g = GappedStringIndex::build(t.clone(), BackendKind::LinearScan).unwrap();
            assert_eq!(g.report(p1.as_bytes(), p2.as_bytes(), a, b).unwrap(), want);
            assert_eq!(baseline_linear_scan(&t, p1.as_bytes(), p2.as_bytes(), a, b).unwrap().0, want);
            let q = QuadraticBaseline::build(t, 1 << 20).unwrap();
            assert_eq!(q.query(p1.as_bytes(), p2.as_bytes(), a, b).unwrap(), want);
            assert!(g.exists(p1.as_bytes(), p2.as_bytes(), a, b).unwrap().is_some());
        }
    }

    #[test]
    fn quadratic_distance_lists() {
        let q = QuadraticBaseline::build(text("abab"), 1 << 20).unwrap();
        let mut at2 = Vec::new();
        for x in 0..q.blocks() {
            for y in 0..q.blocks() {
                at2.extend(q.distance_list(x, y, 2));
            }
        }
        at2.sort();
        at2.dedup();
        assert_eq!(at2, vec![(1, 3), (2, 4)]);
        let n = 4usize;
        let l = (crate::set::floor_log2(n) + 1) as usize;
        assert!(q.stored_pairs() <= n * n * l * l);
        assert!(QuadraticBaseline::build(text("abab"), 10).is_err());
    }

    #[test]
    fn linear_scan_counter_without_occurrences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_text(&mut rng, 5000, 2);
        let (pairs, scans) = baseline_linear_scan(&Text::new(s).unwrap(), b"zz", b"ab", 0, 10).unwrap();
        assert!(pairs.is_empty());
        assert!(scans <= 6 * 5000);
    }

    #[test]
    fn three_way_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for round in 0..100 {
            let n = rng.gen_range(1..=if round < 80 { 60 } else { 300 });
            let sigma = rng.gen_range(1..=3);
            let s = random_text(&mut rng, n, sigma);
            let t = Text::new(s.clone()).unwrap();
            let g = GappedStringIndex::build(t.clone(), BackendKind::LinearScan).unwrap();
            let q = QuadraticBaseline::build(t.clone(), 1 << 30).unwrap();
            for _ in 0..4 {
                let take = |rng: &mut ChaCha8Rng| {
                    let len = rng.gen_range(1..=3.min(n));
                    let at = rng.gen_range(0..=n - len);
                    if rng.gen_bool(0.8) {
                        s[at..at + len].to_vec()
                    } else {
                        random_text(rng, len, 3)
                    }
                };
                let (p1, p2) = (take(&mut rng), take(&mut rng));
                let alpha = rng.gen_range(0..=n as i64);
                let beta = alpha + rng.gen_range(0..=n as i64);
                let want = naive_pairs(&s, &p1, &p2, alpha, beta);
                assert_eq!(g.report(&p1, &p2, alpha, beta).unwrap(), want);
                assert_eq!(baseline_linear_scan(&t, &p1, &p2, alpha, beta).unwrap().0, want);
                assert_eq!(q.query(&p1, &p2, alpha, beta).unwrap(), want);
                assert_eq!(g.exists(&p1, &p2, alpha, beta).unwrap().is_some(), !want.is_empty());
                for &(i, j) in &want {
                    assert!(t.occurs_at(&p1, i) && t.occurs_at(&p2, j));
                }
                assert!(g.cover(&p1).len() <= sa_cover_bound(n));
            }
        }
    }
}
