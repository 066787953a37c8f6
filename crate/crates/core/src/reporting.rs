//! Reporting Shifted Set Intersection.
//!
//! Every set is augmented with its dyadic subsets, each preprocessed into the
//! existence backend as a set of its own. A reporting query asks for one
//! certificate `(a, b)`, splits both sides around it into the strictly
//! smaller and strictly larger elements, covers each part with dyadic
//! subsets, and recurses only on block pairs whose value intervals can still
//! contain a solution.

use crate::error::Result;
use crate::set::{
    cover_rank_range, dyadic_element_count, dyadic_level_offset, dyadic_subsets, floor_log2, DyadicSubset,
    SetCollection,
};
use crate::ssi::{reduce_3sum_to_ssi, BackendConfig, BackendKind, ShiftQuery, SsiBackend, ThreeSumQueryMap};
use crate::stats::QueryStats;

/// Two dyadic blocks whose shifted and plain value intervals overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchPair {
    pub a: DyadicSubset,
    pub b: DyadicSubset,
}

/// All pairs `(A′, B′)` with `[a_min+s, a_max+s] ∩ [b_min, b_max] ≠ ∅`.
///
/// `bs` must be sorted by `min` with pairwise disjoint value intervals, as
/// produced by a dyadic cover. Matches for each `A′` form a contiguous run of
/// `bs`, located by two binary searches.
pub fn matching_pairs(as_: &[DyadicSubset], bs: &[DyadicSubset], s: i64) -> Vec<MatchPair> {
    debug_assert!(bs.windows(2).all(|w| w[0].max < w[1].min));
    let mut out = Vec::new();
    for a in as_ {
        let (lo, hi) = (a.min + s, a.max + s);
        let start = bs.partition_point(|b| b.max < lo);
        let end = bs.partition_point(|b| b.min <= hi);
        out.extend(bs[start..end.max(start)].iter().map(|b| MatchPair { a: *a, b: *b }));
    }
    out
}

/// Certificate found at one recursion node together with the rank ranges
/// the node covered. Collected only by tests.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct SplitTrace {
    pub a_range: (usize, usize),
    pub b_range: (usize, usize),
    pub a: i64,
    pub b: i64,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    a_id: usize,
    a_range: (usize, usize),
    b_id: usize,
    b_range: (usize, usize),
}

/// Base sets plus all their dyadic subsets in one existence backend.
#[derive(Debug, Clone)]
pub struct AugmentedInstance {
    base_k: usize,
    base_total: usize,
    /// Backend id of the first dyadic subset of each base set.
    dyadic_start: Vec<usize>,
    backend: SsiBackend,
}

impl AugmentedInstance {
    pub fn build(c: &SetCollection, kind: BackendKind) -> Result<Self> {
        Self::build_with(c, kind, &BackendConfig::default())
    }

    pub fn build_with(c: &SetCollection, kind: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        let mut raw = c.to_raw();
        let mut dyadic_start = Vec::with_capacity(c.k());
        for s in c.sets() {
            dyadic_start.push(raw.len());
            for d in dyadic_subsets(s) {
                raw.push(d.elements(s).to_vec());
            }
        }
        let all = SetCollection::derived(raw, c.universe().get())?;
        let inst = AugmentedInstance {
            base_k: c.k(),
            base_total: c.total_size(),
            dyadic_start,
            backend: SsiBackend::build_with(all, kind, cfg)?,
        };
        let n = inst.base_total;
        assert!(
            inst.total_elements() <= n * (floor_log2(n.max(1)) as usize + 1) + n,
            "dyadic augmentation exceeded N(⌊log₂N⌋+1) + N"
        );
        Ok(inst)
    }

    pub fn base(&self) -> &[crate::set::IntSet] {
        &self.backend.collection().sets()[..self.base_k]
    }

    pub fn k(&self) -> usize {
        self.base_k
    }

    /// Sets held by the backend: base sets followed by every dyadic subset.
    pub fn backend_sets(&self) -> usize {
        self.backend.collection().k()
    }

    /// Elements held by the backend, base plus dyadic.
    pub fn total_elements(&self) -> usize {
        self.backend.collection().total_size()
    }

    /// `N + Σ` exact dyadic element counts; equals [`Self::total_elements`].
    pub fn expected_elements(&self) -> usize {
        self.base_total + self.base().iter().map(|s| dyadic_element_count(s.len())).sum::<usize>()
    }

    pub fn backend(&self) -> &SsiBackend {
        &self.backend
    }

    pub fn universe(&self) -> i64 {
        self.backend.collection().universe().get()
    }

    fn dyadic_id(&self, d: &DyadicSubset) -> usize {
        let m = self.base()[d.parent].len();
        self.dyadic_start[d.parent] + dyadic_level_offset(m, d.level) + d.block
    }

    /// Existence query on base sets.
    pub fn exists_counted(&self, q: ShiftQuery, stats: &mut QueryStats) -> Result<Option<crate::ssi::ShiftCertificate>> {
        self.check(q)?;
        Ok(self.backend.exists_raw(q.i, q.j, q.s, stats))
    }

    fn check(&self, q: ShiftQuery) -> Result<()> {
        for idx in [q.i, q.j] {
            if idx >= self.base_k {
                return Err(crate::error::Error::SetIndex { index: idx, len: self.base_k });
            }
        }
        Ok(())
    }

    /// All `(a, b) ∈ S_i × S_j` with `a + s = b`, sorted by `a`.
    pub fn report_shift(&self, q: ShiftQuery) -> Result<Vec<(i64, i64)>> {
        self.report_shift_counted(q, &mut QueryStats::default())
    }

    pub fn report_shift_counted(&self, q: ShiftQuery, stats: &mut QueryStats) -> Result<Vec<(i64, i64)>> {
        self.check(q)?;
        Ok(self.report_raw(q.i, q.j, q.s, stats, None))
    }

    pub(crate) fn report_raw(
        &self,
        i: usize,
        j: usize,
        s: i64,
        stats: &mut QueryStats,
        mut trace: Option<&mut Vec<SplitTrace>>,
    ) -> Vec<(i64, i64)> {
        let (si, sj) = (&self.base()[i], &self.base()[j]);
        let mut out = Vec::new();
        let mut stack = vec![Node { a_id: i, a_range: (1, si.len()), b_id: j, b_range: (1, sj.len()) }];
        while let Some(node) = stack.pop() {
            let Some(cert) = self.backend.exists_raw(node.a_id, node.b_id, s, stats) else {
                continue;
            };
            out.push((cert.a, cert.b));
            if let Some(t) = trace.as_deref_mut() {
                t.push(SplitTrace { a_range: node.a_range, b_range: node.b_range, a: cert.a, b: cert.b });
            }
            let ra = si.rank_of(cert.a).expect("certificate element in S_i");
            let rb = sj.rank_of(cert.b).expect("certificate element in S_j");
            let halves = [
                ((node.a_range.0, ra - 1), (node.b_range.0, rb - 1)),
                ((ra + 1, node.a_range.1), (rb + 1, node.b_range.1)),
            ];
            for ((alo, ahi), (blo, bhi)) in halves {
                if alo > ahi || blo > bhi {
                    continue;
                }
                let ca = cover_rank_range(si, alo, ahi).expect("valid rank range");
                let cb = cover_rank_range(sj, blo, bhi).expect("valid rank range");
                for mp in matching_pairs(&ca, &cb, s) {
                    stack.push(Node {
                        a_id: self.dyadic_id(&mp.a),
                        a_range: mp.a.rank_range(),
                        b_id: self.dyadic_id(&mp.b),
                        b_range: mp.b.rank_range(),
                    });
                }
            }
        }
        stats.raw_pairs += out.len() as u64;
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Existence-call budget for one reporting query:
/// `(occ + 1) · 12 · (⌈log₂ N⌉ + 1)`.
pub fn report_call_budget(occ: usize, n: usize) -> u64 {
    (occ as u64 + 1) * 12 * (crate::set::ceil_log2(n) as u64 + 1)
}

/// 3SUM Indexing with reporting over a single set `A`.
#[derive(Debug, Clone)]
pub struct ThreeSumReporter {
    index: AugmentedInstance,
    map: ThreeSumQueryMap,
}

impl ThreeSumReporter {
    pub fn build(a: &[i64], kind: BackendKind) -> Result<Self> {
        Self::build_with(a, kind, &BackendConfig::default())
    }

    pub fn build_with(a: &[i64], kind: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        let (c, map) = reduce_3sum_to_ssi(a)?;
        Ok(ThreeSumReporter { index: AugmentedInstance::build_with(&c, kind, cfg)?, map })
    }

    pub fn index(&self) -> &AugmentedInstance {
        &self.index
    }

    /// All unordered pairs `{a, b} ⊆ A` with `a + b = c`, as `(min, max)`, sorted.
    pub fn report(&self, c: i64) -> Vec<(i64, i64)> {
        self.report_counted(c, &mut QueryStats::default())
    }

    pub fn report_counted(&self, c: i64, stats: &mut QueryStats) -> Vec<(i64, i64)> {
        let q = self.map.query(c);
        let mut out: Vec<(i64, i64)> = self
            .index
            .report_raw(q.i, q.j, q.s, stats, None)
            .into_iter()
            .map(|(x, y)| {
                let (a, b) = self.map.decode(crate::ssi::ShiftCertificate { a: x, b: y });
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn exists(&self, c: i64) -> Option<(i64, i64)> {
        let q = self.map.query(c);
        self.index
            .backend
            .exists_raw(q.i, q.j, q.s, &mut QueryStats::default())
            .map(|cert| self.map.decode(cert))
    }
}

/// Convenience wrapper: builds a linear-scan reporter and answers one query.
pub fn report_3sum(a: &[i64], c: i64) -> Result<Vec<(i64, i64)>> {
    Ok(ThreeSumReporter::build(a, BackendKind::LinearScan)?.report(c))
}
