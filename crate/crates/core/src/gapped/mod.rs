//! Gapped Set Intersection: is there `a ∈ S_i`, `b ∈ S_j` with
//! `b − a ∈ [α, β]`, and which pairs are they?
//!
//! Level 0 is an exact reporting index over the sets themselves. Level
//! `l ≥ 1` holds the quotient sets `⌊a / 2^(l−1)⌋` together with, for every
//! quotient, the run of original values that map to it. A query executes a
//! [`CoverPlan`] against these levels.

mod plan;

pub use plan::{plan_cover, ApproxQuery, CoverPlan, PlanStep, PlannedQuery};

use crate::error::{Error, Result};
use crate::reporting::AugmentedInstance;
use crate::set::{ceil_log2, dyadic_element_count, SetCollection};
use crate::ssi::{BackendConfig, BackendKind};
use crate::stats::QueryStats;

/// One approximate level: quotient reporting index plus value lists.
#[derive(Debug, Clone)]
pub struct LevelIndex {
    level: u32,
    index: AugmentedInstance,
    /// Per set: `(stored quotient, start, end)` runs of original ranks
    /// (0-based, end exclusive), sorted by quotient.
    groups: Vec<Vec<(i64, u32, u32)>>,
}

impl LevelIndex {
    fn build(c: &SetCollection, level: u32, kind: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        let shift = level - 1;
        let mut raw = Vec::with_capacity(c.k());
        let mut groups = Vec::with_capacity(c.k());
        for s in c.sets() {
            let mut runs: Vec<(i64, u32, u32)> = Vec::new();
            for (r, &a) in s.elements().iter().enumerate() {
                let q = quotient(a, shift);
                match runs.last_mut() {
                    Some(last) if last.0 == q => last.2 = r as u32 + 1,
                    _ => runs.push((q, r as u32, r as u32 + 1)),
                }
            }
            raw.push(runs.iter().map(|g| g.0).collect());
            groups.push(runs);
        }
        let quotients = SetCollection::derived(raw, quotient(c.universe().get(), shift))?;
        Ok(LevelIndex { level, index: AugmentedInstance::build_with(&quotients, kind, cfg)?, groups })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn quotient_index(&self) -> &AugmentedInstance {
        &self.index
    }

    /// Stored quotient of `a` at this level.
    pub fn quotient_of(&self, a: i64) -> i64 {
        quotient(a, self.level - 1)
    }

    /// Original values of set `i` sharing the stored quotient `q`.
    pub fn value_list<'a>(&self, base: &'a SetCollection, i: usize, q: i64) -> &'a [i64] {
        let runs = &self.groups[i];
        match runs.binary_search_by_key(&q, |g| g.0) {
            Ok(p) => &base.sets()[i].elements()[runs[p].1 as usize..runs[p].2 as usize],
            Err(_) => &[],
        }
    }
}

/// Quotients are offset by one so they stay in a `{1..u′}` universe; the
/// offset cancels in every shift.
fn quotient(a: i64, shift: u32) -> i64 {
    (a >> shift) + 1
}

#[derive(Debug, Clone)]
pub struct GappedIndex {
    base: SetCollection,
    exact: AugmentedInstance,
    levels: Vec<LevelIndex>,
}

impl GappedIndex {
    pub fn build(c: SetCollection, kind: BackendKind) -> Result<Self> {
        Self::build_with(c, kind, &BackendConfig::default())
    }

    pub fn build_with(c: SetCollection, kind: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        let exact = AugmentedInstance::build_with(&c, kind, cfg)?;
        let max_level = ceil_log2(c.universe().get() as usize);
        let levels = (1..=max_level)
            .map(|l| LevelIndex::build(&c, l, kind, cfg))
            .collect::<Result<Vec<_>>>()?;
        let g = GappedIndex { base: c, exact, levels };
        assert!(g.total_elements() <= g.element_bound(), "gapped index exceeded its element bound");
        Ok(g)
    }

    pub fn collection(&self) -> &SetCollection {
        &self.base
    }

    pub fn exact(&self) -> &AugmentedInstance {
        &self.exact
    }

    pub fn levels(&self) -> &[LevelIndex] {
        &self.levels
    }

    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Elements stored across level 0 and every approximate level.
    pub fn total_elements(&self) -> usize {
        self.exact.total_elements() + self.levels.iter().map(|l| l.index.total_elements()).sum::<usize>()
    }

    /// `(N + Σ dyadic elements) · (⌈log₂ u⌉ + 1)`.
    pub fn element_bound(&self) -> usize {
        let per_level = self.base.total_size()
            + self.base.sets().iter().map(|s| dyadic_element_count(s.len())).sum::<usize>();
        per_level * (self.levels.len() + 1)
    }

    pub fn space_bytes(&self) -> u64 {
        self.exact.backend().space_bytes() + self.levels.iter().map(|l| l.index.backend().space_bytes()).sum::<u64>()
    }

    fn check_sets(&self, i: usize, j: usize) -> Result<()> {
        self.base.set(i)?;
        self.base.set(j)?;
        Ok(())
    }

    fn level(&self, level: u32) -> Result<&LevelIndex> {
        if level == 0 || level > self.max_level() {
            return Err(Error::MissingLevel { level, max: self.max_level() });
        }
        Ok(&self.levels[level as usize - 1])
    }

    /// Approximate existence at `q.level` around `q.center`.
    pub fn approx_exists(&self, i: usize, j: usize, q: ApproxQuery) -> Result<bool> {
        self.check_sets(i, j)?;
        Ok(self.approx_witness(i, j, q, &mut QueryStats::default())?.is_some())
    }

    /// Quotient certificate expanded to one original pair.
    fn approx_witness(&self, i: usize, j: usize, q: ApproxQuery, stats: &mut QueryStats) -> Result<Option<(i64, i64)>> {
        let lvl = self.level(q.level)?;
        stats.approx_queries += 1;
        for t in q.quotient_shifts() {
            if let Some(cert) = lvl.index.backend().exists_raw(i, j, t, stats) {
                let a = lvl.value_list(&self.base, i, cert.a)[0];
                let b = lvl.value_list(&self.base, j, cert.b)[0];
                return Ok(Some((a, b)));
            }
        }
        Ok(None)
    }

    /// Every pair reported by the approximate reporting query: all pairs with
    /// gap in the covered interval, none outside the uncertain interval.
    pub fn approx_report(&self, i: usize, j: usize, q: ApproxQuery) -> Result<Vec<(i64, i64)>> {
        self.check_sets(i, j)?;
        let mut out = Vec::new();
        self.approx_report_into(i, j, q, &mut QueryStats::default(), &mut out)?;
        Ok(out)
    }

    fn approx_report_into(
        &self,
        i: usize,
        j: usize,
        q: ApproxQuery,
        stats: &mut QueryStats,
        out: &mut Vec<(i64, i64)>,
    ) -> Result<()> {
        let lvl = self.level(q.level)?;
        stats.approx_queries += 1;
        for t in q.quotient_shifts() {
            for (qa, qb) in lvl.index.report_raw(i, j, t, stats, None) {
                for &a in lvl.value_list(&self.base, i, qa) {
                    out.extend(lvl.value_list(&self.base, j, qb).iter().map(|&b| (a, b)));
                }
            }
        }
        Ok(())
    }

    /// `[α, β]` intersected with the gaps that can occur, `[0, u − 1]`.
    fn clamp(&self, alpha: i64, beta: i64) -> Result<Option<(i64, i64)>> {
        if alpha < 0 || alpha > beta {
            return Err(Error::InvalidRange { lo: alpha, hi: beta, len: 0 });
        }
        let beta = beta.min(self.base.universe().get() - 1);
        Ok((alpha <= beta).then_some((alpha, beta)))
    }

    pub fn plan(&self, alpha: i64, beta: i64) -> Result<Option<CoverPlan>> {
        self.clamp(alpha, beta)?.map(|(a, b)| plan_cover(a, b)).transpose()
    }

    pub fn gapped_exists(&self, i: usize, j: usize, alpha: i64, beta: i64) -> Result<Option<(i64, i64)>> {
        self.gapped_exists_counted(i, j, alpha, beta, &mut QueryStats::default())
    }

    pub fn gapped_exists_counted(
        &self,
        i: usize,
        j: usize,
        alpha: i64,
        beta: i64,
        stats: &mut QueryStats,
    ) -> Result<Option<(i64, i64)>> {
        self.check_sets(i, j)?;
        let Some(plan) = self.plan(alpha, beta)? else {
            return Ok(None);
        };
        let (alpha, beta) = (plan.alpha, plan.beta);
        let in_range = |&(a, b): &(i64, i64)| alpha <= b - a && b - a <= beta;
        let mut prev = None;
        for (n, pq) in plan.steps().enumerate() {
            let key = (n >= plan.forward.len(), pq.phase);
            if prev != Some(key) {
                stats.phases += 1;
                prev = Some(key);
            }
            match pq.step {
                PlanStep::Point(s) => {
                    if let Some(c) = self.exact.backend().exists_raw(i, j, s, stats) {
                        return Ok(Some((c.a, c.b)));
                    }
                }
                PlanStep::Approx(q) => {
                    if let Some(w) = self.approx_witness(i, j, q, stats)? {
                        if in_range(&w) {
                            return Ok(Some(w));
                        }
                        let mut pairs = Vec::new();
                        self.approx_report_into(i, j, q, stats, &mut pairs)?;
                        if let Some(w) = pairs.into_iter().find(in_range) {
                            return Ok(Some(w));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// All `(a, b)` with `b − a ∈ [α, β]`, sorted and deduplicated.
    pub fn gapped_report(&self, i: usize, j: usize, alpha: i64, beta: i64) -> Result<Vec<(i64, i64)>> {
        self.gapped_report_counted(i, j, alpha, beta, &mut QueryStats::default())
    }

    pub fn gapped_report_counted(
        &self,
        i: usize,
        j: usize,
        alpha: i64,
        beta: i64,
        stats: &mut QueryStats,
    ) -> Result<Vec<(i64, i64)>> {
        let mut out = self.gapped_report_raw(i, j, alpha, beta, stats)?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Pairs as produced by the individual plan queries, before the final
    /// sort and dedup. A pair appears at most once per plan query.
    pub fn gapped_report_raw(
        &self,
        i: usize,
        j: usize,
        alpha: i64,
        beta: i64,
        stats: &mut QueryStats,
    ) -> Result<Vec<(i64, i64)>> {
        self.check_sets(i, j)?;
        let Some(plan) = self.plan(alpha, beta)? else {
            return Ok(Vec::new());
        };
        stats.phases += (plan.forward_phases() + plan.backward_phases()) as u64;
        let mut out = Vec::new();
        for pq in plan.steps() {
            match pq.step {
                PlanStep::Point(s) => out.extend(self.exact.report_raw(i, j, s, stats, None)),
                PlanStep::Approx(q) => self.approx_report_into(i, j, q, stats, &mut out)?,
            }
        }
        debug_assert!(out.iter().all(|&(a, b)| plan.alpha <= b - a && b - a <= plan.beta));
        out.retain(|&(a, b)| plan.alpha <= b - a && b - a <= plan.beta);
        stats.raw_pairs = out.len() as u64;
        Ok(out)
    }
}

/// Every `(a, b) ∈ S_i × S_j` with `α ≤ b − a ≤ β`, sorted.
pub fn brute_force_gapped(c: &SetCollection, i: usize, j: usize, alpha: i64, beta: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for &a in c.sets()[i].elements() {
        for &b in c.sets()[j].elements() {
            if alpha <= b - a && b - a <= beta {
                out.push((a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn idx(raw: Vec<Vec<i64>>, u: i64) -> GappedIndex {
        GappedIndex::build(SetCollection::ingest(raw, u).unwrap(), BackendKind::LinearScan).unwrap()
    }

    #[test]
    fn builds_one_level_per_bit() {
        let g = idx(vec![vec![1, 8]], 8);
        assert_eq!(g.max_level(), 3);
        assert!(g.total_elements() <= g.element_bound());
    }

    #[test]
    fn value_lists() {
        let g = idx(vec![vec![4, 5]], 8);
        let l2 = &g.levels()[1];
        assert_eq!(l2.quotient_of(4), l2.quotient_of(5));
        let q = l2.quotient_of(4);
        assert_eq!(q - 1, 2);
        assert_eq!(l2.value_list(g.collection(), 0, q), &[4, 5]);
        assert_eq!(l2.quotient_index().base()[0].elements(), &[q]);
    }

    #[test]
    fn approx_examples() {
        let g = idx(vec![vec![4], vec![9]], 32);
        assert!(g.approx_exists(0, 1, ApproxQuery::new(1, 4).unwrap()).unwrap());
        let g = idx(vec![vec![4], vec![20]], 32);
        assert!(!g.approx_exists(0, 1, ApproxQuery::new(1, 4).unwrap()).unwrap());
        assert!(g.approx_exists(0, 1, ApproxQuery::new(9, 512).unwrap()).is_err());
    }

    #[test]
    fn approx_sandwich_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let u = rng.gen_range(8..300);
            let raw: Vec<Vec<i64>> = (0..3).map(|_| (0..rng.gen_range(1..10)).map(|_| rng.gen_range(1..=u)).collect()).collect();
            let g = idx(raw, u);
            let c = g.collection().clone();
            for level in 1..=g.max_level() {
                let w = 1i64 << level;
                for kappa in 1..=(u / w + 1) {
                    let q = ApproxQuery::new(level, kappa * w).unwrap();
                    let (clo, chi) = q.covered();
                    let (ulo, uhi) = q.uncertain();
                    for i in 0..3 {
                        for j in 0..3 {
                            let yes = g.approx_exists(i, j, q).unwrap();
                            let in_cov = !brute_force_gapped(&c, i, j, clo, chi).is_empty();
                            let in_unc = brute_force_gapped(&c, i, j, ulo, uhi);
                            if in_cov {
                                assert!(yes);
                            }
                            if yes {
                                assert!(!in_unc.is_empty());
                            }
                            let rep = g.approx_report(i, j, q).unwrap();
                            for p in brute_force_gapped(&c, i, j, clo, chi) {
                                assert!(rep.contains(&p));
                            }
                            assert!(rep.iter().all(|p| in_unc.contains(p)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gapped_examples() {
        let g = idx(vec![vec![1], vec![5]], 10);
        assert_eq!(g.gapped_exists(0, 1, 3, 5).unwrap(), Some((1, 5)));
        assert_eq!(g.gapped_exists(0, 1, 5, 9).unwrap(), None);
        let g = idx(vec![vec![1, 2], vec![4, 5]], 10);
        assert_eq!(g.gapped_report(0, 1, 2, 3).unwrap(), vec![(1, 4), (2, 4), (2, 5)]);
        let g = idx(vec![vec![1, 2], vec![4, 5]], 10);
        assert!(g.gapped_report(0, 1, 0, 0).unwrap().is_empty());
        assert!(g.gapped_report(0, 1, 3, 2).is_err());
        assert!(g.gapped_report(0, 1, 50, 60).unwrap().is_empty());
    }

    #[test]
    fn exhaustive_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..12 {
            let u = rng.gen_range(2..40);
            let raw: Vec<Vec<i64>> = (0..3).map(|_| (0..rng.gen_range(1..8)).map(|_| rng.gen_range(1..=u)).collect()).collect();
            let g = idx(raw, u);
            let c = g.collection().clone();
            for i in 0..3 {
                for j in 0..3 {
                    for a in 0..=u {
                        for b in a..=u + 2 {
                            let want = brute_force_gapped(&c, i, j, a, b);
                            let mut st = QueryStats::default();
                            let raw = g.gapped_report_raw(i, j, a, b, &mut st).unwrap();
                            let mut got = raw.clone();
                            got.sort();
                            got.dedup();
                            assert_eq!(got, want, "[{}, {}]", a, b);
                            if let Some(plan) = g.plan(a, b).unwrap() {
                                for p in &want {
                                    assert!(raw.iter().filter(|x| *x == p).count() <= plan.len());
                                }
                            }
                            let w = g.gapped_exists(i, j, a, b).unwrap();
                            assert_eq!(w.is_some(), !want.is_empty());
                            if let Some(p) = w {
                                assert!(want.contains(&p));
                            }
                        }
                    }
                }
            }
        }
    }
}
