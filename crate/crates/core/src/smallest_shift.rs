//! Smallest nonnegative shift between two sets: `min{ b − a ≥ 0 }` over
//! `a ∈ S_i`, `b ∈ S_j`.
//!
//! Sets larger than `τ = ⌈√N⌉` are "large"; answers for every pair of
//! large sets are tabulated. Any other query probes each element of the
//! smaller set against the other set by binary search.

use crate::error::Result;
use crate::set::SetCollection;
use crate::stats::QueryStats;

#[derive(Debug, Clone)]
pub struct ShiftIndex {
    sets: SetCollection,
    tau: usize,
    /// Position among the large sets, per set.
    large_slot: Vec<Option<usize>>,
    large: Vec<usize>,
    /// `l × l` row-major, `u64::MAX` when no nonnegative shift exists.
    table: Vec<u64>,
    build_comparisons: u64,
}

const NONE: u64 = u64::MAX;

/// Merge-like pass: for each `b`, the closest `a ≤ b`.
fn min_shift_merge(a: &[i64], b: &[i64], comparisons: &mut u64) -> Option<i64> {
    let mut best: Option<i64> = None;
    let mut p = 0;
    for &y in b {
        while p < a.len() && a[p] <= y {
            *comparisons += 1;
            p += 1;
        }
        *comparisons += 1;
        if p > 0 {
            let d = y - a[p - 1];
            best = Some(best.map_or(d, |x| x.min(d)));
        }
    }
    best
}

impl ShiftIndex {
    pub fn build(sets: SetCollection) -> Self {
        let n = sets.total_size();
        let root = n.isqrt();
        let tau = if root * root < n { root + 1 } else { root };
        let mut large_slot = vec![None; sets.k()];
        let mut large = Vec::new();
        for (i, s) in sets.sets().iter().enumerate() {
            if s.len() > tau {
                large_slot[i] = Some(large.len());
                large.push(i);
            }
        }
        let l = large.len();
        let mut table = vec![NONE; l * l];
        let mut build_comparisons = 0;
        for (x, &i) in large.iter().enumerate() {
            for (y, &j) in large.iter().enumerate() {
                let d = min_shift_merge(sets.sets()[i].elements(), sets.sets()[j].elements(), &mut build_comparisons);
                table[x * l + y] = d.map_or(NONE, |d| d as u64);
            }
        }
        ShiftIndex { sets, tau, large_slot, large, table, build_comparisons }
    }

    pub fn collection(&self) -> &SetCollection {
        &self.sets
    }

    pub fn threshold(&self) -> usize {
        self.tau
    }

    /// Indices of the large sets, in collection order.
    pub fn large_sets(&self) -> &[usize] {
        &self.large
    }

    pub fn build_comparisons(&self) -> u64 {
        self.build_comparisons
    }

    pub fn table_entry(&self, x: usize, y: usize) -> Option<i64> {
        let l = self.large.len();
        match self.table[x * l + y] {
            NONE => None,
            d => Some(d as i64),
        }
    }

    pub fn space_bytes(&self) -> u64 {
        (self.sets.total_size() * 8 + self.table.len() * 8 + self.large_slot.len() * 16) as u64
    }

    pub fn smallest_shift(&self, i: usize, j: usize) -> Result<Option<i64>> {
        self.smallest_shift_counted(i, j, &mut QueryStats::default())
    }

    pub fn smallest_shift_counted(&self, i: usize, j: usize, stats: &mut QueryStats) -> Result<Option<i64>> {
        let (si, sj) = (self.sets.set(i)?, self.sets.set(j)?);
        if let (Some(x), Some(y)) = (self.large_slot[i], self.large_slot[j]) {
            stats.table_hits += 1;
            return Ok(self.table_entry(x, y));
        }
        let (a, b) = (si.elements(), sj.elements());
        let mut best: Option<i64> = None;
        let mut keep = |d: i64| best = Some(best.map_or(d, |x: i64| x.min(d)));
        if a.len() <= b.len() {
            // successor of each a in S_j
            for &x in a {
                stats.probes += 1;
                let p = b.partition_point(|&y| y < x);
                if p < b.len() {
                    keep(b[p] - x);
                }
            }
        } else {
            // predecessor of each b in S_i
            for &y in b {
                stats.probes += 1;
                let p = a.partition_point(|&x| x <= y);
                if p > 0 {
                    keep(y - a[p - 1]);
                }
            }
        }
        Ok(best)
    }
}

pub fn brute_force_smallest_shift(c: &SetCollection, i: usize, j: usize) -> Option<i64> {
    let mut best = None;
    for &a in c.sets()[i].elements() {
        for &b in c.sets()[j].elements() {
            if b >= a {
                best = Some(best.map_or(b - a, |x: i64| x.min(b - a)));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn idx(raw: Vec<Vec<i64>>, u: i64) -> ShiftIndex {
        ShiftIndex::build(SetCollection::ingest(raw, u).unwrap())
    }

    #[test]
    fn examples() {
        let g = idx(vec![vec![5, 10], vec![7]], 10);
        assert_eq!(g.smallest_shift(0, 1).unwrap(), Some(2));
        let g = idx(vec![vec![9], vec![3]], 10);
        assert_eq!(g.smallest_shift(0, 1).unwrap(), None);
        assert!(g.smallest_shift(0, 2).is_err());
    }

    #[test]
    fn threshold_classification() {
        let g = idx(vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8], vec![9]], 9);
        assert_eq!(g.threshold(), 3);
        assert_eq!(g.large_sets(), &[0, 1]);
        assert_eq!(g.table_entry(0, 0), Some(0));
        assert_eq!(g.table_entry(1, 1), Some(0));
        assert_eq!(g.table_entry(0, 1), Some(1));
        assert_eq!(g.table_entry(1, 0), None);
        let mut st = QueryStats::default();
        assert_eq!(g.smallest_shift_counted(0, 1, &mut st).unwrap(), Some(1));
        assert_eq!((st.probes, st.table_hits), (0, 1));
    }

    #[test]
    fn oracle_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..200 {
            let u = rng.gen_range(1..500);
            let k = rng.gen_range(1..6);
            let raw: Vec<Vec<i64>> = (0..k)
                .map(|_| {
                    let m = if rng.gen_bool(0.3) { rng.gen_range(20..80) } else { rng.gen_range(1..6) };
                    (0..m).map(|_| rng.gen_range(1..=u)).collect()
                })
                .collect();
            let g = idx(raw, u);
            let c = g.collection();
            let n = c.total_size() as f64;
            assert!(g.build_comparisons() as f64 <= 2.0 * n * n.sqrt() + 2.0 * n);
            for i in 0..k {
                for j in 0..k {
                    let mut st = QueryStats::default();
                    assert_eq!(g.smallest_shift_counted(i, j, &mut st).unwrap(), brute_force_smallest_shift(c, i, j));
                    let small = c.sets()[i].len().min(c.sets()[j].len()).min(g.threshold());
                    assert!(st.probes as usize <= small);
                }
            }
        }
    }
}
