//! Shifted Set Intersection: given `(i, j, s)`, decide whether some
//! `a ∈ S_i`, `b ∈ S_j` satisfy `a + s = b`, returning the witness.
//!
//! Three interchangeable backends cover the extreme points and one middle
//! point of the space/query trade-off:
//!
//! * [`BackendKind::LinearScan`]: one hash dictionary per set; a query probes
//!   every element of the smaller set.
//! * [`BackendKind::FullTabulation`]: one stored certificate for every realized
//!   `(i, j, s)`; a query is a single lookup.
//! * [`BackendKind::SmallUniverse`]: sets with more than `⌈N^δ⌉` elements are
//!   *large*; every (large, large, shift) answer is tabulated over the full
//!   shift range `[-(u-1), u-1]`, and every other query probes the small set.
//!
//! Ties between several witnesses always resolve to the smallest `a`.

mod reduction;

pub use reduction::{
    merge_two_set_3sum, reduce_3sum_to_ssi, reduce_ssi_to_3sum, OneSetThreeSum, SsiToThreeSumMap,
    ThreeSumInstance, ThreeSumQueryMap,
};

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::SetCollection;
use crate::stats::QueryStats;

pub(crate) type Dict = HashSet<i64, ahash::RandomState>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftQuery {
    pub i: usize,
    pub j: usize,
    pub s: i64,
}

impl ShiftQuery {
    pub fn new(i: usize, j: usize, s: i64) -> Self {
        ShiftQuery { i, j, s }
    }
}

/// Witness `a ∈ S_i`, `b ∈ S_j` with `a + s = b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftCertificate {
    pub a: i64,
    pub b: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[non_exhaustive]
pub enum BackendKind {
    LinearScan,
    FullTabulation,
    SmallUniverse { delta: f64 },
}

impl BackendKind {
    pub fn name(&self) -> &'static str {
        match self {
            BackendKind::LinearScan => "linear",
            BackendKind::FullTabulation => "full",
            BackendKind::SmallUniverse { .. } => "small-universe",
        }
    }

    /// Parses `linear`, `full` or `small-universe` (δ supplied separately).
    pub fn parse(name: &str, delta: f64) -> Result<Self> {
        match name {
            "linear" => Ok(BackendKind::LinearScan),
            "full" => Ok(BackendKind::FullTabulation),
            "small-universe" | "small" => {
                if !(0.0..=1.0).contains(&delta) {
                    return Err(Error::parse(0, format!("delta {} outside [0, 1]", delta)));
                }
                Ok(BackendKind::SmallUniverse { delta })
            }
            other => Err(Error::parse(0, format!("unknown backend {:?}", other))),
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            BackendKind::SmallUniverse { delta } => Some(*delta),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackendConfig {
    /// Seed for the randomized dictionary hashing.
    pub seed: u64,
    /// Byte budget for tabulated backends.
    pub mem_budget: u64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig { seed: 0x5e_ed0f_5e75, mem_budget: 1 << 30 }
    }
}

impl BackendConfig {
    pub(crate) fn hasher(&self) -> ahash::RandomState {
        ahash::RandomState::with_seeds(
            self.seed,
            self.seed.rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15,
            self.seed.rotate_left(31) ^ 0xbf58_476d_1ce4_e5b9,
            self.seed.rotate_left(47) ^ 0x94d0_49bb_1331_11eb,
        )
    }
}

/// Smallest `a` among witnesses of `(S_i, S_j, s)`, found by probing the
/// smaller set against the other's dictionary.
fn probe_smaller(
    sets: &SetCollection,
    dicts: &[Dict],
    i: usize,
    j: usize,
    s: i64,
    stats: &mut QueryStats,
) -> Option<ShiftCertificate> {
    let (si, sj) = (sets.sets()[i].elements(), sets.sets()[j].elements());
    if si.len() <= sj.len() {
        for &a in si {
            stats.probes += 1;
            if dicts[j].contains(&(a + s)) {
                return Some(ShiftCertificate { a, b: a + s });
            }
        }
    } else {
        for &b in sj {
            stats.probes += 1;
            if dicts[i].contains(&(b - s)) {
                return Some(ShiftCertificate { a: b - s, b });
            }
        }
    }
    None
}

type TabKey = (u32, u32, i64);

#[derive(Debug, Clone)]
struct SmallUniverseTable {
    threshold: usize,
    /// Position of each set in the large list, if large.
    large_slot: Vec<Option<u32>>,
    n_large: usize,
    u: i64,
    width: usize,
    /// `n_large² · width` cells; cell holds the 1-based rank of the witness
    /// `a` in its set, 0 when the shift is not realized.
    cells: Vec<u32>,
}

#[derive(Debug, Clone)]
enum Imp {
    Linear { dicts: Vec<Dict> },
    Full { table: HashMap<TabKey, ShiftCertificate, ahash::RandomState> },
    Small { dicts: Vec<Dict>, table: SmallUniverseTable },
}

/// An immutable, built Shifted Set Intersection structure.
#[derive(Debug, Clone)]
pub struct SsiBackend {
    sets: SetCollection,
    kind: BackendKind,
    imp: Imp,
}

fn build_dicts(c: &SetCollection, cfg: &BackendConfig) -> Vec<Dict> {
    c.sets()
        .iter()
        .map(|s| {
            let mut d = Dict::with_capacity_and_hasher(s.len(), cfg.hasher());
            d.extend(s.elements().iter().copied());
            d
        })
        .collect()
}

impl SsiBackend {
    pub fn build(c: SetCollection, kind: BackendKind) -> Result<Self> {
        Self::build_with(c, kind, &BackendConfig::default())
    }

    pub fn build_with(c: SetCollection, kind: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        let imp = match kind {
            BackendKind::LinearScan => Imp::Linear { dicts: build_dicts(&c, cfg) },
            BackendKind::FullTabulation => Imp::Full { table: build_full(&c, cfg)? },
            BackendKind::SmallUniverse { delta } => {
                let table = build_small(&c, delta, cfg)?;
                Imp::Small { dicts: build_dicts(&c, cfg), table }
            }
        };
        Ok(SsiBackend { sets: c, kind, imp })
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn collection(&self) -> &SetCollection {
        &self.sets
    }

    /// Number of dictionary entries (LinearScan / SmallUniverse), or stored
    /// `(i, j, s)` keys (FullTabulation).
    pub fn stored_entries(&self) -> usize {
        match &self.imp {
            Imp::Linear { dicts } => dicts.iter().map(|d| d.len()).sum(),
            Imp::Full { table } => table.len(),
            Imp::Small { dicts, table } => dicts.iter().map(|d| d.len()).sum::<usize>() + table.cells.len(),
        }
    }

    /// Number of sets classified as large (SmallUniverse only).
    pub fn large_sets(&self) -> usize {
        match &self.imp {
            Imp::Small { table, .. } => table.n_large,
            _ => 0,
        }
    }

    /// Size-class threshold `⌈N^δ⌉` (SmallUniverse only).
    pub fn large_threshold(&self) -> Option<usize> {
        match &self.imp {
            Imp::Small { table, .. } => Some(table.threshold),
            _ => None,
        }
    }

    /// Estimated heap bytes held by the structure.
    pub fn space_bytes(&self) -> u64 {
        let elems = self.sets.total_size() as u64 * 8;
        let dict_bytes = |dicts: &[Dict]| -> u64 { dicts.iter().map(|d| d.capacity() as u64 * 9).sum() };
        elems
            + match &self.imp {
                Imp::Linear { dicts } => dict_bytes(dicts),
                Imp::Full { table } => table.capacity() as u64 * (std::mem::size_of::<(TabKey, ShiftCertificate)>() as u64 + 1),
                Imp::Small { dicts, table } => {
                    dict_bytes(dicts) + table.cells.len() as u64 * 4 + table.large_slot.len() as u64 * 8
                }
            }
    }

    pub fn exists(&self, q: ShiftQuery) -> Result<Option<ShiftCertificate>> {
        let mut stats = QueryStats::default();
        self.exists_counted(q, &mut stats)
    }

    pub fn exists_counted(&self, q: ShiftQuery, stats: &mut QueryStats) -> Result<Option<ShiftCertificate>> {
        self.sets.set(q.i)?;
        self.sets.set(q.j)?;
        Ok(self.exists_raw(q.i, q.j, q.s, stats))
    }

    /// Unchecked existence query; indices must be valid.
    pub(crate) fn exists_raw(&self, i: usize, j: usize, s: i64, stats: &mut QueryStats) -> Option<ShiftCertificate> {
        stats.ssi_calls += 1;
        match &self.imp {
            Imp::Linear { dicts } => probe_smaller(&self.sets, dicts, i, j, s, stats),
            Imp::Full { table } => {
                stats.table_hits += 1;
                table.get(&(i as u32, j as u32, s)).copied()
            }
            Imp::Small { dicts, table } => match (table.large_slot[i], table.large_slot[j]) {
                (Some(p), Some(q)) => {
                    stats.table_hits += 1;
                    if s.abs() >= table.u {
                        return None;
                    }
                    let cell = (p as usize * table.n_large + q as usize) * table.width + (s + table.u - 1) as usize;
                    match table.cells[cell] {
                        0 => None,
                        rank => {
                            let a = self.sets.sets()[i].elements()[rank as usize - 1];
                            Some(ShiftCertificate { a, b: a + s })
                        }
                    }
                }
                _ => probe_smaller(&self.sets, dicts, i, j, s, stats),
            },
        }
    }
}

fn build_full(c: &SetCollection, cfg: &BackendConfig) -> Result<HashMap<TabKey, ShiftCertificate, ahash::RandomState>> {
    let n = c.total_size() as u128;
    let entry = std::mem::size_of::<(TabKey, ShiftCertificate)>() as u128 + 1;
    if n * n * entry > cfg.mem_budget as u128 {
        return Err(Error::BudgetExceeded { what: "full tabulation", needed: n * n * entry, budget: cfg.mem_budget });
    }
    let mut table = HashMap::with_hasher(cfg.hasher());
    for si in c.sets() {
        for sj in c.sets() {
            for &a in si.elements() {
                for &b in sj.elements() {
                    table
                        .entry((si.id() as u32, sj.id() as u32, b - a))
                        .or_insert(ShiftCertificate { a, b });
                }
            }
        }
    }
    Ok(table)
}

/// `⌈N^δ⌉`, computed with a small tolerance so exact powers stay exact.
pub(crate) fn size_threshold(n: usize, delta: f64) -> usize {
    let t = (n as f64).powf(delta);
    let r = t.round();
    if (t - r).abs() < 1e-9 {
        r as usize
    } else {
        t.ceil() as usize
    }
}

fn build_small(c: &SetCollection, delta: f64, cfg: &BackendConfig) -> Result<SmallUniverseTable> {
    let threshold = size_threshold(c.total_size(), delta);
    let mut large_slot = vec![None; c.k()];
    let mut large = Vec::new();
    for s in c.sets() {
        if s.len() > threshold {
            large_slot[s.id()] = Some(large.len() as u32);
            large.push(s.id());
        }
    }
    let u = c.universe().get();
    let n_large = large.len();
    let width = if n_large == 0 { 0 } else { (2 * u - 1) as u128 };
    let needed = (n_large as u128) * (n_large as u128) * width * 4;
    if needed > cfg.mem_budget as u128 {
        return Err(Error::BudgetExceeded { what: "small-universe table", needed, budget: cfg.mem_budget });
    }
    let width = width as usize;
    let mut cells = vec![0u32; n_large * n_large * width];
    for (p, &si) in large.iter().enumerate() {
        let ei = c.sets()[si].elements();
        for (q, &sj) in large.iter().enumerate() {
            let base = (p * n_large + q) * width;
            let ej = c.sets()[sj].elements();
            for (rank, &a) in ei.iter().enumerate() {
                for &b in ej {
                    let cell = &mut cells[base + (b - a + u - 1) as usize];
                    if *cell == 0 {
                        *cell = rank as u32 + 1;
                    }
                }
            }
        }
    }
    Ok(SmallUniverseTable { threshold, large_slot, n_large, u, width, cells })
}

/// Every witness of `(S_i, S_j, s)`, sorted by `a`. Reference oracle.
pub fn brute_force_ssi(c: &SetCollection, q: ShiftQuery) -> Vec<(i64, i64)> {
    let (si, sj) = (&c.sets()[q.i], &c.sets()[q.j]);
    let mut out = Vec::new();
    for &a in si.elements() {
        for &b in sj.elements() {
            if a + q.s == b {
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

    fn all_kinds() -> Vec<BackendKind> {
        vec![
            BackendKind::LinearScan,
            BackendKind::FullTabulation,
            BackendKind::SmallUniverse { delta: 0.0 },
            BackendKind::SmallUniverse { delta: 0.5 },
            BackendKind::SmallUniverse { delta: 1.0 },
        ]
    }

    fn pair() -> SetCollection {
        SetCollection::ingest(vec![vec![1, 3], vec![4]], 4).unwrap()
    }

    #[test]
    fn small_examples_all_backends() {
        for kind in all_kinds() {
            let b = SsiBackend::build(pair(), kind).unwrap();
            assert_eq!(b.exists(ShiftQuery::new(0, 1, 1)).unwrap(), Some(ShiftCertificate { a: 3, b: 4 }), "{:?}", kind);
            assert_eq!(b.exists(ShiftQuery::new(0, 1, 2)).unwrap(), None);
            assert_eq!(b.exists(ShiftQuery::new(0, 0, 2)).unwrap(), Some(ShiftCertificate { a: 1, b: 3 }));
            assert_eq!(b.exists(ShiftQuery::new(1, 0, -3)).unwrap(), Some(ShiftCertificate { a: 4, b: 1 }));
            assert_eq!(b.exists(ShiftQuery::new(1, 0, 100)).unwrap(), None);
            assert!(b.exists(ShiftQuery::new(2, 0, 0)).is_err());
        }
    }

    #[test]
    fn full_tabulation_keys_match_enumeration() {
        let b = SsiBackend::build(pair(), BackendKind::FullTabulation).unwrap();
        let Imp::Full { table } = &b.imp else { unreachable!() };
        let mut keys: Vec<TabKey> = table.keys().copied().collect();
        keys.sort();
        let expected: Vec<TabKey> = vec![
            (0, 0, -2),
            (0, 0, 0),
            (0, 0, 2),
            (0, 1, 1),
            (0, 1, 3),
            (1, 0, -3),
            (1, 0, -1),
            (1, 1, 0),
        ];
        assert_eq!(keys, expected);
    }

    #[test]
    fn linear_scan_stores_n_entries() {
        let c = SetCollection::ingest(vec![vec![1, 5, 9], vec![2, 3], vec![7]], 10).unwrap();
        let b = SsiBackend::build(c, BackendKind::LinearScan).unwrap();
        assert_eq!(b.stored_entries(), 6);
    }

    #[test]
    fn small_universe_threshold_boundary() {
        // Four singletons, N = 4. δ = 0 gives threshold 1: size > 1 is
        // required to be large, so no set is large.
        let c = SetCollection::ingest(vec![vec![1], vec![2], vec![3], vec![4]], 4).unwrap();
        let b = SsiBackend::build(c.clone(), BackendKind::SmallUniverse { delta: 0.0 }).unwrap();
        assert_eq!(b.large_threshold(), Some(1));
        assert_eq!(b.large_sets(), 0);
        // N = 4, δ = 0.5 gives threshold 2 exactly.
        let c = SetCollection::ingest(vec![vec![1, 2, 3], vec![4]], 4).unwrap();
        let b = SsiBackend::build(c, BackendKind::SmallUniverse { delta: 0.5 }).unwrap();
        assert_eq!(b.large_threshold(), Some(2));
        assert_eq!(b.large_sets(), 1);
    }

    #[test]
    fn small_universe_budget_guard() {
        let c = SetCollection::ingest(vec![(1..=50).collect(), (1..=50).collect()], 1000).unwrap();
        let cfg = BackendConfig { mem_budget: 1000, ..Default::default() };
        let err = SsiBackend::build_with(c, BackendKind::SmallUniverse { delta: 0.0 }, &cfg).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn witnesses_have_smallest_a_and_agree_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let k = rng.gen_range(1..=5);
            let u = rng.gen_range(5..60);
            let raw: Vec<Vec<i64>> = (0..k)
                .map(|_| (0..rng.gen_range(1..12)).map(|_| rng.gen_range(1..=u)).collect())
                .collect();
            let c = SetCollection::ingest(raw, u).unwrap();
            let backends: Vec<SsiBackend> =
                all_kinds().into_iter().map(|kind| SsiBackend::build(c.clone(), kind).unwrap()).collect();
            for i in 0..k {
                for j in 0..k {
                    for s in -u..=u {
                        let q = ShiftQuery::new(i, j, s);
                        let want = brute_force_ssi(&c, q).first().map(|&(a, b)| ShiftCertificate { a, b });
                        for b in &backends {
                            assert_eq!(b.exists(q).unwrap(), want, "{:?} {:?}", b.kind(), q);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        let c = SetCollection::ingest(vec![vec![1, 2], vec![3, 4]], 4).unwrap();
        assert_eq!(brute_force_ssi(&c, ShiftQuery::new(0, 1, 2)), vec![(1, 3), (2, 4)]);
        assert!(brute_force_ssi(&c, ShiftQuery::new(0, 1, 10)).is_empty());
    }

    #[test]
    fn probe_counts_follow_backend() {
        let c = SetCollection::ingest(vec![(1..=20).collect(), vec![5, 7]], 40).unwrap();
        let lin = SsiBackend::build(c.clone(), BackendKind::LinearScan).unwrap();
        let mut st = QueryStats::default();
        lin.exists_counted(ShiftQuery::new(0, 1, 30), &mut st).unwrap();
        assert_eq!(st.probes, 2);
        let full = SsiBackend::build(c, BackendKind::FullTabulation).unwrap();
        let mut st = QueryStats::default();
        full.exists_counted(ShiftQuery::new(0, 1, 30), &mut st).unwrap();
        assert_eq!((st.probes, st.table_hits), (0, 1));
    }
}
