//! Space/query trade-off measurements, one JSON record per
//! (instance, backend, query class).
//!
//! A spec looks like
//!
//! ```json
//! {
//!   "ssi": [{ "sizes": [1000, 1000, 100], "u": 4000, "deltas": [0, 0.5, 1], "queries": 2000 }],
//!   "gapped_string": [{ "n": 1000, "sigma": 4, "queries": 50 }]
//! }
//! ```
//!
//! Either list may be omitted. An SSI entry gives either explicit `sizes`
//! or `n` and `k` (equal sizes).

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::{collection_with_sizes, random_query, random_text, rng};
use crate::set::SetCollection;
use crate::ssi::{BackendConfig, BackendKind, ShiftQuery, SsiBackend};
use crate::stats::QueryStats;
use crate::text::{GappedStringIndex, Text};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default)]
    pub ssi: Vec<SsiBench>,
    #[serde(default)]
    pub gapped_string: Vec<StringBench>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsiBench {
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    pub u: i64,
    /// Backend names; `small-universe` runs once per entry of `deltas`.
    #[serde(default = "default_ssi_backends")]
    pub backends: Vec<String>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default = "default_queries")]
    pub queries: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StringBench {
    pub n: usize,
    #[serde(default = "default_sigma")]
    pub sigma: u8,
    #[serde(default = "default_string_backend")]
    pub backend: String,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_queries")]
    pub queries: usize,
}

fn default_ssi_backends() -> Vec<String> {
    vec!["small-universe".into()]
}

fn default_string_backend() -> String {
    "linear".into()
}

fn default_queries() -> usize {
    1000
}

fn default_sigma() -> u8 {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub class: String,
    pub backend: String,
    pub delta: Option<f64>,
    /// `N` for set instances, `n` for texts.
    pub n: usize,
    pub u: i64,
    pub k: usize,
    pub build_bytes: u64,
    pub build_ms: f64,
    pub queries: usize,
    pub query_ns_mean: f64,
    pub stats: QueryStats,
    /// Reported pairs after dedup, summed over queries.
    pub occ: u64,
    /// Raw pairs per reported pair.
    pub dedup_factor: Option<f64>,
    pub error: Option<String>,
}

impl BenchRecord {
    fn empty(class: &str, backend: BackendKind, n: usize, u: i64, k: usize, queries: usize) -> Self {
        BenchRecord {
            class: class.into(),
            backend: backend.name().into(),
            delta: backend.delta(),
            n,
            u,
            k,
            build_bytes: 0,
            build_ms: 0.0,
            queries,
            query_ns_mean: 0.0,
            stats: QueryStats::default(),
            occ: 0,
            dedup_factor: None,
            error: None,
        }
    }

    /// Base existence calls per query.
    pub fn probes_per_query(&self) -> f64 {
        self.stats.probes as f64 / self.queries.max(1) as f64
    }
}

fn backends_of(names: &[String], deltas: &[f64]) -> Result<Vec<BackendKind>> {
    let mut out = Vec::new();
    for name in names {
        let kind = BackendKind::parse(name, 0.0)?;
        if kind.delta().is_some() {
            if deltas.is_empty() {
                return Err(Error::parse(0, "small-universe bench needs a deltas list"));
            }
            for &d in deltas {
                out.push(BackendKind::parse(name, d)?);
            }
        } else {
            out.push(kind);
        }
    }
    Ok(out)
}

/// Existence queries `(i, j, s)` with `i, j` uniform and `s` realised by a
/// random pair half of the time.
pub fn ssi_queries(c: &SetCollection, count: usize, seed: u64) -> Vec<ShiftQuery> {
    let mut r = rng(seed);
    let u = c.universe().get();
    (0..count)
        .map(|_| {
            let (i, j) = (r.gen_range(0..c.k()), r.gen_range(0..c.k()));
            let s = if r.gen_bool(0.5) {
                let (a, b) = (c.sets()[i].elements(), c.sets()[j].elements());
                b[r.gen_range(0..b.len())] - a[r.gen_range(0..a.len())]
            } else {
                r.gen_range(-(u - 1)..=u - 1)
            };
            ShiftQuery::new(i, j, s)
        })
        .collect()
}

/// One record per backend over the same collection and query list.
pub fn bench_ssi(c: &SetCollection, backends: &[BackendKind], queries: &[ShiftQuery], cfg: &BackendConfig) -> Vec<BenchRecord> {
    backends
        .iter()
        .map(|&kind| {
            let mut rec = BenchRecord::empty("ssi-exists", kind, c.total_size(), c.universe().get(), c.k(), queries.len());
            let t = Instant::now();
            match SsiBackend::build_with(c.clone(), kind, cfg) {
                Err(e) => rec.error = Some(e.to_string()),
                Ok(b) => {
                    rec.build_ms = t.elapsed().as_secs_f64() * 1e3;
                    rec.build_bytes = b.space_bytes();
                    let t = Instant::now();
                    for &q in queries {
                        if b.exists_counted(q, &mut rec.stats).expect("generated query").is_some() {
                            rec.occ += 1;
                        }
                    }
                    rec.query_ns_mean = t.elapsed().as_nanos() as f64 / queries.len().max(1) as f64;
                }
            }
            rec
        })
        .collect()
}

fn bench_string(spec: &StringBench, seed: u64, cfg: &BackendConfig) -> Result<BenchRecord> {
    let kind = BackendKind::parse(&spec.backend, spec.delta)?;
    let text = random_text(&mut rng(seed), spec.n, spec.sigma);
    let mut rec = BenchRecord::empty("gapped-string-report", kind, spec.n, spec.n as i64, 0, spec.queries);
    let t = Instant::now();
    let idx = match Text::new(text).and_then(|t| GappedStringIndex::build_with(t, kind, cfg)) {
        Ok(i) => i,
        Err(e) => {
            rec.error = Some(e.to_string());
            return Ok(rec);
        }
    };
    rec.build_ms = t.elapsed().as_secs_f64() * 1e3;
    rec.build_bytes = idx.gapped().space_bytes();
    rec.k = idx.set_count();
    let artifact = crate::artifact::Artifact::GappedString(idx);
    let mut r = rng(seed ^ 0x51);
    let mut raw = 0;
    let mut elapsed = 0u128;
    for n in 0..spec.queries {
        let line = random_query(&mut r, &artifact);
        let q = artifact.parse_query(&line, n + 1)?;
        let mut st = QueryStats::default();
        let t = Instant::now();
        let ans = artifact.execute(&q, crate::artifact::Mode::Report, &mut st)?;
        elapsed += t.elapsed().as_nanos();
        if let crate::artifact::Answer::Report(v) = ans {
            rec.occ += v.len() as u64;
        }
        raw += st.raw_pairs;
        rec.stats.merge(&st);
    }
    rec.query_ns_mean = elapsed as f64 / spec.queries.max(1) as f64;
    rec.dedup_factor = (rec.occ > 0).then(|| raw as f64 / rec.occ as f64);
    Ok(rec)
}

/// Runs every entry of `spec`. Budget overruns become records with `error`
/// set; malformed entries are errors.
pub fn run_bench(spec: &BenchSpec, seed: u64, cfg: &BackendConfig) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for (n, s) in spec.ssi.iter().enumerate() {
        let sizes = match (&s.sizes, s.n, s.k) {
            (Some(v), _, _) => v.clone(),
            (None, Some(n), Some(k)) if k > 0 => (0..k).map(|i| n / k + usize::from(i < n % k)).collect(),
            _ => return Err(Error::parse(0, format!("ssi entry {} needs `sizes` or `n` and `k`", n))),
        };
        let c = collection_with_sizes(&mut rng(seed.wrapping_add(n as u64)), &sizes, s.u)?;
        let queries = ssi_queries(&c, s.queries, seed ^ 0xbe);
        out.extend(bench_ssi(&c, &backends_of(&s.backends, &s.deltas)?, &queries, cfg));
    }
    for (n, s) in spec.gapped_string.iter().enumerate() {
        out.push(bench_string(s, seed.wrapping_add(1000 + n as u64), cfg)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_gives_no_records() {
        let spec: BenchSpec = serde_json::from_str("{}").unwrap();
        assert!(run_bench(&spec, 1, &BackendConfig::default()).unwrap().is_empty());
        assert!(serde_json::from_str::<BenchSpec>(r#"{"bogus": []}"#).is_err());
    }

    #[test]
    fn small_runs_and_budget_errors() {
        let spec: BenchSpec = serde_json::from_str(
            r#"{"ssi": [{"n": 300, "k": 6, "u": 500, "backends": ["linear", "full", "small-universe"], "deltas": [0, 1], "queries": 100}],
                "gapped_string": [{"n": 200, "queries": 10}]}"#,
        )
        .unwrap();
        let recs = run_bench(&spec, 5, &BackendConfig::default()).unwrap();
        assert_eq!(recs.len(), 5);
        assert!(recs.iter().all(|r| r.error.is_none()));
        assert!(recs[4].stats.ssi_calls > 0);
        let tight = BackendConfig { mem_budget: 1000, ..Default::default() };
        let recs = run_bench(&spec, 5, &tight).unwrap();
        assert!(recs[1].error.is_some());
    }
}
