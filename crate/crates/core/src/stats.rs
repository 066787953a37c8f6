use serde::{Deserialize, Serialize};

/// Per-query instrumentation. Every query entry point has a `_counted`
/// variant that accumulates into one of these.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    /// Existence calls issued against a shifted-set-intersection backend.
    pub ssi_calls: u64,
    /// Dictionary membership probes or successor/predecessor searches.
    pub probes: u64,
    /// Answers read directly from a precomputed table.
    pub table_hits: u64,
    /// Covering phases executed by the gapped planner (both directions).
    pub phases: u64,
    /// Approximate (leveled) queries executed.
    pub approx_queries: u64,
    /// Pairs emitted before the final sort + dedup.
    pub raw_pairs: u64,
}

impl QueryStats {
    pub fn merge(&mut self, other: &QueryStats) {
        self.ssi_calls += other.ssi_calls;
        self.probes += other.probes;
        self.table_hits += other.table_hits;
        self.phases += other.phases;
        self.approx_queries += other.approx_queries;
        self.raw_pairs += other.raw_pairs;
    }
}

impl std::fmt::Display for QueryStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ssi_calls={} probes={} table_hits={} phases={} approx_queries={} raw_pairs={}",
            self.ssi_calls,
            self.probes,
            self.table_hits,
            self.phases,
            self.approx_queries,
            self.raw_pairs
        )
    }
}
