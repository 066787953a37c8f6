//! Oracle checks for a built index: random queries are answered by the index
//! and by a brute-force oracle, and the first disagreement is reported.

use serde::Serialize;

use crate::artifact::{Answer, Artifact, Mode, Query};
use crate::error::Result;
use crate::gapped::brute_force_gapped;
use crate::gen::{random_query, rng};
use crate::jumbled::brute_force_jumbled;
use crate::set::SetCollection;
use crate::smallest_shift::brute_force_smallest_shift;
use crate::stats::QueryStats;
use crate::text::baseline_linear_scan;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub kind: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    /// Query line and both answers of the first mismatch.
    pub counterexample: Option<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Oracle pairs, plus the shift for smallest-shift queries.
type Expected = (Vec<(i64, i64)>, Option<i64>);

/// Brute-force answer for `q` in both modes; `None` for kinds with a
/// single answer form.
fn oracle(artifact: &Artifact, sets: Option<&SetCollection>, q: &Query) -> Result<Expected> {
    Ok(match (artifact, q) {
        (Artifact::Ssi(_), &Query::Shift { i, j, s }) => {
            let c = sets.unwrap();
            (crate::ssi::brute_force_ssi(c, crate::ssi::ShiftQuery::new(i, j, s)), None)
        }
        (Artifact::GappedSet(_), &Query::Gapped { i, j, alpha, beta }) => {
            (brute_force_gapped(sets.unwrap(), i, j, alpha, beta), None)
        }
        (Artifact::GappedString(g), Query::Patterns { p1, p2, alpha, beta }) => {
            let (v, _) = baseline_linear_scan(g.text(), p1, p2, *alpha, *beta)?;
            (v.iter().map(|&(i, j)| (i as i64, j as i64)).collect(), None)
        }
        (Artifact::Jumbled(jm), Query::Histogram(h)) => {
            let v = brute_force_jumbled(jm.text(), jm.alphabet(), h)?;
            (v.iter().map(|&(i, j)| (i as i64, j as i64)).collect(), None)
        }
        (Artifact::SmallestShift(_), &Query::Pair { i, j }) => (Vec::new(), brute_force_smallest_shift(sets.unwrap(), i, j)),
        _ => unreachable!("query kinds are generated per artifact"),
    })
}

/// Checks one query in both modes. Returns a description of the mismatch.
pub fn check_query(artifact: &Artifact, sets: Option<&SetCollection>, line: &str) -> Result<Option<String>> {
    let q = artifact.parse_query(line, 1)?;
    let (want, shift) = oracle(artifact, sets, &q)?;
    let mut stats = QueryStats::default();
    if let Query::Pair { .. } = q {
        let got = artifact.execute(&q, Mode::Exists, &mut stats)?;
        if got != Answer::Shift(shift) {
            return Ok(Some(format!("query `{}`: index answered {:?}, oracle {:?}", line, got, shift)));
        }
        return Ok(None);
    }
    match artifact.execute(&q, Mode::Report, &mut stats)? {
        Answer::Report(got) if got == want => {}
        got => return Ok(Some(format!("query `{}` (report): index answered {:?}, oracle {:?}", line, got, want))),
    }
    match artifact.execute(&q, Mode::Exists, &mut stats)? {
        Answer::Exists(None) if want.is_empty() => {}
        Answer::Exists(Some(w)) if want.contains(&w) => {}
        got => {
            return Ok(Some(format!("query `{}` (exists): index answered {:?}, oracle pairs {:?}", line, got, want)))
        }
    }
    Ok(None)
}

/// Runs `trials` random queries drawn with `seed`.
pub fn verify(artifact: &Artifact, trials: usize, seed: u64) -> Result<VerifyReport> {
    let sets = artifact
        .set_tables()
        .map(|(u, s)| SetCollection::ingest(s.iter().map(|x| x.to_vec()).collect(), u))
        .transpose()?;
    let mut r = rng(seed);
    let mut report = VerifyReport { kind: artifact.kind().to_string(), seed, trials, passed: 0, counterexample: None };
    for _ in 0..trials {
        let line = random_query(&mut r, artifact);
        if let Some(msg) = check_query(artifact, sets.as_ref(), &line)? {
            report.counterexample = Some(msg);
            break;
        }
        report.passed += 1;
    }
    Ok(report)
}
