//! The five queryable index kinds behind one type, plus the line-oriented
//! query format shared by the command line and the Python bindings.
//!
//! Query lines use 1-based set indices and text positions:
//!
//! | kind             | line          |
//! |------------------|---------------|
//! | `ssi`            | `i j s`       |
//! | `gapped-set`     | `i j α β`     |
//! | `gapped-string`  | `P₁ P₂ α β`   |
//! | `jumbled`        | `c₁ … c_σ`    |
//! | `smallest-shift` | `i j`         |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gapped::GappedIndex;
use crate::jumbled::{Alphabet, Histogram, JumbledIndex};
use crate::reporting::AugmentedInstance;
use crate::set::{floor_log2, SetCollection};
use crate::smallest_shift::ShiftIndex;
use crate::ssi::{BackendConfig, BackendKind, ShiftQuery};
use crate::stats::QueryStats;
use crate::text::{GappedStringIndex, Text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArtifactKind {
    Ssi,
    GappedSet,
    GappedString,
    Jumbled,
    SmallestShift,
}

impl ArtifactKind {
    pub const ALL: [ArtifactKind; 5] =
        [ArtifactKind::Ssi, ArtifactKind::GappedSet, ArtifactKind::GappedString, ArtifactKind::Jumbled, ArtifactKind::SmallestShift];

    pub fn name(self) -> &'static str {
        match self {
            ArtifactKind::Ssi => "ssi",
            ArtifactKind::GappedSet => "gapped-set",
            ArtifactKind::GappedString => "gapped-string",
            ArtifactKind::Jumbled => "jumbled",
            ArtifactKind::SmallestShift => "smallest-shift",
        }
    }

    pub(crate) fn code(self) -> u8 {
        self as u8
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        Self::ALL.get(c as usize).copied()
    }

    /// Whether the source is a set file (otherwise raw text).
    pub fn takes_sets(self) -> bool {
        matches!(self, ArtifactKind::Ssi | ArtifactKind::GappedSet | ArtifactKind::SmallestShift)
    }
}

impl fmt::Display for ArtifactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArtifactKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::parse(0, format!("unknown index kind {:?}", s)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exists,
    Report,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exists" => Ok(Mode::Exists),
            "report" => Ok(Mode::Report),
            other => Err(Error::parse(0, format!("unknown mode {:?}", other))),
        }
    }
}

/// One parsed query line. Set indices are 0-based here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Shift { i: usize, j: usize, s: i64 },
    Gapped { i: usize, j: usize, alpha: i64, beta: i64 },
    Patterns { p1: Vec<u8>, p2: Vec<u8>, alpha: i64, beta: i64 },
    Histogram(Histogram),
    Pair { i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Exists(Option<(i64, i64)>),
    Report(Vec<(i64, i64)>),
    Shift(Option<i64>),
}

impl fmt::Display for Answer {
    /// `YES a b` / `NO`, one `a b` line per reported pair, or an integer /
    /// `NONE`. Report blocks may be empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Exists(Some((a, b))) => writeln!(f, "YES {} {}", a, b),
            Answer::Exists(None) => writeln!(f, "NO"),
            Answer::Report(pairs) => pairs.iter().try_for_each(|(a, b)| writeln!(f, "{} {}", a, b)),
            Answer::Shift(Some(s)) => writeln!(f, "{}", s),
            Answer::Shift(None) => writeln!(f, "NONE"),
        }
    }
}

fn field<T: FromStr>(tok: &str, what: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::parse(line, format!("bad {} {:?}", what, tok)))
}

fn set_index(tok: &str, line: usize) -> Result<usize> {
    match field::<usize>(tok, "set index", line)? {
        0 => Err(Error::parse(line, "set indices are 1-based".to_string())),
        i => Ok(i - 1),
    }
}

fn arity(toks: &[&str], want: usize, line: usize) -> Result<()> {
    if toks.len() != want {
        return Err(Error::parse(line, format!("expected {} fields, got {}", want, toks.len())));
    }
    Ok(())
}

/// Parses one query line for `kind`. `sigma` is the jumbled alphabet size.
pub fn parse_query(kind: ArtifactKind, text: &str, line: usize, sigma: usize) -> Result<Query> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    match kind {
        ArtifactKind::Ssi => {
            arity(&toks, 3, line)?;
            Ok(Query::Shift { i: set_index(toks[0], line)?, j: set_index(toks[1], line)?, s: field(toks[2], "shift", line)? })
        }
        ArtifactKind::GappedSet => {
            arity(&toks, 4, line)?;
            Ok(Query::Gapped {
                i: set_index(toks[0], line)?,
                j: set_index(toks[1], line)?,
                alpha: field(toks[2], "alpha", line)?,
                beta: field(toks[3], "beta", line)?,
            })
        }
        ArtifactKind::GappedString => {
            arity(&toks, 4, line)?;
            Ok(Query::Patterns {
                p1: toks[0].as_bytes().to_vec(),
                p2: toks[1].as_bytes().to_vec(),
                alpha: field(toks[2], "alpha", line)?,
                beta: field(toks[3], "beta", line)?,
            })
        }
        ArtifactKind::Jumbled => {
            arity(&toks, sigma, line)?;
            Ok(Query::Histogram(Histogram(toks.iter().map(|t| field(t, "count", line)).collect::<Result<_>>()?)))
        }
        ArtifactKind::SmallestShift => {
            arity(&toks, 2, line)?;
            Ok(Query::Pair { i: set_index(toks[0], line)?, j: set_index(toks[1], line)? })
        }
    }
}

/// Size counters reported at build time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accounting {
    /// `N` for set kinds, `n` for text kinds.
    pub n: u64,
    pub k: u64,
    pub u: u64,
    pub stored_elements: u64,
    pub element_bound: u64,
    pub space_bytes: u64,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Artifact {
    Ssi(AugmentedInstance),
    GappedSet(GappedIndex),
    GappedString(GappedStringIndex),
    Jumbled(JumbledIndex),
    SmallestShift(ShiftIndex),
}

/// Text inputs drop one trailing line break so files written by editors
/// index the intended string.
pub fn normalize_text(mut bytes: Vec<u8>) -> Vec<u8> {
    if bytes.last() == Some(&b'\n') {
        bytes.pop();
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
    }
    bytes
}

fn tables_of(c: &SetCollection) -> (i64, Vec<&[i64]>) {
    (c.universe().get(), c.sets().iter().map(|s| s.elements()).collect())
}

impl Artifact {
    pub fn from_sets(kind: ArtifactKind, c: SetCollection, backend: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        Ok(match kind {
            ArtifactKind::Ssi => Artifact::Ssi(AugmentedInstance::build_with(&c, backend, cfg)?),
            ArtifactKind::GappedSet => Artifact::GappedSet(GappedIndex::build_with(c, backend, cfg)?),
            ArtifactKind::SmallestShift => Artifact::SmallestShift(ShiftIndex::build(c)),
            other => return Err(Error::Format(format!("{} indexes are built from text", other))),
        })
    }

    pub fn from_text(kind: ArtifactKind, text: &[u8], backend: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        Ok(match kind {
            ArtifactKind::GappedString => Artifact::GappedString(GappedStringIndex::build_with(Text::new(text)?, backend, cfg)?),
            ArtifactKind::Jumbled => {
                if text.is_empty() {
                    return Err(Error::Format("text is empty".into()));
                }
                Artifact::Jumbled(JumbledIndex::build_with(text, Alphabet::of_text(text)?, backend, cfg)?)
            }
            other => Err(Error::Format(format!("{} indexes are built from a set file", other)))?,
        })
    }

    pub fn kind(&self) -> ArtifactKind {
        match self {
            Artifact::Ssi(_) => ArtifactKind::Ssi,
            Artifact::GappedSet(_) => ArtifactKind::GappedSet,
            Artifact::GappedString(_) => ArtifactKind::GappedString,
            Artifact::Jumbled(_) => ArtifactKind::Jumbled,
            Artifact::SmallestShift(_) => ArtifactKind::SmallestShift,
        }
    }

    /// Universe and sorted base sets for set kinds.
    pub fn set_tables(&self) -> Option<(i64, Vec<&[i64]>)> {
        match self {
            Artifact::Ssi(a) => Some((a.universe(), a.base().iter().map(|s| s.elements()).collect())),
            Artifact::GappedSet(g) => Some(tables_of(g.collection())),
            Artifact::SmallestShift(s) => Some(tables_of(s.collection())),
            _ => None,
        }
    }

    /// Alphabet size for jumbled indexes, 0 otherwise.
    pub fn sigma(&self) -> usize {
        match self {
            Artifact::Jumbled(j) => j.alphabet().len(),
            _ => 0,
        }
    }

    pub fn accounting(&self) -> Accounting {
        let sets = |c: &SetCollection| (c.total_size() as u64, c.k() as u64, c.universe().get() as u64);
        match self {
            Artifact::Ssi(a) => {
                let nn: usize = a.base().iter().map(|s| s.len()).sum();
                Accounting {
                    n: nn as u64,
                    k: a.k() as u64,
                    u: a.universe() as u64,
                    stored_elements: a.total_elements() as u64,
                    element_bound: (nn * (floor_log2(nn) as usize + 1) + nn) as u64,
                    space_bytes: a.backend().space_bytes(),
                }
            }
            Artifact::GappedSet(g) => {
                let (n, k, u) = sets(g.collection());
                Accounting {
                    n,
                    k,
                    u,
                    stored_elements: g.total_elements() as u64,
                    element_bound: g.element_bound() as u64,
                    space_bytes: g.space_bytes(),
                }
            }
            Artifact::GappedString(g) => Accounting {
                n: g.text().len() as u64,
                k: g.set_count() as u64,
                u: g.text().len() as u64,
                stored_elements: g.set_elements() as u64,
                element_bound: g.set_element_bound() as u64,
                space_bytes: g.gapped().space_bytes() + g.text().len() as u64 * 5,
            },
            Artifact::Jumbled(j) => {
                let stored = (j.prefix_codes().len() + j.suffix_codes().len()) as u64;
                Accounting {
                    n: j.len() as u64,
                    k: j.alphabet().len() as u64,
                    u: j.base(),
                    stored_elements: stored,
                    element_bound: 2 * (j.len() as u64 + 1),
                    space_bytes: j.reporter().index().backend().space_bytes() + stored * 24,
                }
            }
            Artifact::SmallestShift(s) => {
                let (n, k, u) = sets(s.collection());
                Accounting { n, k, u, stored_elements: n, element_bound: n, space_bytes: s.space_bytes() }
            }
        }
    }

    pub fn parse_query(&self, line: &str, lineno: usize) -> Result<Query> {
        parse_query(self.kind(), line, lineno, self.sigma())
    }

    /// Answers one query. Results use 1-based positions for text kinds and
    /// element values for set kinds.
    pub fn execute(&self, q: &Query, mode: Mode, stats: &mut QueryStats) -> Result<Answer> {
        let pos = |(i, j): (usize, usize)| (i as i64, j as i64);
        match (self, q) {
            (Artifact::Ssi(a), &Query::Shift { i, j, s }) => {
                let q = ShiftQuery::new(i, j, s);
                Ok(match mode {
                    Mode::Exists => Answer::Exists(a.exists_counted(q, stats)?.map(|c| (c.a, c.b))),
                    Mode::Report => Answer::Report(a.report_shift_counted(q, stats)?),
                })
            }
            (Artifact::GappedSet(g), &Query::Gapped { i, j, alpha, beta }) => Ok(match mode {
                Mode::Exists => Answer::Exists(g.gapped_exists_counted(i, j, alpha, beta, stats)?),
                Mode::Report => Answer::Report(g.gapped_report_counted(i, j, alpha, beta, stats)?),
            }),
            (Artifact::GappedString(g), Query::Patterns { p1, p2, alpha, beta }) => Ok(match mode {
                Mode::Exists => Answer::Exists(g.exists_counted(p1, p2, *alpha, *beta, stats)?.map(pos)),
                Mode::Report => Answer::Report(g.report_counted(p1, p2, *alpha, *beta, stats)?.into_iter().map(pos).collect()),
            }),
            (Artifact::Jumbled(jm), Query::Histogram(h)) => Ok(match mode {
                Mode::Exists => Answer::Exists(jm.exists(h)?.map(pos)),
                Mode::Report => Answer::Report(jm.report_counted(h, stats)?.into_iter().map(pos).collect()),
            }),
            (Artifact::SmallestShift(s), &Query::Pair { i, j }) => Ok(Answer::Shift(s.smallest_shift_counted(i, j, stats)?)),
            (a, q) => Err(Error::Format(format!("query {:?} does not apply to a {} index", q, a.kind()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(text: &str) -> SetCollection {
        SetCollection::parse_text(text).unwrap()
    }

    fn run(a: &Artifact, line: &str, mode: Mode) -> String {
        let q = a.parse_query(line, 1).unwrap();
        a.execute(&q, mode, &mut QueryStats::default()).unwrap().to_string()
    }

    #[test]
    fn answers_per_kind() {
        let cfg = BackendConfig::default();
        let c = sets("10 2\n1 3 4\n3 6 8\n");
        let ssi = Artifact::from_sets(ArtifactKind::Ssi, c.clone(), BackendKind::LinearScan, &cfg).unwrap();
        assert_eq!(run(&ssi, "1 2 2", Mode::Exists), "YES 1 3\n");
        assert_eq!(run(&ssi, "1 2 2", Mode::Report), "1 3\n4 6\n");
        assert_eq!(run(&ssi, "1 2 9", Mode::Exists), "NO\n");
        let gs = Artifact::from_sets(ArtifactKind::GappedSet, c.clone(), BackendKind::LinearScan, &cfg).unwrap();
        assert_eq!(run(&gs, "1 2 4 4", Mode::Report), "4 8\n");
        let sm = Artifact::from_sets(ArtifactKind::SmallestShift, c, BackendKind::LinearScan, &cfg).unwrap();
        assert_eq!(run(&sm, "2 1", Mode::Exists), "0\n");
        assert_eq!(run(&sm, "2 2", Mode::Exists), "0\n");
        let t = Artifact::from_text(ArtifactKind::GappedString, b"banana", BackendKind::LinearScan, &cfg).unwrap();
        assert_eq!(run(&t, "an na 1 3", Mode::Report), "2 3\n2 5\n4 5\n");
        let j = Artifact::from_text(ArtifactKind::Jumbled, b"acaacabd", BackendKind::LinearScan, &cfg).unwrap();
        assert_eq!(run(&j, "4 1 2 1", Mode::Report), "1 8\n");
        assert!(j.parse_query("4 1 2", 1).is_err());
        assert!(ssi.parse_query("0 1 2", 1).is_err());
        assert!(ssi.parse_query("1 2 x", 1).is_err());
    }

    #[test]
    fn text_normalization() {
        assert_eq!(normalize_text(b"abc\n".to_vec()), b"abc");
        assert_eq!(normalize_text(b"abc\r\n".to_vec()), b"abc");
        assert_eq!(normalize_text(b"abc\n\n".to_vec()), b"abc\n");
    }
}
