//! Versioned index files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "GAPSIDX\0" | version u32 | kind u8 | backend u8 | delta f64
//! | instrumented u8 | seed u64 | mem_budget u64 | source sha256 [32]
//! | accounting 6 × u64 | payload_len u64 | payload
//! | table tag u8 | tables | file sha256 [32]
//! ```
//!
//! The payload is the source (set file or text). Set kinds store their
//! sorted set tables, `gapped-string` stores its suffix array. Everything
//! else is rebuilt on load.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::artifact::{normalize_text, Accounting, Artifact, ArtifactKind};
use crate::error::{Error, Result};
use crate::set::SetCollection;
use crate::ssi::{BackendConfig, BackendKind};
use crate::text::{build_suffix_array, GappedStringIndex, SuffixArray, Text};

pub const MAGIC: &[u8; 8] = b"GAPSIDX\0";
pub const FORMAT_VERSION: u32 = 1;

const TABLE_NONE: u8 = 0;
const TABLE_SETS: u8 = 1;
const TABLE_SA: u8 = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexManifest {
    pub version: u32,
    pub kind: ArtifactKind,
    pub backend: &'static str,
    pub delta: Option<f64>,
    pub instrumented: bool,
    pub seed: u64,
    pub mem_budget: u64,
    /// Hex SHA-256 of the source payload.
    pub digest: String,
    pub accounting: Accounting,
}

/// Options fixed at build time and recorded in the file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub backend: BackendKind,
    pub config: BackendConfig,
    pub instrumented: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { backend: BackendKind::LinearScan, config: BackendConfig::default(), instrumented: false }
    }
}

#[derive(Debug, Clone)]
pub struct Index {
    manifest: IndexManifest,
    options: BuildOptions,
    payload: Vec<u8>,
    artifact: Artifact,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

fn backend_code(b: BackendKind) -> u8 {
    match b {
        BackendKind::LinearScan => 0,
        BackendKind::FullTabulation => 1,
        BackendKind::SmallUniverse { .. } => 2,
    }
}

fn backend_from(code: u8, delta: f64) -> Result<BackendKind> {
    match code {
        0 => Ok(BackendKind::LinearScan),
        1 => Ok(BackendKind::FullTabulation),
        2 if (0.0..=1.0).contains(&delta) => Ok(BackendKind::SmallUniverse { delta }),
        _ => Err(Error::Format(format!("unknown backend code {} (delta {})", code, delta))),
    }
}

impl Index {
    /// Builds from source bytes: a set file for set kinds, raw text otherwise.
    pub fn build(kind: ArtifactKind, source: Vec<u8>, options: BuildOptions) -> Result<Self> {
        let (payload, artifact) = if kind.takes_sets() {
            let text = std::str::from_utf8(&source).map_err(|_| Error::parse(1, "set file is not UTF-8"))?;
            let c = SetCollection::parse_text(text)?;
            let a = Artifact::from_sets(kind, c, options.backend, &options.config)?;
            (source, a)
        } else {
            let text = normalize_text(source);
            let a = Artifact::from_text(kind, &text, options.backend, &options.config)?;
            (text, a)
        };
        Ok(Self::assemble(payload, artifact, options))
    }

    fn assemble(payload: Vec<u8>, artifact: Artifact, options: BuildOptions) -> Self {
        let manifest = IndexManifest {
            version: FORMAT_VERSION,
            kind: artifact.kind(),
            backend: options.backend.name(),
            delta: options.backend.delta(),
            instrumented: options.instrumented,
            seed: options.config.seed,
            mem_budget: options.config.mem_budget,
            digest: hex(&Sha256::digest(&payload)),
            accounting: artifact.accounting(),
        };
        Index { manifest, options, payload, artifact }
    }

    pub fn manifest(&self) -> &IndexManifest {
        &self.manifest
    }

    pub fn options(&self) -> &BuildOptions {
        &self.options
    }

    pub fn artifact(&self) -> &Artifact {
        &self.artifact
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::with_capacity(self.payload.len() + 256);
        w.extend_from_slice(MAGIC);
        w.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        w.push(self.manifest.kind.code());
        w.push(backend_code(self.options.backend));
        w.extend_from_slice(&self.options.backend.delta().unwrap_or(0.0).to_le_bytes());
        w.push(self.options.instrumented as u8);
        w.extend_from_slice(&self.options.config.seed.to_le_bytes());
        w.extend_from_slice(&self.options.config.mem_budget.to_le_bytes());
        w.extend_from_slice(&Sha256::digest(&self.payload));
        let a = &self.manifest.accounting;
        for v in [a.n, a.k, a.u, a.stored_elements, a.element_bound, a.space_bytes] {
            w.extend_from_slice(&v.to_le_bytes());
        }
        w.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        w.extend_from_slice(&self.payload);
        if let Some((u, sets)) = self.artifact.set_tables() {
            w.push(TABLE_SETS);
            w.extend_from_slice(&u.to_le_bytes());
            w.extend_from_slice(&(sets.len() as u64).to_le_bytes());
            for s in sets {
                w.extend_from_slice(&(s.len() as u64).to_le_bytes());
                for v in s {
                    w.extend_from_slice(&v.to_le_bytes());
                }
            }
        } else if let Artifact::GappedString(g) = &self.artifact {
            w.push(TABLE_SA);
            let sa = g.suffix_array();
            w.extend_from_slice(&(sa.sa.len() as u64).to_le_bytes());
            for &p in &sa.sa {
                w.extend_from_slice(&p.to_le_bytes());
            }
        } else {
            w.push(TABLE_NONE);
        }
        let sum = Sha256::digest(&w);
        w.extend_from_slice(&sum);
        w
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 4 || &bytes[..8] != MAGIC {
            return Err(Error::Format("not an index file (bad magic)".into()));
        }
        let mut r = Reader { buf: bytes, pos: 8 };
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {}", version)));
        }
        if bytes.len() < 32 {
            return Err(Error::Format("truncated index file".into()));
        }
        let (body, sum) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != sum {
            return Err(Error::DigestMismatch);
        }
        r.buf = body;
        let kind = ArtifactKind::from_code(r.u8()?).ok_or_else(|| Error::Format("unknown index kind".into()))?;
        let backend_c = r.u8()?;
        let delta = r.f64()?;
        let backend = backend_from(backend_c, delta)?;
        let instrumented = r.u8()? != 0;
        let seed = r.u64()?;
        let mem_budget = r.u64()?;
        let digest: [u8; 32] = r.take(32)?.try_into().unwrap();
        let mut acc = [0u64; 6];
        for v in acc.iter_mut() {
            *v = r.u64()?;
        }
        let plen = r.u64()? as usize;
        let payload = r.take(plen)?.to_vec();
        if Sha256::digest(&payload).as_slice() != digest {
            return Err(Error::DigestMismatch);
        }
        let options = BuildOptions { backend, config: BackendConfig { seed, mem_budget }, instrumented };
        let cfg = &options.config;
        let artifact = match r.u8()? {
            TABLE_SETS if kind.takes_sets() => {
                let u = r.i64()?;
                let k = r.u64()? as usize;
                let mut raw = Vec::with_capacity(k.min(1 << 20));
                for _ in 0..k {
                    let m = r.u64()? as usize;
                    raw.push((0..m).map(|_| r.i64()).collect::<Result<Vec<_>>>()?);
                }
                Artifact::from_sets(kind, SetCollection::ingest(raw, u)?, backend, cfg)?
            }
            TABLE_SA if kind == ArtifactKind::GappedString => {
                let n = r.u64()? as usize;
                if n != payload.len() {
                    return Err(Error::Format("suffix array length does not match text".into()));
                }
                let sa = (0..n).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
                let text = Text::new(payload.clone())?;
                let lcp = build_suffix_array(&text).lcp;
                Artifact::GappedString(GappedStringIndex::from_parts(text, SuffixArray { sa, lcp }, backend, cfg)?)
            }
            TABLE_NONE if kind == ArtifactKind::Jumbled => Artifact::from_text(kind, &payload, backend, cfg)?,
            t => return Err(Error::Format(format!("table tag {} does not fit a {} index", t, kind))),
        };
        if r.pos != body.len() {
            return Err(Error::Format("trailing bytes after tables".into()));
        }
        let mut index = Self::assemble(payload, artifact, options);
        let stored = Accounting {
            n: acc[0],
            k: acc[1],
            u: acc[2],
            stored_elements: acc[3],
            element_bound: acc[4],
            space_bytes: acc[5],
        };
        let fresh = index.manifest.accounting;
        if (fresh.n, fresh.k, fresh.u, fresh.stored_elements) != (stored.n, stored.k, stored.u, stored.stored_elements) {
            return Err(Error::Verification("rebuilt index does not match the recorded accounting".into()));
        }
        index.manifest.accounting = stored;
        Ok(index)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| Error::Format("truncated index file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artifact::Mode;
    use crate::stats::QueryStats;

    fn sources() -> Vec<(ArtifactKind, &'static [u8])> {
        vec![
            (ArtifactKind::Ssi, b"10 3\n1 3 4\n3 6 8\n2 9\n"),
            (ArtifactKind::GappedSet, b"10 3\n1 3 4\n3 6 8\n2 9\n"),
            (ArtifactKind::SmallestShift, b"10 3\n1 3 4\n3 6 8\n2 9\n"),
            (ArtifactKind::GappedString, b"banana\n"),
            (ArtifactKind::Jumbled, b"acaacabd"),
        ]
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for backend in [BackendKind::LinearScan, BackendKind::FullTabulation, BackendKind::SmallUniverse { delta: 0.5 }] {
            for (kind, src) in sources() {
                let opts = BuildOptions { backend, instrumented: true, ..Default::default() };
                let idx = Index::build(kind, src.to_vec(), opts).unwrap();
                let bytes = idx.to_bytes();
                let back = Index::from_bytes(&bytes).unwrap();
                assert_eq!(back.to_bytes(), bytes, "{}", kind);
                assert_eq!(back.manifest(), idx.manifest());
            }
        }
    }

    #[test]
    fn loaded_index_answers_like_fresh_one() {
        let idx = Index::build(ArtifactKind::GappedString, b"banana".to_vec(), BuildOptions::default()).unwrap();
        let back = Index::from_bytes(&idx.to_bytes()).unwrap();
        for a in [idx.artifact(), back.artifact()] {
            let q = a.parse_query("an na 1 3", 1).unwrap();
            assert_eq!(a.execute(&q, Mode::Report, &mut QueryStats::default()).unwrap().to_string(), "2 3\n2 5\n4 5\n");
        }
        assert_eq!(idx.manifest().accounting.n, 6);
        assert_eq!(idx.manifest().accounting.stored_elements, 6 + 6 + 4);
        assert_eq!(idx.manifest().accounting.element_bound, 18);
    }

    #[test]
    fn corruption_is_detected() {
        let idx = Index::build(ArtifactKind::Ssi, b"10 2\n1 2\n3\n".to_vec(), BuildOptions::default()).unwrap();
        let bytes = idx.to_bytes();
        for pos in [8, 20, bytes.len() / 2, bytes.len() - 40, bytes.len() - 1] {
            let mut bad = bytes.clone();
            bad[pos] ^= 0x40;
            assert!(Index::from_bytes(&bad).is_err());
        }
        let mut bad = bytes.clone();
        bad[bytes.len() / 2] ^= 1;
        assert!(matches!(Index::from_bytes(&bad), Err(Error::DigestMismatch)));
        assert!(Index::from_bytes(&bytes[..bytes.len() - 5]).is_err());
        assert!(Index::from_bytes(b"nonsense").is_err());
    }

    #[test]
    fn build_rejects_bad_sources() {
        assert!(matches!(Index::build(ArtifactKind::Ssi, b"1099511627777 1\n1\n".to_vec(), BuildOptions::default()), Err(Error::UniverseTooLarge(_))));
        assert!(Index::build(ArtifactKind::GappedString, b"\n".to_vec(), BuildOptions::default()).is_err());
        assert!(Index::build(ArtifactKind::Ssi, b"10 2\n1\n".to_vec(), BuildOptions::default()).is_err());
    }
}
