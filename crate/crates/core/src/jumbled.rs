//! Jumbled (histogram) indexing: find every substring whose letter counts
//! equal a query histogram.
//!
//! With `pre(p)` the histogram of the length-`p` prefix and `suf(q)` that of
//! the suffix starting at `q`, `S[i..j]` has histogram `P` exactly when
//! `pre(i−1) + suf(j+1) = h(S) − P`. Histograms are packed into scalars, so
//! the question becomes a 3SUM query on the merged prefix/suffix set.

use std::collections::HashMap;

use crate::error::{bits_needed, Error, Result};
use crate::reporting::ThreeSumReporter;
use crate::ssi::{merge_two_set_3sum, BackendConfig, BackendKind};
use crate::stats::QueryStats;

pub const MAX_ALPHABET: usize = 8;
const ENCODE_LIMIT_BITS: u32 = 120;
const MERGED_LIMIT_BITS: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<u8>,
    slot: [u8; 256],
}

impl Alphabet {
    pub fn new(letters: &[u8]) -> Result<Self> {
        let mut letters = letters.to_vec();
        letters.sort_unstable();
        letters.dedup();
        if letters.len() > MAX_ALPHABET || letters.is_empty() {
            return Err(Error::AlphabetTooLarge(letters.len()));
        }
        let mut slot = [u8::MAX; 256];
        for (k, &c) in letters.iter().enumerate() {
            slot[c as usize] = k as u8;
        }
        Ok(Alphabet { letters, slot })
    }

    /// Letters of `s` in sorted order.
    pub fn of_text(s: &[u8]) -> Result<Self> {
        Self::new(s)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, c: u8) -> Result<usize> {
        match self.slot[c as usize] {
            u8::MAX => Err(Error::ForeignLetter(c as char)),
            k => Ok(k as usize),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Histogram(pub Vec<u64>);

impl Histogram {
    pub fn zero(dim: usize) -> Self {
        Histogram(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> u64 {
        self.0.iter().sum()
    }

    /// `self − other`, or `None` when a coordinate would go negative.
    pub fn checked_sub(&self, other: &Histogram) -> Option<Histogram> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Histogram)
    }
}

pub fn histogram(s: &[u8], alphabet: &Alphabet) -> Result<Histogram> {
    let mut h = Histogram::zero(alphabet.len());
    for &c in s {
        h.0[alphabet.index_of(c)?] += 1;
    }
    Ok(h)
}

fn check_encoding(base: u64, dim: usize) -> Result<()> {
    let top = (base as u128).checked_pow(dim as u32);
    let required = match top {
        Some(t) => bits_needed(t - 1),
        None => (dim as f64 * (base as f64).log2()).ceil() as u32,
    };
    if required > ENCODE_LIMIT_BITS {
        return Err(Error::Overflow { what: "histogram encoding", required_bits: required, limit_bits: ENCODE_LIMIT_BITS });
    }
    Ok(())
}

/// `v₁ + v₂·u + v₃·u² + …`.
pub fn encode_vector(v: &Histogram, base: u64) -> Result<u128> {
    check_encoding(base, v.dim())?;
    if let Some(&c) = v.0.iter().find(|&&c| c >= base) {
        return Err(Error::InvalidRange { lo: c as i64, hi: base as i64 - 1, len: v.dim() });
    }
    Ok(v.0.iter().rev().fold(0u128, |acc, &c| acc * base as u128 + c as u128))
}

pub fn decode_vector(mut x: u128, base: u64, dim: usize) -> Histogram {
    let mut v = Vec::with_capacity(dim);
    for _ in 0..dim {
        v.push((x % base as u128) as u64);
        x /= base as u128;
    }
    Histogram(v)
}

#[derive(Debug, Clone)]
pub struct JumbledIndex {
    alphabet: Alphabet,
    text: Vec<u8>,
    n: usize,
    total: Histogram,
    base: u64,
    /// Encoded histograms are stored `+ 1` so every element is positive.
    prefix_codes: Vec<i64>,
    suffix_codes: Vec<i64>,
    prefix_of: HashMap<i64, usize, ahash::RandomState>,
    suffix_of: HashMap<i64, usize, ahash::RandomState>,
    u_prime: i64,
    query_offset: i64,
    reporter: ThreeSumReporter,
}

impl JumbledIndex {
    pub fn build(s: &[u8], alphabet: Alphabet, kind: BackendKind) -> Result<Self> {
        Self::build_with(s, alphabet, kind, &BackendConfig::default())
    }

    pub fn build_with(s: &[u8], alphabet: Alphabet, kind: BackendKind, cfg: &BackendConfig) -> Result<Self> {
        let n = s.len();
        let sigma = alphabet.len();
        let base = 2 * n as u64 + 1;
        check_encoding(base, sigma)?;
        // merged universe is 4u′ with u′ = base^σ
        let u_prime = (base as u128).pow(sigma as u32);
        let merged = bits_needed(4 * u_prime);
        if merged > MERGED_LIMIT_BITS {
            return Err(Error::Overflow { what: "jumbled 3SUM universe", required_bits: merged, limit_bits: MERGED_LIMIT_BITS });
        }
        let mut h = Histogram::zero(sigma);
        let mut prefixes = vec![h.clone()];
        for &c in s {
            h.0[alphabet.index_of(c)?] += 1;
            prefixes.push(h.clone());
        }
        let total = h;
        let suffixes: Vec<Histogram> = (1..=n + 1).map(|q| total.checked_sub(&prefixes[q - 1]).unwrap()).collect();
        let code = |v: &Histogram| encode_vector(v, base).map(|x| x as i64 + 1);
        let prefix_codes = prefixes.iter().map(code).collect::<Result<Vec<_>>>()?;
        let suffix_codes = suffixes.iter().map(code).collect::<Result<Vec<_>>>()?;
        let hasher = cfg.hasher();
        let mut prefix_of = HashMap::with_capacity_and_hasher(n + 1, hasher.clone());
        prefix_of.extend(prefix_codes.iter().enumerate().map(|(p, &x)| (x, p)));
        let mut suffix_of = HashMap::with_capacity_and_hasher(n + 1, hasher);
        suffix_of.extend(suffix_codes.iter().enumerate().map(|(q, &x)| (x, q + 1)));
        assert_eq!(prefix_of.len(), n + 1, "prefix histograms must be distinct");
        assert_eq!(suffix_of.len(), n + 1, "suffix histograms must be distinct");
        let u_prime = u_prime as i64;
        let one_set = merge_two_set_3sum(&prefix_codes, &suffix_codes, u_prime)?;
        let reporter = ThreeSumReporter::build_with(&one_set.elements, kind, cfg)?;
        Ok(JumbledIndex {
            alphabet,
            text: s.to_vec(),
            n,
            total,
            base,
            prefix_codes,
            suffix_codes,
            prefix_of,
            suffix_of,
            u_prime,
            query_offset: one_set.query_offset,
            reporter,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn total(&self) -> &Histogram {
        &self.total
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn prefix_codes(&self) -> &[i64] {
        &self.prefix_codes
    }

    pub fn suffix_codes(&self) -> &[i64] {
        &self.suffix_codes
    }

    /// Prefix length whose histogram encodes to `x`.
    pub fn decode_prefix(&self, x: i64) -> Option<usize> {
        self.prefix_of.get(&x).copied()
    }

    /// 1-based start of the suffix whose histogram encodes to `x`.
    pub fn decode_suffix(&self, x: i64) -> Option<usize> {
        self.suffix_of.get(&x).copied()
    }

    pub fn reporter(&self) -> &ThreeSumReporter {
        &self.reporter
    }

    /// Merged-set target for `P`, or `None` when `P` cannot fit in `S`.
    fn target(&self, p: &Histogram) -> Result<Option<i64>> {
        if p.dim() != self.alphabet.len() {
            return Err(Error::Dimension { got: p.dim(), expected: self.alphabet.len() });
        }
        if p.norm() == 0 {
            return Ok(None);
        }
        Ok(self
            .total
            .checked_sub(p)
            .map(|c| encode_vector(&c, self.base).expect("sub-histogram of h(S) fits") as i64 + 2 + self.query_offset))
    }

    /// Splits a merged-set pair into `(prefix length, suffix start)`.
    fn decode_pair(&self, x: i64, y: i64) -> (usize, usize) {
        let (a, b) = if x <= self.u_prime { (x, y) } else { (y, x) };
        let p = self.decode_prefix(a).expect("prefix code");
        let q = self.decode_suffix(b - self.query_offset).expect("suffix code");
        (p, q)
    }

    pub fn exists(&self, p: &Histogram) -> Result<Option<(usize, usize)>> {
        let Some(c) = self.target(p)? else {
            return Ok(None);
        };
        Ok(self.reporter.exists(c).map(|(x, y)| {
            let (pre, suf) = self.decode_pair(x, y);
            (pre + 1, suf - 1)
        }))
    }

    /// All `(i, j)` with `h(S[i..j]) = P`, sorted.
    pub fn report(&self, p: &Histogram) -> Result<Vec<(usize, usize)>> {
        self.report_counted(p, &mut QueryStats::default())
    }

    pub fn report_counted(&self, p: &Histogram, stats: &mut QueryStats) -> Result<Vec<(usize, usize)>> {
        let Some(c) = self.target(p)? else {
            return Ok(Vec::new());
        };
        let m = p.norm() as usize;
        let mut out: Vec<(usize, usize)> = self
            .reporter
            .report_counted(c, stats)
            .into_iter()
            .map(|(x, y)| {
                let (pre, suf) = self.decode_pair(x, y);
                debug_assert_eq!(pre + m + (self.n + 1 - suf), self.n);
                (pre + 1, suf - 1)
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// Sliding-window oracle over all substrings of length `‖P‖`.
pub fn brute_force_jumbled(s: &[u8], alphabet: &Alphabet, p: &Histogram) -> Result<Vec<(usize, usize)>> {
    let m = p.norm() as usize;
    if m == 0 || m > s.len() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut h = histogram(&s[..m], alphabet)?;
    for i in 0..=s.len() - m {
        if i > 0 {
            h.0[alphabet.index_of(s[i - 1])?] -= 1;
            h.0[alphabet.index_of(s[i + m - 1])?] += 1;
        }
        if &h == p {
            out.push((i + 1, i + m));
        }
    }
    Ok(out)
}
