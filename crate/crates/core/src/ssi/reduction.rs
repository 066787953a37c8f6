//! Two-way reductions between Shifted Set Intersection and 3SUM Indexing.

use super::{Dict, ShiftCertificate, ShiftQuery};
use crate::error::{bits_needed, Error, Result};
use crate::set::SetCollection;

/// Maps 3SUM queries on `A` to Shifted Set Intersection queries on the
/// collection `{A, offset − A}`.
///
/// The negated copy is stored as `offset − a` with `offset = max(A) + 1` so
/// it stays inside a positive universe; the offset is folded into the
/// query shift and undone when decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThreeSumQueryMap {
    offset: i64,
}

impl ThreeSumQueryMap {
    /// Query `c` becomes `(S_2, S_1, c − offset)`: `(offset − a_i) + c − offset = a_j`.
    pub fn query(&self, c: i64) -> ShiftQuery {
        ShiftQuery::new(1, 0, c - self.offset)
    }

    /// Recovers the 3SUM pair `(a_i, a_j)` with `a_i + a_j = c`.
    pub fn decode(&self, cert: ShiftCertificate) -> (i64, i64) {
        (self.offset - cert.a, cert.b)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }
}

/// Builds `S_1 = A`, `S_2 = {−a}` (offset into the positive universe).
pub fn reduce_3sum_to_ssi(a: &[i64]) -> Result<(SetCollection, ThreeSumQueryMap)> {
    if a.is_empty() {
        return Err(Error::EmptySet { set: 0 });
    }
    let max = *a.iter().max().unwrap();
    if let Some(&bad) = a.iter().find(|&&x| x < 1) {
        return Err(Error::OutOfUniverse { set: 0, value: bad, universe: max });
    }
    let offset = max.checked_add(1).ok_or(Error::Overflow { what: "3SUM offset", required_bits: 64, limit_bits: 63 })?;
    let negated: Vec<i64> = a.iter().map(|&x| offset - x).collect();
    let c = SetCollection::derived(vec![a.to_vec(), negated], max)?;
    Ok((c, ThreeSumQueryMap { offset }))
}

/// Two-set 3SUM Indexing instance: is there `(a, b) ∈ A × B` with `a + b = c`?
#[derive(Debug, Clone)]
pub struct ThreeSumInstance {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub u_prime: i64,
    b_dict: Dict,
}

impl ThreeSumInstance {
    pub fn new(mut a: Vec<i64>, mut b: Vec<i64>, u_prime: i64) -> Self {
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        let mut b_dict = Dict::with_capacity_and_hasher(b.len(), super::BackendConfig::default().hasher());
        b_dict.extend(b.iter().copied());
        ThreeSumInstance { a, b, u_prime, b_dict }
    }

    /// Pair with the smallest `a`, found by hashing.
    pub fn find(&self, c: i64) -> Option<(i64, i64)> {
        self.a.iter().find(|&&x| self.b_dict.contains(&(c - x))).map(|&x| (x, c - x))
    }

    pub fn brute_force(&self, c: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for &x in &self.a {
            for &y in &self.b {
                if x + y == c {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

/// Encoding used by [`reduce_ssi_to_3sum`]:
/// `A = {e + j(k+1)·2u | e ∈ S_j}`, `B = {−e + i·2u | e ∈ S_i}` with 1-based
/// set numbers, and query `(i, j, s) ↦ s + (j(k+1) + i)·2u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SsiToThreeSumMap {
    pub k: i64,
    pub u: i64,
}

impl SsiToThreeSumMap {
    fn two_u(&self) -> i64 {
        2 * self.u
    }

    pub fn encode_query(&self, q: ShiftQuery) -> i64 {
        let (i, j) = (q.i as i64 + 1, q.j as i64 + 1);
        q.s + (j * (self.k + 1) + i) * self.two_u()
    }

    /// Element `e` of set `j` (0-based) as it appears in `A`.
    pub fn encode_a(&self, j: usize, e: i64) -> i64 {
        e + (j as i64 + 1) * (self.k + 1) * self.two_u()
    }

    /// Element `e` of set `i` (0-based) as it appears in `B`.
    pub fn encode_b(&self, i: usize, e: i64) -> i64 {
        -e + (i as i64 + 1) * self.two_u()
    }

    pub fn decode_a(&self, x: i64) -> (usize, i64) {
        let block = (self.k + 1) * self.two_u();
        ((x / block - 1) as usize, x % block)
    }

    pub fn decode_b(&self, y: i64) -> (usize, i64) {
        let i = (y + self.two_u() - 1) / self.two_u();
        ((i - 1) as usize, i * self.two_u() - y)
    }

    /// Turns a 3SUM witness `(x ∈ A, y ∈ B)` back into `(i, j, certificate)`.
    pub fn decode_certificate(&self, x: i64, y: i64) -> (usize, usize, ShiftCertificate) {
        let (j, b) = self.decode_a(x);
        let (i, a) = self.decode_b(y);
        (i, j, ShiftCertificate { a, b })
    }
}

pub fn reduce_ssi_to_3sum(c: &SetCollection) -> Result<(ThreeSumInstance, SsiToThreeSumMap)> {
    let k = c.k() as i128;
    let u = c.universe().get() as i128;
    // Largest value anywhere is below (k+1)²·2u.
    let bound = (k + 1) * (k + 1) * 2 * u;
    if bound > i64::MAX as i128 {
        return Err(Error::Overflow { what: "SSI to 3SUM universe", required_bits: bits_needed(bound as u128), limit_bits: 63 });
    }
    let map = SsiToThreeSumMap { k: k as i64, u: u as i64 };
    let mut a = Vec::with_capacity(c.total_size());
    let mut b = Vec::with_capacity(c.total_size());
    for (idx, s) in c.sets().iter().enumerate() {
        for &e in s.elements() {
            a.push(map.encode_a(idx, e));
            b.push(map.encode_b(idx, e));
        }
    }
    Ok((ThreeSumInstance::new(a, b, bound as i64), map))
}

/// One-set 3SUM instance: is there `x, y ∈ A′` (possibly equal) with `x + y = c`?
#[derive(Debug, Clone)]
pub struct OneSetThreeSum {
    pub elements: Vec<i64>,
    /// Shift applied to two-set queries: query `c` on `(A, B)` becomes `c + query_offset`.
    pub query_offset: i64,
    dict: Dict,
}

impl OneSetThreeSum {
    pub fn find(&self, c: i64) -> Option<(i64, i64)> {
        self.elements.iter().find(|&&x| self.dict.contains(&(c - x))).map(|&x| (x, c - x))
    }

    pub fn brute_force(&self, c: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for (p, &x) in self.elements.iter().enumerate() {
            for &y in &self.elements[p..] {
                if x + y == c {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

/// `A′ = A ∪ {b + 2u′ | b ∈ B}`; query `c` on `(A, B)` is query `c + 2u′` on `A′`.
pub fn merge_two_set_3sum(a: &[i64], b: &[i64], u_prime: i64) -> Result<OneSetThreeSum> {
    if let Some(&bad) = a.iter().chain(b).find(|&&x| x < 1 || x > u_prime) {
        return Err(Error::OutOfUniverse { set: 0, value: bad, universe: u_prime });
    }
    let bound = 4 * u_prime as i128;
    if bound > i64::MAX as i128 {
        return Err(Error::Overflow { what: "merged 3SUM universe", required_bits: bits_needed(bound as u128), limit_bits: 63 });
    }
    let mut elements: Vec<i64> = a.iter().copied().chain(b.iter().map(|&y| y + 2 * u_prime)).collect();
    elements.sort_unstable();
    elements.dedup();
    let mut dict = Dict::with_capacity_and_hasher(elements.len(), super::BackendConfig::default().hasher());
    dict.extend(elements.iter().copied());
    Ok(OneSetThreeSum { elements, query_offset: 2 * u_prime, dict })
}
