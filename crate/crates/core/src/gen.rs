//! Seeded instance and query generators. The same seed always produces the
//! same bytes.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artifact::{Artifact, ArtifactKind};
use crate::error::Result;
use crate::jumbled::histogram;
use crate::set::SetCollection;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `sizes.len()` sets of distinct values from `[1, u]`, set `i` having
/// exactly `sizes[i]` elements.
pub fn collection_with_sizes(rng: &mut ChaCha8Rng, sizes: &[usize], u: i64) -> Result<SetCollection> {
    let raw = sizes
        .iter()
        .map(|&m| {
            let m = m.clamp(1, u as usize);
            let mut v: Vec<i64> = sample(rng, u as usize, m).into_iter().map(|x| x as i64 + 1).collect();
            v.sort_unstable();
            v
        })
        .collect();
    SetCollection::ingest(raw, u)
}

/// `k` sets with sizes uniform in `[1, max_size]`.
pub fn random_collection(rng: &mut ChaCha8Rng, k: usize, max_size: usize, u: i64) -> Result<SetCollection> {
    let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=max_size.max(1))).collect();
    collection_with_sizes(rng, &sizes, u)
}

/// Lowercase text over the first `sigma` letters.
pub fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u8) -> Vec<u8> {
    let sigma = sigma.clamp(1, 26);
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

/// A shift realised by some pair of `(a, b) ∈ A × B`.
fn realised_gap(rng: &mut ChaCha8Rng, a: &[i64], b: &[i64]) -> i64 {
    b[rng.gen_range(0..b.len())] - a[rng.gen_range(0..a.len())]
}

fn pattern(rng: &mut ChaCha8Rng, text: &[u8], letters: &[u8]) -> Vec<u8> {
    let len = rng.gen_range(1..=3.min(text.len()));
    if rng.gen_bool(0.8) {
        let at = rng.gen_range(0..=text.len() - len);
        text[at..at + len].to_vec()
    } else {
        (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect()
    }
}

/// One query line (1-based indices) suited to `artifact`; about half of them
/// are built to have a hit.
pub fn random_query(rng: &mut ChaCha8Rng, artifact: &Artifact) -> String {
    match artifact {
        Artifact::Ssi(_) | Artifact::GappedSet(_) | Artifact::SmallestShift(_) => {
            let (u, sets) = artifact.set_tables().expect("set kind");
            let (i, j) = (rng.gen_range(0..sets.len()), rng.gen_range(0..sets.len()));
            match artifact.kind() {
                ArtifactKind::Ssi => {
                    let s = if rng.gen_bool(0.5) { realised_gap(rng, sets[i], sets[j]) } else { rng.gen_range(-(u - 1)..=u - 1) };
                    format!("{} {} {}", i + 1, j + 1, s)
                }
                ArtifactKind::GappedSet => {
                    let alpha = if rng.gen_bool(0.5) {
                        realised_gap(rng, sets[i], sets[j]).max(0) - rng.gen_range(0..4)
                    } else {
                        rng.gen_range(0..u)
                    }
                    .max(0);
                    let beta = alpha + rng.gen_range(0..=(u / 4).max(1));
                    format!("{} {} {} {}", i + 1, j + 1, alpha, beta)
                }
                _ => format!("{} {}", i + 1, j + 1),
            }
        }
        Artifact::GappedString(g) => {
            let text = g.text().as_bytes();
            let mut letters = text.to_vec();
            letters.sort_unstable();
            letters.dedup();
            let n = text.len() as i64;
            let (p1, p2) = (pattern(rng, text, &letters), pattern(rng, text, &letters));
            let alpha = rng.gen_range(0..n);
            let beta = alpha + rng.gen_range(0..=n);
            format!("{} {} {} {}", String::from_utf8_lossy(&p1), String::from_utf8_lossy(&p2), alpha, beta)
        }
        Artifact::Jumbled(jm) => {
            let counts = jm.total().0.clone();
            let n = jm.len();
            let text = jm.text();
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(i..n.min(i + 16));
            let mut h = histogram(&text[i..=j], jm.alphabet()).expect("text letters").0;
            if rng.gen_bool(0.2) {
                let c = rng.gen_range(0..h.len());
                h[c] = (h[c] + 1).min(counts[c] + 1);
            }
            h.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssi::{BackendConfig, BackendKind};

    #[test]
    fn generators_are_reproducible() {
        let a = random_collection(&mut rng(7), 5, 20, 100).unwrap().to_text();
        let b = random_collection(&mut rng(7), 5, 20, 100).unwrap().to_text();
        assert_eq!(a, b);
        assert_eq!(random_text(&mut rng(3), 50, 4), random_text(&mut rng(3), 50, 4));
        let c = collection_with_sizes(&mut rng(1), &[10, 3], 50).unwrap();
        assert_eq!(c.sets()[0].len(), 10);
        assert_eq!(c.sets()[1].len(), 3);
    }

    #[test]
    fn queries_parse_for_every_kind() {
        let cfg = BackendConfig::default();
        let c = random_collection(&mut rng(2), 4, 10, 60).unwrap();
        let text = random_text(&mut rng(2), 40, 3);
        let arts = [
            Artifact::from_sets(ArtifactKind::Ssi, c.clone(), BackendKind::LinearScan, &cfg).unwrap(),
            Artifact::from_sets(ArtifactKind::GappedSet, c.clone(), BackendKind::LinearScan, &cfg).unwrap(),
            Artifact::from_sets(ArtifactKind::SmallestShift, c, BackendKind::LinearScan, &cfg).unwrap(),
            Artifact::from_text(ArtifactKind::GappedString, &text, BackendKind::LinearScan, &cfg).unwrap(),
            Artifact::from_text(ArtifactKind::Jumbled, &text, BackendKind::LinearScan, &cfg).unwrap(),
        ];
        let mut r = rng(9);
        for a in &arts {
            for n in 0..50 {
                let line = random_query(&mut r, a);
                a.parse_query(&line, n + 1).unwrap();
            }
        }
    }
}
