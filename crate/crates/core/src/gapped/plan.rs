//! Covering a gap range `[α, β]` with exact point shifts and leveled
//! approximate queries, so that every gap in `[α, β]` is covered and no
//! approximate query is uncertain about a gap outside `[α, β]`.
//!
//! The forward pass grows a covered prefix `[α, α+Δ]`: phase 0 issues the
//! point shifts `α, α+1, α+2`; phase `l ≥ 1` issues up to three queries of
//! width `2^l`, the first centered at the largest multiple `κ·2^l` with
//! `κ·2^l − 2^(l−1) ≤ α+Δ`, the next two at `(κ+1)·2^l` and `(κ+2)·2^l`.
//! The pass stops as soon as `2Δ ≥ β − α`, tested after every single query.
//! The backward pass is the forward pass on `[−β, −α]`, negated.

use std::fmt;

use crate::error::{Error, Result};

/// Level-`l` query centered at `d = κ·2^l` (κ ≥ 1). Guaranteed YES when some
/// gap lies in `[d − 2^(l−1), d + 2^(l−1)]`, guaranteed NO when no gap lies
/// in `(d − 2^l, d + 2^l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ApproxQuery {
    pub level: u32,
    pub center: i64,
}

impl ApproxQuery {
    pub fn new(level: u32, center: i64) -> Result<Self> {
        if level == 0 || level > 62 || center <= 0 || center % (1i64 << level) != 0 {
            return Err(Error::MisalignedCenter { center, level });
        }
        Ok(ApproxQuery { level, center })
    }

    pub fn kappa(&self) -> i64 {
        self.center >> self.level
    }

    /// Closed interval of gaps the query is guaranteed to detect.
    pub fn covered(&self) -> (i64, i64) {
        let h = 1i64 << (self.level - 1);
        (self.center - h, self.center + h)
    }

    /// Closed integer form of the open interval `(d − 2^l, d + 2^l)`.
    pub fn uncertain(&self) -> (i64, i64) {
        let w = 1i64 << self.level;
        (self.center - w + 1, self.center + w - 1)
    }

    /// Shifts issued on the level's quotient sets.
    pub fn quotient_shifts(&self) -> [i64; 3] {
        let k = self.kappa();
        [2 * k - 1, 2 * k, 2 * k + 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStep {
    /// Exact shift query at phase 0.
    Point(i64),
    Approx(ApproxQuery),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedQuery {
    pub phase: u32,
    pub step: PlanStep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPlan {
    pub alpha: i64,
    pub beta: i64,
    pub forward: Vec<PlannedQuery>,
    pub backward: Vec<PlannedQuery>,
}

impl CoverPlan {
    pub fn steps(&self) -> impl Iterator<Item = &PlannedQuery> {
        self.forward.iter().chain(&self.backward)
    }

    pub fn point_shifts(&self) -> Vec<i64> {
        self.steps()
            .filter_map(|q| match q.step {
                PlanStep::Point(s) => Some(s),
                PlanStep::Approx(_) => None,
            })
            .collect()
    }

    pub fn approx(&self) -> Vec<ApproxQuery> {
        self.steps()
            .filter_map(|q| match q.step {
                PlanStep::Approx(a) => Some(a),
                PlanStep::Point(_) => None,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.forward.len() + self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn phases_in(steps: &[PlannedQuery]) -> u32 {
        steps.last().map_or(0, |q| q.phase + 1)
    }

    pub fn forward_phases(&self) -> u32 {
        Self::phases_in(&self.forward)
    }

    pub fn backward_phases(&self) -> u32 {
        Self::phases_in(&self.backward)
    }

    /// Shifted-set-intersection calls needed to execute the plan: one per
    /// point shift, three per approximate query.
    pub fn base_query_count(&self) -> usize {
        Self::base_queries(&self.forward) + Self::base_queries(&self.backward)
    }

    fn base_queries(steps: &[PlannedQuery]) -> usize {
        steps.iter().map(|q| if matches!(q.step, PlanStep::Point(_)) { 1 } else { 3 }).sum()
    }
}

impl fmt::Display for CoverPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "plan [{}, {}]", self.alpha, self.beta)?;
        for (dir, steps) in [("forward", &self.forward), ("backward", &self.backward)] {
            for q in steps {
                match q.step {
                    PlanStep::Point(s) => writeln!(f, "{} phase={} point {}", dir, q.phase, s)?,
                    PlanStep::Approx(a) => {
                        let (clo, chi) = a.covered();
                        let (ulo, uhi) = a.uncertain();
                        writeln!(
                            f,
                            "{} phase={} approx level={} center={} covers=[{}, {}] uncertain=[{}, {}]",
                            dir, q.phase, a.level, a.center, clo, chi, ulo, uhi
                        )?
                    }
                }
            }
        }
        Ok(())
    }
}

/// Forward pass over `[lo, hi]`; centers may be nonpositive when called on a
/// reflected interval, so raw `(level, center)` pairs are returned.
fn plan_direction(lo: i64, hi: i64) -> Vec<(u32, Option<u32>, i64)> {
    let span = hi - lo;
    let done = |covered_to: i64| 2 * (covered_to - lo) >= span;
    let mut steps = Vec::new();
    let mut covered_to = lo;
    for p in lo..=lo + 2 {
        steps.push((0, None, p));
        covered_to = p;
        if done(covered_to) {
            return steps;
        }
    }
    let mut level = 1u32;
    loop {
        let w = 1i64 << level;
        let h = w / 2;
        assert!(covered_to - lo >= 2 * w - 2, "entered phase {} with Δ = {}", level, covered_to - lo);
        let kappa = (covered_to + h).div_euclid(w);
        for t in 0..3 {
            let center = (kappa + t) * w;
            steps.push((level, Some(level), center));
            covered_to = center + h;
            if done(covered_to) {
                return steps;
            }
        }
        level += 1;
    }
}

/// Builds the covering plan for `0 ≤ α ≤ β`.
pub fn plan_cover(alpha: i64, beta: i64) -> Result<CoverPlan> {
    if alpha < 0 || alpha > beta {
        return Err(Error::InvalidRange { lo: alpha, hi: beta, len: 0 });
    }
    let convert = |raw: Vec<(u32, Option<u32>, i64)>, sign: i64| -> Vec<PlannedQuery> {
        raw.into_iter()
            .map(|(phase, level, x)| PlannedQuery {
                phase,
                step: match level {
                    None => PlanStep::Point(sign * x),
                    Some(l) => PlanStep::Approx(ApproxQuery::new(l, sign * x).expect("planner centers are aligned and positive")),
                },
            })
            .collect()
    };
    Ok(CoverPlan {
        alpha,
        beta,
        forward: convert(plan_direction(alpha, beta), 1),
        backward: convert(plan_direction(-beta, -alpha), -1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::ceil_log2;

    fn check_invariants(plan: &CoverPlan) {
        let (a, b) = (plan.alpha, plan.beta);
        let width = (b - a + 1) as usize;
        let mut covered = vec![false; width];
        let mut mark = |lo: i64, hi: i64| {
            for x in lo.max(a)..=hi.min(b) {
                covered[(x - a) as usize] = true;
            }
        };
        for s in plan.point_shifts() {
            assert!(a <= s && s <= b, "point {} outside [{}, {}]", s, a, b);
            mark(s, s);
        }
        for q in plan.approx() {
            let (lo, hi) = q.covered();
            mark(lo, hi);
            let (ulo, uhi) = q.uncertain();
            assert!(a <= ulo && uhi <= b, "uncertain [{}, {}] escapes [{}, {}]", ulo, uhi, a, b);
        }
        assert!(covered.iter().all(|&c| c), "[{}, {}] not covered", a, b);
        let bound = ceil_log2((b - a + 2) as usize) as usize;
        for dir in [&plan.forward, &plan.backward] {
            let approx = dir.iter().filter(|q| matches!(q.step, PlanStep::Approx(_))).count();
            assert!(approx <= 3 * (bound + 1));
            let phases = dir.last().unwrap().phase as usize + 1;
            assert!(phases <= bound.max(1), "[{}, {}]: {} phases", a, b, phases);
            // at most three queries per phase
            for p in 0..phases as u32 {
                assert!(dir.iter().filter(|q| q.phase == p).count() <= 3);
            }
            assert!(CoverPlan::base_queries(dir) <= 9 * (bound + 1) + 6);
        }
    }

    #[test]
    fn single_point() {
        let plan = plan_cover(7, 7).unwrap();
        assert_eq!(plan.point_shifts(), vec![7, 7]);
        assert!(plan.approx().is_empty());
        assert_eq!(plan.forward.len(), 1);
    }

    #[test]
    fn ten_to_twenty() {
        let plan = plan_cover(10, 20).unwrap();
        let fwd_points: Vec<i64> = plan
            .forward
            .iter()
            .filter_map(|q| if let PlanStep::Point(s) = q.step { Some(s) } else { None })
            .collect();
        assert_eq!(fwd_points, vec![10, 11, 12]);
        let fwd_centers: Vec<(u32, i64)> = plan
            .forward
            .iter()
            .filter_map(|q| if let PlanStep::Approx(a) = q.step { Some((a.level, a.center)) } else { None })
            .collect();
        // Δ reaches 5 after center 14, so the phase stops there.
        assert_eq!(fwd_centers, vec![(1, 12), (1, 14)]);
        let bwd: Vec<PlanStep> = plan.backward.iter().map(|q| q.step).collect();
        assert_eq!(
            bwd,
            vec![
                PlanStep::Point(20),
                PlanStep::Point(19),
                PlanStep::Point(18),
                PlanStep::Approx(ApproxQuery { level: 1, center: 18 }),
                PlanStep::Approx(ApproxQuery { level: 1, center: 16 }),
            ]
        );
        check_invariants(&plan);
    }

    #[test]
    fn exhaustive_up_to_256() {
        for a in 0..=256 {
            for b in a..=256 {
                check_invariants(&plan_cover(a, b).unwrap());
            }
        }
    }

    #[test]
    fn wide_ranges_reach_higher_levels() {
        let plan = plan_cover(3, 100_000).unwrap();
        check_invariants(&plan);
        assert!(plan.approx().iter().any(|q| q.level >= 10));
    }

    #[test]
    fn rejects_bad_ranges_and_centers() {
        assert!(plan_cover(5, 4).is_err());
        assert!(plan_cover(-1, 4).is_err());
        assert!(ApproxQuery::new(2, 6).is_err());
        assert!(ApproxQuery::new(2, 0).is_err());
        assert!(ApproxQuery::new(0, 4).is_err());
        assert_eq!(ApproxQuery::new(2, 8).unwrap().quotient_shifts(), [3, 4, 5]);
    }
}
