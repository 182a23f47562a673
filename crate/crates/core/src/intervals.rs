//! Finite unions of closed intervals on the real line.
//!
//! An [`IntervalSet`] is always kept normalized: intervals are sorted by their
//! lower end, pairwise disjoint, and separated by gaps of positive length.
//! Intervals closer than the merge tolerance are fused. Degenerate intervals
//! `[a, a]` are allowed and survive unless absorbed by a neighbour.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Default fusion distance for normalization.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Builds `[min(a,b), max(a,b)]`.
    pub fn new(a: f64, b: f64) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn point(a: f64) -> Self {
        Interval { lo: a, hi: a }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.hi == self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    /// Distance from `x` to the interval (zero inside).
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        IntervalSet {
            intervals: vec![Interval::new(lo, hi)],
        }
    }

    /// Normalizes an arbitrary collection with the default merge tolerance.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> Self {
        Self::from_intervals_with_tol(items, MERGE_TOL)
    }

    /// Normalizes, fusing intervals whose separation is at most `tol`.
    pub fn from_intervals_with_tol<I: IntoIterator<Item = Interval>>(items: I, tol: f64) -> Self {
        let mut v: Vec<Interval> = items
            .into_iter()
            .filter(|iv| iv.lo.is_finite() && iv.hi.is_finite())
            .map(|iv| Interval::new(iv.lo, iv.hi))
            .collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi + tol => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.intervals.first().map(|iv| iv.lo)
    }

    pub fn max(&self) -> Option<f64> {
        self.intervals.last().map(|iv| iv.hi)
    }

    /// Total length.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.intervals.iter().chain(other.intervals.iter()).copied())
    }

    pub fn union_with_tol(&self, other: &IntervalSet, tol: f64) -> IntervalSet {
        IntervalSet::from_intervals_with_tol(
            self.intervals.iter().chain(other.intervals.iter()).copied(),
            tol,
        )
    }

    /// Re-normalizes with a coarser fusion distance.
    pub fn merged(&self, tol: f64) -> IntervalSet {
        IntervalSet::from_intervals_with_tol(self.intervals.iter().copied(), tol)
    }

    pub fn intersect_interval(&self, window: &Interval) -> IntervalSet {
        IntervalSet {
            intervals: self
                .intervals
                .iter()
                .filter_map(|iv| iv.intersect(window))
                .collect(),
        }
    }

    /// Closure of `window \ self`. Pieces no longer than `min_len` are dropped.
    pub fn complement_within(&self, window: &Interval, min_len: f64) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = window.lo;
        for iv in self.intersect_interval(window).iter() {
            if iv.lo - cursor > min_len {
                out.push(Interval::new(cursor, iv.lo));
            }
            cursor = cursor.max(iv.hi);
        }
        if window.hi - cursor > min_len {
            out.push(Interval::new(cursor, window.hi));
        }
        IntervalSet { intervals: out }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x, tol))
    }

    /// True when every interval of `self` lies inside one interval of `other`.
    pub fn is_subset_of(&self, other: &IntervalSet, tol: f64) -> bool {
        self.intervals.iter().all(|iv| {
            other
                .intervals
                .iter()
                .any(|o| iv.lo >= o.lo - tol && iv.hi <= o.hi + tol)
        })
    }

    /// Distance from `x` to the set; `+inf` for the empty set.
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| iv.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Hausdorff distance between the two compact sets.
    pub fn hausdorff(&self, other: &IntervalSet) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            _ => directed_hausdorff(self, other).max(directed_hausdorff(other, self)),
        }
    }
}

/// `sup_{x in a} dist(x, b)`. On each interval of `a` the distance function is
/// piecewise linear; its maxima sit at interval ends or at midpoints of gaps of `b`.
fn directed_hausdorff(a: &IntervalSet, b: &IntervalSet) -> f64 {
    let mut worst: f64 = 0.0;
    let gap_mids: Vec<f64> = b
        .intervals
        .windows(2)
        .map(|w| 0.5 * (w[0].hi + w[1].lo))
        .collect();
    for iv in &a.intervals {
        worst = worst.max(b.distance(iv.lo)).max(b.distance(iv.hi));
        for &m in gap_mids.iter().filter(|&&m| m > iv.lo && m < iv.hi) {
            worst = worst.max(b.distance(m));
        }
    }
    worst
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalSet::from_intervals(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[(f64, f64)]) -> IntervalSet {
        v.iter().map(|&(a, b)| Interval::new(a, b)).collect()
    }

    #[test]
    fn touching_and_overlapping_merge() {
        let s = set(&[(2.0, 3.0), (0.0, 1.0), (1.0, 1.5), (2.5, 4.0)]);
        assert_eq!(s, set(&[(0.0, 1.5), (2.0, 4.0)]));
    }

    #[test]
    fn degenerate_point_absorbed_by_neighbour() {
        let s = set(&[(-1.0, -2.0 / 3.0), (-1.0 / 3.0, -1.0 / 3.0), (-1.0 / 3.0, 1.0 / 3.0)]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.intervals()[1], Interval::new(-1.0 / 3.0, 1.0 / 3.0));
    }

    #[test]
    fn isolated_point_survives() {
        let s = set(&[(0.0, 1.0), (2.0, 2.0)]);
        assert_eq!(s.len(), 2);
        assert!(s.intervals()[1].is_degenerate());
    }

    #[test]
    fn complement_inside_window() {
        let s = set(&[(0.0, 0.7), (1.5, 3.6), (5.3, 9.9)]);
        let gaps = s.complement_within(&Interval::new(0.0, 9.9), 1e-12);
        assert_eq!(gaps, set(&[(0.7, 1.5), (3.6, 5.3)]));
        let gaps = s.complement_within(&Interval::new(-1.0, 10.0), 1e-12);
        assert_eq!(gaps.len(), 4);
    }

    #[test]
    fn hausdorff_sees_gap_interiors() {
        let a = set(&[(0.0, 1.0)]);
        let b = set(&[(0.0, 0.2), (0.8, 1.0)]);
        assert!((a.hausdorff(&b) - 0.3).abs() < 1e-15);
        assert_eq!(b.hausdorff(&b), 0.0);
        assert!((set(&[(0.0, 1.0)]).hausdorff(&set(&[(0.0, 1.5)])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn subset_and_distance() {
        let big = set(&[(-1.0, 1.0)]);
        let small = set(&[(-1.0, -0.5), (0.0, 0.1)]);
        assert!(small.is_subset_of(&big, 0.0));
        assert!(!big.is_subset_of(&small, 0.0));
        assert_eq!(small.distance(-0.25), 0.25);
        assert!(IntervalSet::empty().distance(0.0).is_infinite());
    }

    fn arb_set() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-10.0f64..10.0, 0.0f64..3.0), 0..8)
            .prop_map(|v| v.into_iter().map(|(a, w)| (a, a + w)).collect())
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(v in arb_set()) {
            let s = set(&v);
            let again = IntervalSet::from_intervals(s.iter().copied());
            prop_assert_eq!(&s, &again);
            for w in s.intervals().windows(2) {
                prop_assert!(w[1].lo > w[0].hi);
            }
        }

        #[test]
        fn union_commutes_and_associates(a in arb_set(), b in arb_set(), c in arb_set()) {
            let (a, b, c) = (set(&a), set(&b), set(&c));
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
        }

        #[test]
        fn complement_and_set_cover_window(v in arb_set()) {
            let s = set(&v);
            let w = Interval::new(-5.0, 5.0);
            let inside = s.intersect_interval(&w);
            let gaps = s.complement_within(&w, 0.0);
            let total = inside.measure() + gaps.measure();
            prop_assert!((total - w.len()).abs() < 1e-9);
        }
    }
}
