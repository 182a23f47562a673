//! Ranges of the three dispersion branches over the reduced segments of a tube.
//!
//! The closed forms depend only on `q = (|p1|, |p2|)`. With
//! `l0 = ⌊q1 θ0 / 2π⌋` and `θ0 = arccos(-1/3)`:
//!
//! | branch | `q2 = 0, q1 > 1` | `q2 = 0, q1 = 1` | `q2` even | `q2` odd |
//! |---|---|---|---|---|
//! | F1 | `[-1, F1(2l0π/q1, 0)] ∪ [F1(2(l0+1)π/q1, π), -1/3]` | `[-1, -2/3]` | `[-1, -1/3]` | `[min F1, -1/3]` |
//! | F3 | `[1/3, F3(2(l0+1)π/q1, 0)] ∪ [F3(2l0π/q1, π), 1]` | `[2/3, 1]` | `[1/3, 1]` | `[1/3, 1]` |
//!
//! F2 covers `[-1/3, 1/3]` except for odd `q2` with `q1 <= 1`, where it is
//! `[-1/3, max F2]`. The open minima and maxima are found numerically.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{branch_value, solve_f, theta_zero, Branch, Theta};
use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::quasimomentum::{sample_segment, segments, ReducedVector, Segment};
use crate::search::{golden_max, golden_min};

pub const EXTREMUM_GRID: usize = 2000;
pub const EXTREMUM_TOL: f64 = 1e-10;
pub const BRUTE_FORCE_REFINE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extremum {
    #[serde(rename = "F1-min")]
    F1Min,
    #[serde(rename = "F2-max")]
    F2Max,
}

impl Extremum {
    fn branch(self) -> Branch {
        match self {
            Extremum::F1Min => Branch::F1,
            Extremum::F2Max => Branch::F2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumWitness {
    pub which: Extremum,
    pub value: f64,
    pub theta: Theta,
    pub segment_k: i64,
}

/// Shape of the union of the three ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeCase {
    /// `q2` even and nonzero: the union is `[-1, 1]`.
    A,
    /// `q2 = 0`, `q1 = 1`.
    B,
    /// `q2 = 0`, `q1 > 1`.
    C,
    /// `q2` odd, `q1 <= 1`.
    D,
    /// `q2` odd, `q1 > 1`.
    E,
}

impl RangeCase {
    pub fn of(q: ReducedVector) -> RangeCase {
        match (q.q2, q.q1) {
            (0, 1) => RangeCase::B,
            (0, _) => RangeCase::C,
            (q2, q1) if q2 % 2 == 1 && q1 <= 1 => RangeCase::D,
            (q2, _) if q2 % 2 == 1 => RangeCase::E,
            _ => RangeCase::A,
        }
    }
}

impl fmt::Display for RangeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RangeCase::A => "a",
            RangeCase::B => "b",
            RangeCase::C => "c",
            RangeCase::D => "d",
            RangeCase::E => "e",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub q: ReducedVector,
    pub r1: IntervalSet,
    pub r2: IntervalSet,
    pub r3: IntervalSet,
    pub union: IntervalSet,
    pub case_label: RangeCase,
    pub extremum_witnesses: Vec<ExtremumWitness>,
}

impl RangeReport {
    pub fn range(&self, branch: Branch) -> &IntervalSet {
        match branch {
            Branch::F1 => &self.r1,
            Branch::F2 => &self.r2,
            Branch::F3 => &self.r3,
        }
    }
}

/// `⌊q1 θ0 / 2π⌋`.
pub fn l0(q1: i64) -> i64 {
    (q1 as f64 * theta_zero() / (2.0 * PI)).floor() as i64
}

fn f_at(theta1: f64, theta2: f64, branch: Branch) -> f64 {
    branch_value(Theta::new(theta1, theta2), branch)
}

fn third() -> f64 {
    1.0 / 3.0
}

fn range_f1_inner(q: ReducedVector) -> (IntervalSet, Option<ExtremumWitness>) {
    let (q1, q2) = (q.q1, q.q2);
    if q2 == 0 {
        if q1 == 1 {
            return (IntervalSet::single(-1.0, -2.0 / 3.0), None);
        }
        let l = l0(q1) as f64;
        let qf = q1 as f64;
        let upper = f_at(2.0 * l * PI / qf, 0.0, Branch::F1);
        let lower = f_at(2.0 * (l + 1.0) * PI / qf, PI, Branch::F1);
        let set = IntervalSet::from_intervals([
            Interval::new(-1.0, upper),
            Interval::new(lower, -third()),
        ]);
        return (set, None);
    }
    if q2 % 2 == 0 {
        return (IntervalSet::single(-1.0, -third()), None);
    }
    let w = if q1 == 0 {
        let k = q2 / 2;
        let theta = Theta::new(0.0, -2.0 * k as f64 * PI / q2 as f64);
        ExtremumWitness {
            which: Extremum::F1Min,
            value: solve_f(theta).f1,
            theta,
            segment_k: k,
        }
    } else {
        find_extremum(q, Extremum::F1Min)
    };
    (IntervalSet::single(w.value, -third()), Some(w))
}

fn range_f2_inner(q: ReducedVector) -> (IntervalSet, Option<ExtremumWitness>) {
    if q.q1 <= 1 && q.q2 % 2 == 1 {
        let w = find_extremum(q, Extremum::F2Max);
        (IntervalSet::single(-third(), w.value), Some(w))
    } else {
        (IntervalSet::single(-third(), third()), None)
    }
}

fn range_f3_inner(q: ReducedVector) -> IntervalSet {
    let (q1, q2) = (q.q1, q.q2);
    if q2 != 0 {
        return IntervalSet::single(third(), 1.0);
    }
    if q1 == 1 {
        return IntervalSet::single(2.0 / 3.0, 1.0);
    }
    let l = l0(q1) as f64;
    let qf = q1 as f64;
    let lower = f_at(2.0 * (l + 1.0) * PI / qf, 0.0, Branch::F3);
    let upper = f_at(2.0 * l * PI / qf, PI, Branch::F3);
    IntervalSet::from_intervals([Interval::new(third(), lower), Interval::new(upper, 1.0)])
}

pub fn range_f1(q: ReducedVector) -> Result<IntervalSet> {
    q.validate()?;
    Ok(range_f1_inner(q).0)
}

pub fn range_f2(q: ReducedVector) -> Result<IntervalSet> {
    q.validate()?;
    Ok(range_f2_inner(q).0)
}

pub fn range_f3(q: ReducedVector) -> Result<IntervalSet> {
    q.validate()?;
    Ok(range_f3_inner(q))
}

pub fn range_of(q: ReducedVector, branch: Branch) -> Result<IntervalSet> {
    match branch {
        Branch::F1 => range_f1(q),
        Branch::F2 => range_f2(q),
        Branch::F3 => range_f3(q),
    }
}

pub fn range_union(q: ReducedVector) -> Result<RangeReport> {
    q.validate()?;
    let (r1, w1) = range_f1_inner(q);
    let (r2, w2) = range_f2_inner(q);
    let r3 = range_f3_inner(q);
    let union = r1.union(&r2).union(&r3);
    Ok(RangeReport {
        q,
        r1,
        r2,
        r3,
        union,
        case_label: RangeCase::of(q),
        extremum_witnesses: w1.into_iter().chain(w2).collect(),
    })
}

/// Best point of `sign * F_j` on one segment: grid scan, then golden section
/// between the neighbours of the best grid point.
fn segment_extremum(seg: &Segment, branch: Branch, maximize: bool, grid: usize) -> (f64, Theta) {
    let value = |t: f64| branch_value(seg.point_at(t), branch);
    if seg.degenerate {
        return (value(0.0), seg.start);
    }
    let n = grid.max(2);
    let score = |v: f64| if maximize { v } else { -v };
    let best = (0..n)
        .map(|i| (i, value(i as f64 / (n - 1) as f64)))
        .max_by(|a, b| score(a.1).total_cmp(&score(b.1)).then(b.0.cmp(&a.0)))
        .expect("non-empty grid")
        .0;
    let a = best.saturating_sub(1) as f64 / (n - 1) as f64;
    let b = (best + 1).min(n - 1) as f64 / (n - 1) as f64;
    let tol = EXTREMUM_TOL / seg.length();
    let (t, v) = if maximize {
        golden_max(value, a, b, tol)
    } else {
        golden_min(value, a, b, tol)
    };
    (v, seg.point_at(t))
}

/// Exhaustive search for `min F1` or `max F2` over every reduced segment.
pub fn find_extremum(q: ReducedVector, which: Extremum) -> ExtremumWitness {
    let maximize = which == Extremum::F2Max;
    let family = segments(q);
    let per_segment: Vec<(f64, Theta, i64)> = family
        .segments
        .par_iter()
        .map(|seg| {
            let (v, th) = segment_extremum(seg, which.branch(), maximize, EXTREMUM_GRID);
            (v, th, seg.k)
        })
        .collect();
    let score = |v: f64| if maximize { v } else { -v };
    // strict comparison keeps the lowest k among ties
    let mut best = per_segment[0];
    for &cand in &per_segment[1..] {
        if score(cand.0) > score(best.0) {
            best = cand;
        }
    }
    ExtremumWitness {
        which,
        value: best.0,
        theta: best.1,
        segment_k: best.2,
    }
}

/// Sampled estimate of `F_j` over the reduced segments.
///
/// Sorted sample values are split wherever consecutive values differ by more
/// than three times the largest jump between neighbouring samples on a segment.
/// Each cluster's ends are then refined by golden section around the sample
/// that produced them.
pub fn brute_force_range(q: ReducedVector, branch: Branch, samples_per_segment: usize) -> Result<IntervalSet> {
    q.validate()?;
    if samples_per_segment < 100 {
        return Err(Error::Precondition(format!(
            "brute-force range needs at least 100 samples per segment, got {samples_per_segment}"
        )));
    }
    let family = segments(q);
    let n = samples_per_segment;
    struct Sample {
        value: f64,
        seg: usize,
        idx: usize,
    }
    let per_seg: Vec<Vec<f64>> = family
        .segments
        .par_iter()
        .map(|seg| {
            sample_segment(seg, n)
                .into_iter()
                .map(|t| branch_value(t, branch))
                .collect()
        })
        .collect();
    let jump = per_seg
        .iter()
        .flat_map(|v| v.windows(2).map(|w| (w[1] - w[0]).abs()))
        .fold(0.0, f64::max);
    let mut samples: Vec<Sample> = per_seg
        .iter()
        .enumerate()
        .flat_map(|(s, v)| {
            v.iter().enumerate().map(move |(i, &value)| Sample {
                value,
                seg: s,
                idx: i,
            })
        })
        .collect();
    samples.sort_by(|a, b| a.value.total_cmp(&b.value));

    let threshold = 3.0 * jump;
    let refine = |s: &Sample, maximize: bool| -> f64 {
        let seg = &family.segments[s.seg];
        if seg.degenerate {
            return s.value;
        }
        let value = |t: f64| branch_value(seg.point_at(t), branch);
        let a = s.idx.saturating_sub(1) as f64 / (n - 1) as f64;
        let b = (s.idx + 1).min(n - 1) as f64 / (n - 1) as f64;
        let tol = BRUTE_FORCE_REFINE_TOL / seg.length();
        if maximize {
            golden_max(value, a, b, tol).1.max(s.value)
        } else {
            golden_min(value, a, b, tol).1.min(s.value)
        }
    };

    let mut pieces = Vec::new();
    let mut start = 0;
    for i in 1..=samples.len() {
        if i == samples.len() || samples[i].value - samples[i - 1].value > threshold {
            let lo = refine(&samples[start], false);
            let hi = refine(&samples[i - 1], true);
            pieces.push(Interval::new(lo, hi));
            start = i;
        }
    }
    Ok(IntervalSet::from_intervals(pieces))
}
