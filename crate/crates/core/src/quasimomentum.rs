//! Quasimomenta admitted by a tube and their symmetry reduction.
//!
//! Rolling the sheet along `p = (p1, p2)` keeps the Bloch fibres with
//! `p1 θ1 + p2 θ2 ∈ 2πℤ`, a family of parallel line segments in the zone
//! `B = [-π, π]²`. Since `F` is invariant under `θ1 -> -θ1` and `θ2 -> -θ2`, its
//! range over these segments equals its range over the segments of
//! `q = (|p1|, |p2|)` on the lines `q2 θ2 = q1 θ1 - 2kπ`, `k >= 0`.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dispersion::Theta;
use crate::error::{Error, Result};

pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Winding vector of a tube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TubeVector {
    pub p1: i64,
    pub p2: i64,
}

impl TubeVector {
    pub fn new(p1: i64, p2: i64) -> Result<Self> {
        if p1 == 0 && p2 == 0 {
            return Err(Error::InvalidTube(p1, p2));
        }
        Ok(TubeVector { p1, p2 })
    }

    pub fn validate(&self) -> Result<()> {
        TubeVector::new(self.p1, self.p2).map(|_| ())
    }
}

impl fmt::Display for TubeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p1, self.p2)
    }
}

/// `(|p1|, |p2|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedVector {
    pub q1: i64,
    pub q2: i64,
}

impl ReducedVector {
    pub fn new(q1: i64, q2: i64) -> Result<Self> {
        if q1 < 0 || q2 < 0 || (q1 == 0 && q2 == 0) {
            return Err(Error::InvalidTube(q1, q2));
        }
        Ok(ReducedVector { q1, q2 })
    }

    pub fn validate(&self) -> Result<()> {
        ReducedVector::new(self.q1, self.q2).map(|_| ())
    }
}

impl fmt::Display for ReducedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q1, self.q2)
    }
}

pub fn reduce(p: TubeVector) -> Result<ReducedVector> {
    ReducedVector::new(p.p1.abs(), p.p2.abs())
}

/// Part of one admissible line inside `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub k: i64,
    pub start: Theta,
    pub end: Theta,
    /// Unit direction of the underlying line.
    pub direction: [f64; 2],
    /// The line only touches `B` at a corner.
    pub degenerate: bool,
}

impl Segment {
    /// Point at parameter `t ∈ [0, 1]` from `start` to `end`.
    pub fn point_at(&self, t: f64) -> Theta {
        if t >= 1.0 {
            return self.end;
        }
        Theta {
            theta1: self.start.theta1 + t * (self.end.theta1 - self.start.theta1),
            theta2: self.start.theta2 + t * (self.end.theta2 - self.start.theta2),
        }
    }

    pub fn length(&self) -> f64 {
        (self.end.theta1 - self.start.theta1).hypot(self.end.theta2 - self.start.theta2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFamily {
    pub q: ReducedVector,
    pub segments: Vec<Segment>,
}

/// A rational number with positive denominator.
#[derive(Debug, Clone, Copy)]
struct Frac {
    n: i64,
    d: i64,
}

impl Frac {
    fn new(n: i64, d: i64) -> Self {
        if d < 0 {
            Frac { n: -n, d: -d }
        } else {
            Frac { n, d }
        }
    }

    fn int(n: i64) -> Self {
        Frac { n, d: 1 }
    }

    fn cmp(&self, other: &Frac) -> Ordering {
        (self.n as i128 * other.d as i128).cmp(&(other.n as i128 * self.d as i128))
    }

    /// `self * π` with a single rounding of the quotient.
    fn times_pi(&self) -> f64 {
        (self.n as f64 / self.d as f64) * PI
    }
}

/// Clips `a1 θ1 + a2 θ2 = c π` to `B`, with exact endpoint arithmetic in units of π.
fn clip_line(a1: i64, a2: i64, c: i64) -> Option<(Theta, Theta)> {
    let at = |u1: Frac, u2: Frac| Theta {
        theta1: u1.times_pi(),
        theta2: u2.times_pi(),
    };
    if a2 == 0 {
        let u1 = Frac::new(c, a1);
        if u1.cmp(&Frac::int(-1)) == Ordering::Less || u1.cmp(&Frac::int(1)) == Ordering::Greater {
            return None;
        }
        return Some((at(u1, Frac::int(-1)), at(u1, Frac::int(1))));
    }
    if a1 == 0 {
        let u2 = Frac::new(c, a2);
        if u2.cmp(&Frac::int(-1)) == Ordering::Less || u2.cmp(&Frac::int(1)) == Ordering::Greater {
            return None;
        }
        return Some((at(Frac::int(-1), u2), at(Frac::int(1), u2)));
    }
    // u2 = (c - a1 u1) / a2 runs over [-1, 1] while u1 runs between these
    let mut ends = [Frac::new(c - a2.abs(), a1), Frac::new(c + a2.abs(), a1)];
    if ends[0].cmp(&ends[1]) == Ordering::Greater {
        ends.swap(0, 1);
    }
    let lo = if ends[0].cmp(&Frac::int(-1)) == Ordering::Less {
        Frac::int(-1)
    } else {
        ends[0]
    };
    let hi = if ends[1].cmp(&Frac::int(1)) == Ordering::Greater {
        Frac::int(1)
    } else {
        ends[1]
    };
    if lo.cmp(&hi) == Ordering::Greater {
        return None;
    }
    let u2_of = |u1: Frac| Frac::new(c * u1.d - a1 * u1.n, a2 * u1.d);
    Some((at(lo, u2_of(lo)), at(hi, u2_of(hi))))
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn make_segment(k: i64, ends: (Theta, Theta), direction: [f64; 2]) -> Segment {
    let (start, end) = ends;
    Segment {
        k,
        start,
        end,
        direction,
        degenerate: start == end,
    }
}

/// All nonempty segments `q2 θ2 = q1 θ1 - 2kπ` in `B`, `k = 0, 1, ...`.
pub fn segments(q: ReducedVector) -> SegmentFamily {
    let k_max = if q.q2 == 0 { q.q1 / 2 } else { (q.q1 + q.q2) / 2 };
    let direction = unit([q.q2 as f64, q.q1 as f64]);
    let segments = (0..=k_max)
        .filter_map(|k| clip_line(q.q1, -q.q2, 2 * k).map(|ends| make_segment(k, ends, direction)))
        .collect();
    SegmentFamily { q, segments }
}

/// Segments of `p1 θ1 + p2 θ2 = 2kπ` in `B` for every integer `k`, without any reduction.
pub fn bp_segments(p: TubeVector) -> Vec<Segment> {
    let k_max = (p.p1.abs() + p.p2.abs()) / 2;
    let direction = unit([-(p.p2 as f64), p.p1 as f64]);
    (-k_max..=k_max)
        .filter_map(|k| clip_line(p.p1, p.p2, 2 * k).map(|ends| make_segment(k, ends, direction)))
        .collect()
}

/// True when `p · θ` is within `tol` of `2πℤ`.
pub fn contains(p: TubeVector, theta: Theta, tol: f64) -> bool {
    let s = p.p1 as f64 * theta.theta1 + p.p2 as f64 * theta.theta2;
    (s - TAU * (s / TAU).round()).abs() <= tol
}

/// `n` equally spaced points from `start` to `end`, both included.
pub fn sample_segment(segment: &Segment, n: usize) -> Vec<Theta> {
    let n = n.max(2);
    (0..n)
        .map(|i| segment.point_at(i as f64 / (n - 1) as f64))
        .collect()
}

/// Sign flips taking a point on the reduced segments of `reduce(p)` into `B_p`.
pub fn to_bp(p: TubeVector, theta: Theta) -> Theta {
    let s1 = if p.p1 < 0 { -1.0 } else { 1.0 };
    let s2 = if p.p2 > 0 { -1.0 } else { 1.0 };
    Theta {
        theta1: s1 * theta.theta1,
        theta2: s2 * theta.theta2,
    }
}

/// `per_segment` samples of every reduced segment, mapped into `B_p`.
pub fn sample_bp(p: TubeVector, per_segment: usize) -> Result<Vec<Theta>> {
    let family = segments(reduce(p)?);
    Ok(family
        .segments
        .iter()
        .flat_map(|s| sample_segment(s, per_segment))
        .map(|t| to_bp(p, t))
        .collect())
}
