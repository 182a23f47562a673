//! Range lemmas against sampling, and the reduction against the raw `B_p`.

use nanotube_spectra::quasimomentum::bp_segments;
use nanotube_spectra::ranges::range_of;
use nanotube_spectra::*;
use proptest::prelude::*;

const BATTERY: [(i64, i64); 18] = [
    (1, 0),
    (2, 0),
    (3, 0),
    (4, 0),
    (5, 0),
    (7, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 5),
    (1, 1),
    (1, 2),
    (2, 1),
    (2, 3),
    (3, 2),
    (5, 3),
    (4, 6),
];

/// Hull pieces of plain samples, split where consecutive sorted values jump
/// by more than `gap`. Coarser than the library's brute force on purpose.
fn sampled_range(thetas: &[Theta], branch: Branch, gap: f64) -> Vec<(f64, f64)> {
    let mut v: Vec<f64> = thetas.iter().map(|t| solve_f(*t).get(branch)).collect();
    v.sort_by(f64::total_cmp);
    let mut out = vec![(v[0], v[0])];
    for x in v.into_iter().skip(1) {
        let last = out.last_mut().unwrap();
        if x - last.1 > gap {
            out.push((x, x));
        } else {
            last.1 = x;
        }
    }
    out
}

fn bp_thetas(p: TubeVector, per_segment: usize) -> Vec<Theta> {
    bp_segments(p)
        .iter()
        .flat_map(|s| sample_segment(s, per_segment))
        .collect()
}

#[test]
fn lemma_ranges_match_brute_force() {
    for (q1, q2) in BATTERY {
        let q = ReducedVector::new(q1, q2).unwrap();
        for branch in Branch::ALL {
            let lemma = range_of(q, branch).unwrap();
            let brute = brute_force_range(q, branch, 4000).unwrap();
            let d = lemma.hausdorff(&brute);
            assert!(d <= 2e-3, "q=({q1},{q2}) {branch:?}: {d}");
        }
    }
}

#[test]
fn reduction_preserves_values() {
    // every value on the raw lines of B_p lies in the lemma range of reduce(p),
    // and the sampled hull of B_p reaches every lemma piece
    let tubes = [(1, 0), (-1, 0), (2, 0), (-3, 0), (0, 1), (0, -2), (1, 1), (-1, 1), (1, -2), (2, -1), (-2, 3), (3, 2), (-4, -6), (5, 3)];
    for (p1, p2) in tubes {
        let p = TubeVector::new(p1, p2).unwrap();
        let q = reduce(p).unwrap();
        let thetas = bp_thetas(p, 3000);
        assert!(thetas.iter().all(|t| contains(p, *t, 1e-9)));
        for branch in Branch::ALL {
            let lemma = range_of(q, branch).unwrap();
            for t in &thetas {
                let v = solve_f(*t).get(branch);
                assert!(lemma.contains(v, 1e-9), "p=({p1},{p2}) {branch:?}: {v} not in {lemma:?}");
            }
            let hull = sampled_range(&thetas, branch, 5e-3);
            for piece in lemma.iter() {
                for end in [piece.lo, piece.hi] {
                    let near = hull
                        .iter()
                        .map(|(a, b)| if end < *a { a - end } else if end > *b { end - b } else { 0.0 })
                        .fold(f64::INFINITY, f64::min);
                    assert!(near < 5e-3, "p=({p1},{p2}) {branch:?}: lemma end {end} unreached");
                }
            }
        }
    }
}

#[test]
fn reduced_segments_map_into_bp() {
    for (p1, p2) in [(3, -2), (-1, 4), (-5, -3), (2, 0), (0, -3)] {
        let p = TubeVector::new(p1, p2).unwrap();
        for t in quasimomentum::sample_bp(p, 50).unwrap() {
            assert!(contains(p, t, 1e-9), "p=({p1},{p2}): {t:?}");
        }
    }
}

#[test]
fn union_cases() {
    let u = |a, b| range_union(ReducedVector::new(a, b).unwrap()).unwrap();
    assert_eq!(u(0, 2).case_label, RangeCase::A);
    assert_eq!(u(0, 2).union, IntervalSet::single(-1.0, 1.0));
    // q = (1, 0): only θ1 = 0, F ranges [-1, -2/3], [-1/3, 1/3], [2/3, 1]
    let r = u(1, 0);
    let want = [(-1.0, -2.0 / 3.0), (-1.0 / 3.0, 1.0 / 3.0), (2.0 / 3.0, 1.0)];
    assert_eq!(r.union.len(), 3);
    for (piece, (a, b)) in r.union.iter().zip(want) {
        assert!((piece.lo - a).abs() < 1e-12 && (piece.hi - b).abs() < 1e-12);
    }
    // q = (2, 0) carries the point -1/3 and both inner gaps
    let r = u(2, 0);
    assert!(r.union.contains(-1.0 / 3.0, 1e-12));
    assert!(!r.union.contains(-0.5, 0.0));
    assert!(!r.union.contains(0.5, 0.0));
}

#[test]
fn f1_minimum_for_odd_vertical_tube() {
    // on q = (0, 3) the minimum is the smallest root of 9x³ - 7x + 1
    let mut x: f64 = -1.0;
    for _ in 0..60 {
        x -= (9.0 * x.powi(3) - 7.0 * x + 1.0) / (27.0 * x * x - 7.0);
    }
    let w = find_extremum(ReducedVector::new(0, 3).unwrap(), Extremum::F1Min);
    assert!((w.value - x).abs() < 1e-9, "{} vs {x}", w.value);
    assert!((solve_f(w.theta).f1 - w.value).abs() < 1e-12);
}

#[test]
fn brute_force_rejects_sparse_sampling() {
    assert!(brute_force_range(ReducedVector::new(1, 1).unwrap(), Branch::F2, 10).is_err());
}

fn interval_list() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0f64..10.0, 0.0f64..3.0), 0..8)
}

fn set_of(v: &[(f64, f64)]) -> IntervalSet {
    IntervalSet::from_intervals(v.iter().map(|&(a, w)| Interval::new(a, a + w)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalization_is_idempotent(v in interval_list()) {
        let s = set_of(&v);
        let again = IntervalSet::from_intervals(s.iter().copied());
        prop_assert_eq!(&s, &again);
        for w in s.intervals().windows(2) {
            prop_assert!(w[0].hi < w[1].lo);
        }
    }

    #[test]
    fn union_is_commutative_and_associative(a in interval_list(), b in interval_list(), c in interval_list()) {
        let (a, b, c) = (set_of(&a), set_of(&b), set_of(&c));
        prop_assert_eq!(a.union(&b), b.union(&a));
        prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
    }

    #[test]
    fn membership_matches_the_pieces(v in interval_list(), x in -12.0f64..14.0) {
        let s = set_of(&v);
        let direct = v.iter().any(|&(a, w)| x >= a && x <= a + w);
        prop_assert_eq!(s.contains(x, 0.0), direct);
    }

    #[test]
    fn sampled_values_stay_in_lemma_range(q1 in 0i64..9, q2 in 0i64..9, t in 0.0f64..=1.0) {
        prop_assume!(q1 != 0 || q2 != 0);
        let q = match ReducedVector::new(q1, q2) {
            Ok(q) => q,
            Err(_) => return Ok(()),
        };
        let report = range_union(q).unwrap();
        for s in segments(q).segments {
            let theta = s.point_at(t);
            let r = solve_f(theta);
            for branch in Branch::ALL {
                prop_assert!(report.range(branch).contains(r.get(branch), 1e-9));
            }
        }
        prop_assert!(report.union.min().unwrap() >= -1.0 - 1e-12);
        prop_assert!(report.union.max().unwrap() <= 1.0 + 1e-12);
    }
}
