//! One-dimensional root and extremum search on sampled curves.

use rayon::prelude::*;

/// Golden ratio conjugate, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Bisection on a bracket with `f(a)` and `f(b)` of opposite sign (or one zero).
/// Stops when the bracket is no wider than `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    if f(b) == 0.0 {
        return b;
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Returns `(x_min, f_min)`; the bracket is shrunk until it is narrower than `tol`.
/// Minima at either end of the bracket are found as well.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let candidates = [(a, f(a)), (x1, f1), (x2, f2), (b, f(b))];
    candidates
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("non-empty")
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_min(|t| -f(t), a, b, tol);
    (x, -v)
}

/// A function tabulated on an increasing grid.
#[derive(Debug, Clone)]
pub struct Sampled {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Sampled {
    /// Tabulates `f` on `lo, lo + step, ..., hi` (the last point is exactly `hi`).
    /// Evaluation is parallel; the grid does not depend on the thread count.
    pub fn tabulate<F>(f: F, lo: f64, hi: f64, step: f64) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let xs = uniform_grid(lo, hi, step);
        let ys = xs.par_iter().map(|&x| f(x)).collect();
        Sampled { xs, ys }
    }
}

/// Grid points from `lo` to `hi` with spacing at most `step`, both ends included.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    if xs.last().is_some_and(|&x| x >= hi) {
        xs.pop();
    }
    xs.push(hi);
    xs
}

/// Tolerances for [`level_crossings`].
#[derive(Debug, Clone, Copy)]
pub struct RootTol {
    /// Bracket width at which bisection stops.
    pub x: f64,
    /// A local extremum within this distance of the level counts as a tangential root.
    pub touch: f64,
}

impl Default for RootTol {
    fn default() -> Self {
        RootTol {
            x: 1e-11,
            touch: 1e-9,
        }
    }
}

/// All solutions of `f(x) = level` on the tabulated range.
///
/// Sign changes between grid neighbours are refined by bisection. Local
/// extrema of the samples that approach the level without a sign change are
/// refined by golden-section search: if the extremum touches the level it is
/// reported once, and if it crosses it the two hidden roots are bisected.
pub fn level_crossings<F: Fn(f64) -> f64>(f: F, table: &Sampled, level: f64, tol: RootTol) -> Vec<f64> {
    let g = |x: f64| f(x) - level;
    let xs = &table.xs;
    let ys: Vec<f64> = table.ys.iter().map(|y| y - level).collect();
    let mut roots = Vec::new();

    for i in 0..xs.len() {
        if ys[i] == 0.0 {
            roots.push(xs[i]);
        }
        if i + 1 < xs.len() && ys[i] != 0.0 && ys[i + 1] != 0.0 && (ys[i] < 0.0) != (ys[i + 1] < 0.0) {
            roots.push(bisect(g, xs[i], xs[i + 1], tol.x));
        }
    }

    for i in 1..xs.len().saturating_sub(1) {
        let (l, m, r) = (ys[i - 1], ys[i], ys[i + 1]);
        let is_max = m >= l && m >= r && l < 0.0 && m < 0.0 && r < 0.0;
        let is_min = m <= l && m <= r && l > 0.0 && m > 0.0 && r > 0.0;
        if !(is_max || is_min) {
            continue;
        }
        let (xe, ye) = if is_max {
            golden_max(g, xs[i - 1], xs[i + 1], tol.x)
        } else {
            golden_min(g, xs[i - 1], xs[i + 1], tol.x)
        };
        if ye.abs() <= tol.touch {
            roots.push(xe);
        } else if (ye > 0.0) == is_max {
            roots.push(bisect(g, xs[i - 1], xe, tol.x));
            roots.push(bisect(g, xe, xs[i + 1], tol.x));
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 10.0 * tol.x);
    roots
}
