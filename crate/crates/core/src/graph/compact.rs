//! Compactly supported eigenfunctions on a tube, found by nullspace search.
//!
//! The tube `T_p` is the periodic graph modulo translation by `p`. Its cells
//! are classes of `ℤ²/ℤp`, and `r(m) = (p2 m1 - p1 m2)/g` with
//! `g = gcd(p1, p2)` measures the position along the tube axis; each value of
//! `r` is a ring of `g` cells around the circumference. Extended linearly to
//! vertex positions inside the cell, `r` measures height along the axis.
//!
//! A support is the set of edges with both ends in a window `[a, a + rings]`.
//! Heights are measured on the embedded graph rather than by counting cells,
//! since a cell count depends on where the fundamental domain cuts a cycle.
//! Every support edge carries `α c(x; λ) + β s(x; λ)`, and continuity plus
//! Kirchhoff conditions (with the function vanishing outside the support)
//! give a homogeneous linear system whose nullspace is the space of
//! eigenfunctions at `λ` living in that support.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{IndexedEdge, PeriodicGraphConfig};
use crate::error::{Error, Result};
use crate::hill::{HillOperator, Monodromy, PotentialSpec};
use crate::quasimomentum::TubeVector;
use crate::spectra::ETA_MATCH_TOL;

/// Singular values below this fraction of the largest count as zero.
pub const NULLSPACE_RTOL: f64 = 1e-7;
/// Largest admissible continuity or Kirchhoff residual of a basis element.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// A cell of the tube, in canonical form `r·w + t·(p/g)` with `0 <= t < g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TubeCell {
    pub ring: i64,
    pub slot: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeInstance {
    /// Position in the config's edge list.
    pub edge: usize,
    /// Cell holding the edge's `u` end.
    pub cell: TubeCell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFunction {
    pub support: Vec<EdgeInstance>,
    /// `(α, β)` per support edge, in the order of `support`.
    pub coefficients: Vec<(f64, f64)>,
    pub max_continuity_residual: f64,
    pub max_kirchhoff_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactEigenspace {
    pub p: TubeVector,
    pub lambda: f64,
    pub rings: usize,
    /// Axis interval, in ring units, holding the returned support.
    pub window: [f64; 2],
    pub dimension: usize,
    pub basis: Vec<EdgeFunction>,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Solves `a x + b y = gcd(a, b)`.
fn bezout(a: i64, b: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-s0, -t0)
    } else {
        (s0, t0)
    }
}

/// Coordinates on `ℤ²/ℤp`.
#[derive(Debug, Clone, Copy)]
struct TubeLattice {
    g: i64,
    /// `p / g`
    d: [i64; 2],
    /// a cell with `r(w) = 1`
    w: [i64; 2],
}

impl TubeLattice {
    fn new(p: TubeVector) -> Self {
        let g = gcd(p.p1, p.p2);
        let d = [p.p1 / g, p.p2 / g];
        // r(m) = d2 m1 - d1 m2; pick m with d2 m1 - d1 m2 = 1
        let (x, y) = bezout(d[1], -d[0]);
        TubeLattice { g, d, w: [x, y] }
    }

    fn ring_of(&self, m: [i64; 2]) -> i64 {
        self.d[1] * m[0] - self.d[0] * m[1]
    }

    fn cell(&self, m: [i64; 2]) -> TubeCell {
        let r = self.ring_of(m);
        let rest = [m[0] - r * self.w[0], m[1] - r * self.w[1]];
        // rest is an integer multiple of d
        let t = if self.d[0] != 0 {
            rest[0] / self.d[0]
        } else {
            rest[1] / self.d[1]
        };
        TubeCell {
            ring: r,
            slot: t.rem_euclid(self.g),
        }
    }

    fn position(&self, c: TubeCell) -> [i64; 2] {
        [
            c.ring * self.w[0] + c.slot * self.d[0],
            c.ring * self.w[1] + c.slot * self.d[1],
        ]
    }
}

type VertexKey = (usize, TubeCell);

/// Slack when testing whether a vertex lies inside a window.
const WINDOW_SLACK: f64 = 1e-9;

/// The linear system for a fixed support.
struct SupportSystem {
    support: Vec<EdgeInstance>,
    matrix: DMatrix<f64>,
    continuity_rows: usize,
}

/// Axis coordinates of the vertices and edges of one cell, in ring units.
struct AxisLayout {
    edges: Vec<IndexedEdge>,
    /// `r` of each vertex relative to its cell
    vertex: Vec<f64>,
    /// `r` of each edge's far end relative to the cell of its `u` end
    far: Vec<f64>,
    reach: i64,
}

impl AxisLayout {
    fn new(config: &PeriodicGraphConfig, lat: &TubeLattice) -> Result<Self> {
        let edges = config.indexed_edges()?;
        let n = config.vertices.len();
        let pos = config.positions.clone().unwrap_or_else(|| vec![[0.0, 0.0]; n]);
        if pos.len() != n {
            return Err(Error::Precondition("one position per vertex is required".into()));
        }
        let axis = |x: [f64; 2]| lat.d[1] as f64 * x[0] - lat.d[0] as f64 * x[1];
        let vertex: Vec<f64> = pos.iter().map(|&x| axis(x)).collect();
        let far: Vec<f64> = edges
            .iter()
            .map(|e| lat.ring_of(e.shift) as f64 + vertex[e.v])
            .collect();
        let reach = vertex
            .iter()
            .chain(&far)
            .fold(0.0f64, |acc, r| acc.max(r.abs()))
            .ceil() as i64
            + 1;
        Ok(AxisLayout {
            edges,
            vertex,
            far,
            reach,
        })
    }

    /// Left ends worth trying: a window is maximal when a vertex sits on its left end.
    fn window_starts(&self) -> Vec<f64> {
        let mut starts: Vec<f64> = self.vertex.iter().map(|r| r.rem_euclid(1.0)).collect();
        starts.sort_by(f64::total_cmp);
        starts.dedup_by(|a, b| (*a - *b).abs() < WINDOW_SLACK);
        starts
    }
}

/// Edges of the tube whose two ends lie in the axis window `[a, a + height]`.
fn build_system(
    layout: &AxisLayout,
    lat: &TubeLattice,
    m: &Monodromy,
    a: f64,
    height: usize,
) -> SupportSystem {
    let edges = &layout.edges;
    let inside = |r: f64| r >= a - WINDOW_SLACK && r <= a + height as f64 + WINDOW_SLACK;
    let in_support = |k: usize, anchor: &TubeCell| {
        let r = anchor.ring as f64;
        inside(r + layout.vertex[edges[k].u]) && inside(r + layout.far[k])
    };

    let first = a.floor() as i64 - layout.reach;
    let last = (a + height as f64).ceil() as i64 + layout.reach;
    let mut support_edges: Vec<(EdgeInstance, VertexKey, VertexKey)> = Vec::new();
    for ring in first..=last {
        for slot in 0..lat.g {
            let cell = TubeCell { ring, slot };
            let base = lat.position(cell);
            for (k, e) in edges.iter().enumerate() {
                if in_support(k, &cell) {
                    let end = lat.cell([base[0] + e.shift[0], base[1] + e.shift[1]]);
                    support_edges.push((EdgeInstance { edge: k, cell }, (e.u, cell), (e.v, end)));
                }
            }
        }
    }

    // a vertex carries a free value only if every incident edge is in the support
    let is_free = |(vertex, cell): VertexKey| {
        let base = lat.position(cell);
        edges.iter().enumerate().all(|(k, e)| {
            let out_ok = e.u != vertex || in_support(k, &cell);
            let back = lat.cell([base[0] - e.shift[0], base[1] - e.shift[1]]);
            let in_ok = e.v != vertex || in_support(k, &back);
            out_ok && in_ok
        })
    };
    let touched: Vec<VertexKey> = support_edges
        .iter()
        .flat_map(|t| [t.1, t.2])
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let free: Vec<VertexKey> = touched.iter().copied().filter(|&v| is_free(v)).collect();
    let free_index: BTreeMap<VertexKey, usize> =
        free.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let touched_index: BTreeMap<VertexKey, usize> =
        touched.iter().enumerate().map(|(i, k)| (*k, i)).collect();

    let ne = support_edges.len();
    let cols = 2 * ne + free.len();
    let continuity_rows = 2 * ne;
    let rows = continuity_rows + touched.len();
    let mut mat = DMatrix::<f64>::zeros(rows, cols);
    for (i, (_, u, v)) in support_edges.iter().enumerate() {
        let (ca, cb) = (2 * i, 2 * i + 1);
        // value at the start: α = f(u)
        mat[(2 * i, ca)] = 1.0;
        if let Some(&j) = free_index.get(u) {
            mat[(2 * i, 2 * ne + j)] = -1.0;
        }
        // value at the end: α c(1) + β s(1) = f(v)
        mat[(2 * i + 1, ca)] = m.c1;
        mat[(2 * i + 1, cb)] = m.s1;
        if let Some(&j) = free_index.get(v) {
            mat[(2 * i + 1, 2 * ne + j)] -= 1.0;
        }
        // outgoing derivatives: β at the start, -(α c'(1) + β s'(1)) at the end
        let ru = continuity_rows + touched_index[u];
        mat[(ru, cb)] += 1.0;
        let rv = continuity_rows + touched_index[v];
        mat[(rv, ca)] -= m.c1p;
        mat[(rv, cb)] -= m.s1p;
    }
    SupportSystem {
        support: support_edges.iter().map(|t| t.0).collect(),
        matrix: mat,
        continuity_rows,
    }
}

/// Orthonormal basis of the nullspace of `a` (requires `rows >= cols`).
fn nullspace(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let cols = a.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // pad so the SVD always returns a full right factor
    let mut padded = DMatrix::<f64>::zeros(a.nrows().max(cols), cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
    }
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= NULLSPACE_RTOL * smax)
        .map(|(i, _)| vt.row(i).iter().copied().collect())
        .collect()
}

fn basis_of(sys: &SupportSystem) -> Result<Vec<EdgeFunction>> {
    let ne = sys.support.len();
    let mut basis = Vec::new();
    for x in nullspace(&sys.matrix) {
        let r = &sys.matrix * nalgebra::DVector::from_vec(x.clone());
        let cont = r.rows(0, sys.continuity_rows).amax();
        let kirch = r
            .rows(sys.continuity_rows, r.len() - sys.continuity_rows)
            .amax();
        if cont > RESIDUAL_TOL || kirch > RESIDUAL_TOL {
            return Err(Error::Precondition(format!(
                "nullspace vector violates the vertex conditions (residuals {cont:e}, {kirch:e})"
            )));
        }
        basis.push(EdgeFunction {
            support: sys.support.clone(),
            coefficients: (0..ne).map(|i| (x[2 * i], x[2 * i + 1])).collect(),
            max_continuity_residual: cont,
            max_kirchhoff_residual: kirch,
        });
    }
    Ok(basis)
}

/// Eigenfunctions at `lambda` whose support spans at most `rings` periods
/// along the tube axis.
///
/// Every placement of the window is tried and the largest space is returned.
pub fn compact_eigenspace(
    config: &PeriodicGraphConfig,
    p: TubeVector,
    spec: &PotentialSpec,
    lambda: f64,
    rings: usize,
) -> Result<CompactEigenspace> {
    p.validate()?;
    if rings == 0 {
        return Err(Error::Precondition("rings must be positive".into()));
    }
    let m = HillOperator::new(spec).monodromy(lambda);
    let lat = TubeLattice::new(p);
    let layout = AxisLayout::new(config, &lat)?;
    let mut best: Option<(f64, Vec<EdgeFunction>)> = None;
    for a in layout.window_starts() {
        let basis = basis_of(&build_system(&layout, &lat, &m, a, rings))?;
        if !matches!(&best, Some((_, b)) if b.len() >= basis.len()) {
            best = Some((a, basis));
        }
    }
    let (a, basis) = best.expect("at least one window");
    Ok(CompactEigenspace {
        p,
        lambda,
        rings,
        window: [a, a + rings as f64],
        dimension: basis.len(),
        basis,
    })
}

/// Like [`compact_eigenspace`], after checking `|η(λ) - eta_target| <= 1e-8`.
pub fn build_compact_eigenfunction(
    config: &PeriodicGraphConfig,
    p: TubeVector,
    eta_target: f64,
    lambda: f64,
    rings: usize,
    spec: &PotentialSpec,
) -> Result<CompactEigenspace> {
    let eta = HillOperator::new(spec).eta(lambda);
    if (eta - eta_target).abs() > ETA_MATCH_TOL {
        return Err(Error::Precondition(format!(
            "η({lambda}) = {eta} differs from the target {eta_target}"
        )));
    }
    compact_eigenspace(config, p, spec, lambda, rings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graphyne_config;
    use std::f64::consts::PI;

    #[test]
    fn lattice_coordinates_are_periodic() {
        for (p1, p2) in [(2, 0), (0, 4), (3, 2), (-2, 6), (1, 1)] {
            let p = TubeVector { p1, p2 };
            let lat = TubeLattice::new(p);
            for m in [[0, 0], [1, 0], [0, 1], [-3, 5], [7, -2]] {
                let c = lat.cell(m);
                assert_eq!(c, lat.cell([m[0] + p1, m[1] + p2]));
                assert_eq!(c, lat.cell(lat.position(c)));
                assert!(c.slot >= 0 && c.slot < lat.g);
            }
        }
    }

    #[test]
    fn rhombus_bracelet_on_a_two_tube() {
        let s = build_compact_eigenfunction(
            &graphyne_config(),
            TubeVector { p1: 2, p2: 0 },
            0.0,
            PI * PI / 4.0,
            1,
            &PotentialSpec::Zero,
        )
        .unwrap();
        assert!(s.dimension >= 1);
    }

    #[test]
    fn eta_mismatch_is_rejected() {
        let r = build_compact_eigenfunction(
            &graphyne_config(),
            TubeVector { p1: 2, p2: 0 },
            1.0 / 3.0,
            PI * PI / 4.0,
            1,
            &PotentialSpec::Zero,
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
