//! Finite-difference Bloch Hamiltonians on a periodic graph.
//!
//! Each edge is split into `n` cells of width `h = 1/n`. The unknowns are the
//! vertex values and the `n - 1` interior values of every edge. The discrete
//! energy is
//!
//! ```text
//! Σ_e Σ_j |w_{j+1} - w_j|² / h + Σ (nodes) mass · q0 · |w|²
//! ```
//!
//! with `w_0 = f(u)`, `w_n = exp(i s·θ) f(v)` on an edge `u -> v` with shift
//! `s`, lumped mass `h` at interior nodes and `deg·h/2` at vertices. This is
//! the pair `K w = λ M w` with `K` Hermitian and `M` positive diagonal; the
//! vertex rows carry the half-cell flux balance, a second-order form of the
//! Kirchhoff condition.
//!
//! Eigenvalues are located by Sylvester inertia: the number of eigenvalues
//! below `σ` equals the number of negative eigenvalues of `K - σM`, counted
//! on the tridiagonal edge blocks plus their Schur complement on the vertices.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{IndexedEdge, PeriodicGraphConfig};
use crate::dispersion::{solve_f, Theta};
use crate::error::{Error, Result};
use crate::hill::{HillOperator, PotentialSpec};
use crate::quasimomentum::{reduce, segments, to_bp, TubeVector};

type C64 = Complex<f64>;

pub const MIN_POINTS_PER_EDGE: usize = 50;
pub const DEFAULT_CUTOFF: f64 = 25.0;
const HERMITIAN_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-11;

/// Discrete Bloch operator at one quasimomentum.
#[derive(Debug, Clone)]
pub struct BlochSystem {
    n: usize,
    h: f64,
    vertex_count: usize,
    edges: Vec<IndexedEdge>,
    phases: Vec<C64>,
    degrees: Vec<usize>,
    /// `q0` at the interior nodes `j/n`, `j = 1..n-1` (shared by all edges).
    q_interior: Vec<f64>,
    q_vertex: f64,
}

/// A sparse matrix as `(row, col, value)` entries.
pub type Triplets = Vec<(usize, usize, C64)>;

impl BlochSystem {
    pub fn new(
        config: &PeriodicGraphConfig,
        theta: &Theta,
        spec: &PotentialSpec,
        points_per_edge: usize,
    ) -> Result<Self> {
        if points_per_edge < MIN_POINTS_PER_EDGE {
            return Err(Error::Precondition(format!(
                "points_per_edge must be at least {MIN_POINTS_PER_EDGE}, got {points_per_edge}"
            )));
        }
        let edges = config.indexed_edges()?;
        let n = points_per_edge;
        let h = 1.0 / n as f64;
        Ok(BlochSystem {
            n,
            h,
            vertex_count: config.vertices.len(),
            phases: edges
                .iter()
                .map(|e| C64::from_polar(1.0, e.phase(theta)))
                .collect(),
            edges,
            degrees: config.degrees()?,
            q_interior: (1..n).map(|j| spec.value_unchecked(j as f64 * h)).collect(),
            q_vertex: spec.endpoint_value(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.vertex_count + self.edges.len() * (self.n - 1)
    }

    fn interior_index(&self, edge: usize, j: usize) -> usize {
        self.vertex_count + edge * (self.n - 1) + (j - 1)
    }

    fn vertex_mass(&self, v: usize) -> f64 {
        self.degrees[v] as f64 * self.h / 2.0
    }

    /// Lumped mass diagonal.
    pub fn mass(&self) -> Vec<f64> {
        let mut m = vec![self.h; self.dimension()];
        for (v, slot) in m.iter_mut().take(self.vertex_count).enumerate() {
            *slot = self.vertex_mass(v);
        }
        m
    }

    /// Stiffness plus potential, as sparse entries.
    pub fn stiffness_triplets(&self) -> Triplets {
        let (n, h) = (self.n, self.h);
        let inv_h = 1.0 / h;
        let mut t = Vec::new();
        for v in 0..self.vertex_count {
            t.push((v, v, C64::new(self.q_vertex * self.vertex_mass(v), 0.0)));
        }
        for (k, e) in self.edges.iter().enumerate() {
            t.push((e.u, e.u, C64::new(inv_h, 0.0)));
            t.push((e.v, e.v, C64::new(inv_h, 0.0)));
            for j in 1..n {
                let i = self.interior_index(k, j);
                t.push((i, i, C64::new(2.0 * inv_h + h * self.q_interior[j - 1], 0.0)));
                if j + 1 < n {
                    let r = self.interior_index(k, j + 1);
                    t.push((i, r, C64::new(-inv_h, 0.0)));
                    t.push((r, i, C64::new(-inv_h, 0.0)));
                }
            }
            let first = self.interior_index(k, 1);
            let last = self.interior_index(k, n - 1);
            let z = self.phases[k];
            t.push((first, e.u, C64::new(-inv_h, 0.0)));
            t.push((e.u, first, C64::new(-inv_h, 0.0)));
            t.push((last, e.v, -z * inv_h));
            t.push((e.v, last, -z.conj() * inv_h));
        }
        t
    }

    /// Dense `(K, M)`; meant for small systems and cross-checks.
    pub fn dense(&self) -> Result<(DMatrix<C64>, Vec<f64>)> {
        let t = self.stiffness_triplets();
        check_hermitian(&t)?;
        let d = self.dimension();
        let mut k = DMatrix::<C64>::zeros(d, d);
        for (i, j, v) in t {
            k[(i, j)] += v;
        }
        Ok((k, self.mass()))
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let (n, h) = (self.n, self.h);
        let inv_h = 1.0 / h;
        let off2 = inv_h * inv_h;
        let m = n - 1;
        let mut negatives = 0;
        let mut schur = DMatrix::<C64>::zeros(self.vertex_count, self.vertex_count);
        for v in 0..self.vertex_count {
            schur[(v, v)] += C64::new((self.q_vertex - sigma) * self.vertex_mass(v), 0.0);
        }
        let diag: Vec<f64> = self
            .q_interior
            .iter()
            .map(|q| 2.0 * inv_h + h * (q - sigma))
            .collect();
        let guard = |x: f64| if x == 0.0 { f64::MIN_POSITIVE } else { x };

        // forward pivots give (T^-1)_{mm} and det T; backward pivots give (T^-1)_{11}
        let mut fwd = vec![0.0; m];
        fwd[0] = guard(diag[0]);
        for j in 1..m {
            fwd[j] = guard(diag[j] - off2 / fwd[j - 1]);
        }
        let mut back = guard(diag[m - 1]);
        for j in (0..m - 1).rev() {
            back = guard(diag[j] - off2 / back);
        }
        let edge_negatives = fwd.iter().filter(|&&d| d < 0.0).count();
        let g11 = 1.0 / back;
        let gmm = 1.0 / fwd[m - 1];
        // (T^-1)_{1m} = Π_{j<m} 1/(h d_j) · 1/d_m, summed in log space
        let mut log = -fwd[m - 1].abs().ln();
        let mut sign = fwd[m - 1].signum();
        for d in &fwd[..m - 1] {
            log -= (h * d).abs().ln();
            sign *= d.signum();
        }
        let g1m = sign * log.exp();

        for (k, e) in self.edges.iter().enumerate() {
            negatives += edge_negatives;
            let z = self.phases[k];
            schur[(e.u, e.u)] += C64::new(inv_h - g11 * off2, 0.0);
            schur[(e.v, e.v)] += C64::new(inv_h - gmm * off2, 0.0);
            schur[(e.u, e.v)] -= z * (g1m * off2);
            schur[(e.v, e.u)] -= z.conj() * (g1m * off2);
        }
        let eig = schur.symmetric_eigenvalues();
        negatives + eig.iter().filter(|&&l| l < 0.0).count()
    }

    /// Lower bound for the spectrum: the smallest sampled potential value minus one.
    pub fn lower_bound(&self) -> f64 {
        self.q_interior
            .iter()
            .copied()
            .fold(self.q_vertex, f64::min)
            - 1.0
    }

    /// All eigenvalues `<= lambda_max`, with multiplicity, ascending.
    pub fn eigenvalues_below(&self, lambda_max: f64) -> Vec<f64> {
        let lo = self.lower_bound();
        if lambda_max <= lo {
            return Vec::new();
        }
        let mut out = Vec::new();
        let (c_lo, c_hi) = (self.count_below(lo), self.count_below(lambda_max));
        self.isolate(lo, lambda_max, c_lo, c_hi, &mut out);
        // eigenvalues sitting exactly on lambda_max
        let above = self.count_below(lambda_max + EIGEN_TOL * lambda_max.abs().max(1.0));
        for _ in c_hi..above {
            out.push(lambda_max);
        }
        out
    }

    fn isolate(&self, a: f64, b: f64, ca: usize, cb: usize, out: &mut Vec<f64>) {
        if cb <= ca {
            return;
        }
        if b - a <= EIGEN_TOL * b.abs().max(1.0) {
            let mid = 0.5 * (a + b);
            out.resize(out.len() + cb - ca, mid);
            return;
        }
        let mid = 0.5 * (a + b);
        let cm = self.count_below(mid);
        self.isolate(a, mid, ca, cm, out);
        self.isolate(mid, b, cm, cb, out);
    }
}

fn check_hermitian(t: &Triplets) -> Result<()> {
    let mut sums: HashMap<(usize, usize), C64> = HashMap::new();
    for &(i, j, v) in t {
        *sums.entry((i, j)).or_default() += v;
    }
    for (&(i, j), &v) in &sums {
        let w = sums.get(&(j, i)).copied().unwrap_or_default();
        if (v - w.conj()).norm() > HERMITIAN_TOL * v.norm().max(1.0) {
            return Err(Error::Assembly(format!(
                "entry ({i}, {j}) = {v} but ({j}, {i}) = {w}"
            )));
        }
    }
    Ok(())
}

/// Eigenvalues `<= lambda_max` of the discretized Bloch Hamiltonian at `theta`.
pub fn fd_eigenvalues(
    config: &PeriodicGraphConfig,
    theta: &Theta,
    spec: &PotentialSpec,
    points_per_edge: usize,
    lambda_max: f64,
) -> Result<Vec<f64>> {
    let sys = BlochSystem::new(config, theta, spec, points_per_edge)?;
    check_hermitian(&sys.stiffness_triplets())?;
    Ok(sys.eigenvalues_below(lambda_max))
}

/// Dense generalized eigensolve `K w = λ M w`; small systems only.
pub fn fd_eigenvalues_dense(
    config: &PeriodicGraphConfig,
    theta: &Theta,
    spec: &PotentialSpec,
    points_per_edge: usize,
) -> Result<Vec<f64>> {
    let sys = BlochSystem::new(config, theta, spec, points_per_edge)?;
    let (mut k, mass) = sys.dense()?;
    let scale: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    for i in 0..k.nrows() {
        for j in 0..k.ncols() {
            k[(i, j)] *= scale[i] * scale[j];
        }
    }
    let mut eig: Vec<f64> = k.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub theta: Theta,
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCheckReport {
    pub p: TubeVector,
    pub potential: PotentialSpec,
    pub points_per_edge: usize,
    pub tol: f64,
    pub cutoff: f64,
    pub thetas_checked: usize,
    pub eigenvalues_checked: usize,
    /// Largest residual over all eigenvalues.
    pub worst_residual: f64,
    pub failures: Vec<Mismatch>,
}

impl DispersionCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `count` quasimomenta spread by arc length over the reduced segments of
/// `reduce(p)`, then flipped into `B_p`.
pub fn bp_samples(p: TubeVector, count: usize) -> Result<Vec<Theta>> {
    let family = segments(reduce(p)?);
    let segs: Vec<_> = family.segments.iter().filter(|s| !s.degenerate).collect();
    let total: f64 = segs.iter().map(|s| s.length()).sum();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut pos = (i as f64 + 0.5) / count as f64 * total;
        for s in &segs {
            let len = s.length();
            if pos <= len || std::ptr::eq(*s, *segs.last().expect("non-empty")) {
                out.push(to_bp(p, s.point_at((pos / len).min(1.0))));
                break;
            }
            pos -= len;
        }
    }
    Ok(out)
}

/// Checks every discrete Bloch eigenvalue below `cutoff` against the
/// dispersion relation: `min_j |D(λ) - 2F_j(θ)|` or the distance to the
/// Dirichlet spectrum must be at most `tol`.
#[allow(clippy::too_many_arguments)]
pub fn dispersion_check(
    config: &PeriodicGraphConfig,
    p: TubeVector,
    spec: &PotentialSpec,
    theta_samples: usize,
    points_per_edge: usize,
    tol: f64,
    cutoff: f64,
) -> Result<DispersionCheckReport> {
    let thetas = bp_samples(p, theta_samples)?;
    let op = HillOperator::new(spec);
    let dirichlet = op
        .dirichlet_spectrum(spec.min_value().min(0.0) - 1.0, cutoff + 1.0, 0.05)
        .eigenvalues;

    let per_theta: Vec<Result<Vec<Mismatch>>> = thetas
        .par_iter()
        .map(|theta| {
            let eig = fd_eigenvalues(config, theta, spec, points_per_edge, cutoff)?;
            let f = solve_f(*theta);
            Ok(eig
                .into_iter()
                .map(|lambda| {
                    let d = op.discriminant(lambda);
                    let branch = f
                        .as_array()
                        .iter()
                        .map(|fj| (d - 2.0 * fj).abs())
                        .fold(f64::INFINITY, f64::min);
                    let flat = dirichlet
                        .iter()
                        .map(|ld| (lambda - ld).abs())
                        .fold(f64::INFINITY, f64::min);
                    Mismatch {
                        theta: *theta,
                        lambda,
                        residual: branch.min(flat),
                    }
                })
                .collect())
        })
        .collect();

    let mut all = Vec::new();
    for r in per_theta {
        all.extend(r?);
    }
    let worst_residual = all.iter().map(|m| m.residual).fold(0.0, f64::max);
    let report = DispersionCheckReport {
        p,
        potential: spec.clone(),
        points_per_edge,
        tol,
        cutoff,
        thetas_checked: thetas.len(),
        eigenvalues_checked: all.len(),
        worst_residual,
        failures: all.into_iter().filter(|m| m.residual > tol).collect(),
    };
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::DispersionMismatch(Box::new(report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graphyne_config;
    use std::f64::consts::PI;

    #[test]
    fn inertia_matches_dense_solver() {
        let g = graphyne_config();
        for (t1, t2) in [(0.0, 0.0), (PI, PI), (0.7, -2.1)] {
            let theta = Theta::new(t1, t2);
            let spec = PotentialSpec::cosine(1.0);
            let dense = fd_eigenvalues_dense(&g, &theta, &spec, 50).unwrap();
            let fast = fd_eigenvalues(&g, &theta, &spec, 50, 30.0).unwrap();
            let want: Vec<f64> = dense.into_iter().filter(|&l| l <= 30.0).collect();
            assert_eq!(fast.len(), want.len(), "{fast:?} vs {want:?}");
            for (a, b) in fast.iter().zip(&want) {
                assert!((a - b).abs() < 1e-8 * b.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_coarse_grids() {
        let g = graphyne_config();
        assert!(fd_eigenvalues(&g, &Theta::new(0.0, 0.0), &PotentialSpec::Zero, 20, 10.0).is_err());
    }

    #[test]
    fn samples_lie_in_bp() {
        let p = TubeVector { p1: -2, p2: 3 };
        let s = bp_samples(p, 20).unwrap();
        assert_eq!(s.len(), 20);
        for t in s {
            assert!(crate::quasimomentum::contains(p, t, 1e-9));
        }
    }
}
