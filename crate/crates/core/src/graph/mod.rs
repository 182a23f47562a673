//! Periodic equilateral graphs and the graphyne unit cell.
//!
//! A [`PeriodicGraphConfig`] lists the vertices of one cell and its edges; an
//! edge `u -> v` with shift `s` joins `u` in cell `m` to `v` in cell `m + s`.
//! The Floquet adjacency is `A(θ)_{uv} = Σ exp(i s·θ)` over such edges plus the
//! conjugates for the reversed orientation.

pub mod compact;
pub mod fd;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::dispersion::{cubic, Theta};
use crate::error::{Error, Result};

type C64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: String,
    pub v: String,
    pub shift: [i64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGraphConfig {
    pub vertices: Vec<String>,
    pub edges: Vec<GraphEdge>,
    /// Vertex positions inside the cell in lattice coordinates (multiples of
    /// `e1`, `e2`). Only used to measure how far a support reaches along a
    /// tube; all vertices sit at the cell origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
}

/// An edge with its endpoints resolved to vertex positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexedEdge {
    pub u: usize,
    pub v: usize,
    pub shift: [i64; 2],
}

impl IndexedEdge {
    /// `s·θ`.
    pub fn phase(&self, theta: &Theta) -> f64 {
        self.shift[0] as f64 * theta.theta1 + self.shift[1] as f64 * theta.theta2
    }
}

impl PeriodicGraphConfig {
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn indexed_edges(&self) -> Result<Vec<IndexedEdge>> {
        self.edges
            .iter()
            .map(|e| {
                let find = |n: &str| {
                    self.vertex_index(n).ok_or_else(|| {
                        Error::Precondition(format!("edge endpoint {n:?} is not a vertex"))
                    })
                };
                Ok(IndexedEdge {
                    u: find(&e.u)?,
                    v: find(&e.v)?,
                    shift: e.shift,
                })
            })
            .collect()
    }

    /// Degrees counted over edge ends, so a loop contributes 2.
    pub fn degrees(&self) -> Result<Vec<usize>> {
        let mut deg = vec![0; self.vertices.len()];
        for e in self.indexed_edges()? {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        Ok(deg)
    }

    pub fn floquet_adjacency(&self, theta: &Theta) -> Result<DMatrix<C64>> {
        let n = self.vertices.len();
        let mut a = DMatrix::<C64>::zeros(n, n);
        for e in self.indexed_edges()? {
            let z = C64::from_polar(1.0, e.phase(theta));
            a[(e.u, e.v)] += z;
            a[(e.v, e.u)] += z.conj();
        }
        Ok(a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PeriodicGraphConfig = serde_json::from_str(text)
            .map_err(|e| Error::Precondition(format!("malformed graph config: {e}")))?;
        cfg.indexed_edges()?;
        if let Some(pos) = &cfg.positions {
            if pos.len() != cfg.vertices.len() {
                return Err(Error::Precondition(format!(
                    "{} positions given for {} vertices",
                    pos.len(),
                    cfg.vertices.len()
                )));
            }
        }
        Ok(cfg)
    }
}

/// Three vertices per cell with degrees `(4, 3, 3)`: `A` is joined to `B` and
/// to `C` inside its cell and in the next cell along `e1`, and `B` is joined
/// to `C` of the next cell along `e2`.
///
/// `B` and `C` are the top and bottom of a rhombus whose side corners are `A`
/// of this cell and `A` of the previous one, so `A` sits half a period along
/// `e1` from them.
pub fn graphyne_config() -> PeriodicGraphConfig {
    let edge = |u: &str, v: &str, s: [i64; 2]| GraphEdge {
        u: u.into(),
        v: v.into(),
        shift: s,
    };
    PeriodicGraphConfig {
        vertices: vec!["A".into(), "B".into(), "C".into()],
        edges: vec![
            edge("A", "B", [0, 0]),
            edge("A", "B", [1, 0]),
            edge("A", "C", [0, 0]),
            edge("A", "C", [1, 0]),
            edge("B", "C", [0, 1]),
        ],
        positions: Some(vec![[0.5, 0.0], [0.0, 0.25], [0.0, -0.25]]),
    }
}

fn det3(m: &DMatrix<C64>) -> C64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// `det(x·Deg - A(θ))`; real because the matrix is Hermitian.
pub fn char_poly(config: &PeriodicGraphConfig, theta: &Theta, x: f64) -> Result<f64> {
    let deg = config.degrees()?;
    let mut m = -config.floquet_adjacency(theta)?;
    for (i, d) in deg.iter().enumerate() {
        m[(i, i)] += C64::new(x * *d as f64, 0.0);
    }
    let det = if deg.len() == 3 { det3(&m) } else { m.determinant() };
    Ok(det.re)
}

/// Largest `|char_poly - 4·cubic|` over the given points.
pub fn identity_residual(config: &PeriodicGraphConfig, points: &[(Theta, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (theta, x) in points {
        let r = char_poly(config, theta, *x)? - 4.0 * cubic(theta, *x);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}
