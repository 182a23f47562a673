//! Roots of the dispersion cubic `9x³ - x - (cos θ1 + 1)(3x + cos θ2) = 0`.
//!
//! For every quasimomentum the cubic has three real roots `F1 <= F2 <= F3`,
//! lying in `[-1, -1/3]`, `[-1/3, 1/3]` and `[1/3, 1]` respectively. The
//! spectrum of a Bloch fibre is `{λ : η(λ) = F_j(θ)}` together with the
//! Dirichlet eigenvalues.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

/// A point of the Brillouin zone `[-π, π]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub theta1: f64,
    pub theta2: f64,
}

impl Theta {
    /// Reduces both components modulo 2π into `[-π, π]`.
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Theta {
            theta1: wrap(theta1),
            theta2: wrap(theta2),
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.theta1, self.theta2]
    }
}

fn wrap(t: f64) -> f64 {
    if (-PI..=PI).contains(&t) {
        return t;
    }
    let r = t - TAU * (t / TAU).round();
    r.clamp(-PI, PI)
}

/// The three branches of the dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    F1,
    F2,
    F3,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::F1, Branch::F2, Branch::F3];

    pub fn index(self) -> usize {
        match self {
            Branch::F1 => 1,
            Branch::F2 => 2,
            Branch::F3 => 3,
        }
    }

    pub fn from_index(j: usize) -> Option<Branch> {
        match j {
            1 => Some(Branch::F1),
            2 => Some(Branch::F2),
            3 => Some(Branch::F3),
            _ => None,
        }
    }

    /// The interval every value of this branch lies in.
    pub fn global_range(self) -> (f64, f64) {
        match self {
            Branch::F1 => (-1.0, -1.0 / 3.0),
            Branch::F2 => (-1.0 / 3.0, 1.0 / 3.0),
            Branch::F3 => (1.0 / 3.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootTriple {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl RootTriple {
    pub fn get(&self, branch: Branch) -> f64 {
        match branch {
            Branch::F1 => self.f1,
            Branch::F2 => self.f2,
            Branch::F3 => self.f3,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.f1, self.f2, self.f3]
    }

    fn sorted(mut r: [f64; 3]) -> Self {
        r.sort_by(f64::total_cmp);
        RootTriple {
            f1: r[0],
            f2: r[1],
            f3: r[2],
        }
    }
}

/// `arccos(-1/3)`, the θ1 of the Dirac points.
pub fn theta_zero() -> f64 {
    (-1.0f64 / 3.0).acos()
}

/// Coefficients `(P, Q)` of the monic cubic `x³ + P x + Q`; there is no quadratic term.
fn depressed(theta: &Theta) -> (f64, f64) {
    let a = 1.0 + theta.theta1.cos();
    let c2 = theta.theta2.cos();
    (-(1.0 + 3.0 * a) / 9.0, -a * c2 / 9.0)
}

/// `-(4P³ + 27Q²)`; non-negative exactly when all three roots are real.
pub fn cubic_discriminant(theta: &Theta) -> f64 {
    let (p, q) = depressed(theta);
    -(4.0 * p * p * p + 27.0 * q * q)
}

/// `9x³ - x - (cos θ1 + 1)(3x + cos θ2)`.
pub fn cubic(theta: &Theta, x: f64) -> f64 {
    9.0 * x * x * x - x - (theta.theta1.cos() + 1.0) * (3.0 * x + theta.theta2.cos())
}

/// Arguments of `acos` this close to ±1 are taken as a double root.
const DOUBLE_ROOT_SNAP: f64 = 4.0 * f64::EPSILON;

/// Trigonometric Cardano for three real roots.
pub fn solve_f(theta: Theta) -> RootTriple {
    let (p, q) = depressed(&theta);
    // p <= -1/9 for every θ, so the trigonometric form always applies
    let m = 2.0 * (-p / 3.0).sqrt();
    let mut arg = (1.5 * q / p) * (-3.0 / p).sqrt();
    if arg >= 1.0 - DOUBLE_ROOT_SNAP {
        arg = 1.0;
    } else if arg <= -1.0 + DOUBLE_ROOT_SNAP {
        arg = -1.0;
    }
    let phi = arg.acos() / 3.0;
    let r = [
        m * phi.cos(),
        m * (phi - TAU / 3.0).cos(),
        m * (phi - 2.0 * TAU / 3.0).cos(),
    ];
    RootTriple::sorted(r)
}

/// Independent root finder: eigenvalues of the companion matrix, polished by Newton.
pub fn solve_f_oracle(theta: Theta) -> RootTriple {
    let (p, q) = depressed(&theta);
    let companion = Matrix3::new(0.0, 0.0, -q, 1.0, 0.0, -p, 0.0, 1.0, 0.0);
    let eig = companion.complex_eigenvalues();
    let f = |x: f64| x * x * x + p * x + q;
    let df = |x: f64| 3.0 * x * x + p;
    let mut roots = [0.0; 3];
    for (slot, z) in roots.iter_mut().zip(eig.iter()) {
        let mut x = z.re;
        for _ in 0..4 {
            let d = df(x);
            if d == 0.0 {
                break;
            }
            let next = x - f(x) / d;
            if f(next).abs() < f(x).abs() {
                x = next;
            } else {
                break;
            }
        }
        *slot = x;
    }
    RootTriple::sorted(roots)
}

/// Value of a single branch.
pub fn branch_value(theta: Theta, branch: Branch) -> f64 {
    solve_f(theta).get(branch)
}
