//! The 1-periodic Hill operator `-u'' + q0 u` built from the edge potential.
//!
//! Everything here derives from the monodromy matrix
//!
//! ```text
//! M(λ) = | c(1)  s(1)  |
//!        | c'(1) s'(1) |
//! ```
//!
//! where `c` and `s` solve `u'' = (q0 - λ) u` with `(c, c')(0) = (1, 0)` and
//! `(s, s')(0) = (0, 1)`. The discriminant is `D(λ) = c(1) + s'(1)`, and for an
//! even potential `η(λ) = s'(1) = D(λ) / 2`. Dirichlet eigenvalues on `[0, 1]`
//! are the zeros of `s(1; λ)`.

mod potential;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::search::{level_crossings, RootTol, Sampled};

pub use potential::{PotentialSpec, EVENNESS_TOL};

pub const DEFAULT_STEPS: usize = 2048;
pub const MIN_STEPS: usize = 16;
pub const DEFAULT_LAMBDA_MIN: f64 = -50.0;
pub const DEFAULT_SCAN_STEP: f64 = 0.05;

/// Grid and integrator settings shared by the level-set scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub lambda_min: f64,
    pub step: f64,
    pub rk_steps: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            lambda_min: DEFAULT_LAMBDA_MIN,
            step: DEFAULT_SCAN_STEP,
            rk_steps: DEFAULT_STEPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub c1: f64,
    pub s1: f64,
    pub c1p: f64,
    pub s1p: f64,
    pub lambda: f64,
}

impl Monodromy {
    pub fn discriminant(&self) -> f64 {
        self.c1 + self.s1p
    }

    pub fn eta(&self) -> f64 {
        self.s1p
    }

    pub fn wronskian(&self) -> f64 {
        self.c1 * self.s1p - self.s1 * self.c1p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletSpectrum {
    pub eigenvalues: Vec<f64>,
    pub cutoff: f64,
}

/// One spectral band of the Hill operator inside a scan window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillBand {
    /// Position counted from the bottom of the scan window, starting at 0.
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    /// Both ends are genuine band edges (`|D| = 2`) rather than window cuts.
    pub complete: bool,
    pub d_lo: f64,
    pub d_hi: f64,
}

impl HillBand {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }
}

/// One RK4 step's worth of tabulated potential.
#[derive(Debug, Clone, Copy)]
struct Step {
    h: f64,
    q0: f64,
    qm: f64,
    q1: f64,
}

/// Hill operator with the potential pre-tabulated on the integration grid.
///
/// The grid is aligned with the potential's breakpoints (well edges, sample
/// abscissae) so the integrator never steps across a kink.
#[derive(Debug, Clone)]
pub struct HillOperator {
    spec: PotentialSpec,
    steps: Vec<Step>,
}

impl HillOperator {
    pub fn new(spec: &PotentialSpec) -> Self {
        Self::with_steps(spec, DEFAULT_STEPS).expect("default step count is valid")
    }

    pub fn with_steps(spec: &PotentialSpec, steps: usize) -> Result<Self> {
        if steps < MIN_STEPS {
            return Err(Error::Precondition(format!(
                "integration needs at least {MIN_STEPS} steps, got {steps}"
            )));
        }
        let breaks = spec.breakpoints();
        let mut grid = Vec::with_capacity(steps + breaks.len());
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = b - a;
            let n = ((len * steps as f64) - 1e-9).ceil().max(1.0) as usize;
            let h = len / n as f64;
            // one-sided evaluation keeps jumps at piece ends out of the step
            let nudge = 1e-12 * len;
            let q = |x: f64| spec.value_unchecked(x.clamp(a + nudge, b - nudge));
            for i in 0..n {
                let x0 = a + i as f64 * h;
                let x1 = if i + 1 == n { b } else { a + (i + 1) as f64 * h };
                grid.push(Step {
                    h: x1 - x0,
                    q0: q(x0),
                    qm: q(0.5 * (x0 + x1)),
                    q1: q(x1),
                });
            }
        }
        Ok(HillOperator {
            spec: spec.clone(),
            steps: grid,
        })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Classical RK4 for both fundamental solutions at once.
    pub fn monodromy(&self, lambda: f64) -> Monodromy {
        // columns: (c, c') and (s, s')
        let (mut c, mut cp, mut s, mut sp) = (1.0, 0.0, 0.0, 1.0);
        for st in &self.steps {
            let (a0, am, a1) = (st.q0 - lambda, st.qm - lambda, st.q1 - lambda);
            let h = st.h;
            let rk = |u: f64, v: f64| -> (f64, f64) {
                let (k1u, k1v) = (v, a0 * u);
                let (k2u, k2v) = (v + 0.5 * h * k1v, am * (u + 0.5 * h * k1u));
                let (k3u, k3v) = (v + 0.5 * h * k2v, am * (u + 0.5 * h * k2u));
                let (k4u, k4v) = (v + h * k3v, a1 * (u + h * k3u));
                (
                    u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
                    v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
                )
            };
            (c, cp) = rk(c, cp);
            (s, sp) = rk(s, sp);
        }
        Monodromy {
            c1: c,
            s1: s,
            c1p: cp,
            s1p: sp,
            lambda,
        }
    }

    pub fn discriminant(&self, lambda: f64) -> f64 {
        self.monodromy(lambda).discriminant()
    }

    /// `s'(1; λ)`, also at Dirichlet points where the quotient form degenerates.
    pub fn eta(&self, lambda: f64) -> f64 {
        self.monodromy(lambda).eta()
    }

    pub fn tabulate_discriminant(&self, lo: f64, hi: f64, step: f64) -> Sampled {
        Sampled::tabulate(|l| self.discriminant(l), lo, hi, step)
    }

    /// Roots of `D(λ) = c` in `[lo, hi]`.
    pub fn solve_d_equals(&self, c: f64, lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let table = self.tabulate_discriminant(lo, hi, step);
        self.solve_d_equals_on(&table, c)
    }

    pub fn solve_d_equals_on(&self, table: &Sampled, c: f64) -> Vec<f64> {
        level_crossings(|l| self.discriminant(l), table, c, RootTol::default())
    }

    /// Zeros of `s(1; λ)` in `[lo, hi]`.
    pub fn dirichlet_spectrum(&self, lo: f64, hi: f64, step: f64) -> DirichletSpectrum {
        let s1 = |l: f64| self.monodromy(l).s1;
        let table = Sampled::tabulate(s1, lo, hi, step);
        let eigenvalues = level_crossings(s1, &table, 0.0, RootTol::default());
        DirichletSpectrum {
            eigenvalues,
            cutoff: hi,
        }
    }

    /// Bands of `{|D| <= 2}` inside `[lo, hi]`, split at closed gaps.
    pub fn bands(&self, lo: f64, hi: f64, step: f64) -> Vec<HillBand> {
        let table = self.tabulate_discriminant(lo, hi, step);
        self.bands_on(&table)
    }

    pub fn bands_on(&self, table: &Sampled) -> Vec<HillBand> {
        let (lo, hi) = (table.xs[0], *table.xs.last().expect("non-empty grid"));
        let mut edges: Vec<(f64, f64)> = self
            .solve_d_equals_on(table, 2.0)
            .into_iter()
            .map(|l| (l, 2.0))
            .chain(
                self.solve_d_equals_on(table, -2.0)
                    .into_iter()
                    .map(|l| (l, -2.0)),
            )
            .filter(|&(l, _)| l > lo && l < hi)
            .collect();
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut marks: Vec<(f64, Option<f64>)> = vec![(lo, None)];
        marks.extend(edges.into_iter().map(|(l, d)| (l, Some(d))));
        marks.push((hi, None));

        let mut bands = Vec::new();
        for w in marks.windows(2) {
            let ((a, da), (b, db)) = (w[0], w[1]);
            if b - a <= 1e-12 {
                continue;
            }
            if self.discriminant(0.5 * (a + b)).abs() > 2.0 {
                continue;
            }
            bands.push(HillBand {
                index: bands.len(),
                lo: a,
                hi: b,
                complete: da.is_some() && db.is_some(),
                d_lo: da.unwrap_or_else(|| self.discriminant(a)),
                d_hi: db.unwrap_or_else(|| self.discriminant(b)),
            });
        }
        bands
    }

    /// The set `{λ in [lo, hi] : |D(λ)| <= 2}`.
    pub fn band_set(&self, lo: f64, hi: f64, step: f64) -> IntervalSet {
        IntervalSet::from_intervals(self.bands(lo, hi, step).iter().map(HillBand::interval))
    }
}

pub fn evaluate_potential(spec: &PotentialSpec, x: f64) -> Result<f64> {
    spec.evaluate(x)
}

pub fn monodromy(spec: &PotentialSpec, lambda: f64, steps: usize) -> Result<Monodromy> {
    Ok(HillOperator::with_steps(spec, steps)?.monodromy(lambda))
}

pub fn discriminant(spec: &PotentialSpec, lambda: f64) -> f64 {
    HillOperator::new(spec).discriminant(lambda)
}

pub fn eta(spec: &PotentialSpec, lambda: f64) -> f64 {
    HillOperator::new(spec).eta(lambda)
}

pub fn dirichlet_spectrum(spec: &PotentialSpec, lambda_max: f64) -> Result<DirichletSpectrum> {
    dirichlet_spectrum_with(spec, lambda_max, &ScanOptions::default())
}

pub fn dirichlet_spectrum_with(
    spec: &PotentialSpec,
    lambda_max: f64,
    opts: &ScanOptions,
) -> Result<DirichletSpectrum> {
    check_window(opts.lambda_min, lambda_max)?;
    let op = HillOperator::with_steps(spec, opts.rk_steps)?;
    Ok(op.dirichlet_spectrum(opts.lambda_min, lambda_max, opts.step))
}

pub fn solve_d_equals(spec: &PotentialSpec, c: f64, lambda_max: f64) -> Vec<f64> {
    solve_d_equals_with(spec, c, lambda_max, &ScanOptions::default()).unwrap_or_default()
}

pub fn solve_d_equals_with(
    spec: &PotentialSpec,
    c: f64,
    lambda_max: f64,
    opts: &ScanOptions,
) -> Result<Vec<f64>> {
    if lambda_max <= opts.lambda_min {
        return Ok(Vec::new());
    }
    let op = HillOperator::with_steps(spec, opts.rk_steps)?;
    Ok(op.solve_d_equals(c, opts.lambda_min, lambda_max, opts.step))
}

pub fn hill_bands(spec: &PotentialSpec, lambda_max: f64) -> IntervalSet {
    hill_bands_with(spec, lambda_max, &ScanOptions::default()).unwrap_or_default()
}

pub fn hill_bands_with(
    spec: &PotentialSpec,
    lambda_max: f64,
    opts: &ScanOptions,
) -> Result<IntervalSet> {
    if lambda_max <= opts.lambda_min {
        return Ok(IntervalSet::empty());
    }
    let op = HillOperator::with_steps(spec, opts.rk_steps)?;
    Ok(op.band_set(opts.lambda_min, lambda_max, opts.step))
}

fn check_window(lo: f64, hi: f64) -> Result<()> {
    if hi > lo {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "lambda_max = {hi} must exceed the scan floor {lo}"
        )))
    }
}
