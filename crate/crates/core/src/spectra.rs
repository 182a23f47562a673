//! Spectrum of the Schrödinger operator on a graphyne tube.
//!
//! The absolutely continuous part is `{λ : η(λ) ∈ F(B_p)}`. Inside each Hill
//! band `D` is monotone, so every interval of the range union pulls back to one
//! interval of energies. The point spectrum is the Dirichlet spectrum together
//! with the extra eigenvalues `η(λ) ∈ {0, ±1/3}` that exist only for tubes of
//! the form `(2N, 0)` and `(0, N)`.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{branch_value, Branch, Theta};
use crate::error::{Error, Result};
use crate::hill::{HillBand, HillOperator, PotentialSpec, ScanOptions};
use crate::intervals::{Interval, IntervalSet};
use crate::quasimomentum::{reduce, TubeVector};
use crate::ranges::{l0, range_union};
use crate::search::{bisect, level_crossings, RootTol, Sampled};

/// Two range endpoints closer than this count as touching.
pub const STRICTNESS_TOL: f64 = 1e-10;
/// Gap pieces no longer than this are rounding debris.
pub const MIN_GAP: f64 = 1e-9;
/// Required agreement `|η(λ) - target|` for extra eigenvalues.
pub const ETA_MATCH_TOL: f64 = 1e-8;
const INVERSION_TOL: f64 = 1e-13;

/// Which gap-opening regime a tube falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GapCase {
    /// `p2 = 0`, `|p1| = 1`: two gaps per band.
    #[serde(rename = "i")]
    I,
    /// `p2 = 0`, `|p1| > 1`: zero to two gaps per band.
    #[serde(rename = "ii")]
    II,
    /// `p2` odd, `|p1| <= 1`: two gaps per band.
    #[serde(rename = "iii")]
    III,
    /// `p2` odd, `|p1| > 1`: one gap per band.
    #[serde(rename = "iv")]
    IV,
    /// `p2` even and nonzero: no new gaps.
    #[serde(rename = "even-p2")]
    EvenP2,
}

impl GapCase {
    pub fn of(p: TubeVector) -> GapCase {
        let (a1, a2) = (p.p1.abs(), p.p2.abs());
        match (a2, a1) {
            (0, 1) => GapCase::I,
            (0, _) => GapCase::II,
            (a2, a1) if a2 % 2 == 1 && a1 <= 1 => GapCase::III,
            (a2, _) if a2 % 2 == 1 => GapCase::IV,
            _ => GapCase::EvenP2,
        }
    }
}

impl fmt::Display for GapCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GapCase::I => "i",
            GapCase::II => "ii",
            GapCase::III => "iii",
            GapCase::IV => "iv",
            GapCase::EvenP2 => "even-p2",
        };
        f.write_str(s)
    }
}

/// For `p = (p1, 0)` with `|p1| > 1`: the gaps `F1(2(l0+1)π/p1, π) - F1(2l0π/p1, 0)`
/// and `F3(2l0π/p1, π) - F3(2(l0+1)π/p1, 0)` between the two pieces of the
/// F1 and F3 ranges. A positive entry opens a gap in every Hill band.
pub fn vertical_family_gaps(p1: i64) -> [f64; 2] {
    let q1 = p1.abs() as f64;
    let l = l0(p1.abs()) as f64;
    let (a, b) = (2.0 * l * PI / q1, 2.0 * (l + 1.0) * PI / q1);
    let f = |t1: f64, t2: f64, br: Branch| branch_value(Theta::new(t1, t2), br);
    [
        f(b, PI, Branch::F1) - f(a, 0.0, Branch::F1),
        f(a, PI, Branch::F3) - f(b, 0.0, Branch::F3),
    ]
}

/// Number of gaps every complete Hill band should carry.
pub fn predicted_gap_count(p: TubeVector) -> usize {
    match GapCase::of(p) {
        GapCase::I | GapCase::III => 2,
        GapCase::IV => 1,
        GapCase::EvenP2 => 0,
        GapCase::II => vertical_family_gaps(p.p1)
            .iter()
            .filter(|&&d| d > STRICTNESS_TOL)
            .count(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandGaps {
    pub hill_band_index: usize,
    pub band: Interval,
    /// Both band ends lie inside the window.
    pub complete: bool,
    pub gaps: IntervalSet,
    pub case: GapCase,
}

/// Compactly supported eigenfunction families behind the extra eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RhombusBracelet,
    HexagonBraceletA,
    HexagonBraceletB,
    Mushroom,
    Flower,
    DoubleBand,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::RhombusBracelet => "rhombus-bracelet",
            Family::HexagonBraceletA => "hexagon-bracelet-a",
            Family::HexagonBraceletB => "hexagon-bracelet-b",
            Family::Mushroom => "mushroom",
            Family::Flower => "flower",
            Family::DoubleBand => "double-band",
        };
        f.write_str(s)
    }
}

/// `(η target, family)` pairs of the extra eigenvalues of a tube.
pub fn sigma0_targets(p: TubeVector) -> Vec<(f64, Family)> {
    let third = 1.0 / 3.0;
    if p.p2 == 0 && p.p1 != 0 && p.p1 % 2 == 0 {
        vec![
            (-third, Family::HexagonBraceletA),
            (0.0, Family::RhombusBracelet),
            (third, Family::HexagonBraceletB),
        ]
    } else if p.p1 == 0 && p.p2 != 0 {
        let n = p.p2.abs();
        let mut t = vec![(-third, Family::Flower)];
        if n % 4 == 0 {
            t.push((0.0, Family::DoubleBand));
        }
        if n % 2 == 0 {
            t.push((third, Family::Mushroom));
        }
        t
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtraEigenvalue {
    pub lambda: f64,
    pub eta_value: f64,
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurePoint {
    pub sigma_d: Vec<f64>,
    pub sigma_0: Vec<ExtraEigenvalue>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub p: TubeVector,
    pub potential: PotentialSpec,
    pub lambda_window: [f64; 2],
    pub ac_bands: IntervalSet,
    pub hill_bands: IntervalSet,
    pub gaps_per_hill_band: Vec<BandGaps>,
    pub sigma_d: Vec<f64>,
    pub sigma_0: Vec<ExtraEigenvalue>,
    pub notes: Vec<String>,
}

/// `min(0, min q0) - 1`; the spectrum never reaches below `min q0`.
pub fn default_floor(spec: &PotentialSpec) -> f64 {
    spec.min_value().min(0.0) - 1.0
}

/// Hill operator plus the discriminant tabulated over one energy window,
/// shared by all spectral queries on that window.
#[derive(Debug, Clone)]
pub struct SpectralScan {
    op: HillOperator,
    window: Interval,
    step: f64,
    table: Sampled,
    bands: Vec<HillBand>,
}

impl SpectralScan {
    /// `opts.lambda_min` is ignored in favour of `window.lo`.
    pub fn new(spec: &PotentialSpec, window: Interval, opts: &ScanOptions) -> Result<Self> {
        if !window.lo.is_finite() || !window.hi.is_finite() || window.hi <= window.lo {
            return Err(Error::Precondition(format!(
                "energy window {window} must be a finite interval of positive length"
            )));
        }
        let op = HillOperator::with_steps(spec, opts.rk_steps)?;
        let table = op.tabulate_discriminant(window.lo, window.hi, opts.step);
        let bands = op.bands_on(&table);
        Ok(SpectralScan {
            op,
            window,
            step: opts.step,
            table,
            bands,
        })
    }

    /// Window `[default_floor(spec), lambda_max]`.
    pub fn up_to(spec: &PotentialSpec, lambda_max: f64) -> Result<Self> {
        let floor = default_floor(spec);
        Self::new(spec, Interval::new(floor, lambda_max.max(floor + 1e-9)), &ScanOptions::default())
    }

    pub fn operator(&self) -> &HillOperator {
        &self.op
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    pub fn bands(&self) -> &[HillBand] {
        &self.bands
    }

    pub fn hill_bands(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.bands.iter().map(HillBand::interval))
    }

    /// Energies in `band` where `D` takes values in `[lo, hi]`.
    fn pull_back(&self, band: &HillBand, lo: f64, hi: f64) -> Option<Interval> {
        let (dmin, dmax) = (band.d_lo.min(band.d_hi), band.d_lo.max(band.d_hi));
        let (lo, hi) = (lo.max(dmin), hi.min(dmax));
        if lo > hi {
            return None;
        }
        let invert = |c: f64| -> f64 {
            if c == band.d_lo {
                return band.lo;
            }
            if c == band.d_hi {
                return band.hi;
            }
            bisect(|l| self.op.discriminant(l) - c, band.lo, band.hi, INVERSION_TOL)
        };
        Some(Interval::new(invert(lo), invert(hi)))
    }

    fn ac_in_band(&self, band: &HillBand, targets: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(
            targets
                .iter()
                .filter_map(|iv| self.pull_back(band, 2.0 * iv.lo, 2.0 * iv.hi)),
        )
    }

    fn eta_targets(&self, p: TubeVector) -> Result<IntervalSet> {
        let report = range_union(reduce(p)?)?;
        Ok(report.union.merged(STRICTNESS_TOL))
    }

    pub fn ac_spectrum(&self, p: TubeVector) -> Result<IntervalSet> {
        let targets = self.eta_targets(p)?;
        let pieces: Vec<IntervalSet> = self
            .bands
            .par_iter()
            .map(|b| self.ac_in_band(b, &targets))
            .collect();
        Ok(pieces
            .iter()
            .fold(IntervalSet::empty(), |acc, s| acc.union(s)))
    }

    pub fn gap_report(&self, p: TubeVector) -> Result<Vec<BandGaps>> {
        let targets = self.eta_targets(p)?;
        let case = GapCase::of(p);
        Ok(self
            .bands
            .par_iter()
            .map(|b| {
                let ac = self.ac_in_band(b, &targets);
                BandGaps {
                    hill_band_index: b.index,
                    band: b.interval(),
                    complete: b.complete,
                    gaps: ac.complement_within(&b.interval(), MIN_GAP),
                    case,
                }
            })
            .collect())
    }

    pub fn pure_point(&self, p: TubeVector) -> Result<PurePoint> {
        p.validate()?;
        let sigma_d = self
            .op
            .dirichlet_spectrum(self.window.lo, self.window.hi, self.step)
            .eigenvalues;
        let mut notes = Vec::new();
        let floor = default_floor(self.op.spec());
        let below = if floor < self.window.lo {
            Some(Sampled::tabulate(
                |l| self.op.discriminant(l),
                floor,
                self.window.lo,
                self.step,
            ))
        } else {
            None
        };

        let mut sigma_0 = Vec::new();
        let mut omitted = 0;
        for (eta_value, family) in sigma0_targets(p) {
            for lambda in self.op.solve_d_equals_on(&self.table, 2.0 * eta_value) {
                let got = self.op.eta(lambda);
                if (got - eta_value).abs() > ETA_MATCH_TOL {
                    return Err(Error::Precondition(format!(
                        "η({lambda}) = {got} misses the target {eta_value}"
                    )));
                }
                sigma_0.push(ExtraEigenvalue {
                    lambda,
                    eta_value,
                    family,
                });
            }
            if let Some(t) = &below {
                omitted += level_crossings(
                    |l| self.op.discriminant(l),
                    t,
                    2.0 * eta_value,
                    RootTol::default(),
                )
                .iter()
                .filter(|&&l| l < self.window.lo)
                .count();
            }
        }
        sigma_0.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        if omitted > 0 {
            notes.push(format!(
                "{omitted} extra eigenvalue(s) below the window floor {} omitted",
                self.window.lo
            ));
        }
        Ok(PurePoint {
            sigma_d,
            sigma_0,
            notes,
        })
    }

    pub fn full_report(&self, p: TubeVector) -> Result<SpectrumReport> {
        let ac_bands = self.ac_spectrum(p)?;
        let gaps = self.gap_report(p)?;
        let pp = self.pure_point(p)?;
        let mut notes = vec![
            "singular continuous spectrum: empty".to_string(),
            "multiplicity of every Dirichlet eigenvalue: infinite".to_string(),
        ];
        if !pp.sigma_0.is_empty() {
            notes.push("multiplicity of every extra eigenvalue: infinite".to_string());
        }
        notes.extend(pp.notes);
        Ok(SpectrumReport {
            p,
            potential: self.op.spec().clone(),
            lambda_window: [self.window.lo, self.window.hi],
            ac_bands,
            hill_bands: self.hill_bands(),
            gaps_per_hill_band: gaps,
            sigma_d: pp.sigma_d,
            sigma_0: pp.sigma_0,
            notes,
        })
    }
}

pub fn ac_spectrum(p: TubeVector, spec: &PotentialSpec, lambda_max: f64) -> Result<IntervalSet> {
    p.validate()?;
    SpectralScan::up_to(spec, lambda_max)?.ac_spectrum(p)
}

pub fn gap_report(p: TubeVector, spec: &PotentialSpec, lambda_max: f64) -> Result<Vec<BandGaps>> {
    p.validate()?;
    SpectralScan::up_to(spec, lambda_max)?.gap_report(p)
}

pub fn pure_point(p: TubeVector, spec: &PotentialSpec, lambda_max: f64) -> Result<PurePoint> {
    p.validate()?;
    SpectralScan::up_to(spec, lambda_max)?.pure_point(p)
}

pub fn full_report(p: TubeVector, spec: &PotentialSpec, lambda_window: [f64; 2]) -> Result<SpectrumReport> {
    p.validate()?;
    let window = Interval::new(lambda_window[0], lambda_window[1]);
    SpectralScan::new(spec, window, &ScanOptions::default())?.full_report(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tube(p1: i64, p2: i64) -> TubeVector {
        TubeVector { p1, p2 }
    }

    fn acos2(c: f64) -> f64 {
        c.acos().powi(2)
    }

    #[test]
    fn case_labels() {
        assert_eq!(GapCase::of(tube(-1, 0)), GapCase::I);
        assert_eq!(GapCase::of(tube(3, 0)), GapCase::II);
        assert_eq!(GapCase::of(tube(-1, 3)), GapCase::III);
        assert_eq!(GapCase::of(tube(2, 1)), GapCase::IV);
        assert_eq!(GapCase::of(tube(5, -4)), GapCase::EvenP2);
        assert_eq!(predicted_gap_count(tube(3, 0)), 2);
        assert_eq!(predicted_gap_count(tube(2, 0)), 2);
    }

    #[test]
    fn free_tube_one_zero() {
        let ac = ac_spectrum(tube(1, 0), &PotentialSpec::Zero, PI * PI).unwrap();
        let want = [
            (0.0, acos2(2.0 / 3.0)),
            (acos2(1.0 / 3.0), acos2(-1.0 / 3.0)),
            (acos2(-2.0 / 3.0), PI * PI),
        ];
        assert_eq!(ac.len(), 3, "{ac}");
        for (iv, (lo, hi)) in ac.iter().zip(want) {
            assert!((iv.lo - lo).abs() < 1e-8 && (iv.hi - hi).abs() < 1e-8, "{ac}");
        }
    }

    #[test]
    fn even_p2_keeps_hill_bands() {
        let ac = ac_spectrum(tube(0, 2), &PotentialSpec::Zero, 10.0).unwrap();
        assert_eq!(ac.len(), 1);
        assert!(ac.intervals()[0].lo.abs() < 1e-8 && ac.intervals()[0].hi == 10.0);
        let g = gap_report(tube(0, 2), &PotentialSpec::Zero, 50.0).unwrap();
        assert!(g.iter().all(|b| b.gaps.is_empty() && b.case == GapCase::EvenP2));
    }

    #[test]
    fn extra_eigenvalues() {
        let pp = pure_point(tube(2, 0), &PotentialSpec::Zero, 6.0).unwrap();
        assert!(pp.sigma_d.is_empty());
        let l: Vec<f64> = pp.sigma_0.iter().map(|e| e.lambda).collect();
        let want = [acos2(1.0 / 3.0), PI * PI / 4.0, acos2(-1.0 / 3.0)];
        assert_eq!(l.len(), 3);
        for (a, b) in l.iter().zip(want) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(pure_point(tube(1, 1), &PotentialSpec::Zero, 100.0)
            .unwrap()
            .sigma_0
            .is_empty());
        let pp = pure_point(tube(0, 3), &PotentialSpec::Zero, 6.0).unwrap();
        assert_eq!(pp.sigma_0.len(), 1);
        assert_eq!(pp.sigma_0[0].family, Family::Flower);
    }

    #[test]
    fn rejects_zero_tube() {
        assert!(full_report(tube(0, 0), &PotentialSpec::Zero, [0.0, 10.0]).is_err());
    }
}
