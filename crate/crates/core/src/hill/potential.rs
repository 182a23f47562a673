//! Even edge potentials on `[0, 1]`.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum allowed asymmetry `|q(x) - q(1 - x)|` of a sampled potential.
pub const EVENNESS_TOL: f64 = 1e-9;

/// The potential carried by every edge, `q0(x) = q0(1 - x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero,
    /// `amplitude * cos(2 pi x)`.
    Cosine { amplitude: f64 },
    /// `-depth` on the centered window of the given width, zero elsewhere.
    SquareWell { depth: f64, width: f64 },
    /// Piecewise-linear interpolation of `(x, value)` samples.
    Sampled { points: Vec<(f64, f64)> },
}

impl PotentialSpec {
    pub fn cosine(amplitude: f64) -> Self {
        PotentialSpec::Cosine { amplitude }
    }

    pub fn square_well(depth: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width < 1.0) {
            return Err(Error::InvalidPotential(format!(
                "well width {width} must lie in (0, 1)"
            )));
        }
        if !depth.is_finite() {
            return Err(Error::InvalidPotential("well depth must be finite".into()));
        }
        Ok(PotentialSpec::SquareWell { depth, width })
    }

    /// Validates ordering, endpoints and evenness of the samples.
    pub fn sampled(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPotential(
                "a sampled potential needs at least two points".into(),
            ));
        }
        if points.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidPotential("non-finite sample".into()));
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(Error::InvalidPotential(
                "sample abscissae must start at 0 and end at 1".into(),
            ));
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidPotential(format!(
                "sample abscissae must be strictly increasing (x = {} followed by {})",
                w[0].0, w[1].0
            )));
        }
        for &(x, v) in &points {
            let mirrored = interpolate(&points, 1.0 - x);
            if (v - mirrored).abs() > EVENNESS_TOL {
                return Err(Error::InvalidPotential(format!(
                    "potential is not even: q({x}) = {v} but q({}) = {mirrored}",
                    1.0 - x
                )));
            }
        }
        Ok(PotentialSpec::Sampled { points })
    }

    /// Reads a two-column `x,value` CSV; a header row is optional.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::PotentialFile {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut points = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::InvalidPotential(format!(
                    "row {} has {} columns, expected 2",
                    row + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(v)) => points.push((x, v)),
                _ if row == 0 => continue, // header
                _ => {
                    return Err(Error::InvalidPotential(format!(
                        "row {} is not numeric: {:?}",
                        row + 1,
                        record
                    )))
                }
            }
        }
        Self::sampled(points)
    }

    /// `q0(x)` for `x` in `[0, 1]`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                domain: "[0, 1]",
            });
        }
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            // cos(2 pi x) written through the distance to 1/2 so that
            // q(x) and q(1 - x) round identically.
            PotentialSpec::Cosine { amplitude } => -amplitude * (TAU * (x - 0.5).abs()).cos(),
            PotentialSpec::SquareWell { depth, width } => {
                if (x - 0.5).abs() < 0.5 * width {
                    -depth
                } else {
                    0.0
                }
            }
            PotentialSpec::Sampled { points } => interpolate(points, x),
        }
    }

    /// Points where the potential or its derivative may jump, including 0 and 1.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            PotentialSpec::Zero | PotentialSpec::Cosine { .. } => vec![0.0, 1.0],
            PotentialSpec::SquareWell { width, .. } => {
                vec![0.0, 0.5 - 0.5 * width, 0.5 + 0.5 * width, 1.0]
            }
            PotentialSpec::Sampled { points } => points.iter().map(|p| p.0).collect(),
        }
    }

    /// Lower bound of `q0`, which bounds every spectrum from below.
    pub fn min_value(&self) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Cosine { amplitude } => -amplitude.abs(),
            PotentialSpec::SquareWell { depth, .. } => (-depth).min(0.0),
            PotentialSpec::Sampled { points } => {
                points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Value of `q0` at the edge ends (the vertices).
    pub fn endpoint_value(&self) -> f64 {
        self.value_unchecked(0.0)
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Zero => write!(f, "zero"),
            PotentialSpec::Cosine { amplitude } => write!(f, "cosine:{amplitude}"),
            PotentialSpec::SquareWell { depth, width } => write!(f, "well:{depth}:{width}"),
            PotentialSpec::Sampled { points } => write!(f, "sampled({} points)", points.len()),
        }
    }
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let idx = points.partition_point(|p| p.0 <= x);
    if idx == 0 {
        return points[0].1;
    }
    if idx >= points.len() {
        return points[points.len() - 1].1;
    }
    let (x0, v0) = points[idx - 1];
    let (x1, v1) = points[idx];
    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_values() {
        assert_eq!(PotentialSpec::Zero.evaluate(0.37).unwrap(), 0.0);
        assert!(PotentialSpec::cosine(1.0).evaluate(0.25).unwrap().abs() < 1e-15);
        assert!((PotentialSpec::cosine(2.0).evaluate(0.5).unwrap() + 2.0).abs() < 1e-15);
        assert!((PotentialSpec::cosine(2.0).evaluate(0.0).unwrap() - 2.0).abs() < 1e-15);
        let well = PotentialSpec::square_well(5.0, 0.4).unwrap();
        assert_eq!(well.evaluate(0.5).unwrap(), -5.0);
        assert_eq!(well.evaluate(0.1).unwrap(), 0.0);
    }

    #[test]
    fn analytic_kinds_are_even() {
        let specs = [
            PotentialSpec::cosine(1.7),
            PotentialSpec::square_well(3.0, 0.3).unwrap(),
        ];
        for spec in &specs {
            for i in 0..=1000 {
                let (x, y) = (i as f64 / 1000.0, (1000 - i) as f64 / 1000.0);
                assert!((spec.value_unchecked(x) - spec.value_unchecked(y)).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn out_of_domain_is_rejected() {
        assert!(matches!(
            PotentialSpec::Zero.evaluate(1.5),
            Err(Error::Domain { .. })
        ));
        assert!(PotentialSpec::Zero.evaluate(-1e-3).is_err());
    }

    #[test]
    fn sampled_validation() {
        let ok = PotentialSpec::sampled(vec![(0.0, 1.0), (0.5, -1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(ok.evaluate(0.25).unwrap(), 0.0);
        assert!(PotentialSpec::sampled(vec![(0.0, 1.0), (0.5, -1.0), (1.0, 0.0)]).is_err());
        assert!(PotentialSpec::sampled(vec![(0.0, 0.0), (0.6, 0.0), (0.4, 0.0), (1.0, 0.0)]).is_err());
        assert!(PotentialSpec::sampled(vec![(0.1, 0.0), (1.0, 0.0)]).is_err());
        assert!(PotentialSpec::square_well(1.0, 1.0).is_err());
    }

    #[test]
    fn csv_with_and_without_header() {
        let with = PotentialSpec::from_csv_str("x,value\n0,2\n0.5,0\n1,2\n").unwrap();
        let without = PotentialSpec::from_csv_str("0,2\n0.5,0\n1,2\n").unwrap();
        assert_eq!(with, without);
        let err = PotentialSpec::from_csv_str("0,2\n0.5,0\n1,1\n").unwrap_err();
        assert!(err.to_string().contains("not even"));
        let err = PotentialSpec::from_csv_str("0,2\n0.6,0\n0.5,0\n1,2\n").unwrap_err();
        assert!(err.to_string().contains("strictly increasing"));
    }
}
