//! Spectra of Schrödinger operators on graphyne nanotubes.
//!
//! The operator `-d²/dx² + q0(x)` acts on every edge of the graphyne sheet with
//! Kirchhoff conditions at the vertices; rolling the sheet along a winding
//! vector `p` gives the tube `T_p`. The crate computes
//!
//! - the Hill data of the edge potential: monodromy, discriminant `D(λ)`,
//!   `η(λ)`, Dirichlet spectrum ([`hill`]);
//! - the three branches `F1 <= F2 <= F3` of the dispersion cubic ([`dispersion`]);
//! - the quasimomenta admitted by a tube and their reduction ([`quasimomentum`]);
//! - the ranges of the branches over those quasimomenta ([`ranges`]);
//! - absolutely continuous bands, gaps and point spectrum of the tube ([`spectra`]);
//! - independent checks on an explicit periodic graph: characteristic
//!   polynomial, finite-difference Bloch eigenvalues, compactly supported
//!   eigenfunctions ([`graph`]).
//!
//! ```
//! use nanotube_spectra::{ac_spectrum, PotentialSpec, TubeVector};
//!
//! let p = TubeVector::new(1, 0).unwrap();
//! let bands = ac_spectrum(p, &PotentialSpec::Zero, 9.0).unwrap();
//! assert_eq!(bands.len(), 3);
//! ```

pub mod dispersion;
pub mod error;
pub mod graph;
pub mod hill;
pub mod intervals;
pub mod quasimomentum;
pub mod ranges;
pub mod search;
pub mod spectra;

pub use dispersion::{solve_f, solve_f_oracle, theta_zero, Branch, RootTriple, Theta};
pub use error::{Error, Result};
pub use graph::compact::{build_compact_eigenfunction, compact_eigenspace, CompactEigenspace, EdgeFunction};
pub use graph::fd::{dispersion_check, fd_eigenvalues, DispersionCheckReport};
pub use graph::{char_poly, graphyne_config, PeriodicGraphConfig};
pub use hill::{
    dirichlet_spectrum, discriminant, eta, evaluate_potential, hill_bands, monodromy, solve_d_equals,
    DirichletSpectrum, HillOperator, Monodromy, PotentialSpec, ScanOptions,
};
pub use intervals::{Interval, IntervalSet};
pub use quasimomentum::{contains, reduce, sample_segment, segments, ReducedVector, Segment, SegmentFamily, TubeVector};
pub use ranges::{
    brute_force_range, find_extremum, range_f1, range_f2, range_f3, range_union, Extremum, ExtremumWitness,
    RangeCase, RangeReport,
};
pub use spectra::{
    ac_spectrum, full_report, gap_report, pure_point, BandGaps, Family, GapCase, PurePoint, SpectralScan,
    SpectrumReport,
};
