//! Fixed inputs shared by the benchmarks.

use std::f64::consts::PI;

use nanotube_spectra::{PotentialSpec, Theta, TubeVector};

/// `n` quasimomenta spread over the torus by a golden-ratio lattice.
pub fn torus_points(n: usize) -> Vec<Theta> {
    let g = 0.618_033_988_749_894_9;
    (0..n)
        .map(|i| {
            let u = (i as f64 + 0.5) / n as f64;
            let v = (i as f64 * g).fract();
            Theta::new(-PI + 2.0 * PI * u, -PI + 2.0 * PI * v)
        })
        .collect()
}

pub fn potentials() -> Vec<(&'static str, PotentialSpec)> {
    vec![
        ("zero", PotentialSpec::Zero),
        ("cosine", PotentialSpec::cosine(2.0)),
        ("well", PotentialSpec::square_well(4.0, 0.3).expect("valid well")),
    ]
}

pub fn tubes() -> Vec<TubeVector> {
    [(1, 0), (3, 0), (2, 1), (5, 3)]
        .into_iter()
        .map(|(a, b)| TubeVector::new(a, b).expect("nonzero"))
        .collect()
}
