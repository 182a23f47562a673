use std::f64::consts::PI;

use nanotube_spectra::graph::fd::{bp_samples, fd_eigenvalues, fd_eigenvalues_dense};
use nanotube_spectra::graph::{identity_residual, GraphEdge};
use nanotube_spectra::quasimomentum::bp_segments;
use nanotube_spectra::*;

fn tube(p1: i64, p2: i64) -> TubeVector {
    TubeVector::new(p1, p2).unwrap()
}

fn nearest(values: &[f64], x: f64) -> f64 {
    values.iter().map(|v| (v - x).abs()).fold(f64::INFINITY, f64::min)
}

fn inv(eta: f64) -> f64 {
    eta.acos().powi(2)
}

#[test]
fn fd_values_at_symmetric_points() {
    let g = graphyne_config();
    let zero = PotentialSpec::Zero;
    let at0 = fd_eigenvalues(&g, &Theta::new(0.0, 0.0), &zero, 200, 10.0).unwrap();
    for want in [0.0, inv(-1.0 / 3.0), inv(-2.0 / 3.0), PI * PI] {
        assert!(nearest(&at0, want) < 5e-3, "{want} missing from {at0:?}");
    }
    let fine = fd_eigenvalues(&g, &Theta::new(0.0, 0.0), &zero, 400, 10.0).unwrap();
    for want in [inv(-1.0 / 3.0), inv(-2.0 / 3.0), PI * PI] {
        assert!(nearest(&fine, want) < 1.3e-3);
    }
    let at_pi = fd_eigenvalues(&g, &Theta::new(PI, PI), &zero, 200, 6.0).unwrap();
    for want in [inv(1.0 / 3.0), PI * PI / 4.0, inv(-1.0 / 3.0)] {
        assert!(nearest(&at_pi, want) < 5e-3, "{want} missing from {at_pi:?}");
    }
}

#[test]
fn fd_inertia_solver_matches_dense_solver() {
    let g = graphyne_config();
    for (theta, spec) in [
        (Theta::new(0.3, -1.2), PotentialSpec::cosine(1.0)),
        (Theta::new(PI, 0.4), PotentialSpec::square_well(3.0, 0.5).unwrap()),
    ] {
        let fast = fd_eigenvalues(&g, &theta, &spec, 60, 30.0).unwrap();
        let dense = fd_eigenvalues_dense(&g, &theta, &spec, 60).unwrap();
        let dense: Vec<f64> = dense.into_iter().filter(|&l| l <= 30.0).collect();
        assert_eq!(fast.len(), dense.len());
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn fd_error_falls_quadratically() {
    let g = graphyne_config();
    let exact = inv(1.0 / 3.0);
    let err = |n| {
        let e = fd_eigenvalues(&g, &Theta::new(PI, PI), &PotentialSpec::Zero, n, 4.0).unwrap();
        nearest(&e, exact)
    };
    let (e1, e2, e3) = (err(100), err(200), err(400));
    assert!((3.2..=4.8).contains(&(e1 / e2)), "{e1} {e2}");
    assert!((3.2..=4.8).contains(&(e2 / e3)), "{e2} {e3}");
}

#[test]
fn dirichlet_values_are_flat_branches() {
    let g = graphyne_config();
    let spec = PotentialSpec::cosine(1.0);
    let dir = dirichlet_spectrum(&spec, 20.0).unwrap().eigenvalues;
    for theta in bp_samples(tube(2, 3), 6).unwrap() {
        let e = fd_eigenvalues(&g, &theta, &spec, 200, 20.0).unwrap();
        for d in &dir {
            assert!(nearest(&e, *d) < 5e-2, "{d} missing at {theta:?}");
        }
    }
}

#[test]
fn dispersion_check_passes_and_catches_a_wrong_graph() {
    let g = graphyne_config();
    let r = dispersion_check(&g, tube(1, 0), &PotentialSpec::Zero, 20, 200, 2e-2, 25.0).unwrap();
    assert!(r.passed() && r.eigenvalues_checked > 20 && r.worst_residual < 2e-2);
    dispersion_check(&g, tube(0, 2), &PotentialSpec::Zero, 20, 200, 2e-2, 25.0).unwrap();
    dispersion_check(&g, tube(2, 3), &PotentialSpec::cosine(1.0), 10, 200, 5e-2, 25.0).unwrap();

    let mut wrong = graphyne_config();
    wrong.edges[4] = GraphEdge {
        u: "B".into(),
        v: "C".into(),
        shift: [1, 1],
    };
    let points: Vec<(Theta, f64)> = (0..20).map(|i| (Theta::new(0.3 * i as f64, 1.0 - 0.2 * i as f64), 0.1 * i as f64 - 1.0)).collect();
    assert!(identity_residual(&wrong, &points).unwrap() > 1e-3);
    match dispersion_check(&wrong, tube(1, 1), &PotentialSpec::Zero, 20, 100, 2e-2, 25.0) {
        Err(Error::DispersionMismatch(report)) => assert!(!report.failures.is_empty()),
        other => panic!("wrong graph passed: {other:?}"),
    }
}

#[test]
fn config_json_round_trip_keeps_positions() {
    let g = graphyne_config();
    let back = PeriodicGraphConfig::from_json(&g.to_json()).unwrap();
    assert_eq!(back, g);
    let bare = r#"{"vertices":["A","B","C"],"edges":[{"u":"A","v":"B","shift":[0,0]}]}"#;
    assert!(PeriodicGraphConfig::from_json(bare).unwrap().positions.is_none());
    let short = r#"{"vertices":["A","B"],"edges":[],"positions":[[0,0]]}"#;
    assert!(PeriodicGraphConfig::from_json(short).is_err());
}

/// Levels carrying compactly supported eigenfunctions, per tube.
fn predicted(p1: i64, p2: i64) -> [bool; 3] {
    if p2 == 0 && p1 % 2 == 0 {
        [true, true, true]
    } else if p1 == 0 {
        let n = p2.abs();
        [true, n % 4 == 0, n % 2 == 0]
    } else {
        [false, false, false]
    }
}

const LEVELS: [f64; 3] = [-1.0 / 3.0, 0.0, 1.0 / 3.0];

#[test]
fn nullspace_table() {
    let g = graphyne_config();
    for (p1, p2) in [(2, 0), (-2, 0), (4, 0), (0, 1), (0, 2), (0, 3), (0, 4), (0, -4), (0, 6), (0, 8), (1, 1), (3, 0), (2, 1)] {
        let want = predicted(p1, p2);
        for (k, eta) in LEVELS.iter().enumerate() {
            let s = build_compact_eigenfunction(&g, tube(p1, p2), *eta, inv(*eta), 2, &PotentialSpec::Zero).unwrap();
            assert_eq!(s.dimension >= 1, want[k], "({p1},{p2}) η={eta}: dim {}", s.dimension);
            for f in &s.basis {
                assert!(f.max_continuity_residual <= 1e-8 && f.max_kirchhoff_residual <= 1e-8);
                let norm: f64 = f.coefficients.iter().map(|(a, b)| a * a + b * b).sum();
                assert!(norm > 0.5);
            }
        }
    }
}

#[test]
fn double_band_needs_height_two() {
    let g = graphyne_config();
    for n in [4, 8, -4] {
        let at = |rings| {
            build_compact_eigenfunction(&g, tube(0, n), 0.0, PI * PI / 4.0, rings, &PotentialSpec::Zero)
                .unwrap()
                .dimension
        };
        assert_eq!(at(1), 0, "(0,{n})");
        assert!(at(2) >= 1, "(0,{n})");
    }
    // flowers and bracelets already fit in height one
    let one = |p1, p2, eta: f64| {
        build_compact_eigenfunction(&g, tube(p1, p2), eta, inv(eta), 1, &PotentialSpec::Zero)
            .unwrap()
            .dimension
    };
    assert!(one(0, 3, -1.0 / 3.0) >= 1);
    assert!(one(2, 0, 0.0) >= 1);
    assert_eq!(one(0, 3, 1.0 / 3.0), 0);
}

#[test]
fn compact_eigenvalues_are_flat_bands_of_the_fd_solver() {
    // a compact eigenfunction on T_p makes λ an eigenvalue along a whole line of B_p
    let g = graphyne_config();
    let flat_line = |p: TubeVector, lambda: f64| {
        bp_segments(p).iter().filter(|s| !s.degenerate).any(|s| {
            (1..=4).all(|i| {
                let theta = s.point_at(i as f64 / 5.0);
                let e = fd_eigenvalues(&g, &theta, &PotentialSpec::Zero, 200, 6.0).unwrap();
                nearest(&e, lambda) < 5e-3
            })
        })
    };
    for (p1, p2) in [(2, 0), (0, 4), (0, 2), (0, 1)] {
        for (k, eta) in LEVELS.iter().enumerate() {
            if predicted(p1, p2)[k] {
                assert!(flat_line(tube(p1, p2), inv(*eta)), "({p1},{p2}) η={eta}");
            }
        }
    }
    assert!(!flat_line(tube(1, 1), PI * PI / 4.0));
    assert!(!flat_line(tube(0, 3), inv(1.0 / 3.0)));
}

#[test]
fn eigenfunctions_under_a_potential() {
    let g = graphyne_config();
    let spec = PotentialSpec::cosine(1.0);
    let lambda = solve_d_equals(&spec, 0.0, 10.0)[0];
    let s = build_compact_eigenfunction(&g, tube(2, 0), 0.0, lambda, 1, &spec).unwrap();
    assert!(s.dimension >= 1);
    assert!(build_compact_eigenfunction(&g, tube(2, 0), 0.0, lambda + 0.1, 1, &spec).is_err());
}
