use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use nanotube_spectra::graph::identity_residual;
use nanotube_spectra::hill::{ScanOptions, DEFAULT_SCAN_STEP};
use nanotube_spectra::spectra::sigma0_targets;
use nanotube_spectra::*;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{OutputFormat, RunConfig, Subcommand};
use crate::output::{write_json, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Something a subcommand produced, in both renderings.
struct Emit {
    table: Table,
    json: serde_json::Value,
    passed: bool,
}

impl Emit {
    fn new<T: Serialize>(table: Table, json: &T) -> Self {
        Emit {
            table,
            json: serde_json::to_value(json).expect("serializable output"),
            passed: true,
        }
    }
}

fn tube(cfg: &RunConfig) -> TubeVector {
    cfg.p.expect("tube-specific subcommand carries --p")
}

fn scan(cfg: &RunConfig) -> Result<SpectralScan> {
    let [lo, hi] = cfg.lambda_window;
    SpectralScan::new(&cfg.potential, Interval::new(lo, hi), &ScanOptions::default())
}

fn discriminant_grid(cfg: &RunConfig) -> Emit {
    let op = HillOperator::new(&cfg.potential);
    let [lo, hi] = cfg.lambda_window;
    let n = cfg.grid;
    let rows: Vec<[f64; 3]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let lambda = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let m = op.monodromy(lambda);
            [lambda, m.discriminant(), m.eta()]
        })
        .collect();
    let mut t = Table::new(&["lambda", "D", "eta"]);
    for r in &rows {
        t.push(r.iter().map(|&x| x.into()).collect());
    }
    let json: Vec<_> = rows
        .iter()
        .map(|r| json!({"lambda": r[0], "D": r[1], "eta": r[2]}))
        .collect();
    Emit::new(t, &json)
}

fn dirichlet(cfg: &RunConfig) -> Emit {
    let [lo, hi] = cfg.lambda_window;
    let d = HillOperator::new(&cfg.potential).dirichlet_spectrum(lo, hi, DEFAULT_SCAN_STEP);
    let mut t = Table::new(&["index", "lambda"]);
    for (i, l) in d.eigenvalues.iter().enumerate() {
        t.push(vec![(i + 1).into(), (*l).into()]);
    }
    Emit::new(t, &d)
}

fn dispersion_surface(cfg: &RunConfig) -> Emit {
    let n = cfg.grid;
    let axis = |i: usize| -PI + 2.0 * PI * i as f64 / (n - 1) as f64;
    let rows: Vec<[f64; 5]> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (t1, t2) = (axis(k / n), axis(k % n));
            let r = solve_f(Theta::new(t1, t2));
            [t1, t2, r.f1, r.f2, r.f3]
        })
        .collect();
    let mut t = Table::new(&["theta1", "theta2", "F1", "F2", "F3"]);
    for r in &rows {
        t.push(r.iter().map(|&x| x.into()).collect());
    }
    let json: Vec<_> = rows
        .iter()
        .map(|r| json!({"theta1": r[0], "theta2": r[1], "F1": r[2], "F2": r[3], "F3": r[4]}))
        .collect();
    Emit::new(t, &json)
}

fn segment_list(cfg: &RunConfig) -> Emit {
    let family = segments(cfg.q.expect("segments carries a vector"));
    let mut t = Table::new(&["k", "start_theta1", "start_theta2", "end_theta1", "end_theta2", "degenerate"]);
    for s in &family.segments {
        t.push(vec![
            s.k.into(),
            s.start.theta1.into(),
            s.start.theta2.into(),
            s.end.theta1.into(),
            s.end.theta2.into(),
            s.degenerate.into(),
        ]);
    }
    Emit::new(t, &family)
}

fn range(cfg: &RunConfig) -> Result<Emit> {
    let q = cfg.q.expect("range carries a vector");
    let report = range_union(q)?;
    let mut t = Table::new(&["branch", "source", "lo", "hi"]);
    for branch in Branch::ALL {
        for iv in report.range(branch).iter() {
            t.push(vec![format!("F{}", branch.index()).into(), "lemma".into(), iv.lo.into(), iv.hi.into()]);
        }
    }
    if !cfg.oracle {
        return Ok(Emit::new(t, &report));
    }
    let mut oracle = serde_json::Map::new();
    for branch in Branch::ALL {
        let brute = brute_force_range(q, branch, cfg.points)?;
        for iv in brute.iter() {
            t.push(vec![format!("F{}", branch.index()).into(), "oracle".into(), iv.lo.into(), iv.hi.into()]);
        }
        oracle.insert(
            format!("F{}", branch.index()),
            json!({"range": brute, "hausdorff": report.range(branch).hausdorff(&brute)}),
        );
    }
    let json = json!({"report": report, "oracle": oracle, "samples_per_segment": cfg.points});
    Ok(Emit::new(t, &json))
}

fn bands(cfg: &RunConfig) -> Result<Emit> {
    let p = tube(cfg);
    let s = scan(cfg)?;
    let ac = s.ac_spectrum(p)?;
    let case = GapCase::of(p);
    let mut t = Table::new(&["band_lo", "band_hi", "hill_band_index", "case"]);
    for band in s.bands() {
        for iv in ac.intersect_interval(&band.interval()).iter() {
            t.push(vec![iv.lo.into(), iv.hi.into(), band.index.into(), case.to_string().into()]);
        }
    }
    Ok(Emit::new(t, &json!({"p": p, "case": case, "ac_bands": ac})))
}

fn gaps(cfg: &RunConfig) -> Result<Emit> {
    let report = scan(cfg)?.gap_report(tube(cfg))?;
    let mut t = Table::new(&["hill_band_index", "band_lo", "band_hi", "complete", "gap_lo", "gap_hi", "case"]);
    for b in &report {
        let head = |t: &mut Table, lo: Cell, hi: Cell| {
            t.push(vec![
                b.hill_band_index.into(),
                b.band.lo.into(),
                b.band.hi.into(),
                b.complete.into(),
                lo,
                hi,
                b.case.to_string().into(),
            ])
        };
        if b.gaps.is_empty() {
            head(&mut t, Cell::Empty, Cell::Empty);
        }
        for g in b.gaps.iter() {
            head(&mut t, g.lo.into(), g.hi.into());
        }
    }
    Ok(Emit::new(t, &report))
}

fn pure_point_table(pp: &PurePoint) -> Table {
    let mut t = Table::new(&["kind", "lambda", "eta", "family"]);
    for d in &pp.sigma_d {
        t.push(vec!["dirichlet".into(), (*d).into(), Cell::Empty, Cell::Empty]);
    }
    for e in &pp.sigma_0 {
        t.push(vec!["extra".into(), e.lambda.into(), e.eta_value.into(), e.family.to_string().into()]);
    }
    t
}

fn pure_point_spectrum(cfg: &RunConfig) -> Result<Emit> {
    let pp = scan(cfg)?.pure_point(tube(cfg))?;
    Ok(Emit::new(pure_point_table(&pp), &pp))
}

fn report(cfg: &RunConfig) -> Result<Emit> {
    let r = scan(cfg)?.full_report(tube(cfg))?;
    let mut t = Table::new(&["kind", "lo", "hi", "hill_band_index", "case", "eta", "family"]);
    for iv in r.ac_bands.iter() {
        t.push(vec!["ac-band".into(), iv.lo.into(), iv.hi.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
    }
    for b in &r.gaps_per_hill_band {
        for g in b.gaps.iter() {
            t.push(vec![
                "gap".into(),
                g.lo.into(),
                g.hi.into(),
                b.hill_band_index.into(),
                b.case.to_string().into(),
                Cell::Empty,
                Cell::Empty,
            ]);
        }
    }
    for d in &r.sigma_d {
        t.push(vec!["dirichlet".into(), (*d).into(), (*d).into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
    }
    for e in &r.sigma_0 {
        t.push(vec![
            "extra".into(),
            e.lambda.into(),
            e.lambda.into(),
            Cell::Empty,
            Cell::Empty,
            e.eta_value.into(),
            e.family.to_string().into(),
        ]);
    }
    Ok(Emit::new(t, &r))
}

#[derive(Debug, Serialize)]
struct Check {
    check: String,
    passed: bool,
    value: f64,
    detail: String,
}

/// Energies in the window where `η = eta`.
fn eta_levels(cfg: &RunConfig, eta: f64) -> Vec<f64> {
    let [lo, hi] = cfg.lambda_window;
    HillOperator::new(&cfg.potential).solve_d_equals(2.0 * eta, lo, hi, DEFAULT_SCAN_STEP)
}

fn validate(cfg: &RunConfig) -> Result<Emit> {
    let p = tube(cfg);
    let graph = graphyne_config();
    let mut checks = Vec::new();

    let points: Vec<(Theta, f64)> = (0..100)
        .map(|i| {
            let u = (0.5 + i as f64 * 0.754_877_666_246_692_7).fract();
            let v = (0.5 + i as f64 * 0.569_840_290_998_053_2).fract();
            (Theta::new(-PI + 2.0 * PI * u, -PI + 2.0 * PI * v), -1.5 + 3.0 * (u + v).fract())
        })
        .collect();
    let r = identity_residual(&graph, &points)?;
    checks.push(Check {
        check: "char-poly-identity".into(),
        passed: r <= 1e-12,
        value: r,
        detail: "100 points, tol 1e-12".into(),
    });

    let tol = cfg.tol.unwrap_or(if cfg.potential == PotentialSpec::Zero { 2e-2 } else { 5e-2 });
    let cutoff = cfg.lambda_window[1].min(25.0);
    let (passed, value, detail) = match dispersion_check(&graph, p, &cfg.potential, cfg.grid, cfg.points, tol, cutoff) {
        Ok(rep) => (true, rep.worst_residual, format!("{} eigenvalues at {} quasimomenta", rep.eigenvalues_checked, rep.thetas_checked)),
        Err(Error::DispersionMismatch(rep)) => (
            false,
            rep.worst_residual,
            format!("{} of {} eigenvalues unmatched", rep.failures.len(), rep.eigenvalues_checked),
        ),
        Err(e) => return Err(e),
    };
    checks.push(Check {
        check: "dispersion".into(),
        passed,
        value,
        detail: format!("{detail}, tol {tol}"),
    });

    let targets = sigma0_targets(p);
    for eta in [-1.0 / 3.0, 0.0, 1.0 / 3.0] {
        let predicted = targets.iter().any(|(t, _)| (t - eta).abs() < 1e-12);
        if let Some(&lambda) = eta_levels(cfg, eta).first() {
            let space = compact_eigenspace(&graph, p, &cfg.potential, lambda, cfg.rings)?;
            checks.push(Check {
                check: format!("compact-eigenfunctions eta={}", crate::output::fmt_num(eta)),
                passed: (space.dimension >= 1) == predicted,
                value: space.dimension as f64,
                detail: format!(
                    "lambda {}, height {}, family {}",
                    crate::output::fmt_num(lambda),
                    cfg.rings,
                    if predicted { "predicted" } else { "not predicted" }
                ),
            });
        }
    }

    let mut t = Table::new(&["check", "passed", "value", "detail"]);
    for c in &checks {
        t.push(vec![c.check.clone().into(), c.passed.into(), c.value.into(), c.detail.clone().into()]);
    }
    let passed = checks.iter().all(|c| c.passed);
    let mut e = Emit::new(t, &json!({"p": p, "passed": passed, "checks": checks}));
    e.passed = passed;
    Ok(e)
}

fn eigenfunction(cfg: &RunConfig) -> Result<Emit> {
    let p = tube(cfg);
    let eta = cfg.eta.expect("eigenfunction carries --eta");
    let graph = graphyne_config();
    let spaces = eta_levels(cfg, eta)
        .into_iter()
        .map(|lambda| build_compact_eigenfunction(&graph, p, eta, lambda, cfg.rings, &cfg.potential))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["lambda", "dimension", "rings", "window_lo", "window_hi"]);
    for s in &spaces {
        t.push(vec![s.lambda.into(), s.dimension.into(), s.rings.into(), s.window[0].into(), s.window[1].into()]);
    }
    Ok(Emit::new(t, &spaces))
}

fn execute(cfg: &RunConfig) -> Result<Emit> {
    match cfg.subcommand {
        Subcommand::Discriminant => Ok(discriminant_grid(cfg)),
        Subcommand::Dirichlet => Ok(dirichlet(cfg)),
        Subcommand::DispersionSurface => Ok(dispersion_surface(cfg)),
        Subcommand::Segments => Ok(segment_list(cfg)),
        Subcommand::Range => range(cfg),
        Subcommand::Bands => bands(cfg),
        Subcommand::Gaps => gaps(cfg),
        Subcommand::PurePoint => pure_point_spectrum(cfg),
        Subcommand::Report => report(cfg),
        Subcommand::Validate => validate(cfg),
        Subcommand::Eigenfunction => eigenfunction(cfg),
    }
}

fn emit(cfg: &RunConfig, e: &Emit, out: &mut dyn Write) -> io::Result<()> {
    match cfg.format {
        OutputFormat::Csv => e.table.write_csv(out),
        OutputFormat::Json => write_json(&e.json, out),
    }
}

/// Runs `cfg`, writing results to `--output` or else to `out`, and
/// diagnostics to standard error. Returns the process exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> i32 {
    let e = match execute(cfg) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    let written = match &cfg.output {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            emit(cfg, &e, &mut w)?;
            w.flush()
        }),
        None => emit(cfg, &e, out).and_then(|_| out.flush()),
    };
    if let Err(err) = written {
        eprintln!("error: cannot write output: {err}");
        return EXIT_USAGE;
    }
    if e.passed {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

/// Caps rayon's pool from `NANOTUBE_SPECTRA_THREADS` (0 or unset = automatic).
pub fn configure_threads() -> std::result::Result<(), String> {
    let n = match std::env::var("NANOTUBE_SPECTRA_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("NANOTUBE_SPECTRA_THREADS={v:?} is not a non-negative integer"))?,
        Err(_) => 0,
    };
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}
