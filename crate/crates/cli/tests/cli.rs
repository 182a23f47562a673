use std::process::{Command, Output};

use nanotube_spectra::{PotentialSpec, ReducedVector, SpectrumReport};
use nanotube_spectra_cli::*;

fn parse(args: &[&str]) -> RunConfig {
    parse_args(args).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nanotube-spectra"))
        .args(args)
        .env("NANOTUBE_SPECTRA_THREADS", "2")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn parses_bands_with_a_window() {
    let c = parse(&["bands", "--p", "1,0", "--potential", "zero", "--lambda-max", "10"]);
    assert_eq!(c.subcommand, Subcommand::Bands);
    assert_eq!(c.lambda_window, [-1.0, 10.0]);
    assert_eq!(c.format, OutputFormat::Csv);
    assert_eq!(c.potential, PotentialSpec::Zero);
    assert_eq!((c.p.unwrap().p1, c.p.unwrap().p2), (1, 0));
}

#[test]
fn parses_range_with_oracle_as_json() {
    let c = parse(&["range", "--q", "3,0", "--oracle", "--out", "json"]);
    assert_eq!(c.subcommand, Subcommand::Range);
    assert!(c.oracle);
    assert_eq!(c.format, OutputFormat::Json);
    assert_eq!(c.q, Some(ReducedVector::new(3, 0).unwrap()));
}

#[test]
fn parses_potentials_and_eta() {
    let c = parse(&["report", "--p", "2,1", "--potential", "cosine:1.5"]);
    assert_eq!(c.potential, PotentialSpec::cosine(1.5));
    let c = parse(&["eigenfunction", "--p", "0,4", "--eta", "-1/3"]);
    assert!((c.eta.unwrap() + 1.0 / 3.0).abs() < 1e-15);
    assert!(parse_args(&["eigenfunction", "--p", "0,4", "--eta", "0.5"]).is_err());
    assert!(parse_args(&["bands", "--p", "1,0", "--potential", "well:3"]).is_err());
}

#[test]
fn rejects_bad_input() {
    let e = parse_args(&["bands", "--p", "0,0"]).unwrap_err();
    assert!(e.message.contains("p must be nonzero"), "{e}");
    assert!(!e.informational);
    assert!(parse_args(&["bands", "--p", "1,0", "--frobnicate"]).is_err());
    assert!(parse_args(&["bands", "--p", "1;0"]).is_err());
    assert!(parse_args(&["range", "--q", "1,0", "--p", "1,0"]).is_err());
    assert!(parse_args(&["bands", "--p", "1,0", "--lambda-min", "5", "--lambda-max", "1"]).is_err());
    assert!(parse_args(&["--help"]).unwrap_err().informational);
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["validate", "--p", "0,2"]).status.code(), Some(0));
    let o = bin(&["bands", "--p", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must be nonzero"));
    assert_eq!(bin(&["bands", "--p", "1,0", "--nope"]).status.code(), Some(2));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_nanotube-spectra"))
        .args(["segments", "--q", "1,0"])
        .env("NANOTUBE_SPECTRA_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn impossible_tolerance_fails_validation() {
    let o = bin(&["validate", "--p", "1,0", "--tol", "1e-9", "--grid", "4", "--points", "60"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("dispersion,false"));
}

#[test]
fn output_is_deterministic() {
    let args = ["report", "--p", "3,2", "--potential", "cosine:1", "--lambda-max", "30", "--out", "json"];
    assert_eq!(bin(&args).stdout, bin(&args).stdout);
}

#[test]
fn json_report_round_trips() {
    let o = bin(&["report", "--p", "2,1", "--potential", "cosine:1", "--lambda-min", "-2", "--lambda-max", "30", "--out", "json"]);
    assert!(o.status.success());
    let r: SpectrumReport = serde_json::from_slice(&o.stdout).unwrap();
    let direct = nanotube_spectra::full_report(
        nanotube_spectra::TubeVector::new(2, 1).unwrap(),
        &PotentialSpec::cosine(1.0),
        [-2.0, 30.0],
    )
    .unwrap();
    assert_eq!(r, direct);
}

#[test]
fn free_armchair_report_has_three_bands() {
    let o = bin(&["report", "--p", "1,0", "--lambda-min", "0", "--lambda-max", "10", "--out", "json"]);
    let r: SpectrumReport = serde_json::from_slice(&o.stdout).unwrap();
    let inv = |e: f64| e.acos().powi(2);
    let want = [(0.0, inv(2.0 / 3.0)), (inv(1.0 / 3.0), inv(-1.0 / 3.0)), (inv(-2.0 / 3.0), 10.0)];
    let got = r.ac_bands.intervals();
    assert_eq!(got.len(), 3);
    for (iv, (lo, hi)) in got.iter().zip(want) {
        assert!((iv.lo - lo).abs() < 1e-9 && (iv.hi - hi).abs() < 1e-9, "{iv:?}");
    }
    let csv = stdout(&bin(&["report", "--p", "1,0", "--lambda-max", "9.8"]));
    assert_eq!(csv.lines().filter(|l| l.starts_with("ac-band,")).count(), 3);
    assert_eq!(csv.lines().filter(|l| l.starts_with("gap,")).count(), 2);
}

#[test]
fn dispersion_surface_shape() {
    let o = bin(&["dispersion-surface", "--grid", "50"]);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().len(), 5);
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2500);
    for r in &rows {
        let f: Vec<f64> = (2..5).map(|i| r[i].parse().unwrap()).collect();
        assert!(f[0] <= f[1] && f[1] <= f[2] && f[0] >= -1.0 - 1e-12 && f[2] <= 1.0 + 1e-12);
    }
}

#[test]
fn writes_to_a_file_and_reads_potential_files() {
    let dir = tempfile::tempdir().unwrap();
    let pot = dir.path().join("tent.csv");
    std::fs::write(&pot, "x,q\n0,1\n0.5,-2\n1,1\n").unwrap();
    let out = dir.path().join("bands.csv");
    let o = bin(&[
        "bands",
        "--p",
        "2,3",
        "--potential",
        &format!("file:{}", pot.display()),
        "--lambda-max",
        "20",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let spec = PotentialSpec::sampled(vec![(0.0, 1.0), (0.5, -2.0), (1.0, 1.0)]).unwrap();
    let direct = nanotube_spectra::ac_spectrum(nanotube_spectra::TubeVector::new(2, 3).unwrap(), &spec, 20.0).unwrap();
    let written = std::fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(written.as_bytes());
    let lows: Vec<f64> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert!(!lows.is_empty());
    for lo in lows {
        assert!(direct.contains(lo, 1e-12), "{lo} outside {direct:?}");
    }
    assert_eq!(bin(&["bands", "--p", "1,0", "--potential", "file:/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn eigenfunction_command_finds_the_double_band_level() {
    let o = bin(&["eigenfunction", "--p", "0,4", "--eta", "0", "--lambda-max", "12", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let first = &v[0];
    assert!((first["lambda"].as_f64().unwrap() - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-9);
    assert!(first["dimension"].as_u64().unwrap() >= 1);
}
