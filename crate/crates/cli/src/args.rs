use std::path::PathBuf;

use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};
use nanotube_spectra::spectra::default_floor;
use nanotube_spectra::{PotentialSpec, ReducedVector, TubeVector};

/// Name used in usage messages; argv passed to [`parse_args`] excludes it.
pub const BIN_NAME: &str = "nanotube-spectra";

const DEFAULT_LAMBDA_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Discriminant,
    Dirichlet,
    DispersionSurface,
    Segments,
    Range,
    Bands,
    Gaps,
    PurePoint,
    Report,
    Validate,
    Eigenfunction,
}

/// Fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub potential: PotentialSpec,
    pub p: Option<TubeVector>,
    pub q: Option<ReducedVector>,
    pub lambda_window: [f64; 2],
    /// Grid points per axis, or quasimomentum samples for `validate`.
    pub grid: usize,
    /// Samples per segment for `range --oracle`, points per edge for `validate`.
    pub points: usize,
    pub tol: Option<f64>,
    pub eta: Option<f64>,
    pub rings: usize,
    pub oracle: bool,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError {
    pub message: String,
    /// `--help` or `--version`: print the message and exit successfully.
    pub informational: bool,
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> UsageError {
    UsageError {
        message: message.into(),
        informational: false,
    }
}

/// Spectra of Schrödinger operators on graphyne nanotubes.
#[derive(Debug, Parser)]
#[command(name = BIN_NAME, version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long = "out", value_enum, default_value = "csv", global = true)]
    format: OutputFormat,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PotentialArg {
    /// zero | cosine:A | well:DEPTH:WIDTH | file:PATH
    #[arg(long, default_value = "zero", value_parser = parse_potential)]
    potential: PotentialSpec,
}

#[derive(Debug, Args)]
struct Window {
    /// Defaults to min(0, min q0) - 1.
    #[arg(long, allow_negative_numbers = true)]
    lambda_min: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_MAX, allow_negative_numbers = true)]
    lambda_max: f64,
}

#[derive(Debug, Args)]
struct TubeArgs {
    /// Winding vector as P1,P2.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    p: (i64, i64),
    #[command(flatten)]
    potential: PotentialArg,
    #[command(flatten)]
    window: Window,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct VectorChoice {
    /// Reduced vector as Q1,Q2 (both non-negative).
    #[arg(long, value_parser = parse_pair)]
    q: Option<(i64, i64)>,
    /// Winding vector as P1,P2; reduced before use.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    p: Option<(i64, i64)>,
}

#[derive(Debug, ClapSubcommand)]
enum Command {
    /// Tabulate D(λ) and η(λ) on a grid.
    Discriminant {
        #[command(flatten)]
        potential: PotentialArg,
        #[command(flatten)]
        window: Window,
        #[arg(long, default_value_t = 501)]
        grid: usize,
    },
    /// Dirichlet eigenvalues of one edge.
    Dirichlet {
        #[command(flatten)]
        potential: PotentialArg,
        #[command(flatten)]
        window: Window,
    },
    /// F1, F2, F3 on a GRID x GRID mesh of the Brillouin zone.
    DispersionSurface {
        #[arg(long, default_value_t = 50)]
        grid: usize,
    },
    /// Admissible quasimomentum segments.
    Segments {
        #[command(flatten)]
        vector: VectorChoice,
    },
    /// Ranges of F1, F2, F3 over the admissible quasimomenta.
    Range {
        #[command(flatten)]
        vector: VectorChoice,
        /// Also run the brute-force sampler and report the distance.
        #[arg(long)]
        oracle: bool,
        /// Samples per segment for the oracle.
        #[arg(long, default_value_t = 4000)]
        points: usize,
    },
    /// Absolutely continuous bands.
    Bands(TubeArgs),
    /// Gaps inside every Hill band.
    Gaps(TubeArgs),
    /// Dirichlet and extra eigenvalues.
    PurePoint(TubeArgs),
    /// Everything above as one document.
    Report(TubeArgs),
    /// Cross-check the spectrum against an explicit graph.
    Validate {
        #[command(flatten)]
        tube: TubeArgs,
        /// Finite-difference points per edge.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Quasimomentum samples.
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Residual tolerance; 2e-2 for the zero potential, 5e-2 otherwise.
        #[arg(long)]
        tol: Option<f64>,
        /// Support height for the eigenfunction table.
        #[arg(long, default_value_t = 2)]
        rings: usize,
    },
    /// Compactly supported eigenfunctions at the energies with η = ETA.
    Eigenfunction {
        #[command(flatten)]
        tube: TubeArgs,
        /// -1/3, 0 or 1/3.
        #[arg(long, value_parser = parse_eta, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = 2)]
        rings: usize,
    },
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two integers separated by a comma, got {s:?}"))?;
    let int = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| format!("{t:?} is not an integer"))
    };
    Ok((int(a)?, int(b)?))
}

fn parse_potential(s: &str) -> Result<PotentialSpec, String> {
    let num = |t: &str, what: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("{what} {t:?} is not a finite number"))
    };
    let parts: Vec<&str> = s.splitn(2, ':').collect();
    match parts.as_slice() {
        ["zero"] => Ok(PotentialSpec::Zero),
        ["cosine", a] => Ok(PotentialSpec::cosine(num(a, "amplitude")?)),
        ["well", rest] => {
            let (d, w) = rest
                .split_once(':')
                .ok_or_else(|| "expected well:DEPTH:WIDTH".to_string())?;
            PotentialSpec::square_well(num(d, "depth")?, num(w, "width")?).map_err(|e| e.to_string())
        }
        ["file", path] => PotentialSpec::from_csv_path(path.as_ref()).map_err(|e| e.to_string()),
        _ => Err(format!(
            "unknown potential {s:?}; expected zero, cosine:A, well:DEPTH:WIDTH or file:PATH"
        )),
    }
}

fn parse_eta(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            n / d
        }
        None => s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?,
    };
    [-1.0 / 3.0, 0.0, 1.0 / 3.0]
        .into_iter()
        .find(|t| (value - t).abs() < 1e-9)
        .ok_or_else(|| format!("{s} is not one of -1/3, 0, 1/3"))
}

fn tube_vector(p: (i64, i64)) -> Result<TubeVector, UsageError> {
    TubeVector::new(p.0, p.1).map_err(|_| {
        usage(format!(
            "--p: p must be nonzero; ({}, {}) is the whole sheet, not a tube",
            p.0, p.1
        ))
    })
}

fn reduced_vector(v: &VectorChoice) -> Result<ReducedVector, UsageError> {
    if let Some((q1, q2)) = v.q {
        if q1 < 0 || q2 < 0 {
            return Err(usage("--q: both components must be non-negative"));
        }
        return ReducedVector::new(q1, q2).map_err(|_| usage("--q: q must be nonzero"));
    }
    let p = tube_vector(v.p.expect("clap enforces one of --p, --q"))?;
    Ok(ReducedVector::new(p.p1.abs(), p.p2.abs()).expect("nonzero"))
}

fn window(w: &Window, spec: &PotentialSpec) -> Result<[f64; 2], UsageError> {
    let lo = w.lambda_min.unwrap_or_else(|| default_floor(spec));
    if !lo.is_finite() || !w.lambda_max.is_finite() || w.lambda_max <= lo {
        return Err(usage(format!(
            "--lambda-max: the window [{lo}, {}] is empty",
            w.lambda_max
        )));
    }
    Ok([lo, w.lambda_max])
}

/// Parses `argv` (without the program name).
pub fn parse_args<S: AsRef<str>>(argv: &[S]) -> Result<RunConfig, UsageError> {
    let args = std::iter::once(BIN_NAME).chain(argv.iter().map(AsRef::as_ref));
    let cli = Cli::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        UsageError {
            message: e.render().to_string(),
            informational: matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion),
        }
    })?;

    let mut cfg = RunConfig {
        subcommand: Subcommand::Report,
        potential: PotentialSpec::Zero,
        p: None,
        q: None,
        lambda_window: [default_floor(&PotentialSpec::Zero), DEFAULT_LAMBDA_MAX],
        grid: 0,
        points: 0,
        tol: None,
        eta: None,
        rings: 2,
        oracle: false,
        format: cli.format,
        output: cli.output,
    };
    let tube = |cfg: &mut RunConfig, t: TubeArgs| -> Result<(), UsageError> {
        cfg.p = Some(tube_vector(t.p)?);
        cfg.lambda_window = window(&t.window, &t.potential.potential)?;
        cfg.potential = t.potential.potential;
        Ok(())
    };
    match cli.command {
        Command::Discriminant {
            potential,
            window: w,
            grid,
        } => {
            if grid < 2 {
                return Err(usage("--grid: at least 2 points are needed"));
            }
            cfg.subcommand = Subcommand::Discriminant;
            cfg.lambda_window = window(&w, &potential.potential)?;
            cfg.potential = potential.potential;
            cfg.grid = grid;
        }
        Command::Dirichlet { potential, window: w } => {
            cfg.subcommand = Subcommand::Dirichlet;
            cfg.lambda_window = window(&w, &potential.potential)?;
            cfg.potential = potential.potential;
        }
        Command::DispersionSurface { grid } => {
            if grid < 2 {
                return Err(usage("--grid: at least 2 points per axis are needed"));
            }
            cfg.subcommand = Subcommand::DispersionSurface;
            cfg.grid = grid;
        }
        Command::Segments { vector } => {
            cfg.subcommand = Subcommand::Segments;
            cfg.q = Some(reduced_vector(&vector)?);
        }
        Command::Range {
            vector,
            oracle,
            points,
        } => {
            cfg.subcommand = Subcommand::Range;
            cfg.q = Some(reduced_vector(&vector)?);
            cfg.oracle = oracle;
            cfg.points = points;
        }
        Command::Bands(t) => {
            cfg.subcommand = Subcommand::Bands;
            tube(&mut cfg, t)?;
        }
        Command::Gaps(t) => {
            cfg.subcommand = Subcommand::Gaps;
            tube(&mut cfg, t)?;
        }
        Command::PurePoint(t) => {
            cfg.subcommand = Subcommand::PurePoint;
            tube(&mut cfg, t)?;
        }
        Command::Report(t) => {
            cfg.subcommand = Subcommand::Report;
            tube(&mut cfg, t)?;
        }
        Command::Validate {
            tube: t,
            points,
            grid,
            tol,
            rings,
        } => {
            if points < 50 {
                return Err(usage("--points: at least 50 points per edge are needed"));
            }
            if grid == 0 {
                return Err(usage("--grid: at least one quasimomentum sample is needed"));
            }
            if rings == 0 {
                return Err(usage("--rings: must be positive"));
            }
            if let Some(t) = tol {
                if t.is_nan() || t <= 0.0 {
                    return Err(usage("--tol: must be positive"));
                }
            }
            cfg.subcommand = Subcommand::Validate;
            tube(&mut cfg, t)?;
            cfg.points = points;
            cfg.grid = grid;
            cfg.tol = tol;
            cfg.rings = rings;
        }
        Command::Eigenfunction { tube: t, eta, rings } => {
            if rings == 0 {
                return Err(usage("--rings: must be positive"));
            }
            cfg.subcommand = Subcommand::Eigenfunction;
            tube(&mut cfg, t)?;
            cfg.eta = Some(eta);
            cfg.rings = rings;
        }
    }
    Ok(cfg)
}
