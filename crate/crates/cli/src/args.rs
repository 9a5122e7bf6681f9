use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "stokes",
    version,
    about = "Stokes spectra, heat traces and heat-invariant fits"
)]
pub struct Cli {
    /// Write the resolved configuration as JSON to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate an exact spectrum up to a cutoff.
    Spectrum(SpectrumArgs),
    /// Run a discretized eigensolver with Richardson extrapolation.
    Oracle(OracleArgs),
    /// Evaluate a certified heat trace from a spectrum file.
    Trace(TraceArgs),
    /// Fit the two-term expansion to a trace and report invariants.
    Fit(FitArgs),
    /// Compare the counting function with the Weyl term.
    Weyl(WeylArgs),
    /// Isoperimetric ball test on a report or a preset.
    HearBall(HearBallArgs),
    /// Spectrum, trace, fit and report for a named preset.
    Adjudicate(AdjudicateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Disk2d,
    Ball3d,
    Square2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorArg {
    Stokes,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetArg {
    Disk2d,
    Ball3d,
    TwoDisks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleFamily {
    DiskBuckling,
    BallToroidal,
    BallPoloidal,
    Square,
}

/// Geometric `t` grid `lo:hi:count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Window {
    Auto,
    Range(f64, f64),
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

pub fn parse_tgrid(s: &str) -> Result<TGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(format!("expected lo:hi:count, got {s:?}"));
    };
    let grid = TGrid {
        lo: parse_positive(lo)?,
        hi: parse_positive(hi)?,
        count: count
            .parse()
            .map_err(|_| format!("{count:?} is not a sample count"))?,
    };
    if grid.hi <= grid.lo || grid.count < 2 {
        return Err(format!("need lo < hi and at least 2 points, got {s:?}"));
    }
    Ok(grid)
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    if s == "auto" {
        return Ok(Window::Auto);
    }
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi or auto, got {s:?}"))?;
    let (lo, hi) = (parse_positive(lo)?, parse_positive(hi)?);
    if hi <= lo {
        return Err(format!("window {s:?} is empty"));
    }
    Ok(Window::Range(lo, hi))
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, value_enum, default_value = "stokes")]
    pub operator: OperatorArg,
    /// Radius of a disk or ball.
    #[arg(long, value_parser = parse_positive)]
    pub radius: Option<f64>,
    /// Side of a square.
    #[arg(long, value_parser = parse_positive)]
    pub side: Option<f64>,
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub mu: f64,
    /// Disjoint copies of the domain.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// Largest eigenvalue to include.
    #[arg(long, value_parser = parse_positive, conflicts_with = "t_min")]
    pub cutoff: Option<f64>,
    /// Choose the cutoff that certifies traces from this `t` on.
    #[arg(long, value_parser = parse_positive, requires = "tail_eps")]
    pub t_min: Option<f64>,
    #[arg(long, value_parser = parse_positive)]
    pub tail_eps: Option<f64>,
    /// Output CSV (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub family: OracleFamily,
    /// Angular order `m` (disk) or degree `l` (ball).
    #[arg(long, default_value_t = 0)]
    pub mode: u32,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Finest grid: radial unknowns, or cells per side for the square.
    #[arg(long, default_value_t = 800)]
    pub grid: usize,
    /// Square only: explicit ascending grids for a convergence study.
    #[arg(long, value_delimiter = ',')]
    pub grids: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub radius: f64,
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub side: f64,
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub mu: f64,
    /// Output JSON with raw and extrapolated values (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the extrapolated values as a spectrum CSV.
    #[arg(long)]
    pub spectrum_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TraceArgs {
    /// Spectrum CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Geometric grid `lo:hi:count`.
    #[arg(long, value_parser = parse_tgrid)]
    pub t: TGrid,
    #[arg(long, value_parser = parse_positive, default_value = "1e-12")]
    pub tail_eps: f64,
    /// Output CSV (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Stokes trace CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// `lo:hi`, or `auto` for the stability scan. Defaults to the
    /// dimension's standard window.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<Window>,
    /// Calibration JSON from a disk or ball fit. Required unless the trace
    /// itself is a disk or ball.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    /// Write the calibration this fit provides (disk or ball traces only).
    #[arg(long)]
    pub calibration_out: Option<PathBuf>,
    /// Dirichlet-Laplacian trace of the same domain for the comparison fit.
    #[arg(long)]
    pub laplacian: Option<PathBuf>,
    #[arg(long, requires = "laplacian")]
    pub comparison_out: Option<PathBuf>,
    /// Report JSON (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plot-data CSV `t,f,fit,residual`.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WeylArgs {
    /// Spectrum CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_positive)]
    pub tau: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct HearBallArgs {
    /// Report JSON written by `fit`.
    #[arg(
        long = "in",
        conflicts_with = "preset",
        required_unless_present = "preset"
    )]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long, value_parser = parse_positive, default_value_t = stokes_core::asymptotics::BALL_TOL)]
    pub tol: f64,
    /// Output JSON (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AdjudicateArgs {
    #[arg(long, value_enum)]
    pub preset: PresetArg,
    /// Directory for spectrum, traces, report and plot data.
    #[arg(long)]
    pub out_dir: PathBuf,
}
