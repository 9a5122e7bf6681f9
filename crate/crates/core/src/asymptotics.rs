//! Two-term small-time fits of heat traces and what they say about the
//! domain.
//!
//! A curve is normalized as `f(t) = (4πμt)^{n/2} Θ(t)` and fitted on
//! `{1, √t, t}`. The constant is `(n-1)|Ω|`. The `√t` coefficient is a
//! boundary term whose constant is kept empirical: it is written as
//! `b = -(n-1) β √(4πμ) |∂Ω|` and `β` is reported for several conventions
//! and, when the true geometry is known, measured.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat_trace::HeatTraceCurve;
use crate::spectra::{unit_ball_volume, DomainKind, DomainSpec, Operator, Spectrum};
use crate::textfmt;

/// Largest accepted condition number of the column-normalized design.
pub const MAX_CONDITION: f64 = 1e6;

pub const MIN_WINDOW_SAMPLES: usize = 10;

/// Largest relative tail bound accepted inside a fit window.
pub const MAX_TAIL_RELATIVE: f64 = 1e-9;

/// Default relative tolerance of the ball test.
pub const BALL_TOL: f64 = 0.05;

/// `hear_ball` declines to decide above this `stderr_b / |b|`.
pub const MAX_BOUNDARY_STDERR: f64 = 0.02;

/// Boundary-constant conventions `β` with their report tags.
pub const CONVENTIONS: [(&str, f64); 3] = [("beta=1", 1.0), ("beta=1/2", 0.5), ("beta=1/4", 0.25)];

/// Slack when matching window edges against sampled `t` values.
const EDGE_SLACK: f64 = 1e-9;

/// Default fit window: `[1e-5, 1e-3]` in two dimensions, `[1e-4, 1e-2]`
/// otherwise.
pub fn default_window(n: u32) -> (f64, f64) {
    if n == 2 {
        (1e-5, 1e-3)
    } else {
        (1e-4, 1e-2)
    }
}

/// `|∂B₁| / |B₁|^{(n-1)/n} = n ω_n^{1/n}`.
pub fn ball_ratio(n: u32) -> f64 {
    n as f64 * unit_ball_volume(n).powf(1.0 / n as f64)
}

/// `(4πμt)^{n/2}`.
fn normalization(n: u32, mu: f64, t: f64) -> f64 {
    (4.0 * PI * mu * t).powf(n as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub stderr_a: f64,
    pub stderr_b: f64,
    pub stderr_c: f64,
    pub window: (f64, f64),
    pub condition: f64,
    pub samples: usize,
    pub n: u32,
    pub mu: f64,
}

impl FitResult {
    /// Fitted `f(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        self.a + self.b * t.sqrt() + self.c * t
    }
}

struct LinearFit {
    coef: Vec<f64>,
    stderr: Vec<f64>,
    condition: f64,
}

/// Unweighted least squares of `ys` on the columns `basis(x)`. Columns are
/// scaled to unit norm before the SVD; the condition number refers to that
/// scaled design. Standard errors come from the residual variance.
fn least_squares(xs: &[f64], ys: &[f64], basis: &[fn(f64) -> f64]) -> Result<LinearFit> {
    let (m, p) = (xs.len(), basis.len());
    if m <= p {
        return Err(Error::InsufficientSamples(format!(
            "{m} samples for {p} coefficients"
        )));
    }
    let mut design = DMatrix::from_fn(m, p, |i, j| basis[j](xs[i]));
    let mut scale = vec![0.0; p];
    for (j, s) in scale.iter_mut().enumerate() {
        *s = design.column(j).norm();
        if *s == 0.0 {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        design.column_mut(j).scale_mut(1.0 / *s);
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let y = DVector::from_column_slice(ys);
    let uty = u.transpose() * &y;
    let mut coef_scaled = DVector::zeros(p);
    for k in 0..p {
        let w = uty[k] / svd.singular_values[k];
        coef_scaled += v_t.row(k).transpose() * w;
    }
    let residual = &y - &design * &coef_scaled;
    let sigma2 = residual.norm_squared() / (m - p) as f64;
    let coef = (0..p).map(|j| coef_scaled[j] / scale[j]).collect();
    let stderr = (0..p)
        .map(|j| {
            let var: f64 = (0..p)
                .map(|k| (v_t[(k, j)] / svd.singular_values[k]).powi(2))
                .sum();
            (sigma2 * var).sqrt() / scale[j]
        })
        .collect();
    Ok(LinearFit {
        coef,
        stderr,
        condition,
    })
}

const EXPANSION_BASIS: [fn(f64) -> f64; 3] = [|_| 1.0, f64::sqrt, |t| t];
const EXTENDED_BASIS: [fn(f64) -> f64; 4] = [|_| 1.0, f64::sqrt, |t| t, |t| t * t.sqrt()];

/// Fit on `{1, √t, t}`. The residual-covariance errors only see scatter, and
/// the residuals here are smooth truncation error, so each standard error is
/// combined in quadrature with the shift of its coefficient when `t^{3/2}`
/// joins the basis.
fn expansion_fit(ts: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let mut fit = least_squares(ts, ys, &EXPANSION_BASIS)?;
    let wider = least_squares(ts, ys, &EXTENDED_BASIS)?;
    for (j, e) in fit.stderr.iter_mut().enumerate() {
        *e = e.hypot(wider.coef[j] - fit.coef[j]);
    }
    Ok(fit)
}

fn check_curve(curve: &HeatTraceCurve, n: u32, mu: f64) -> Result<()> {
    if curve.domain.n != n || curve.domain.mu != mu {
        return Err(Error::Mismatch(format!(
            "curve is for n = {}, mu = {}; fit requested n = {n}, mu = {mu}",
            curve.domain.n, curve.domain.mu
        )));
    }
    Ok(())
}

/// Indices of the samples inside `window`, after checking that the window
/// lies in the sampled range and that every sample has a usable tail.
fn window_samples(curve: &HeatTraceCurve, window: (f64, f64)) -> Result<Vec<usize>> {
    let (lo, hi) = window;
    let (first, last) = match (curve.samples.first(), curve.samples.last()) {
        (Some(f), Some(l)) => (f.t, l.t),
        _ => return Err(Error::InsufficientSamples("empty curve".into())),
    };
    if !(lo > 0.0 && hi > lo) || lo < first * (1.0 - EDGE_SLACK) || hi > last * (1.0 + EDGE_SLACK) {
        return Err(Error::Domain(format!(
            "window [{lo:e}, {hi:e}] is not inside the sampled range [{first:e}, {last:e}]"
        )));
    }
    let idx: Vec<usize> = curve
        .samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.t >= lo * (1.0 - EDGE_SLACK) && s.t <= hi * (1.0 + EDGE_SLACK))
        .map(|(i, _)| i)
        .collect();
    if idx.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "{} samples in [{lo:e}, {hi:e}], need {MIN_WINDOW_SAMPLES}",
            idx.len()
        )));
    }
    if let Some(s) = idx
        .iter()
        .map(|&i| &curve.samples[i])
        .find(|s| !(s.tail_bound <= MAX_TAIL_RELATIVE * s.theta.abs()))
    {
        return Err(Error::TailTooLarge {
            t: s.t,
            relative: s.tail_bound / s.theta.abs(),
            limit: MAX_TAIL_RELATIVE,
        });
    }
    Ok(idx)
}

fn fit_window(curve: &HeatTraceCurve, n: u32, mu: f64, window: (f64, f64)) -> Result<FitResult> {
    let idx = window_samples(curve, window)?;
    let ts: Vec<f64> = idx.iter().map(|&i| curve.samples[i].t).collect();
    let fs: Vec<f64> = idx
        .iter()
        .map(|&i| normalization(n, mu, curve.samples[i].t) * curve.samples[i].theta)
        .collect();
    let fit = expansion_fit(&ts, &fs)?;
    Ok(FitResult {
        a: fit.coef[0],
        b: fit.coef[1],
        c: fit.coef[2],
        stderr_a: fit.stderr[0],
        stderr_b: fit.stderr[1],
        stderr_c: fit.stderr[2],
        window,
        condition: fit.condition,
        samples: idx.len(),
        n,
        mu,
    })
}

/// Fit `f(t) = (4πμt)^{n/2} Θ(t) ≈ a + b√t + ct`.
///
/// Without a window, decade-wide windows starting every quarter decade are
/// fitted and the one whose `(a, b)` moves least towards its successor is
/// returned.
pub fn fit_expansion(
    curve: &HeatTraceCurve,
    n: u32,
    mu: f64,
    window: Option<(f64, f64)>,
) -> Result<FitResult> {
    check_curve(curve, n, mu)?;
    if let Some(w) = window {
        return fit_window(curve, n, mu, w);
    }
    let (first, last) = match (curve.samples.first(), curve.samples.last()) {
        (Some(f), Some(l)) => (f.t, l.t),
        _ => return Err(Error::InsufficientSamples("empty curve".into())),
    };
    let mut fits = Vec::new();
    let mut k = 0;
    loop {
        let lo = first * 10f64.powf(k as f64 / 4.0);
        let hi = lo * 10.0;
        if hi > last * (1.0 + EDGE_SLACK) {
            break;
        }
        // windows with too few samples or uncertified tails are skipped
        if let Ok(f) = fit_window(curve, n, mu, (lo, hi)) {
            fits.push(f);
        }
        k += 1;
    }
    let drift = |p: &FitResult, q: &FitResult| {
        ((p.a - q.a).abs() + (p.b - q.b).abs() * p.window.1.sqrt()) / p.a.abs()
    };
    let best = (0..fits.len().saturating_sub(1))
        .min_by(|&i, &j| drift(&fits[i], &fits[i + 1]).total_cmp(&drift(&fits[j], &fits[j + 1])))
        .unwrap_or(0);
    fits.into_iter().nth(best).ok_or_else(|| {
        Error::InsufficientSamples(format!(
            "no decade window in [{first:e}, {last:e}] has {MIN_WINDOW_SAMPLES} certified samples"
        ))
    })
}

/// `t, f(t), fit(t), f(t) - fit(t)` for every sample of the curve.
pub fn plot_rows(curve: &HeatTraceCurve, fit: &FitResult) -> Vec<[f64; 4]> {
    curve
        .samples
        .iter()
        .map(|s| {
            let f = normalization(fit.n, fit.mu, s.t) * s.theta;
            let g = fit.eval(s.t);
            [s.t, f, g, f - g]
        })
        .collect()
}

pub fn write_plot_csv<W: Write>(curve: &HeatTraceCurve, fit: &FitResult, mut w: W) -> Result<()> {
    writeln!(w, "t,f,fit,residual")?;
    for row in plot_rows(curve, fit) {
        let cols: Vec<String> = row.iter().map(|&x| textfmt::float(x)).collect();
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ball,
    NotBall,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Ball => "ball",
            Verdict::NotBall => "not_ball",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueGeometry {
    pub volume: f64,
    pub boundary: f64,
}

/// Boundary constant measured on a domain whose geometry is known exactly,
/// reused to turn other fits into boundary estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub kind: DomainKind,
    pub n: u32,
    pub beta: f64,
    pub stderr: f64,
}

/// `β = -b / ((n-1) √(4πμ) |∂Ω|)` with its standard error.
fn measured_beta(fit: &FitResult, boundary: f64) -> (f64, f64) {
    let scale = (fit.n as f64 - 1.0) * (4.0 * PI * fit.mu).sqrt() * boundary;
    (-fit.b / scale, fit.stderr_b / scale)
}

impl Calibration {
    /// Calibrate on a fit of a single disk or ball.
    pub fn from_fit(fit: &FitResult, domain: &DomainSpec) -> Result<Self> {
        if !matches!(domain.kind, DomainKind::Disk2d | DomainKind::Ball3d) {
            return Err(Error::Mismatch(format!(
                "calibration needs a disk or ball, got {}",
                domain.kind
            )));
        }
        if domain.n != fit.n {
            return Err(Error::Mismatch(format!(
                "fit is {}-dimensional, domain is {}-dimensional",
                fit.n, domain.n
            )));
        }
        let (beta, stderr) = measured_beta(fit, domain.boundary_measure());
        Ok(Self {
            kind: domain.kind,
            n: domain.n,
            beta,
            stderr,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    #[serde(flatten)]
    pub fit: FitResult,
    /// `a / (n-1)`.
    pub volume_est: f64,
    /// `|∂Ω|` recovered under each tagged `β`.
    pub boundary_candidates: BTreeMap<String, f64>,
    /// `β` implied by the true boundary, when known.
    pub beta_measured: Option<f64>,
    pub beta_stderr: Option<f64>,
    /// `b` each convention predicts for the true boundary, when known.
    pub b_predictions: Option<BTreeMap<String, f64>>,
    /// `b / prediction - 1` per convention, when the geometry is known.
    pub b_deviation: Option<BTreeMap<String, f64>>,
    pub calibration: Calibration,
    /// `|∂Ω|` recovered with the calibrated `β`.
    pub boundary_est: f64,
    /// `boundary_est / volume_est^{(n-1)/n}`.
    pub isoperimetric_ratio: f64,
    pub isoperimetric_stderr: f64,
    pub ball_ratio: f64,
    /// `isoperimetric_ratio / ball_ratio - 1`.
    pub isoperimetric_excess: f64,
    /// [`hear_ball`] at [`BALL_TOL`].
    pub verdict: Verdict,
    pub true_geometry: Option<TrueGeometry>,
}

/// Convert a fit into volume and boundary estimates. `domain` supplies the
/// true geometry for validation runs.
pub fn recover_invariants(
    fit: &FitResult,
    domain: Option<&DomainSpec>,
    calibration: &Calibration,
) -> Result<InvariantReport> {
    let n = fit.n;
    if calibration.n != n {
        return Err(Error::Mismatch(format!(
            "calibration is {}-dimensional, fit is {n}-dimensional",
            calibration.n
        )));
    }
    if let Some(d) = domain {
        if d.n != n {
            return Err(Error::Mismatch(format!(
                "domain is {}-dimensional, fit is {n}-dimensional",
                d.n
            )));
        }
    }
    let nm1 = n as f64 - 1.0;
    let root = (4.0 * PI * fit.mu).sqrt();
    let volume_est = fit.a / nm1;
    let boundary_candidates = CONVENTIONS
        .iter()
        .map(|&(tag, beta)| (tag.to_string(), -fit.b / (nm1 * beta * root)))
        .collect();
    let true_geometry = domain.map(|d| TrueGeometry {
        volume: d.volume(),
        boundary: d.boundary_measure(),
    });
    let measured = true_geometry.map(|g| measured_beta(fit, g.boundary));
    let b_predictions: Option<BTreeMap<String, f64>> = true_geometry.map(|g| {
        CONVENTIONS
            .iter()
            .map(|&(tag, beta)| (tag.to_string(), -nm1 * beta * root * g.boundary))
            .collect()
    });
    let b_deviation = b_predictions.as_ref().map(|p| {
        p.iter()
            .map(|(tag, &pred)| (tag.clone(), fit.b / pred - 1.0))
            .collect()
    });
    let boundary_est = -fit.b / (nm1 * calibration.beta * root);
    let power = nm1 / n as f64;
    let isoperimetric_ratio = boundary_est / volume_est.powf(power);
    let relative = fit.stderr_b / fit.b.abs()
        + calibration.stderr / calibration.beta.abs()
        + power * fit.stderr_a / fit.a.abs();
    let ball = ball_ratio(n);
    let mut report = InvariantReport {
        fit: fit.clone(),
        volume_est,
        boundary_candidates,
        beta_measured: measured.map(|m| m.0),
        beta_stderr: measured.map(|m| m.1),
        b_predictions,
        b_deviation,
        calibration: *calibration,
        boundary_est,
        isoperimetric_ratio,
        isoperimetric_stderr: relative * isoperimetric_ratio.abs(),
        ball_ratio: ball,
        isoperimetric_excess: isoperimetric_ratio / ball - 1.0,
        verdict: Verdict::Inconclusive,
        true_geometry,
    };
    report.verdict = hear_ball(&report, n, BALL_TOL);
    Ok(report)
}

/// Isoperimetric test: `ball` iff the ratio is at most `(1 + tol)` times the
/// ball's. An exact tie counts as `ball`. A ratio within its standard error
/// of the threshold, or a fit whose `b` is too uncertain, is `inconclusive`.
pub fn hear_ball(report: &InvariantReport, n: u32, tol: f64) -> Verdict {
    let fit = &report.fit;
    if !(fit.stderr_b <= MAX_BOUNDARY_STDERR * fit.b.abs()) {
        return Verdict::Inconclusive;
    }
    let threshold = (1.0 + tol) * ball_ratio(n);
    let ratio = report.isoperimetric_ratio;
    if ratio == threshold {
        Verdict::Ball
    } else if (ratio - threshold).abs() < report.isoperimetric_stderr || ratio.is_nan() {
        Verdict::Inconclusive
    } else if ratio < threshold {
        Verdict::Ball
    } else {
        Verdict::NotBall
    }
}

/// `N(τ) / (C τ^{n/2}) - 1`.
pub fn weyl_check(spectrum: &Spectrum, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let count = spectrum.counting(tau)?;
    let n = spectrum.domain.n as f64;
    Ok(count as f64 / (spectrum.weyl_constant() * tau.powf(n / 2.0)) - 1.0)
}

/// Least-squares fit of `N(τ) / τ^{n/2} ≈ C + D τ^{-1/2}` at `points`
/// geometrically spaced levels in `[tau_lo, tau_hi]`. Returns `(C, D)`.
pub fn fit_counting(
    spectrum: &Spectrum,
    tau_lo: f64,
    tau_hi: f64,
    points: usize,
) -> Result<(f64, f64)> {
    if !(tau_lo > 0.0 && tau_hi > tau_lo) || points < 3 {
        return Err(Error::Domain(format!(
            "need 0 < tau_lo < tau_hi and at least 3 points, got [{tau_lo}, {tau_hi}] x {points}"
        )));
    }
    let half_n = spectrum.domain.n as f64 / 2.0;
    let taus: Vec<f64> = (0..points)
        .map(|k| tau_lo * (tau_hi / tau_lo).powf(k as f64 / (points - 1) as f64))
        .collect();
    let ys = taus
        .iter()
        .map(|&tau| Ok(spectrum.counting(tau)? as f64 / tau.powf(half_n)))
        .collect::<Result<Vec<f64>>>()?;
    let fit = least_squares(&taus, &ys, &[|_| 1.0, |x: f64| 1.0 / x.sqrt()])?;
    Ok((fit.coef[0], fit.coef[1]))
}

/// Fit of `g(t) = (4πμt)^{n/2} [Θ_S(t) - (n-1) Θ_D(t)]`. If the Stokes trace
/// were `n-1` copies of the Dirichlet trace to two terms, `a` and `b` would
/// both vanish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianComparison {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub stderr_a: f64,
    pub stderr_b: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

pub fn compare_with_laplacian(
    stokes: &HeatTraceCurve,
    laplacian: &HeatTraceCurve,
    n: u32,
    window: Option<(f64, f64)>,
) -> Result<LaplacianComparison> {
    if stokes.operator != Operator::Stokes || laplacian.operator != Operator::DirichletLaplacian {
        return Err(Error::Mismatch(format!(
            "expected a stokes and a dirichlet_laplacian curve, got {} and {}",
            stokes.operator, laplacian.operator
        )));
    }
    if stokes.domain != laplacian.domain {
        return Err(Error::Mismatch("curves are for different domains".into()));
    }
    let mu = stokes.domain.mu;
    check_curve(stokes, n, mu)?;
    let window = window.unwrap_or_else(|| default_window(n));
    let s_idx = window_samples(stokes, window)?;
    let l_idx = window_samples(laplacian, window)?;
    let mut ts = Vec::new();
    let mut gs = Vec::new();
    for &i in &s_idx {
        let s = &stokes.samples[i];
        if let Some(&j) = l_idx.iter().find(|&&j| laplacian.samples[j].t == s.t) {
            let d = s.theta - (n as f64 - 1.0) * laplacian.samples[j].theta;
            ts.push(s.t);
            gs.push(normalization(n, mu, s.t) * d);
        }
    }
    if ts.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::Mismatch(format!(
            "the curves share {} sample times in the window, need {MIN_WINDOW_SAMPLES}",
            ts.len()
        )));
    }
    let fit = expansion_fit(&ts, &gs)?;
    Ok(LaplacianComparison {
        a: fit.coef[0],
        b: fit.coef[1],
        c: fit.coef[2],
        stderr_a: fit.stderr[0],
        stderr_b: fit.stderr[1],
        window,
        samples: ts.len(),
    })
}
