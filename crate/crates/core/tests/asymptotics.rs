mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use stokes_core::asymptotics::*;
use stokes_core::heat_trace::{HeatTraceCurve, TraceSample};
use stokes_core::pipeline::{run_preset, Preset, PresetRun};
use stokes_core::spectra::*;
use stokes_core::Error;

use common::boundary;

fn disk_run() -> &'static PresetRun {
    static R: OnceLock<PresetRun> = OnceLock::new();
    R.get_or_init(|| run_preset(Preset::Disk2d).unwrap())
}

fn ball_run() -> &'static PresetRun {
    static R: OnceLock<PresetRun> = OnceLock::new();
    R.get_or_init(|| run_preset(Preset::Ball3d).unwrap())
}

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

/// Curve whose normalized trace is exactly `f` (n = 2, μ = 1).
fn synthetic(ts: &[f64], f: impl Fn(f64) -> f64) -> HeatTraceCurve {
    HeatTraceCurve {
        operator: Operator::Stokes,
        domain: DomainSpec::disk(1.0, 1.0).unwrap(),
        cutoff: f64::INFINITY,
        tail_eps: 1e-12,
        samples: ts
            .iter()
            .map(|&t| TraceSample {
                t,
                theta: f(t) / (4.0 * PI * t),
                tail_bound: 0.0,
            })
            .collect(),
    }
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
        .collect()
}

#[test]
fn exact_model_is_recovered() {
    let curve = synthetic(&log_grid(1e-4, 1e-2, 60), |t| 3.0 + 2.0 * t.sqrt());
    let fit = fit_expansion(&curve, 2, 1.0, Some((1e-4, 1e-2))).unwrap();
    assert!((fit.a - 3.0).abs() < 1e-12, "a = {}", fit.a);
    assert!((fit.b - 2.0).abs() < 1e-12, "b = {}", fit.b);
    assert!(fit.c.abs() < 1e-12, "c = {}", fit.c);
    assert!(fit.condition <= MAX_CONDITION);
    assert_eq!(fit.samples, 60);
}

#[test]
fn exact_model_on_the_disk_window() {
    // one ulp of f moves c by ~2e-12 here, so c is left to the test above
    let curve = synthetic(&log_grid(1e-5, 1e-3, 60), |t| 3.0 + 2.0 * t.sqrt());
    let fit = fit_expansion(&curve, 2, 1.0, Some((1e-5, 1e-3))).unwrap();
    assert!((fit.a - 3.0).abs() < 1e-12, "a = {}", fit.a);
    assert!((fit.b - 2.0).abs() < 1e-12, "b = {}", fit.b);
}

#[test]
fn boundary_oracles_agree() {
    let (direct, change) = boundary::direct_summation_b();
    let counting = boundary::zero_counting_b();
    println!("direct {direct}, cutoff change {change:e}, counting {counting}");
    assert!(
        change < 1e-13,
        "cutoff escalation still moves the trace by {change:e}"
    );
    assert!(rel(direct, counting) < 2e-3, "{direct} vs {counting}");
    assert!(rel(direct, boundary::frozen_b()) < 2e-3);
    assert!(rel(counting, boundary::frozen_b()) < 2e-3);
}

#[test]
fn disk_fit_recovers_area_and_boundary_term() {
    let fit = &disk_run().fit;
    assert_eq!(fit.window, (1e-5, 1e-3));
    assert!(rel(fit.a, PI) < 5e-4, "a = {}", fit.a);
    assert!(rel(fit.b, boundary::frozen_b()) < 5e-3, "b = {}", fit.b);
    assert!(fit.stderr_b / fit.b.abs() <= 5e-3);
    assert!(fit.condition <= MAX_CONDITION);
}

#[test]
fn disk_report() {
    let report = &disk_run().report;
    assert!(rel(report.volume_est, PI) < 5e-4);
    let beta = report.beta_measured.unwrap();
    assert!((beta - (0.25 + 1.0 / PI)).abs() < 3e-3, "beta = {beta}");
    assert!(report.beta_stderr.unwrap() <= 3e-3);
    let predictions = report.b_predictions.as_ref().unwrap();
    let b = report.fit.b;
    assert!(b < predictions["beta=1/2"] && b > predictions["beta=1"]);
    for (tag, dev) in report.b_deviation.as_ref().unwrap() {
        assert!(dev.abs() > 0.1, "{tag} matches within 10%: {dev}");
    }
}

#[test]
fn ball_volume() {
    let fit = &ball_run().fit;
    assert!(rel(fit.a, 8.0 * PI / 3.0) < 1e-3, "a = {}", fit.a);
    assert!(rel(ball_run().report.volume_est, 4.0 * PI / 3.0) < 1e-3);
}

#[test]
fn convention_candidates_scale_exactly() {
    let c = &disk_run().report.boundary_candidates;
    assert_eq!(c["beta=1/2"], 2.0 * c["beta=1"]);
    assert_eq!(c["beta=1/4"], 4.0 * c["beta=1"]);
}

#[test]
fn verdicts_on_presets() {
    assert_eq!(disk_run().report.verdict, Verdict::Ball);
    assert_eq!(hear_ball(&disk_run().report, 2, BALL_TOL), Verdict::Ball);
    assert_eq!(hear_ball(&ball_run().report, 3, BALL_TOL), Verdict::Ball);
    let two = run_preset(Preset::TwoDisks).unwrap();
    assert_eq!(hear_ball(&two.report, 2, BALL_TOL), Verdict::NotBall);
    let excess = two.report.isoperimetric_excess;
    assert!(rel(excess, 2f64.sqrt() - 1.0) < 1e-2, "excess = {excess}");
}

#[test]
fn threshold_tie_is_ball() {
    let mut report = disk_run().report.clone();
    let tol = 0.05;
    report.isoperimetric_ratio = (1.0 + tol) * ball_ratio(2);
    report.isoperimetric_stderr = 0.0;
    assert_eq!(hear_ball(&report, 2, tol), Verdict::Ball);
    report.isoperimetric_ratio = (1.0 + tol) * ball_ratio(2) * (1.0 + 1e-12);
    assert_eq!(hear_ball(&report, 2, tol), Verdict::NotBall);
    report.isoperimetric_stderr = 1e-6;
    assert_eq!(hear_ball(&report, 2, tol), Verdict::Inconclusive);
}

#[test]
fn uncertain_boundary_term_is_inconclusive() {
    let mut report = disk_run().report.clone();
    report.fit.stderr_b = 0.03 * report.fit.b.abs();
    assert_eq!(hear_ball(&report, 2, BALL_TOL), Verdict::Inconclusive);
}

#[test]
fn shrinking_the_window_stays_within_error_bars() {
    let run = disk_run();
    let full = &run.fit;
    for hi in [3e-4, 1e-4] {
        let sub = fit_expansion(&run.curve, 2, 1.0, Some((1e-5, hi))).unwrap();
        println!("[1e-5, {hi:e}]: a = {}, b = {}", sub.a, sub.b);
        assert!((sub.a - full.a).abs() < 3.0 * full.stderr_a);
        assert!((sub.b - full.b).abs() < 3.0 * full.stderr_b);
    }
}

#[test]
fn automatic_window_is_a_certified_decade() {
    let run = disk_run();
    let fit = fit_expansion(&run.curve, 2, 1.0, None).unwrap();
    let (lo, hi) = fit.window;
    assert!(lo >= 1e-5 * (1.0 - 1e-12) && hi <= 1e-3 * (1.0 + 1e-12));
    assert!((hi / lo - 10.0).abs() < 1e-9);
    assert!(rel(fit.a, PI) < 5e-4);
    assert!(rel(fit.b, boundary::frozen_b()) < 5e-3);
}

#[test]
fn weyl_law() {
    let disk = weyl_check(&disk_run().spectrum, 1e6).unwrap();
    assert!(disk.abs() <= 0.01, "disk deviation {disk}");
    let ball_domain = DomainSpec::ball(1.0, 1.0).unwrap();
    let ball = stokes_spectrum(&ball_domain, 1e5).unwrap();
    assert!((ball.weyl_constant() - 4.0 / (9.0 * PI)).abs() < 1e-15);
    let dev = weyl_check(&ball, 1e5).unwrap();
    assert!(dev.abs() <= 0.02, "ball deviation {dev}");
    assert!(matches!(
        weyl_check(&ball, 2e5),
        Err(Error::BeyondCutoff { .. })
    ));
}

#[test]
fn weyl_deviation_scales_with_viscosity() {
    let one = stokes_spectrum(&DomainSpec::disk(1.0, 1.0).unwrap(), 4e4).unwrap();
    let four = stokes_spectrum(&DomainSpec::disk(1.0, 4.0).unwrap(), 1.6e5).unwrap();
    for tau in [4e3, 1.2e4, 1.6e5] {
        assert_eq!(
            weyl_check(&four, tau).unwrap(),
            weyl_check(&one, tau / 4.0).unwrap()
        );
    }
}

#[test]
fn counting_and_trace_leading_terms_agree() {
    for run in [disk_run(), ball_run()] {
        let s = &run.spectrum;
        let n = s.domain.n as f64;
        let (leading, _) = fit_counting(s, s.cutoff / 100.0, s.cutoff, 50).unwrap();
        let predicted = s.weyl_constant() * run.fit.a / ((n - 1.0) * s.domain.volume());
        assert!(rel(leading, predicted) < 1e-2, "{leading} vs {predicted}");
    }
}

#[test]
fn laplacian_comparison_on_disk() {
    let cmp = &disk_run().laplacian;
    assert!(cmp.a.abs() <= 1e-3, "a = {}", cmp.a);
    let expected = -4.0 * PI.sqrt();
    assert!(rel(cmp.b, expected) < 5e-3, "b = {}", cmp.b);
}

#[test]
fn identical_traces_compare_to_zero() {
    let stokes = disk_run().curve.clone();
    let mut laplacian = stokes.clone();
    laplacian.operator = Operator::DirichletLaplacian;
    let cmp = compare_with_laplacian(&stokes, &laplacian, 2, None).unwrap();
    assert_eq!((cmp.a, cmp.b, cmp.c), (0.0, 0.0, 0.0));
    assert_eq!((cmp.stderr_a, cmp.stderr_b), (0.0, 0.0));
}

#[test]
fn comparison_preconditions() {
    let run = disk_run();
    assert!(matches!(
        compare_with_laplacian(&run.laplacian_curve, &run.curve, 2, None),
        Err(Error::Mismatch(_))
    ));
    let mut shifted = run.laplacian_curve.clone();
    for s in &mut shifted.samples {
        s.t *= 1.0 + 1e-15;
    }
    assert!(matches!(
        compare_with_laplacian(&run.curve, &shifted, 2, None),
        Err(Error::Mismatch(_))
    ));
}

#[test]
fn fit_preconditions() {
    let curve = synthetic(&log_grid(1e-5, 1e-3, 81), |t| 3.0 + 2.0 * t.sqrt());
    assert!(matches!(
        fit_expansion(&curve, 2, 1.0, Some((1e-5, 1.05e-5))),
        Err(Error::InsufficientSamples(_))
    ));
    assert!(matches!(
        fit_expansion(&curve, 2, 1.0, Some((1e-6, 1e-3))),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        fit_expansion(&curve, 3, 1.0, None),
        Err(Error::Mismatch(_))
    ));
    let mut loose = curve.clone();
    loose.samples[40].tail_bound = 1e-8 * loose.samples[40].theta;
    assert!(matches!(
        fit_expansion(&loose, 2, 1.0, Some((1e-5, 1e-3))),
        Err(Error::TailTooLarge { .. })
    ));
    let narrow = synthetic(&log_grid(1.0, 1.0 + 1e-6, 20), |t| 3.0 + t);
    assert!(matches!(
        fit_expansion(&narrow, 2, 1.0, Some((1.0, 1.0 + 1e-6))),
        Err(Error::IllConditioned(_))
    ));
}

#[test]
fn plot_rows_reproduce_the_fit() {
    let run = disk_run();
    let rows = plot_rows(&run.curve, &run.fit);
    assert_eq!(rows.len(), run.curve.samples.len());
    for [t, f, g, r] in rows {
        assert_eq!(g, run.fit.eval(t));
        assert_eq!(r, f - g);
        assert!(r.abs() < 1e-4);
    }
    let mut buf = Vec::new();
    write_plot_csv(&run.curve, &run.fit, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("t,f,fit,residual"));
    assert_eq!(text.lines().count(), run.curve.samples.len() + 1);
}

#[test]
fn report_json_has_the_documented_keys() {
    let json = serde_json::to_value(&disk_run().report).unwrap();
    for key in [
        "a",
        "b",
        "c",
        "stderr_a",
        "stderr_b",
        "window",
        "volume_est",
        "boundary_candidates",
        "beta_measured",
        "isoperimetric_ratio",
        "verdict",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["verdict"], "ball");
    let back: InvariantReport = serde_json::from_value(json).unwrap();
    assert_eq!(&back, &disk_run().report);
}

#[test]
fn calibration_needs_a_ball() {
    let fit = &disk_run().fit;
    let square = DomainSpec::square(1.0, 1.0).unwrap();
    assert!(matches!(
        Calibration::from_fit(fit, &square),
        Err(Error::Mismatch(_))
    ));
    let cal = Calibration::from_fit(&ball_run().fit, &DomainSpec::ball(1.0, 1.0).unwrap()).unwrap();
    assert!(matches!(
        recover_invariants(fit, None, &cal),
        Err(Error::Mismatch(_))
    ));
}

proptest! {
    #[test]
    fn candidates_are_exact_multiples(b in -100.0f64..-0.1, a in 0.1f64..10.0, mu in 0.1f64..10.0) {
        let mut fit = disk_run().fit.clone();
        fit.a = a;
        fit.b = b;
        fit.mu = mu;
        let report = recover_invariants(&fit, None, &disk_run().report.calibration).unwrap();
        let c = &report.boundary_candidates;
        prop_assert_eq!(c["beta=1/2"], 2.0 * c["beta=1"]);
        prop_assert_eq!(c["beta=1/4"], 4.0 * c["beta=1"]);
        prop_assert!(report.beta_measured.is_none());
    }

    #[test]
    fn verdict_is_monotone_in_the_ratio(x in 0.9f64..1.2, tol in 0.0f64..0.1) {
        let mut report = disk_run().report.clone();
        report.isoperimetric_stderr = 0.0;
        report.isoperimetric_ratio = x * ball_ratio(2);
        let v = hear_ball(&report, 2, tol);
        if x <= 1.0 + tol {
            prop_assert_eq!(v, Verdict::Ball);
        } else {
            prop_assert_eq!(v, Verdict::NotBall);
        }
    }
}
