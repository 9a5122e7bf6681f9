use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use stokes_core::asymptotics::{
    compare_with_laplacian, default_window, fit_expansion, hear_ball, recover_invariants,
    write_plot_csv, Calibration, InvariantReport,
};
use stokes_core::discrete_oracle::{
    radial_oracle_spectrum, square_buckling_study, square_oracle_spectrum, RadialFamily,
    RadialProblem,
};
use stokes_core::heat_trace::{evaluate, geometric_points, tail_requirement, HeatTraceCurve};
use stokes_core::pipeline::{run_preset, Preset};
use stokes_core::spectra::{
    laplacian_dirichlet_spectrum, stokes_spectrum, union_spectrum, DomainSpec, Operator, Spectrum,
};
use stokes_core::{asymptotics, Error, Result};

use crate::args::*;

pub fn run(cli: &Cli) -> Result<()> {
    let resolved = match &cli.command {
        Command::Spectrum(a) => spectrum(a)?,
        Command::Oracle(a) => oracle(a)?,
        Command::Trace(a) => trace(a)?,
        Command::Fit(a) => fit(a)?,
        Command::Weyl(a) => weyl(a)?,
        Command::HearBall(a) => hear_ball_cmd(a)?,
        Command::Adjudicate(a) => adjudicate(a)?,
    };
    let manifest = manifest(cli, resolved);
    match &cli.manifest {
        Some(path) => write_text(Some(path), &manifest),
        None => {
            eprint!("{manifest}");
            Ok(())
        }
    }
}

fn manifest(cli: &Cli, resolved: Value) -> String {
    pretty(&json!({
        "tool": "stokes",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cli,
        "resolved": resolved,
    }))
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Write to `path`, or to stdout without one.
fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn operator(arg: OperatorArg) -> Operator {
    match arg {
        OperatorArg::Stokes => Operator::Stokes,
        OperatorArg::Laplacian => Operator::DirichletLaplacian,
    }
}

fn preset(arg: PresetArg) -> Preset {
    match arg {
        PresetArg::Disk2d => Preset::Disk2d,
        PresetArg::Ball3d => Preset::Ball3d,
        PresetArg::TwoDisks => Preset::TwoDisks,
    }
}

fn single_domain(a: &SpectrumArgs) -> Result<DomainSpec> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Error::Domain(format!("{:?} needs --{flag}", a.kind)))
    };
    match a.kind {
        Kind::Disk2d => DomainSpec::disk(need(a.radius, "radius")?, a.mu),
        Kind::Ball3d => DomainSpec::ball(need(a.radius, "radius")?, a.mu),
        Kind::Square2d => DomainSpec::square(need(a.side, "side")?, a.mu),
    }
}

fn spectrum(a: &SpectrumArgs) -> Result<Value> {
    if a.copies == 0 {
        return Err(Error::Domain("--copies must be at least 1".into()));
    }
    let part = single_domain(a)?;
    let cutoff = match (a.cutoff, a.t_min, a.tail_eps) {
        (Some(c), _, _) => c,
        (None, Some(t), Some(eps)) => {
            tail_requirement(part.n, part.mu, a.copies as f64 * part.volume(), t, eps)
        }
        _ => {
            return Err(Error::Domain(
                "give --cutoff, or --t-min with --tail-eps".into(),
            ))
        }
    };
    let one = match operator(a.operator) {
        Operator::Stokes => stokes_spectrum(&part, cutoff)?,
        Operator::DirichletLaplacian => laplacian_dirichlet_spectrum(&part, cutoff)?,
    };
    let s = if a.copies == 1 {
        one
    } else {
        union_spectrum(&vec![one; a.copies])?
    };
    write_text(a.out.as_deref(), &s.to_csv_string())?;
    Ok(json!({
        "cutoff": s.cutoff,
        "entries": s.entries.len(),
        "total_multiplicity": s.total_multiplicity(),
    }))
}

fn oracle(a: &OracleArgs) -> Result<Value> {
    let (study, spectrum) = match a.family {
        OracleFamily::Square => {
            let grids = match &a.grids {
                Some(g) => g.clone(),
                None => vec![a.grid / 2, a.grid],
            };
            let study = square_buckling_study(a.side, &grids, a.count)?;
            let domain = DomainSpec::square(a.side, a.mu)?;
            let spectrum = square_oracle_spectrum(domain, &study.extrapolated)?;
            (study, spectrum)
        }
        radial => {
            if a.grids.is_some() {
                return Err(Error::Domain("--grids applies to the square only".into()));
            }
            let family = match radial {
                OracleFamily::DiskBuckling => RadialFamily::DiskBuckling,
                OracleFamily::BallToroidal => RadialFamily::BallToroidal,
                _ => RadialFamily::BallPoloidal,
            };
            let study = RadialProblem::new(a.mode, family, a.grid, a.count)?.study()?;
            let domain = match family {
                RadialFamily::DiskBuckling => DomainSpec::disk(a.radius, a.mu)?,
                _ => DomainSpec::ball(a.radius, a.mu)?,
            };
            let groups = [(family, a.mode, study.extrapolated.clone())];
            let spectrum = radial_oracle_spectrum(domain, &groups)?;
            (study, spectrum)
        }
    };
    let out = json!({
        "family": a.family,
        "mode": a.mode,
        "study": study,
    });
    write_text(a.out.as_deref(), &pretty(&out))?;
    if let Some(p) = &a.spectrum_out {
        spectrum.save(p)?;
    }
    Ok(json!({ "grids": study.grids }))
}

fn trace(a: &TraceArgs) -> Result<Value> {
    let s = Spectrum::load(&a.input)?;
    let grid = geometric_points(a.t.lo, a.t.hi, a.t.count)?;
    let curve = evaluate(&s, &grid, a.tail_eps)?;
    write_text(a.out.as_deref(), &curve.to_csv_string())?;
    Ok(json!({ "cutoff": s.cutoff, "points": grid.len() }))
}

fn fit(a: &FitArgs) -> Result<Value> {
    let curve = HeatTraceCurve::load(&a.input)?;
    if curve.operator != Operator::Stokes {
        return Err(Error::Mismatch(format!(
            "fit expects a stokes trace, got {}",
            curve.operator
        )));
    }
    let (n, mu) = (curve.domain.n, curve.domain.mu);
    let window = match a.window {
        None => Some(default_window(n)),
        Some(Window::Auto) => None,
        Some(Window::Range(lo, hi)) => Some((lo, hi)),
    };
    let result = fit_expansion(&curve, n, mu, window)?;
    let own = Calibration::from_fit(&result, &curve.domain);
    let calibration = match &a.calibration {
        Some(p) => read_json(p)?,
        None => own.clone().map_err(|_| {
            Error::Domain(format!(
                "{} is not a disk or ball; pass --calibration from a disk or ball fit",
                curve.domain.kind
            ))
        })?,
    };
    if let Some(p) = &a.calibration_out {
        write_text(Some(p), &pretty(&own?))?;
    }
    let report = recover_invariants(&result, Some(&curve.domain), &calibration)?;
    write_text(a.out.as_deref(), &pretty(&report))?;
    if let Some(p) = &a.plot {
        let mut buf = Vec::new();
        write_plot_csv(&curve, &result, &mut buf)?;
        fs::write(p, buf)?;
    }
    if let Some(p) = &a.laplacian {
        let laplacian = HeatTraceCurve::load(p)?;
        let cmp = compare_with_laplacian(&curve, &laplacian, n, Some(result.window))?;
        if let Some(out) = &a.comparison_out {
            write_text(Some(out), &pretty(&cmp))?;
        }
    }
    Ok(json!({ "window": result.window, "calibration": calibration }))
}

fn weyl(a: &WeylArgs) -> Result<Value> {
    let s = Spectrum::load(&a.input)?;
    let deviation = asymptotics::weyl_check(&s, a.tau)?;
    let count = s.counting(a.tau)?;
    let out = json!({
        "tau": a.tau,
        "count": count,
        "weyl_term": s.weyl_constant() * a.tau.powf(s.domain.n as f64 / 2.0),
        "deviation": deviation,
    });
    write_text(None, &pretty(&out))?;
    Ok(Value::Null)
}

fn verdict_json(report: &InvariantReport, tol: f64) -> Value {
    json!({
        "verdict": hear_ball(report, report.fit.n, tol),
        "tol": tol,
        "isoperimetric_ratio": report.isoperimetric_ratio,
        "isoperimetric_stderr": report.isoperimetric_stderr,
        "ball_ratio": report.ball_ratio,
        "isoperimetric_excess": report.isoperimetric_excess,
        "calibration": report.calibration,
    })
}

fn hear_ball_cmd(a: &HearBallArgs) -> Result<Value> {
    let report: InvariantReport = match (&a.input, a.preset) {
        (Some(p), _) => read_json(p)?,
        (None, Some(p)) => run_preset(preset(p))?.report,
        (None, None) => return Err(Error::Domain("give --in or --preset".into())),
    };
    write_text(a.out.as_deref(), &pretty(&verdict_json(&report, a.tol)))?;
    Ok(Value::Null)
}

fn adjudicate(a: &AdjudicateArgs) -> Result<Value> {
    let run = run_preset(preset(a.preset))?;
    let dir = &a.out_dir;
    fs::create_dir_all(dir)?;
    run.spectrum.save(dir.join("spectrum.csv"))?;
    run.curve.save(dir.join("trace.csv"))?;
    run.laplacian_curve.save(dir.join("laplacian_trace.csv"))?;
    fs::write(dir.join("report.json"), pretty(&run.adjudication()))?;
    let mut plot = Vec::new();
    write_plot_csv(&run.curve, &run.fit, &mut plot)?;
    fs::write(dir.join("plot.csv"), plot)?;
    let r = &run.report;
    println!(
        "{}: a = {:.10} +- {:.2e}, b = {:.8} +- {:.2e}, verdict {}",
        run.preset, r.fit.a, r.fit.stderr_a, r.fit.b, r.fit.stderr_b, r.verdict
    );
    let resolved = json!({
        "stokes_cutoff": run.spectrum.cutoff,
        "laplacian_cutoff": run.laplacian_curve.cutoff,
        "window": run.fit.window,
        "points": run.curve.samples.len(),
    });
    // the output directory is left out so runs elsewhere stay byte-identical
    let cli_echo = json!({ "preset": a.preset });
    fs::write(
        dir.join("manifest.json"),
        pretty(&json!({
            "tool": "stokes",
            "version": env!("CARGO_PKG_VERSION"),
            "config": { "adjudicate": cli_echo },
            "resolved": resolved,
        })),
    )?;
    Ok(resolved)
}
