//! Named validation runs: spectrum, certified trace, fit and report in one
//! call.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    compare_with_laplacian, default_window, fit_expansion, recover_invariants, Calibration,
    FitResult, InvariantReport, LaplacianComparison,
};
use crate::error::{Error, Result};
use crate::heat_trace::{
    evaluate, geometric_grid, tail_requirement, HeatTraceCurve, POINTS_PER_DECADE,
};
use crate::spectra::{
    laplacian_dirichlet_spectrum, stokes_spectrum, union_spectrum, DomainSpec, Operator, Spectrum,
};

pub const PRESET_TAIL_EPS: f64 = 1e-12;

/// Regeneration attempts when a trace reports an insufficient cutoff.
const MAX_ESCALATIONS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "disk2d")]
    Disk2d,
    #[serde(rename = "ball3d")]
    Ball3d,
    #[serde(rename = "two-disks")]
    TwoDisks,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Disk2d, Preset::Ball3d, Preset::TwoDisks];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Disk2d => "disk2d",
            Preset::Ball3d => "ball3d",
            Preset::TwoDisks => "two-disks",
        }
    }

    /// Unit radii, `μ = 1`.
    pub fn domain(self) -> DomainSpec {
        let disk = || DomainSpec::disk(1.0, 1.0).expect("unit disk");
        match self {
            Preset::Disk2d => disk(),
            Preset::Ball3d => DomainSpec::ball(1.0, 1.0).expect("unit ball"),
            Preset::TwoDisks => DomainSpec::union(vec![disk(), disk()]).expect("two disks"),
        }
    }

    /// The exact ball whose measured boundary constant calibrates the verdict.
    pub fn calibration_domain(self) -> DomainSpec {
        match self {
            Preset::Ball3d => Preset::Ball3d.domain(),
            Preset::Disk2d | Preset::TwoDisks => Preset::Disk2d.domain(),
        }
    }

    pub fn window(self) -> (f64, f64) {
        default_window(self.domain().n)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                Error::Parse(format!("unknown preset {s:?} (disk2d, ball3d, two-disks)"))
            })
    }
}

fn spectrum_for(domain: &DomainSpec, operator: Operator, cutoff: f64) -> Result<Spectrum> {
    match operator {
        Operator::Stokes => stokes_spectrum(domain, cutoff),
        Operator::DirichletLaplacian => laplacian_dirichlet_spectrum(domain, cutoff),
    }
}

/// Spectrum and trace on `t_grid`, certified to `tail_eps`. The first cutoff
/// comes from [`tail_requirement`]; when the trace asks for more, the
/// spectrum is regenerated at the reported requirement.
pub fn certified_trace(
    domain: &DomainSpec,
    operator: Operator,
    t_grid: &[f64],
    tail_eps: f64,
) -> Result<(Spectrum, HeatTraceCurve)> {
    let t_min = *t_grid
        .first()
        .ok_or_else(|| Error::InsufficientSamples("empty t grid".into()))?;
    let mut cutoff = tail_requirement(domain.n, domain.mu, domain.volume(), t_min, tail_eps);
    for _ in 0..MAX_ESCALATIONS {
        let spectrum = spectrum_for(domain, operator, cutoff)?;
        match evaluate(&spectrum, t_grid, tail_eps) {
            Ok(curve) => return Ok((spectrum, curve)),
            Err(Error::CutoffInsufficient { required, .. }) => cutoff = required,
            Err(e) => return Err(e),
        }
    }
    let spectrum = spectrum_for(domain, operator, cutoff)?;
    let curve = evaluate(&spectrum, t_grid, tail_eps)?;
    Ok((spectrum, curve))
}

/// Everything a preset run produces.
#[derive(Debug, Clone)]
pub struct PresetRun {
    pub preset: Preset,
    pub spectrum: Spectrum,
    pub curve: HeatTraceCurve,
    pub laplacian_curve: HeatTraceCurve,
    pub fit: FitResult,
    pub report: InvariantReport,
    pub laplacian: LaplacianComparison,
}

/// The serialized summary of a preset run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    pub preset: Preset,
    pub tail_eps: f64,
    pub stokes_cutoff: f64,
    pub laplacian_cutoff: f64,
    pub report: InvariantReport,
    pub laplacian_comparison: LaplacianComparison,
}

impl PresetRun {
    pub fn adjudication(&self) -> Adjudication {
        Adjudication {
            preset: self.preset,
            tail_eps: self.curve.tail_eps,
            stokes_cutoff: self.spectrum.cutoff,
            laplacian_cutoff: self.laplacian_curve.cutoff,
            report: self.report.clone(),
            laplacian_comparison: self.laplacian.clone(),
        }
    }
}

/// Run `preset` on its default window with `tail_eps = 1e-12`.
pub fn run_preset(preset: Preset) -> Result<PresetRun> {
    let (lo, hi) = preset.window();
    let grid = geometric_grid(lo, hi, POINTS_PER_DECADE)?;
    let base = preset.calibration_domain();
    let (base_spectrum, base_curve) =
        certified_trace(&base, Operator::Stokes, &grid, PRESET_TAIL_EPS)?;
    let (base_laplacian_spectrum, base_laplacian) =
        certified_trace(&base, Operator::DirichletLaplacian, &grid, PRESET_TAIL_EPS)?;
    let n = base.n;
    let base_fit = fit_expansion(&base_curve, n, base.mu, Some((lo, hi)))?;
    let calibration = Calibration::from_fit(&base_fit, &base)?;
    let (spectrum, curve, laplacian_curve, fit) = match preset {
        Preset::Disk2d | Preset::Ball3d => (base_spectrum, base_curve, base_laplacian, base_fit),
        Preset::TwoDisks => {
            let spectrum = union_spectrum(&[base_spectrum.clone(), base_spectrum])?;
            let curve = evaluate(&spectrum, &grid, PRESET_TAIL_EPS)?;
            let domain = preset.domain();
            let laplacian_union =
                union_spectrum(&[base_laplacian_spectrum.clone(), base_laplacian_spectrum])?;
            let laplacian_curve = evaluate(&laplacian_union, &grid, PRESET_TAIL_EPS)?;
            let fit = fit_expansion(&curve, domain.n, domain.mu, Some((lo, hi)))?;
            (spectrum, curve, laplacian_curve, fit)
        }
    };
    let domain = preset.domain();
    let report = recover_invariants(&fit, Some(&domain), &calibration)?;
    let laplacian = compare_with_laplacian(&curve, &laplacian_curve, n, Some((lo, hi)))?;
    Ok(PresetRun {
        preset,
        spectrum,
        curve,
        laplacian_curve,
        fit,
        report,
        laplacian,
    })
}
