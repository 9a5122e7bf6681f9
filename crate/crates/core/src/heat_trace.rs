//! Heat traces `Θ(t) = Σ m_k e^{-λ_k t}` with certified truncation bounds.
//!
//! The tail beyond a cutoff `Λ` is bounded through the counting majorant
//! `N(τ) ≤ 2 C τ^{n/2}` (C the Weyl constant, checked against the stored
//! spectrum before use). Integrating by parts,
//!
//! ```text
//! Σ_{λ > Λ} e^{-λt} ≤ t ∫_Λ^∞ e^{-τt} 2C τ^{n/2} dτ = 2C t^{-n/2} Γ(n/2 + 1, Λt).
//! ```

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::spectra::{parse_spectrum_header, DomainSpec, Operator, Spectrum};
use crate::sum::{tree_merge, CompensatedSum};
use crate::{par, textfmt};

/// Factor by which the counting function may exceed its Weyl term.
pub const MAJORANT_FACTOR: f64 = 2.0;

/// Default density of geometric `t` grids.
pub const POINTS_PER_DECADE: usize = 40;

/// Entries per partial sum. Fixed so the reduction tree never depends on the
/// thread count.
const CHUNK: usize = 4096;

/// `e^{-x}` is exactly zero in `f64` past this point.
const EXP_UNDERFLOW: f64 = 745.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub theta: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatTraceCurve {
    pub operator: Operator,
    pub domain: DomainSpec,
    pub cutoff: f64,
    pub tail_eps: f64,
    pub samples: Vec<TraceSample>,
}

/// `ln Γ(a, x)` (upper incomplete gamma, not regularized), never rounding
/// below the true value.
fn ln_upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return ln_gamma(a);
    }
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let q = gamma_ur(a, x);
    if q > 1e-280 {
        // statrs converges to 1e-15 relative
        return q.ln() + ln_gamma(a) + 1e-12;
    }
    // Deep tail: Γ(a, x) ≤ x^{a-1} e^{-x} / (1 - (a-1)/x) for a ≥ 1, x > a - 1.
    (a - 1.0) * x.ln() - x - (1.0 - (a - 1.0) / x).ln()
}

/// Certified bound on `Σ_{λ > cutoff} e^{-λt}` for Weyl constant `c_weyl`.
pub fn tail_bound(c_weyl: f64, n: u32, cutoff: f64, t: f64) -> f64 {
    if cutoff.is_infinite() {
        return 0.0;
    }
    let s = n as f64 / 2.0;
    (MAJORANT_FACTOR.ln() + c_weyl.ln() - s * t.ln() + ln_upper_gamma(s + 1.0, cutoff * t)).exp()
}

/// Smallest cutoff (to bisection accuracy, rounded up) whose tail bound at
/// `t` is at most `target`.
pub fn cutoff_for_tail(c_weyl: f64, n: u32, t: f64, target: f64) -> f64 {
    let bound = |x: f64| tail_bound(c_weyl, n, x / t, t);
    if bound(0.0) <= target {
        return 0.0;
    }
    let mut hi = (n as f64 / 2.0 + 1.0).max(1.0);
    while bound(hi) > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    hi / t
}

/// Stokes Weyl constant `(n-1) ω_n |Ω| / ((2π)^n μ^{n/2})`.
fn stokes_weyl_constant(n: u32, mu: f64, volume: f64) -> f64 {
    let nf = n as f64;
    (nf - 1.0) * crate::spectra::unit_ball_volume(n) * volume
        / ((2.0 * std::f64::consts::PI).powf(nf) * mu.powf(nf / 2.0))
}

/// Cutoff `Λ_req` such that the Stokes tail at `t_min` is at most
/// `tail_eps / 2` times the leading term `C Γ(n/2 + 1) t^{-n/2}`. The extra
/// half leaves room for `Θ` sitting below its leading term.
pub fn tail_requirement(n: u32, mu: f64, volume: f64, t_min: f64, tail_eps: f64) -> f64 {
    let c = stokes_weyl_constant(n, mu, volume);
    let s = n as f64 / 2.0;
    let leading = c * ln_gamma(s + 1.0).exp() * t_min.powf(-s);
    cutoff_for_tail(c, n, t_min, 0.5 * tail_eps * leading)
}

/// `t_min · 10^{k / per_decade}` up to `t_max` (included).
pub fn geometric_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) || per_decade == 0 {
        return Err(Error::Domain(format!(
            "need 0 < t_min < t_max and a positive density, got [{t_min}, {t_max}] at {per_decade}"
        )));
    }
    let steps = ((t_max / t_min).log10() * per_decade as f64).round() as usize;
    let steps = steps.max(1);
    Ok((0..=steps)
        .map(|k| {
            if k == steps {
                t_max
            } else {
                t_min * 10f64.powf(k as f64 / per_decade as f64)
            }
        })
        .collect())
}

/// `count` geometrically spaced points from `lo` to `hi`, both included.
pub fn geometric_points(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || count < 2 {
        return Err(Error::Domain(format!(
            "need 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {count}"
        )));
    }
    let last = count - 1;
    Ok((0..count)
        .map(|k| match k {
            0 => lo,
            k if k == last => hi,
            k => lo * (hi / lo).powf(k as f64 / last as f64),
        })
        .collect())
}

/// `Σ m_k e^{-λ_k t}` over the stored entries, compensated and reduced in a
/// fixed tree.
pub fn theta(spectrum: &Spectrum, t: f64) -> f64 {
    let live = spectrum
        .entries
        .partition_point(|e| e.value * t <= EXP_UNDERFLOW);
    let parts = par::map_chunks(&spectrum.entries[..live], CHUNK, |chunk| {
        chunk
            .iter()
            .map(|e| e.multiplicity as f64 * (-e.value * t).exp())
            .collect::<CompensatedSum>()
    });
    tree_merge(parts).value()
}

/// `Θ(t)` as a Stieltjes sum over the counting function,
/// `Σ_k N(v_k) (e^{-v_k t} - e^{-v_{k+1} t})` over distinct values `v_k`.
pub fn theta_stieltjes(spectrum: &Spectrum, t: f64) -> f64 {
    let mut distinct: Vec<(f64, u64)> = Vec::new();
    let mut count = 0u64;
    for e in &spectrum.entries {
        count += e.multiplicity as u64;
        match distinct.last_mut() {
            Some(last) if last.0 == e.value => last.1 = count,
            _ => distinct.push((e.value, count)),
        }
    }
    let mut acc = CompensatedSum::new();
    for (k, &(v, n)) in distinct.iter().enumerate() {
        let here = (-v * t).exp();
        if here == 0.0 {
            break;
        }
        let drop = match distinct.get(k + 1) {
            // e^{-vt} - e^{-wt} = e^{-vt} (1 - e^{-(w-v)t})
            Some(&(w, _)) => here * -(-(w - v) * t).exp_m1(),
            None => here,
        };
        acc.add(n as f64 * drop);
    }
    acc.value()
}

/// Evaluate `Θ` on `t_grid` (strictly increasing) with tails certified to
/// `tail_eps` relative.
pub fn evaluate(spectrum: &Spectrum, t_grid: &[f64], tail_eps: f64) -> Result<HeatTraceCurve> {
    if t_grid.is_empty() {
        return Err(Error::InsufficientSamples("empty t grid".into()));
    }
    if !(t_grid[0] > 0.0) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "t grid must be positive and strictly increasing".into(),
        ));
    }
    if !(tail_eps > 0.0) {
        return Err(Error::Domain(format!(
            "tail_eps must be positive, got {tail_eps}"
        )));
    }
    let c = spectrum.weyl_constant();
    let n = spectrum.domain.n;
    if spectrum.cutoff.is_finite() {
        let ratio = spectrum.weyl_majorant_ratio();
        if ratio > MAJORANT_FACTOR {
            return Err(Error::MajorantViolated { ratio });
        }
    }
    let samples: Vec<TraceSample> = par::map_slice(t_grid, |&t| TraceSample {
        t,
        theta: theta(spectrum, t),
        tail_bound: tail_bound(c, n, spectrum.cutoff, t),
    });
    let mut required = spectrum.cutoff;
    for s in &samples {
        if s.tail_bound > tail_eps * s.theta {
            // the partial sum is a lower bound on Θ, so this target is safe
            required = required.max(cutoff_for_tail(c, n, s.t, tail_eps * s.theta));
        }
    }
    if required > spectrum.cutoff {
        return Err(Error::CutoffInsufficient {
            cutoff: spectrum.cutoff,
            required,
        });
    }
    Ok(HeatTraceCurve {
        operator: spectrum.operator,
        domain: spectrum.domain.clone(),
        cutoff: spectrum.cutoff,
        tail_eps,
        samples,
    })
}

impl HeatTraceCurve {
    pub fn ts(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.theta).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {}", textfmt::TRACE_COLUMNS.join(","))?;
        writeln!(
            w,
            "# {},{},{},{},{},{},{:e}",
            self.operator,
            self.domain.kind,
            self.domain.n,
            self.domain.mu,
            self.domain.geometry_string(),
            self.cutoff,
            self.tail_eps
        )?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{}",
                textfmt::float(s.t),
                textfmt::float(s.theta),
                textfmt::float(s.tail_bound)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let fields = textfmt::read_header(&mut lines, textfmt::TRACE_COLUMNS)?;
        let (operator, domain, cutoff) = parse_spectrum_header(&fields[..6])?;
        let tail_eps: f64 = fields[6]
            .parse()
            .map_err(|_| Error::Parse("header: bad tail_eps".into()))?;
        let mut samples = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("row {}: {line:?}", i + 1));
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if cols.len() != 3 {
                return Err(bad());
            }
            samples.push(TraceSample {
                t: cols[0],
                theta: cols[1],
                tail_bound: cols[2],
            });
        }
        Ok(HeatTraceCurve {
            operator,
            domain,
            cutoff,
            tail_eps,
            samples,
        })
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::read_csv(s.as_bytes())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}
