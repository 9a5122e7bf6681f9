//! Exact Stokes and Dirichlet-Laplacian spectra on disks, balls and squares.
//!
//! Unit radius, unit viscosity dispersion relations (general case scales by
//! `μ/R²`):
//!
//! * disk Stokes: `λ = z²`, `z` a zero of `J_{m+1}`, `m ≥ 0`, multiplicity 1
//!   for `m = 0` and 2 otherwise (stream function, clamped buckling);
//! * ball Stokes: toroidal `λ = z²` with `j_l(z) = 0` and poloidal `λ = z²`
//!   with `j_{l+1}(z) = 0`, both for `l ≥ 1` with multiplicity `2l + 1`;
//! * Dirichlet Laplacian: zeros of `J_m` (disk), `j_l` with `l ≥ 0` (ball),
//!   and `π²(p² + q²)/L²` (square).
//!
//! Since the first positive zero of `J_ν` exceeds `ν`, only orders up to
//! `X = sqrt(ΛR²/μ)` can contribute below the cutoff `Λ`.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{zero_tables, BesselKind, ZeroTable};
use crate::textfmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Disk2d,
    Ball3d,
    Square2d,
    Union,
}

impl DomainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainKind::Disk2d => "disk2d",
            DomainKind::Ball3d => "ball3d",
            DomainKind::Square2d => "square2d",
            DomainKind::Union => "union",
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DomainKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk2d" => Ok(DomainKind::Disk2d),
            "ball3d" => Ok(DomainKind::Ball3d),
            "square2d" => Ok(DomainKind::Square2d),
            "union" => Ok(DomainKind::Union),
            _ => Err(Error::Parse(format!("unknown domain kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Radius(f64),
    Side(f64),
    Components(Vec<DomainSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub n: u32,
    pub geometry: Geometry,
    pub mu: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl DomainSpec {
    pub fn disk(radius: f64, mu: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        check_positive("viscosity", mu)?;
        Ok(Self {
            kind: DomainKind::Disk2d,
            n: 2,
            geometry: Geometry::Radius(radius),
            mu,
        })
    }

    pub fn ball(radius: f64, mu: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        check_positive("viscosity", mu)?;
        Ok(Self {
            kind: DomainKind::Ball3d,
            n: 3,
            geometry: Geometry::Radius(radius),
            mu,
        })
    }

    pub fn square(side: f64, mu: f64) -> Result<Self> {
        check_positive("side", side)?;
        check_positive("viscosity", mu)?;
        Ok(Self {
            kind: DomainKind::Square2d,
            n: 2,
            geometry: Geometry::Side(side),
            mu,
        })
    }

    /// Disjoint union. Nested unions are flattened.
    pub fn union(parts: Vec<DomainSpec>) -> Result<Self> {
        let mut flat = Vec::new();
        for p in parts {
            match p.geometry {
                Geometry::Components(inner) => flat.extend(inner),
                _ => flat.push(p),
            }
        }
        let first = flat
            .first()
            .ok_or_else(|| Error::Domain("a union needs at least one component".into()))?;
        let (n, mu) = (first.n, first.mu);
        for p in &flat {
            if p.n != n {
                return Err(Error::Mismatch(format!(
                    "union components have dimensions {n} and {}",
                    p.n
                )));
            }
            if p.mu != mu {
                return Err(Error::Mismatch(format!(
                    "union components have viscosities {mu} and {}",
                    p.mu
                )));
            }
        }
        Ok(Self {
            kind: DomainKind::Union,
            n,
            geometry: Geometry::Components(flat),
            mu,
        })
    }

    pub fn components(&self) -> Vec<&DomainSpec> {
        match &self.geometry {
            Geometry::Components(c) => c.iter().collect(),
            _ => vec![self],
        }
    }

    /// `|Ω|`.
    pub fn volume(&self) -> f64 {
        use std::f64::consts::PI;
        match (&self.geometry, self.kind) {
            (Geometry::Radius(r), DomainKind::Disk2d) => PI * r * r,
            (Geometry::Radius(r), _) => 4.0 / 3.0 * PI * r.powi(3),
            (Geometry::Side(l), _) => l * l,
            (Geometry::Components(c), _) => c.iter().map(DomainSpec::volume).sum(),
        }
    }

    /// `|∂Ω|`.
    pub fn boundary_measure(&self) -> f64 {
        use std::f64::consts::PI;
        match (&self.geometry, self.kind) {
            (Geometry::Radius(r), DomainKind::Disk2d) => 2.0 * PI * r,
            (Geometry::Radius(r), _) => 4.0 * PI * r * r,
            (Geometry::Side(l), _) => 4.0 * l,
            (Geometry::Components(c), _) => c.iter().map(DomainSpec::boundary_measure).sum(),
        }
    }

    /// Geometry column of the CSV header: `R=1`, `L=2`, or
    /// `union[disk2d:R=1;disk2d:R=1]`.
    pub fn geometry_string(&self) -> String {
        match &self.geometry {
            Geometry::Radius(r) => format!("R={r}"),
            Geometry::Side(l) => format!("L={l}"),
            Geometry::Components(c) => {
                let parts: Vec<String> = c
                    .iter()
                    .map(|p| format!("{}:{}", p.kind, p.geometry_string()))
                    .collect();
                format!("union[{}]", parts.join(";"))
            }
        }
    }

    /// Inverse of [`DomainSpec::geometry_string`].
    pub fn from_parts(kind: DomainKind, n: u32, mu: f64, geometry: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed geometry {geometry:?} for {kind}"));
        let spec = match kind {
            DomainKind::Union => {
                let inner = geometry
                    .strip_prefix("union[")
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(bad)?;
                let mut parts = Vec::new();
                for item in inner.split(';') {
                    let (k, g) = item.split_once(':').ok_or_else(bad)?;
                    let k: DomainKind = k.parse()?;
                    let dim = match k {
                        DomainKind::Ball3d => 3,
                        _ => 2,
                    };
                    parts.push(DomainSpec::from_parts(k, dim, mu, g)?);
                }
                DomainSpec::union(parts)?
            }
            DomainKind::Square2d => {
                let l = geometry.strip_prefix("L=").ok_or_else(bad)?;
                DomainSpec::square(l.parse().map_err(|_| bad())?, mu)?
            }
            DomainKind::Disk2d | DomainKind::Ball3d => {
                let r: f64 = geometry
                    .strip_prefix("R=")
                    .ok_or_else(bad)?
                    .parse()
                    .map_err(|_| bad())?;
                if kind == DomainKind::Disk2d {
                    DomainSpec::disk(r, mu)?
                } else {
                    DomainSpec::ball(r, mu)?
                }
            }
        };
        if spec.n != n {
            return Err(Error::Parse(format!(
                "dimension {n} does not match geometry {geometry:?}"
            )));
        }
        Ok(spec)
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    std::f64::consts::PI.powf(h) / statrs::function::gamma::gamma(h + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Stokes,
    DirichletLaplacian,
}

impl Operator {
    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Stokes => "stokes",
            Operator::DirichletLaplacian => "dirichlet_laplacian",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Operator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stokes" => Ok(Operator::Stokes),
            "dirichlet_laplacian" => Ok(Operator::DirichletLaplacian),
            _ => Err(Error::Parse(format!("unknown operator {s:?}"))),
        }
    }
}

/// Weyl constant `C` in `N(τ) ~ C τ^{n/2}`:
/// `(n-1) ω_n |Ω| / ((2π)^n μ^{n/2})` for Stokes, without the `n-1` for the
/// Laplacian.
pub fn weyl_constant(operator: Operator, domain: &DomainSpec) -> f64 {
    let n = domain.n as f64;
    let copies = match operator {
        Operator::Stokes => n - 1.0,
        Operator::DirichletLaplacian => 1.0,
    };
    copies * unit_ball_volume(domain.n) * domain.volume()
        / ((2.0 * std::f64::consts::PI).powf(n) * domain.mu.powf(n / 2.0))
}

/// Where an eigenvalue came from. Ordering is used as a sort tie-breaker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Disk stream function, azimuthal mode `m` (zeros of `J_{m+1}`).
    DiskStream(u32),
    /// Ball toroidal, degree `l` (zeros of `j_l`).
    BallToroidal(u32),
    /// Ball poloidal, degree `l` (zeros of `j_{l+1}`).
    BallPoloidal(u32),
    /// Disk (`J_m`) or ball (`j_l`) Dirichlet Laplacian.
    Laplacian(u32),
    /// Square Dirichlet Laplacian; the index is `p² + q²`.
    LaplacianSquare,
    /// Discrete-oracle value; the string names the oracle, the integer the mode.
    Oracle(String, u32),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::DiskStream(m) => write!(f, "disk-stream:{m}"),
            Family::BallToroidal(l) => write!(f, "ball-toroidal:{l}"),
            Family::BallPoloidal(l) => write!(f, "ball-poloidal:{l}"),
            Family::Laplacian(m) => write!(f, "laplacian:{m}"),
            Family::LaplacianSquare => write!(f, "laplacian-square"),
            Family::Oracle(name, m) => write!(f, "oracle-{name}:{m}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "laplacian-square" {
            return Ok(Family::LaplacianSquare);
        }
        let bad = || Error::Parse(format!("unknown family tag {s:?}"));
        let (name, mode) = s.rsplit_once(':').ok_or_else(bad)?;
        let mode: u32 = mode.parse().map_err(|_| bad())?;
        match name {
            "disk-stream" => Ok(Family::DiskStream(mode)),
            "ball-toroidal" => Ok(Family::BallToroidal(mode)),
            "ball-poloidal" => Ok(Family::BallPoloidal(mode)),
            "laplacian" => Ok(Family::Laplacian(mode)),
            _ => match name.strip_prefix("oracle-") {
                Some(o) if !o.is_empty() && !o.contains(',') => {
                    Ok(Family::Oracle(o.to_string(), mode))
                }
                _ => Err(bad()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub value: f64,
    pub multiplicity: u32,
    pub family: Family,
    /// 1-based position within the family.
    pub index: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub domain: DomainSpec,
    pub operator: Operator,
    pub cutoff: f64,
    /// Ascending by value, then family, then index.
    pub entries: Vec<EigenvalueEntry>,
}

fn sort_entries(entries: &mut [EigenvalueEntry]) {
    entries.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.family.cmp(&b.family))
            .then_with(|| a.index.cmp(&b.index))
    });
}

/// Largest argument to enumerate zeros up to. The small inflation keeps a
/// zero whose square lands on the cutoff after rounding; the value filter
/// then decides.
fn zero_bound(cutoff: f64, scale: f64) -> f64 {
    (cutoff / scale).sqrt() * (1.0 + 1e-12)
}

fn entries_from_tables<'a>(
    tables: impl Iterator<Item = &'a ZeroTable>,
    scale: f64,
    cutoff: f64,
    tag: impl Fn(u32) -> Option<(Family, u32)>,
    out: &mut Vec<EigenvalueEntry>,
) {
    for t in tables {
        let Some((family, multiplicity)) = tag(t.order.degree) else {
            continue;
        };
        for (i, &z) in t.zeros.iter().enumerate() {
            let value = scale * z * z;
            if value <= cutoff {
                out.push(EigenvalueEntry {
                    value,
                    multiplicity,
                    family: family.clone(),
                    index: i as u32 + 1,
                });
            }
        }
    }
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    check_positive("cutoff", cutoff)
}

/// `μ / R²` for a disk or ball.
fn radial_scale(domain: &DomainSpec) -> f64 {
    match domain.geometry {
        Geometry::Radius(r) => domain.mu / (r * r),
        _ => unreachable!("radial_scale called on {}", domain.kind),
    }
}

fn max_order(x: f64) -> u32 {
    x.floor().min(u32::MAX as f64 - 2.0) as u32
}

/// Complete Stokes spectrum up to `cutoff` (inclusive).
pub fn stokes_spectrum(domain: &DomainSpec, cutoff: f64) -> Result<Spectrum> {
    check_cutoff(cutoff)?;
    let mut entries = Vec::new();
    match domain.kind {
        DomainKind::Disk2d => {
            let scale = radial_scale(domain);
            let x = zero_bound(cutoff, scale);
            // J_{m+1}, m = 0..: degrees 1..=X
            let top = max_order(x).max(1);
            let tables = zero_tables(BesselKind::Cylindrical, 1..=top, x)?;
            entries_from_tables(
                tables.iter(),
                scale,
                cutoff,
                |d| {
                    let m = d - 1;
                    Some((Family::DiskStream(m), if m == 0 { 1 } else { 2 }))
                },
                &mut entries,
            );
        }
        DomainKind::Ball3d => {
            let scale = radial_scale(domain);
            let x = zero_bound(cutoff, scale);
            let top = max_order(x).max(2);
            let tables = zero_tables(BesselKind::Spherical, 1..=top, x)?;
            entries_from_tables(
                tables.iter(),
                scale,
                cutoff,
                |l| Some((Family::BallToroidal(l), 2 * l + 1)),
                &mut entries,
            );
            entries_from_tables(
                tables.iter(),
                scale,
                cutoff,
                |d| (d >= 2).then(|| (Family::BallPoloidal(d - 1), 2 * d - 1)),
                &mut entries,
            );
        }
        DomainKind::Square2d => {
            return Err(Error::Unsupported(
                "square2d has no exact Stokes dispersion relation; use the discrete oracle \
                 (square_buckling) instead"
                    .into(),
            ))
        }
        DomainKind::Union => {
            let parts = domain
                .components()
                .into_iter()
                .map(|p| stokes_spectrum(p, cutoff))
                .collect::<Result<Vec<_>>>()?;
            return union_spectrum(&parts);
        }
    }
    sort_entries(&mut entries);
    Ok(Spectrum {
        domain: domain.clone(),
        operator: Operator::Stokes,
        cutoff,
        entries,
    })
}

/// Complete Dirichlet-Laplacian spectrum (times `μ`) up to `cutoff`.
pub fn laplacian_dirichlet_spectrum(domain: &DomainSpec, cutoff: f64) -> Result<Spectrum> {
    check_cutoff(cutoff)?;
    let mut entries = Vec::new();
    match (&domain.geometry, domain.kind) {
        (_, DomainKind::Disk2d) => {
            let scale = radial_scale(domain);
            let x = zero_bound(cutoff, scale);
            let tables = zero_tables(BesselKind::Cylindrical, 0..=max_order(x), x)?;
            entries_from_tables(
                tables.iter(),
                scale,
                cutoff,
                |m| Some((Family::Laplacian(m), if m == 0 { 1 } else { 2 })),
                &mut entries,
            );
        }
        (_, DomainKind::Ball3d) => {
            let scale = radial_scale(domain);
            let x = zero_bound(cutoff, scale);
            let tables = zero_tables(BesselKind::Spherical, 0..=max_order(x), x)?;
            entries_from_tables(
                tables.iter(),
                scale,
                cutoff,
                |l| Some((Family::Laplacian(l), 2 * l + 1)),
                &mut entries,
            );
        }
        (Geometry::Side(side), DomainKind::Square2d) => {
            let scale = domain.mu * std::f64::consts::PI.powi(2) / (side * side);
            let kmax = (cutoff / scale * (1.0 + 1e-12)).floor() as u64;
            let mut counts = std::collections::BTreeMap::<u64, u32>::new();
            let mut p = 1u64;
            while p * p < kmax {
                let mut q = 1u64;
                while p * p + q * q <= kmax {
                    *counts.entry(p * p + q * q).or_default() += 1;
                    q += 1;
                }
                p += 1;
            }
            for (k, mult) in counts {
                let value = scale * k as f64;
                if value <= cutoff {
                    entries.push(EigenvalueEntry {
                        value,
                        multiplicity: mult,
                        family: Family::LaplacianSquare,
                        index: k as u32,
                    });
                }
            }
        }
        (_, DomainKind::Union) => {
            let parts = domain
                .components()
                .into_iter()
                .map(|p| laplacian_dirichlet_spectrum(p, cutoff))
                .collect::<Result<Vec<_>>>()?;
            return union_spectrum(&parts);
        }
        _ => unreachable!("square2d always carries a side length"),
    }
    sort_entries(&mut entries);
    Ok(Spectrum {
        domain: domain.clone(),
        operator: Operator::DirichletLaplacian,
        cutoff,
        entries,
    })
}

/// Spectrum of a disjoint union. Equal values from different parts stay
/// separate entries; the cutoff is the smallest part cutoff.
pub fn union_spectrum(parts: &[Spectrum]) -> Result<Spectrum> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Domain("union of zero spectra".into()))?;
    for p in parts {
        if p.operator != first.operator {
            return Err(Error::Mismatch(format!(
                "cannot combine {} and {} spectra",
                first.operator, p.operator
            )));
        }
    }
    let domain = DomainSpec::union(parts.iter().map(|p| p.domain.clone()).collect())?;
    let cutoff = parts.iter().map(|p| p.cutoff).fold(f64::INFINITY, f64::min);
    let mut entries: Vec<EigenvalueEntry> = parts
        .iter()
        .flat_map(|p| p.entries.iter().filter(|e| e.value <= cutoff).cloned())
        .collect();
    sort_entries(&mut entries);
    Ok(Spectrum {
        domain,
        operator: first.operator,
        cutoff,
        entries,
    })
}

impl Spectrum {
    /// Assemble a spectrum from arbitrary entries, sorting them canonically.
    /// `cutoff` is the level up to which the list is claimed complete; an
    /// infinite cutoff declares the list exhaustive.
    pub fn from_entries(
        domain: DomainSpec,
        operator: Operator,
        cutoff: f64,
        mut entries: Vec<EigenvalueEntry>,
    ) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::Domain(format!(
                "cutoff must be positive, got {cutoff}"
            )));
        }
        if let Some(e) = entries
            .iter()
            .find(|e| !(e.value > 0.0 && e.value <= cutoff) || e.multiplicity == 0)
        {
            return Err(Error::Domain(format!(
                "entry {} (multiplicity {}) is not a positive value within the cutoff {cutoff}",
                e.value, e.multiplicity
            )));
        }
        sort_entries(&mut entries);
        Ok(Spectrum {
            domain,
            operator,
            cutoff,
            entries,
        })
    }

    /// `N(τ)`: eigenvalues `≤ τ` counted with multiplicity.
    pub fn counting(&self, tau: f64) -> Result<u64> {
        if tau > self.cutoff {
            return Err(Error::BeyondCutoff {
                tau,
                cutoff: self.cutoff,
            });
        }
        let end = self.entries.partition_point(|e| e.value <= tau);
        Ok(self.entries[..end]
            .iter()
            .map(|e| e.multiplicity as u64)
            .sum())
    }

    /// Total count with multiplicity.
    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity as u64).sum()
    }

    pub fn weyl_constant(&self) -> f64 {
        weyl_constant(self.operator, &self.domain)
    }

    /// `max_λ N(λ) / (C λ^{n/2})` over the stored eigenvalues, which is where
    /// the counting function peaks relative to any increasing envelope.
    pub fn weyl_majorant_ratio(&self) -> f64 {
        let c = self.weyl_constant();
        let half_n = self.domain.n as f64 / 2.0;
        let mut count = 0u64;
        let mut worst = 0.0_f64;
        let mut i = 0;
        while i < self.entries.len() {
            let v = self.entries[i].value;
            while i < self.entries.len() && self.entries[i].value == v {
                count += self.entries[i].multiplicity as u64;
                i += 1;
            }
            worst = worst.max(count as f64 / (c * v.powf(half_n)));
        }
        worst
    }

    pub fn smallest(&self) -> Option<&EigenvalueEntry> {
        self.entries.first()
    }

    pub fn header_fields(&self) -> [String; 6] {
        [
            self.operator.to_string(),
            self.domain.kind.to_string(),
            self.domain.n.to_string(),
            self.domain.mu.to_string(),
            self.domain.geometry_string(),
            self.cutoff.to_string(),
        ]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# operator,kind,n,mu,geometry,cutoff")?;
        writeln!(w, "# {}", self.header_fields().join(","))?;
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{}",
                textfmt::float(e.value),
                e.multiplicity,
                e.family,
                e.index
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
        let fields = textfmt::read_header(&mut lines, textfmt::SPECTRUM_COLUMNS)?;
        let (operator, domain, cutoff) = parse_spectrum_header(&fields)?;
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("row {}: {what}: {line:?}", i + 1));
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(bad("expected 4 columns"));
            }
            entries.push(EigenvalueEntry {
                value: cols[0].parse().map_err(|_| bad("bad value"))?,
                multiplicity: cols[1].parse().map_err(|_| bad("bad multiplicity"))?,
                family: cols[2].parse()?,
                index: cols[3].parse().map_err(|_| bad("bad index"))?,
            });
        }
        Ok(Spectrum {
            domain,
            operator,
            cutoff,
            entries,
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

/// Parse the six leading header fields shared by spectrum and trace files.
pub(crate) fn parse_spectrum_header(fields: &[String]) -> Result<(Operator, DomainSpec, f64)> {
    let bad = |what: &str| Error::Parse(format!("header: bad {what}"));
    let operator: Operator = fields[0].parse()?;
    let kind: DomainKind = fields[1].parse()?;
    let n: u32 = fields[2].parse().map_err(|_| bad("n"))?;
    let mu: f64 = fields[3].parse().map_err(|_| bad("mu"))?;
    let domain = DomainSpec::from_parts(kind, n, mu, &fields[4])?;
    let cutoff: f64 = fields[5].parse().map_err(|_| bad("cutoff"))?;
    Ok((operator, domain, cutoff))
}
