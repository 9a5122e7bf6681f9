//! Discretized eigensolvers that check the exact dispersion relations and
//! supply spectra where no exact formula exists (the square).

mod bidiag;
mod dense;
mod radial;
pub mod richardson;
mod square;

use serde::{Deserialize, Serialize};

pub use dense::{sym_eig, sym_eig_vectors, DenseSymmetricPencil, MAX_DENSE_SIZE};
pub use radial::{ball_radial_modes, disk_buckling_modes, solve_all, RadialFamily, RadialProblem};
pub use square::{square_buckling_grid, MAX_SQUARE_GRID};

use crate::error::{Error, Result};
use crate::spectra::{DomainSpec, EigenvalueEntry, Family, Geometry, Operator, Spectrum};

/// One extrapolated eigenvalue with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEigenvalue {
    /// Richardson-extrapolated value.
    pub value: f64,
    /// Difference from the next-lower extrapolation, plus propagated rounding.
    pub error_bar: f64,
    /// Raw value on the finest grid.
    pub finest: f64,
    /// Observed convergence exponent from the three finest grids (NaN with
    /// fewer grids or non-monotone data).
    pub order: f64,
}

/// Per-grid raw values of a convergence study and their extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub grids: Vec<usize>,
    pub spacings: Vec<f64>,
    /// `values[g][k]` is eigenvalue `k` on grid `g`.
    pub values: Vec<Vec<f64>>,
    pub extrapolated: Vec<OracleEigenvalue>,
}

/// Extrapolate with exponents `2, 4, …` using every grid; the error bar
/// compares against the extrapolation that drops the coarsest grid.
fn extrapolate_study(
    grids: Vec<usize>,
    spacings: Vec<f64>,
    values: Vec<Vec<f64>>,
) -> Result<ConvergenceStudy> {
    let g = grids.len();
    if g < 2 {
        return Err(Error::InsufficientSamples("need at least two grids".into()));
    }
    let exps: Vec<f64> = (1..g).map(|k| 2.0 * k as f64).collect();
    let full = richardson::weights(&spacings, &exps)?;
    let reduced = richardson::weights(&spacings[1..], &exps[..g - 2])?;
    let count = values[0].len();
    let extrapolated = (0..count)
        .map(|k| {
            let col: Vec<f64> = values.iter().map(|v| v[k]).collect();
            let value: f64 = full.iter().zip(&col).map(|(w, v)| w * v).sum();
            let lower: f64 = reduced.iter().zip(&col[1..]).map(|(w, v)| w * v).sum();
            let order = if g >= 3 {
                richardson::observed_order(
                    [spacings[g - 3], spacings[g - 2], spacings[g - 1]],
                    [col[g - 3], col[g - 2], col[g - 1]],
                )
            } else {
                f64::NAN
            };
            OracleEigenvalue {
                value,
                error_bar: (value - lower).abs(),
                finest: col[g - 1],
                order,
            }
        })
        .collect();
    Ok(ConvergenceStudy {
        grids,
        spacings,
        values,
        extrapolated,
    })
}

/// Square buckling study over ascending `grids` (cell counts).
pub fn square_buckling_study(side: f64, grids: &[usize], count: usize) -> Result<ConvergenceStudy> {
    if grids.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grids must be strictly increasing".into()));
    }
    let values = crate::par::map_slice(grids, |&n| square_buckling_grid(side, n, count))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let spacings = grids.iter().map(|&n| side / n as f64).collect();
    extrapolate_study(grids.to_vec(), spacings, values)
}

/// Lowest `count` clamped-buckling eigenvalues of the `side × side` square
/// (μ = 1), extrapolated from `grid_size` and half of it.
pub fn square_buckling(side: f64, grid_size: usize, count: usize) -> Result<Vec<OracleEigenvalue>> {
    let coarse = grid_size / 2;
    if coarse < 2 {
        return Err(Error::Domain(format!("grid_size {grid_size} is too small")));
    }
    Ok(square_buckling_study(side, &[coarse, grid_size], count)?.extrapolated)
}

/// Package oracle values as a `Spectrum` with `oracle-…` family tags. Each
/// `(family, mode, values)` group gets the multiplicity of the matching exact
/// family. Unit-radius values are rescaled by `μ / R²`. The cutoff is the
/// largest value; oracle lists make no completeness claim beyond their own
/// modes.
pub fn radial_oracle_spectrum(
    domain: DomainSpec,
    groups: &[(RadialFamily, u32, Vec<OracleEigenvalue>)],
) -> Result<Spectrum> {
    let radius = match domain.geometry {
        Geometry::Radius(r) => r,
        _ => {
            return Err(Error::Mismatch(
                "radial oracle values need a disk or ball domain".into(),
            ))
        }
    };
    let scale = domain.mu / (radius * radius);
    let mut entries = Vec::new();
    for (family, mode, values) in groups {
        let multiplicity = match family {
            RadialFamily::DiskBuckling if *mode == 0 => 1,
            RadialFamily::DiskBuckling => 2,
            _ => 2 * mode + 1,
        };
        for (s, v) in values.iter().enumerate() {
            entries.push(EigenvalueEntry {
                value: v.value * scale,
                multiplicity,
                family: Family::Oracle(family.as_str().to_string(), *mode),
                index: s as u32 + 1,
            });
        }
    }
    oracle_spectrum(domain, entries)
}

/// Square oracle values (already for the domain's side) as a `Spectrum`,
/// each with multiplicity one.
pub fn square_oracle_spectrum(domain: DomainSpec, values: &[OracleEigenvalue]) -> Result<Spectrum> {
    let entries = values
        .iter()
        .enumerate()
        .map(|(s, v)| EigenvalueEntry {
            value: v.value * domain.mu,
            multiplicity: 1,
            family: Family::Oracle("square-buckling".into(), 0),
            index: s as u32 + 1,
        })
        .collect();
    oracle_spectrum(domain, entries)
}

fn oracle_spectrum(domain: DomainSpec, entries: Vec<EigenvalueEntry>) -> Result<Spectrum> {
    let cutoff = entries.iter().fold(0.0_f64, |m, e| m.max(e.value));
    Spectrum::from_entries(domain, Operator::Stokes, cutoff, entries)
}
