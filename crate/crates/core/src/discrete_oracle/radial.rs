//! Radial finite-difference pencils for the disk and ball.
//!
//! The grid is staggered: unknowns sit at `r_i = (i - 1/2) h`, `i = 1..=n`,
//! with `h = 1 / (n + 1/2)` so the wall `r = 1` is node `n + 1` and no node
//! touches the origin. The flux-form operator
//!
//! ```text
//! (K u)_i = f_{i-1} (u_i - u_{i-1}) + f_i (u_i - u_{i+1}) + c_i u_i
//! f_i = (i h)^{d-1} / h,  c_i = q r_i^{d-3} h,  M = diag(r_i^{d-1} h)
//! ```
//!
//! is `-L` in weak form, with `f_0 = 0` giving regularity at the origin.
//! Second-order families solve `K u = λ M u` (wall value zero). Clamped
//! families use `w = -L ψ` as an auxiliary unknown; eliminating it leaves
//! `(K M⁻¹ K + g gᵀ / m_wall) ψ = λ K ψ`, where the rank-one term carries the
//! wall node of `w` with half-cell mass `m_wall = h/2` and `g = -f_n e_n`.
//!
//! Both pencils are solved through factored forms so that every eigenvalue
//! keeps relative accuracy near machine precision, independent of `n`:
//! with `K = Rᵀ R` (upper bidiagonal `R`), the second-order eigenvalues are
//! the squared singular values of `R M^{-1/2}`, and the clamped ones those of
//! the same matrix with one extra column `y / √m_wall`, `y = R⁻ᵀ g`.

use serde::{Deserialize, Serialize};

use super::bidiag::Bidiagonal;
use super::richardson;
use super::{extrapolate_study, ConvergenceStudy, OracleEigenvalue};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialFamily {
    /// Clamped buckling pencil `(L_m² ψ, -L_m ψ)` on the unit disk.
    DiskBuckling,
    /// Second-order radial Helmholtz pencil on the unit ball, `T(1) = 0`.
    BallToroidal,
    /// Clamped fourth-order radial pencil on the unit ball.
    BallPoloidal,
}

impl RadialFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            RadialFamily::DiskBuckling => "disk-buckling",
            RadialFamily::BallToroidal => "ball-toroidal",
            RadialFamily::BallPoloidal => "ball-poloidal",
        }
    }

    fn dimension(self) -> i32 {
        match self {
            RadialFamily::DiskBuckling => 2,
            _ => 3,
        }
    }

    fn clamped(self) -> bool {
        !matches!(self, RadialFamily::BallToroidal)
    }

    fn potential(self, mode: u32) -> f64 {
        let k = mode as f64;
        match self {
            RadialFamily::DiskBuckling => k * k,
            _ => k * (k + 1.0),
        }
    }
}

impl std::str::FromStr for RadialFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk-buckling" | "disk_buckling" => Ok(RadialFamily::DiskBuckling),
            "ball-toroidal" | "ball_toroidal" | "toroidal" => Ok(RadialFamily::BallToroidal),
            "ball-poloidal" | "ball_poloidal" | "poloidal" => Ok(RadialFamily::BallPoloidal),
            _ => Err(Error::Parse(format!("unknown radial family {s:?}"))),
        }
    }
}

/// Relative rounding error of one factored eigenvalue, per unknown.
const ROUNDOFF_PER_UNKNOWN: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub mode: u32,
    pub family: RadialFamily,
    /// Number of radial unknowns on the finest grid.
    pub grid_size: usize,
    pub count: usize,
}

impl RadialProblem {
    pub fn new(mode: u32, family: RadialFamily, grid_size: usize, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Domain("count must be positive".into()));
        }
        if grid_size < 8 * count {
            return Err(Error::Domain(format!(
                "grid_size {grid_size} is below 8 x count = {}",
                8 * count
            )));
        }
        if family != RadialFamily::DiskBuckling && mode == 0 {
            return Err(Error::Domain("ball families need degree l >= 1".into()));
        }
        Ok(RadialProblem {
            mode,
            family,
            grid_size,
            count,
        })
    }

    /// Grids used for extrapolation: roughly `n/8, n/4, n/2, n`.
    pub fn grids(&self) -> [usize; 4] {
        let n = self.grid_size;
        let part = |k: usize| ((n as f64 / k as f64).round() as usize).max(self.count);
        [part(8), part(4), part(2), n]
    }

    /// Lowest `count` eigenvalues on a grid with `n` unknowns.
    pub fn eigenvalues_on_grid(&self, n: usize) -> Result<Vec<f64>> {
        if n < self.count {
            return Err(Error::Domain(format!(
                "{n} unknowns cannot resolve {} eigenvalues",
                self.count
            )));
        }
        let b = factored_operator(self.family, self.mode, n)?;
        let sv = b.smallest_singular_values(self.count)?;
        let values: Vec<f64> = sv.iter().map(|s| s * s).collect();
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NoConvergence(format!(
                "{} mode {} eigenvalues are not strictly increasing on {n} unknowns",
                self.family.as_str(),
                self.mode
            )));
        }
        Ok(values)
    }

    /// Four-grid study; extrapolated values carry the Richardson bar plus
    /// the rounding of each raw value propagated through the weights.
    pub fn study(&self) -> Result<ConvergenceStudy> {
        let grids = self.grids();
        if grids.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(format!(
                "grid_size {} too small for four distinct grids",
                self.grid_size
            )));
        }
        let spacings: Vec<f64> = grids.iter().map(|&n| spacing(n)).collect();
        let values = grids
            .iter()
            .map(|&n| self.eigenvalues_on_grid(n))
            .collect::<Result<Vec<_>>>()?;
        let weights = richardson::weights(&spacings, &[2.0, 4.0, 6.0])?;
        let mut study = extrapolate_study(grids.to_vec(), spacings, values)?;
        for (k, e) in study.extrapolated.iter_mut().enumerate() {
            let roundoff: f64 = weights
                .iter()
                .zip(&study.values)
                .zip(&grids)
                .map(|((w, v), &n)| w.abs() * ROUNDOFF_PER_UNKNOWN * n as f64 * v[k])
                .sum();
            e.error_bar += roundoff;
        }
        Ok(study)
    }

    pub fn solve(&self) -> Result<Vec<OracleEigenvalue>> {
        Ok(self.study()?.extrapolated)
    }
}

fn spacing(n: usize) -> f64 {
    1.0 / (n as f64 + 0.5)
}

/// The bidiagonal whose squared singular values are the pencil eigenvalues.
fn factored_operator(family: RadialFamily, mode: u32, n: usize) -> Result<Bidiagonal> {
    let h = spacing(n);
    let d = family.dimension();
    let q = family.potential(mode);
    let node = |i: usize| (i as f64 - 0.5) * h;
    let flux = |i: usize| (i as f64 * h).powi(d - 1) / h;
    let mass = |i: usize| node(i).powi(d - 1) * h;

    // Cholesky pivots p_i of K, written as p_i = f_i + s_i where the excess
    // s_i = c_i + f_{i-1} s_{i-1} / p_{i-1} is a sum of nonnegative terms, so
    // no cancellation occurs.
    let mut pivots = Vec::with_capacity(n);
    let mut excess_prev = 0.0;
    let mut pivot_prev = 1.0;
    for i in 1..=n {
        let c = q * node(i).powi(d - 3) * h;
        let excess = c + flux(i - 1) * excess_prev / pivot_prev;
        let p = flux(i) + excess;
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        pivots.push(p);
        excess_prev = excess;
        pivot_prev = p;
    }

    let diag: Vec<f64> = (1..=n).map(|i| (pivots[i - 1] / mass(i)).sqrt()).collect();
    let mut sup: Vec<f64> = (1..n)
        .map(|i| flux(i) / (pivots[i - 1].sqrt() * mass(i + 1).sqrt()))
        .collect();
    if family.clamped() {
        let wall_mass = 0.5 * h;
        sup.push(flux(n) / (pivots[n - 1].sqrt() * wall_mass.sqrt()));
    }
    Ok(Bidiagonal { diag, sup })
}

/// Buckling eigenvalues of the unit disk for azimuthal mode `m` (μ = 1).
pub fn disk_buckling_modes(
    m: u32,
    count: usize,
    grid_size: usize,
) -> Result<Vec<OracleEigenvalue>> {
    RadialProblem::new(m, RadialFamily::DiskBuckling, grid_size, count)?.solve()
}

/// Toroidal or poloidal eigenvalues of the unit ball for degree `l` (μ = 1).
pub fn ball_radial_modes(
    l: u32,
    family: RadialFamily,
    count: usize,
    grid_size: usize,
) -> Result<Vec<OracleEigenvalue>> {
    if family == RadialFamily::DiskBuckling {
        return Err(Error::Mismatch(
            "disk family passed to the ball solver".into(),
        ));
    }
    RadialProblem::new(l, family, grid_size, count)?.solve()
}

/// Solve several independent problems, in parallel when enabled.
pub fn solve_all(problems: &[RadialProblem]) -> Vec<Result<Vec<OracleEigenvalue>>> {
    par::map_slice(problems, RadialProblem::solve)
}
