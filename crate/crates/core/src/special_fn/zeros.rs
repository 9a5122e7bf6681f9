//! Positive zeros of `J_n` and `j_l`.
//!
//! Zeros are located on a fixed scan grid that starts at the order ν (the
//! first positive zero exceeds ν) and advances in steps of [`SCAN_STEP`].
//! Consecutive zeros of `J_ν` are more than π apart for ν ≥ 1/2 and at least
//! `j_{0,2} - j_{0,1} ≈ 3.115` apart for ν = 0, so each scan cell holds at
//! most one zero and every zero shows up as a sign change. Each bracket is
//! then polished by safeguarded Halley iteration seeded with McMahon's
//! expansion where that is accurate. Because the grid does not depend on the
//! search bound, a zero is computed bit-identically by every entry point.

use serde::{Deserialize, Serialize};

use super::bessel::{eval_unchecked, BesselKind, BesselOrder, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::par;

/// Width of one scan cell; strictly below the smallest zero spacing.
pub const SCAN_STEP: f64 = 3.0;

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-12;

/// All positive zeros of one order up to `xmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTable {
    pub order: BesselOrder,
    pub zeros: Vec<f64>,
    pub xmax: f64,
    pub residual_tol: f64,
}

impl ZeroTable {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Largest `|f(z)|` over the stored zeros.
    pub fn max_residual(&self) -> f64 {
        self.zeros
            .iter()
            .map(|&z| eval_unchecked(self.order, z).value.abs())
            .fold(0.0, f64::max)
    }

    /// Count sign changes of the function on a uniform grid of spacing
    /// `step` over `(0, xmax]`. Independent of the scan grid used to build
    /// the table, so it serves as a completeness audit.
    pub fn sign_changes(&self, step: f64) -> usize {
        count_sign_changes(self.order, self.xmax, step)
    }
}

pub fn count_sign_changes(order: BesselOrder, xmax: f64, step: f64) -> usize {
    let n = (xmax / step).ceil() as usize;
    let mut count = 0;
    let mut prev = eval_unchecked(order, scan_start(order)).value.signum();
    let start = scan_start(order);
    for i in 1..=n {
        let x = (i as f64 * step).min(xmax);
        if x <= start {
            continue;
        }
        let v = eval_unchecked(order, x).value;
        if v == 0.0 {
            continue;
        }
        if v.signum() != prev {
            count += 1;
            prev = v.signum();
        }
    }
    count
}

/// True when `lower` and `upper` (orders ν and ν+1 of one kind) satisfy
/// `z_{ν,s} < z_{ν+1,s} < z_{ν,s+1}` for every `s` where both sides exist.
pub fn interlaces(lower: &ZeroTable, upper: &ZeroTable) -> bool {
    upper.zeros.iter().enumerate().all(|(s, &z)| {
        let above = lower.zeros.get(s).is_some_and(|&a| a < z);
        let below = lower.zeros.get(s + 1).is_none_or(|&b| z < b);
        above && below
    }) && lower.zeros.len() >= upper.zeros.len()
}

fn scan_start(order: BesselOrder) -> f64 {
    match order.kind {
        BesselKind::Cylindrical => order.degree as f64,
        BesselKind::Spherical => order.nu(),
    }
}

fn check_order(order: BesselOrder) -> Result<()> {
    if order.degree > MAX_DEGREE {
        return Err(Error::Domain(format!(
            "degree {} exceeds the supported maximum {MAX_DEGREE}",
            order.degree
        )));
    }
    Ok(())
}

/// One scan cell `[lo, lo + SCAN_STEP]` known to contain exactly one zero.
#[derive(Debug, Clone, Copy)]
struct Bracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    /// 1-based index of the zero inside.
    index: usize,
}

/// Walks the scan grid, yielding one bracket per zero (or an exact hit).
struct Scanner {
    order: BesselOrder,
    start: f64,
    cell: usize,
    prev_x: f64,
    prev_f: f64,
    found: usize,
}

enum Found {
    Cell(Bracket),
    Exact(f64),
}

impl Scanner {
    fn new(order: BesselOrder) -> Self {
        let start = scan_start(order);
        let f = eval_unchecked(order, start).value;
        Self {
            order,
            start,
            cell: 0,
            prev_x: start,
            prev_f: f,
            found: 0,
        }
    }

    /// Next zero location, or `None` once the scan passes `limit`.
    fn next_below(&mut self, limit: f64) -> Option<Found> {
        loop {
            if self.prev_x >= limit {
                return None;
            }
            self.cell += 1;
            let x = self.start + self.cell as f64 * SCAN_STEP;
            let f = eval_unchecked(self.order, x).value;
            let (lo, f_lo) = (self.prev_x, self.prev_f);
            self.prev_x = x;
            self.prev_f = f;
            if f == 0.0 {
                // Exact grid hit; step past it so the next cell starts clean.
                self.found += 1;
                self.cell += 1;
                let x2 = self.start + self.cell as f64 * SCAN_STEP;
                self.prev_x = x2;
                self.prev_f = eval_unchecked(self.order, x2).value;
                return Some(Found::Exact(x));
            }
            if f.signum() != f_lo.signum() && f_lo != 0.0 {
                self.found += 1;
                return Some(Found::Cell(Bracket {
                    lo,
                    hi: x,
                    f_lo,
                    f_hi: f,
                    index: self.found,
                }));
            }
        }
    }
}

/// McMahon's large-zero expansion for `J_ν`.
pub fn mcmahon_guess(nu: f64, s: usize) -> f64 {
    let beta = (s as f64 + 0.5 * nu - 0.25) * std::f64::consts::PI;
    let mu = 4.0 * nu * nu;
    let b8 = 8.0 * beta;
    let t1 = (mu - 1.0) / b8;
    let t3 = 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3));
    let t5 = 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5));
    beta - t1 - t3 - t5
}

/// Large-order estimate from the Airy-zero asymptotic `a_s`:
/// `j_{ν,s} ≈ ν + |a_s| (ν/2)^{1/3} + (3/10) a_s² (ν/2)^{-1/3}`.
fn large_order_guess(nu: f64, s: usize) -> f64 {
    let t = 3.0 * std::f64::consts::PI / 8.0 * (4.0 * s as f64 - 1.0);
    let a = t.powf(2.0 / 3.0) * (1.0 + 5.0 / (48.0 * t * t));
    let c = (0.5 * nu).cbrt();
    nu + a * c + 0.3 * a * a / c
}

fn polish(order: BesselOrder, b: Bracket) -> Result<f64> {
    let nu = order.nu();
    let mut lo = b.lo;
    let mut hi = b.hi;
    let f_lo_sign = b.f_lo.signum();
    let beta = (b.index as f64 + 0.5 * nu - 0.25) * std::f64::consts::PI;
    let seed = if beta > 3.0 * nu + 3.0 {
        mcmahon_guess(nu, b.index)
    } else if nu > 20.0 && b.index <= 3 {
        large_order_guess(nu, b.index)
    } else {
        // secant through the cell ends
        lo - b.f_lo * (hi - lo) / (b.f_hi - b.f_lo)
    };
    let mut x = if seed > lo && seed < hi {
        seed
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..100 {
        let e = eval_unchecked(order, x);
        let f = e.value;
        if f == 0.0 {
            return Ok(x);
        }
        if f.signum() == f_lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let d1 = e.derivative;
        let d2 = e.second_derivative(order, x);
        let newton = f / d1;
        let denom = 1.0 - 0.5 * newton * d2 / d1;
        let step = if denom.is_finite() && denom > 0.5 {
            newton / denom
        } else {
            newton
        };
        let candidate = x - step;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            return Ok(candidate.clamp(lo, hi));
        }
        x = if candidate > lo && candidate < hi && step.is_finite() {
            candidate
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(x);
        }
    }
    Err(Error::Bracket {
        order: order.to_string(),
        index: b.index,
    })
}

fn polish_found(order: BesselOrder, f: Found) -> Result<f64> {
    match f {
        Found::Exact(x) => Ok(x),
        Found::Cell(b) => polish(order, b),
    }
}

/// The `s`-th positive zero (`s >= 1`).
pub fn bessel_zero(order: BesselOrder, s: usize) -> Result<f64> {
    check_order(order)?;
    if s == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    let mut scanner = Scanner::new(order);
    loop {
        match scanner.next_below(f64::INFINITY) {
            Some(found) if scanner.found == s => return polish_found(order, found),
            Some(_) => {}
            None => {
                return Err(Error::Bracket {
                    order: order.to_string(),
                    index: s,
                })
            }
        }
    }
}

/// Every positive zero in `(0, xmax]`.
pub fn zeros_upto(order: BesselOrder, xmax: f64) -> Result<ZeroTable> {
    zeros_upto_with_tol(order, xmax, DEFAULT_RESIDUAL_TOL)
}

pub fn zeros_upto_with_tol(order: BesselOrder, xmax: f64, residual_tol: f64) -> Result<ZeroTable> {
    check_order(order)?;
    if !(xmax > 0.0) || !xmax.is_finite() {
        return Err(Error::Domain(format!(
            "xmax must be positive and finite, got {xmax}"
        )));
    }
    let mut zeros = Vec::new();
    if xmax > scan_start(order) {
        let mut cells = Vec::new();
        let mut scanner = Scanner::new(order);
        while let Some(found) = scanner.next_below(xmax) {
            cells.push(found);
        }
        for found in cells {
            let z = polish_found(order, found)?;
            if z <= xmax {
                zeros.push(z);
            }
        }
    }
    Ok(ZeroTable {
        order,
        zeros,
        xmax,
        residual_tol,
    })
}

/// The first `count` positive zeros. The table's `xmax` is the last zero.
pub fn first_zeros(order: BesselOrder, count: usize) -> Result<ZeroTable> {
    check_order(order)?;
    let mut cells = Vec::with_capacity(count);
    let mut scanner = Scanner::new(order);
    while cells.len() < count {
        match scanner.next_below(f64::INFINITY) {
            Some(found) => cells.push(found),
            None => {
                return Err(Error::Bracket {
                    order: order.to_string(),
                    index: cells.len() + 1,
                })
            }
        }
    }
    let zeros = cells
        .into_iter()
        .map(|f| polish_found(order, f))
        .collect::<Result<Vec<_>>>()?;
    let xmax = zeros
        .last()
        .copied()
        .unwrap_or(scan_start(order).max(f64::MIN_POSITIVE));
    Ok(ZeroTable {
        order,
        zeros,
        xmax,
        residual_tol: DEFAULT_RESIDUAL_TOL,
    })
}

/// Tables for a contiguous range of degrees, built in parallel. Output is
/// identical to building each table on its own.
pub fn zero_tables(
    kind: BesselKind,
    degrees: std::ops::RangeInclusive<u32>,
    xmax: f64,
) -> Result<Vec<ZeroTable>> {
    let lo = *degrees.start();
    let n = degrees.end().saturating_sub(lo) as usize + 1;
    if degrees.is_empty() {
        return Ok(Vec::new());
    }
    // Heavy (low) orders first keeps the work queue balanced.
    par::map_range(n, |i| {
        zeros_upto(
            BesselOrder {
                kind,
                degree: lo + i as u32,
            },
            xmax,
        )
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const J: fn(u32) -> BesselOrder = BesselOrder::cylindrical;
    const SJ: fn(u32) -> BesselOrder = BesselOrder::spherical;

    #[test]
    fn j5_has_no_zero_below_five() {
        assert!(zeros_upto(J(5), 5.0).unwrap().is_empty());
    }

    #[test]
    fn j0_zeros_below_ten() {
        let t = zeros_upto(J(0), 10.0).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.sign_changes(0.01), 3);
    }

    #[test]
    fn zero_index_zero_is_rejected() {
        assert!(matches!(bessel_zero(J(0), 0), Err(Error::Domain(_))));
    }

    #[test]
    fn entry_points_agree_bitwise() {
        for order in [J(0), J(3), J(40), SJ(0), SJ(7)] {
            let t = zeros_upto(order, 120.0).unwrap();
            for (i, &z) in t.zeros.iter().enumerate() {
                assert_eq!(bessel_zero(order, i + 1).unwrap(), z, "{order} s={}", i + 1);
            }
        }
    }

    #[test]
    fn table_is_independent_of_bound() {
        let a = zeros_upto(J(2), 50.0).unwrap();
        let b = zeros_upto(J(2), 500.0).unwrap();
        assert_eq!(&b.zeros[..a.len()], &a.zeros[..]);
    }

    #[test]
    fn spherical_j0_zeros_are_multiples_of_pi() {
        let t = zeros_upto(SJ(0), 100.0).unwrap();
        for (k, &z) in t.zeros.iter().enumerate() {
            let want = (k + 1) as f64 * std::f64::consts::PI;
            assert!((z - want).abs() <= 1e-13 * want);
        }
    }
}
