//! Bessel functions of the first kind, cylindrical `J_n` and spherical `j_l`.
//!
//! Both kinds use Miller's backward recurrence. The recurrence runs from a
//! start index far enough beyond the turning point that the minimal solution
//! dominates, and is normalized with an exact identity:
//! `J_0 + 2 Σ J_{2k} = 1` for the cylindrical kind, and the closed forms of
//! `j_0` / `j_1` for the spherical kind. Arguments below one use the
//! ascending series, which converges quickly there and avoids the huge
//! `2k/x` multipliers of the recurrence. Public evaluation runs the
//! recurrence in double-double arithmetic so that no rounding drift builds
//! up over the thousands of steps needed at large order or argument.

use std::fmt;

use serde::{Deserialize, Serialize};

use std::ops::{Add, Div, Mul, Sub};

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Highest supported degree. Evaluation cost is linear in `max(degree, x)`.
pub const MAX_DEGREE: u32 = 100_000;

const SERIES_LIMIT: f64 = 1.0;
const RESCALE_AT: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BesselKind {
    Cylindrical,
    Spherical,
}

/// Order of a Bessel function of the first kind. Spherical degree `l`
/// corresponds to cylindrical order `l + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BesselOrder {
    pub kind: BesselKind,
    pub degree: u32,
}

impl BesselOrder {
    pub const fn cylindrical(degree: u32) -> Self {
        Self {
            kind: BesselKind::Cylindrical,
            degree,
        }
    }

    pub const fn spherical(degree: u32) -> Self {
        Self {
            kind: BesselKind::Spherical,
            degree,
        }
    }

    /// The equivalent cylindrical order ν.
    pub fn nu(&self) -> f64 {
        match self.kind {
            BesselKind::Cylindrical => self.degree as f64,
            BesselKind::Spherical => self.degree as f64 + 0.5,
        }
    }

    /// The order one above (same kind).
    pub fn next(&self) -> Self {
        Self {
            kind: self.kind,
            degree: self.degree + 1,
        }
    }
}

impl fmt::Display for BesselOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BesselKind::Cylindrical => write!(f, "J_{}", self.degree),
            BesselKind::Spherical => write!(f, "j_{}", self.degree),
        }
    }
}

/// Value and first derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub value: f64,
    pub derivative: f64,
}

impl BesselEval {
    /// Second derivative from the Bessel differential equation.
    pub fn second_derivative(&self, order: BesselOrder, x: f64) -> f64 {
        let d = self.derivative;
        let v = self.value;
        match order.kind {
            BesselKind::Cylindrical => {
                let n = order.degree as f64;
                -d / x - (1.0 - n * n / (x * x)) * v
            }
            BesselKind::Spherical => {
                let l = order.degree as f64;
                -2.0 * d / x - (1.0 - l * (l + 1.0) / (x * x)) * v
            }
        }
    }
}

fn check_args(order: BesselOrder, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "{order} needs a finite x >= 0, got {x}"
        )));
    }
    if order.degree > MAX_DEGREE {
        return Err(Error::Domain(format!(
            "degree {} exceeds the supported maximum {MAX_DEGREE}",
            order.degree
        )));
    }
    Ok(())
}

/// Evaluate `J_n(x)` or `j_l(x)`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    check_args(order, x)?;
    Ok(eval::<Dd>(order, x).value)
}

/// Evaluate the function and its derivative together.
pub fn bessel_j_with_derivative(order: BesselOrder, x: f64) -> Result<BesselEval> {
    check_args(order, x)?;
    Ok(eval::<Dd>(order, x))
}

/// Plain double-precision evaluation. Over thousands of recurrence steps it
/// drifts by a few hundred ulps of the oscillation amplitude, far below what
/// root finding needs, at a fraction of the double-double cost.
pub(crate) fn eval_unchecked(order: BesselOrder, x: f64) -> BesselEval {
    eval::<f64>(order, x)
}

/// Arithmetic the recurrences run in.
trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Div<Output = Self>
{
    fn of(x: f64) -> Self;
    fn get(self) -> f64;
    fn recip(x: f64) -> Self;
    fn scale(self, s: f64) -> Self;
}

impl Scalar for f64 {
    fn of(x: f64) -> Self {
        x
    }
    fn get(self) -> f64 {
        self
    }
    fn recip(x: f64) -> Self {
        1.0 / x
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Dd {
    fn of(x: f64) -> Self {
        Dd::new(x)
    }
    fn get(self) -> f64 {
        self.to_f64()
    }
    fn recip(x: f64) -> Self {
        Dd::recip(x)
    }
    fn scale(self, s: f64) -> Self {
        Dd::scale(self, s)
    }
}

fn eval<T: Scalar>(order: BesselOrder, x: f64) -> BesselEval {
    let deg = order.degree;
    let (v, v1) = match order.kind {
        BesselKind::Cylindrical => cylindrical_pair::<T>(deg, x),
        BesselKind::Spherical => spherical_pair::<T>(deg, x),
    };
    if x == 0.0 {
        let derivative = match (order.kind, deg) {
            (BesselKind::Cylindrical, 1) => 0.5,
            (BesselKind::Spherical, 1) => 1.0 / 3.0,
            _ => 0.0,
        };
        return BesselEval {
            value: v.get(),
            derivative,
        };
    }
    // f'_ν = (ν/x) f_ν - f_{ν+1} for J; (l/x) j_l - j_{l+1} for j.
    let derivative = T::recip(x) * (deg as f64) * v - v1;
    BesselEval {
        value: v.get(),
        derivative: derivative.get(),
    }
}

fn start_index(deg: u32, x: f64) -> u32 {
    let base = (deg as f64).max(x.ceil());
    (base + 12.0 * x.cbrt() + 24.0) as u32
}

/// `(J_n(x), J_{n+1}(x))`.
fn cylindrical_pair<T: Scalar>(n: u32, x: f64) -> (T, T) {
    if x == 0.0 {
        return (T::of(if n == 0 { 1.0 } else { 0.0 }), T::of(0.0));
    }
    if x < SERIES_LIMIT {
        return (
            T::of(cylindrical_series(n, x)),
            T::of(cylindrical_series(n + 1, x)),
        );
    }
    let top = start_index(n + 1, x);
    let inv_x = T::recip(x);
    let mut next = T::of(0.0); // J_{k+1}
    let mut cur = T::of(1e-30); // J_k, arbitrary scale
    let mut even_sum = T::of(0.0); // 2 Σ_{k>=1} J_{2k}
    let mut at_n = T::of(0.0);
    let mut at_n1 = T::of(0.0);
    let mut k = top;
    while k > 0 {
        if k == n + 1 {
            at_n1 = cur;
        }
        if k == n {
            at_n = cur;
        }
        if k.is_multiple_of(2) {
            even_sum = even_sum + cur * 2.0;
        }
        let prev = inv_x * (2 * k) as f64 * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.get().abs() > RESCALE_AT {
            cur = cur.scale(RESCALE_BY);
            next = next.scale(RESCALE_BY);
            even_sum = even_sum.scale(RESCALE_BY);
            at_n = at_n.scale(RESCALE_BY);
            at_n1 = at_n1.scale(RESCALE_BY);
        }
    }
    if n == 0 {
        at_n = cur;
    }
    let norm = T::of(1.0) / (even_sum + cur);
    (at_n * norm, at_n1 * norm)
}

/// Ascending series; accurate for x < 1 at every order.
fn cylindrical_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0_f64;
    for k in 1..=n {
        lead *= half / k as f64;
        if lead == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let nu = n as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// `(j_l(x), j_{l+1}(x))`.
fn spherical_pair<T: Scalar>(l: u32, x: f64) -> (T, T) {
    if x == 0.0 {
        return (T::of(if l == 0 { 1.0 } else { 0.0 }), T::of(0.0));
    }
    if x < SERIES_LIMIT {
        return (
            T::of(spherical_series(l, x)),
            T::of(spherical_series(l + 1, x)),
        );
    }
    let top = start_index(l + 1, x);
    let inv_x = T::recip(x);
    let mut next = T::of(0.0);
    let mut cur = T::of(1e-30);
    let mut at_l = T::of(0.0);
    let mut at_l1 = T::of(0.0);
    let mut k = top;
    while k > 0 {
        if k == l + 1 {
            at_l1 = cur;
        }
        if k == l {
            at_l = cur;
        }
        let prev = inv_x * (2 * k + 1) as f64 * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.get().abs() > RESCALE_AT {
            cur = cur.scale(RESCALE_BY);
            next = next.scale(RESCALE_BY);
            at_l = at_l.scale(RESCALE_BY);
            at_l1 = at_l1.scale(RESCALE_BY);
        }
    }
    // cur = j_0, next = j_1 up to a common factor.
    if l == 0 {
        at_l = cur;
    }
    let (s, c) = x.sin_cos();
    let j0 = inv_x * s;
    let j1 = (j0 - T::of(c)) * inv_x;
    let norm = if j0.get().abs() >= j1.get().abs() {
        j0 / cur
    } else {
        j1 / next
    };
    (at_l * norm, at_l1 * norm)
}

fn spherical_series(l: u32, x: f64) -> f64 {
    // x^l / (2l+1)!! Σ_k (-x²/2)^k / (k! (2l+3)(2l+5)…(2l+2k+1))
    let mut lead = 1.0_f64;
    for k in 1..=l {
        lead *= x / (2 * k + 1) as f64;
        if lead == 0.0 {
            return 0.0;
        }
    }
    let q = -0.5 * x * x;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..60u32 {
        term *= q / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    const J: fn(u32) -> BesselOrder = BesselOrder::cylindrical;
    const SJ: fn(u32) -> BesselOrder = BesselOrder::spherical;

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(J(0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(J(1), 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(SJ(0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(SJ(3), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn first_j0_zero_is_a_root() {
        let v = bessel_j(J(0), 2.404825557695773).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn negative_argument_is_a_domain_error() {
        assert!(matches!(bessel_j(J(0), -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(SJ(0), f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn large_order_small_argument_underflows_cleanly() {
        for &x in &[1e-300, 1e-5, 0.5, 1.0, 3.0] {
            let v = bessel_j(J(2500), x).unwrap();
            assert!(v.is_finite() && (0.0..1e-300).contains(&v), "x={x} v={v}");
            let s = bessel_j(SJ(2500), x).unwrap();
            assert!(s.is_finite() && (0.0..1e-300).contains(&s));
        }
    }

    #[test]
    fn spherical_closed_forms() {
        for &x in &[0.3, 1.0, 2.5, 7.0, 31.4, 150.0] {
            let (s, c) = f64::sin_cos(x);
            let j0 = s / x;
            let j1 = s / (x * x) - c / x;
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            for (l, want) in [(0, j0), (1, j1), (2, j2)] {
                let got = bessel_j(SJ(l), x).unwrap();
                assert!((got - want).abs() < 2e-15 * (1.0 + 1.0 / x), "l={l} x={x}");
            }
        }
    }

    #[test]
    fn derivative_matches_neighbouring_orders() {
        // J_0' = -J_1
        for &x in &[0.5, 3.0, 40.0] {
            let e = bessel_j_with_derivative(J(0), x).unwrap();
            let j1 = bessel_j(J(1), x).unwrap();
            assert!((e.derivative + j1).abs() < 1e-15);
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        for n in [0u32, 1, 5, 30] {
            let series = cylindrical_series(n, 1.0);
            let recurrence = cylindrical_pair::<f64>(n, 1.0).0;
            assert!((series - recurrence).abs() <= 1e-14 * series.abs(), "n={n}");
        }
    }
}
