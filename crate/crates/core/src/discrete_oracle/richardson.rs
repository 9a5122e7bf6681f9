//! Richardson extrapolation on non-uniformly refined grids.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Weights `w` such that `Σ w_i f(h_i)` eliminates the error terms
/// `h^p` for every `p` in `exponents`. Needs `exponents.len() + 1` grids.
pub fn weights(hs: &[f64], exponents: &[f64]) -> Result<Vec<f64>> {
    let k = hs.len();
    if k != exponents.len() + 1 {
        return Err(Error::Mismatch(format!(
            "{k} grids cannot eliminate {} error terms",
            exponents.len()
        )));
    }
    let hmax = hs.iter().fold(0.0_f64, |m, &h| m.max(h));
    // columns scaled by hmax so the system stays well conditioned
    let v = DMatrix::from_fn(k, k, |i, j| {
        if j == 0 {
            1.0
        } else {
            (hs[i] / hmax).powf(exponents[j - 1])
        }
    });
    let mut e1 = DVector::zeros(k);
    e1[0] = 1.0;
    let w = v
        .transpose()
        .lu()
        .solve(&e1)
        .ok_or_else(|| Error::Mismatch("repeated grid spacing".into()))?;
    Ok(w.iter().copied().collect())
}

pub fn extrapolate(hs: &[f64], values: &[f64], exponents: &[f64]) -> Result<f64> {
    let w = weights(hs, exponents)?;
    Ok(w.iter().zip(values).map(|(w, v)| w * v).sum())
}

/// Observed convergence exponent `p` from three grids, solving
/// `(f1 - f2) / (f2 - f3) = (h1^p - h2^p) / (h2^p - h3^p)` by bisection.
/// Returns NaN when the differences do not share a sign.
pub fn observed_order(hs: [f64; 3], values: [f64; 3]) -> f64 {
    let d1 = values[0] - values[1];
    let d2 = values[1] - values[2];
    if d1 == 0.0 || d2 == 0.0 || (d1 > 0.0) != (d2 > 0.0) {
        return f64::NAN;
    }
    let target = d1 / d2;
    let ratio = |p: f64| (hs[0].powf(p) - hs[1].powf(p)) / (hs[1].powf(p) - hs[2].powf(p));
    // ratio is increasing in p for h1 > h2 > h3
    let (mut lo, mut hi) = (1e-3, 20.0);
    if target <= ratio(lo) || target >= ratio(hi) {
        return f64::NAN;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
