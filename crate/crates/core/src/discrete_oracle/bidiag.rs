//! Singular values of bidiagonal matrices by bisection on the Golub–Kahan
//! form, which keeps high relative accuracy even for the smallest values.

use crate::error::{Error, Result};

/// Upper bidiagonal matrix with `diag.len()` rows. `sup[i]` sits at
/// `(i, i + 1)`; `sup` may be as long as `diag`, in which case the matrix has
/// one extra column.
#[derive(Debug, Clone)]
pub(crate) struct Bidiagonal {
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Bidiagonal {
    /// Off-diagonal of the zero-diagonal Golub–Kahan tridiagonal, squared.
    fn gk_offdiag_sq(&self) -> Vec<f64> {
        let mut e2 = Vec::with_capacity(self.diag.len() + self.sup.len());
        for (i, &a) in self.diag.iter().enumerate() {
            e2.push(a * a);
            if let Some(&b) = self.sup.get(i) {
                e2.push(b * b);
            }
        }
        e2
    }

    /// The `count` smallest singular values, ascending.
    pub fn smallest_singular_values(&self, count: usize) -> Result<Vec<f64>> {
        let rows = self.diag.len();
        if count > rows {
            return Err(Error::Domain(format!(
                "asked for {count} singular values of a {rows}-row matrix"
            )));
        }
        let e2 = self.gk_offdiag_sq();
        if e2.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence("non-finite matrix entry".into()));
        }
        let size = e2.len() + 1;
        let offset = size.div_ceil(2);
        let pivmin = f64::MIN_POSITIVE * e2.iter().fold(1.0_f64, |m, &v| m.max(v));
        // Number of singular values strictly below s.
        let below = |s: f64| -> usize {
            let mut d = -s;
            let mut neg = 1usize;
            for &q in &e2 {
                d = -s - q / d;
                if d.abs() < pivmin {
                    d = -pivmin;
                }
                if d < 0.0 {
                    neg += 1;
                }
            }
            neg - offset
        };
        // Gershgorin bound for the Golub–Kahan matrix.
        let mut bound = 0.0_f64;
        for k in 0..size {
            let left = if k > 0 { e2[k - 1].sqrt() } else { 0.0 };
            let right = e2.get(k).map_or(0.0, |v| v.sqrt());
            bound = bound.max(left + right);
        }
        let mut out = Vec::with_capacity(count);
        let mut floor = 0.0_f64;
        for k in 0..count {
            let (mut lo, mut hi) = (floor, bound * (1.0 + 4.0 * f64::EPSILON));
            let mut iterations = 0;
            while hi - lo > 2.0 * f64::EPSILON * hi {
                let mid = lo + 0.5 * (hi - lo);
                if mid <= lo || mid >= hi {
                    break;
                }
                if below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                iterations += 1;
                if iterations > 2000 {
                    return Err(Error::NoConvergence(format!(
                        "bisection for singular value {k} stalled"
                    )));
                }
            }
            let s = lo + 0.5 * (hi - lo);
            out.push(s);
            floor = lo;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let b = Bidiagonal {
            diag: vec![3.0, 1.0, 2.0],
            sup: vec![0.0, 0.0],
        };
        let s = b.smallest_singular_values(3).unwrap();
        for (got, want) in s.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn one_by_two() {
        let b = Bidiagonal {
            diag: vec![3.0],
            sup: vec![4.0],
        };
        let s = b.smallest_singular_values(1).unwrap();
        assert!((s[0] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn graded_matrix_keeps_relative_accuracy() {
        // diag(1, 1e-8) with a coupling: singular values from the 2x2 formula
        let (a, b, c) = (1.0, 1e-3, 1e-8);
        let bd = Bidiagonal {
            diag: vec![a, c],
            sup: vec![b],
        };
        let s = bd.smallest_singular_values(2).unwrap();
        // product of singular values = |det| = a c
        let prod = s[0] * s[1];
        assert!((prod - a * c).abs() <= 1e-14 * a * c);
    }
}
