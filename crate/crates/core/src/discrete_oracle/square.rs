//! Clamped buckling of an `L × L` square by finite differences.
//!
//! Interior nodes of an `N × N` cell grid are numbered row by row. `A` is the
//! 13-point biharmonic stencil over `h⁴` with clamped ghost values mirrored
//! across the wall (`ψ_{-1} = ψ_1`), which adds one to the diagonal for every
//! wall the node touches. `B` is the 5-point `-Δ` over `h²`. Both are
//! symmetric positive definite; the lowest eigenvalues of `A ψ = λ B ψ` come
//! from subspace iteration on `A⁻¹ B` with a banded Cholesky factor of `A`.
//!
//! The stencils satisfy `A = B² + D` exactly, with `D` diagonal holding
//! `2/h⁴` per wall touched. The Rayleigh–Ritz matrices are therefore formed
//! as Gram matrices, `Yᵀ A Y = (BY)ᵀ(BY) + Yᵀ D Y` and `Yᵀ B Y = (GY)ᵀ(GY)`
//! with `G` the edge differences over `h`, so Ritz values do not inherit the
//! `O(ε h⁻⁴)` error of the solves.

use nalgebra::{DMatrix, DVector};

use super::dense::{sym_eig_vectors, DenseSymmetricPencil};
use crate::error::{Error, Result};

pub const MAX_SQUARE_GRID: usize = 120;

const MAX_ITERATIONS: usize = 2000;

/// Symmetric positive-definite band matrix, lower half stored by rows.
struct Banded {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl Banded {
    fn zeros(n: usize, bw: usize) -> Self {
        Banded {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (self.bw + j - i)
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// In-place Cholesky `A = L Lᵀ`.
    fn factor(mut self) -> Result<Self> {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut s = self.data[self.idx(i, j)];
                for k in k0..j {
                    s -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                let ij = self.idx(i, j);
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite);
                    }
                    self.data[ij] = s.sqrt();
                } else {
                    self.data[ij] = s / self.data[self.idx(j, j)];
                }
            }
        }
        Ok(self)
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.data[self.idx(i, k)] * x[k];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.data[self.idx(k, i)] * x[k];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
    }
}

struct Grid {
    m: usize,
    h: f64,
}

impl Grid {
    fn neighbors(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = (k % self.m, k / self.m);
        let m = self.m;
        [
            (i > 0).then(|| k - 1),
            (i + 1 < m).then(|| k + 1),
            (j > 0).then(|| k - m),
            (j + 1 < m).then(|| k + m),
        ]
        .into_iter()
        .flatten()
    }

    /// `y = B x` for the 5-point `-Δ`.
    fn apply_b(&self, x: &[f64], y: &mut [f64]) {
        let s = 1.0 / (self.h * self.h);
        for k in 0..x.len() {
            let mut v = 4.0 * x[k];
            for nb in self.neighbors(k) {
                v -= x[nb];
            }
            y[k] = v * s;
        }
    }

    fn walls(&self, k: usize) -> usize {
        let (i, j) = (k % self.m, k / self.m);
        let last = self.m - 1;
        [i == 0, i == last, j == 0, j == last]
            .iter()
            .filter(|&&w| w)
            .count()
    }

    /// Edge differences over `h`, walls included (wall values are zero).
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut g = Vec::with_capacity(2 * m * (m + 1));
        let at = |i: isize, j: isize| -> f64 {
            if (0..m as isize).contains(&i) && (0..m as isize).contains(&j) {
                x[i as usize + m * j as usize]
            } else {
                0.0
            }
        };
        for j in 0..m as isize {
            for i in -1..m as isize {
                g.push((at(i + 1, j) - at(i, j)) / self.h);
                g.push((at(j, i + 1) - at(j, i)) / self.h);
            }
        }
        g
    }

    fn biharmonic(&self) -> Banded {
        let m = self.m as isize;
        let n = self.m * self.m;
        let s = 1.0 / self.h.powi(4);
        let mut a = Banded::zeros(n, 2 * self.m);
        let inside = |i: isize, j: isize| (0..m).contains(&i) && (0..m).contains(&j);
        for j in 0..m {
            for i in 0..m {
                let k = (i + m * j) as usize;
                a.add(k, k, (20.0 + self.walls(k) as f64) * s);
                // lower-triangle neighbours only; symmetry supplies the rest
                let stencil: [(isize, isize, f64); 6] = [
                    (-1, 0, -8.0),
                    (0, -1, -8.0),
                    (-1, -1, 2.0),
                    (1, -1, 2.0),
                    (-2, 0, 1.0),
                    (0, -2, 1.0),
                ];
                for (di, dj, c) in stencil {
                    let (ii, jj) = (i + di, j + dj);
                    if inside(ii, jj) {
                        a.add(k, (ii + m * jj) as usize, c * s);
                    }
                }
            }
        }
        a
    }
}

/// Lowest `count` eigenvalues of the discrete pencil on an `N × N` cell grid.
pub fn square_buckling_grid(side: f64, grid_size: usize, count: usize) -> Result<Vec<f64>> {
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::Domain(format!("side must be positive, got {side}")));
    }
    if grid_size > MAX_SQUARE_GRID {
        return Err(Error::Domain(format!(
            "grid_size {grid_size} exceeds {MAX_SQUARE_GRID}"
        )));
    }
    if count == 0 {
        return Err(Error::Domain("count must be positive".into()));
    }
    let m = grid_size.saturating_sub(1);
    let n = m * m;
    let block = (2 * count).max(count + 8).min(n);
    if count > n || block == 0 {
        return Err(Error::Domain(format!(
            "grid_size {grid_size} has too few unknowns for {count} eigenvalues"
        )));
    }
    let grid = Grid {
        m,
        h: side / grid_size as f64,
    };
    let a = grid.biharmonic().factor()?;

    // Start from the lowest separable sine modes, which touch every
    // symmetry class of the square.
    let mut pairs: Vec<(usize, usize)> =
        (1..=m).flat_map(|p| (1..=m).map(move |q| (p, q))).collect();
    pairs.sort_by_key(|&(p, q)| (p * p + q * q, p, q));
    let mut x = DMatrix::from_fn(n, block, |k, c| {
        let (p, q) = pairs[c];
        let (i, j) = ((k % m + 1) as f64, (k / m + 1) as f64);
        let t = std::f64::consts::PI / grid_size as f64;
        (p as f64 * t * i).sin() * (q as f64 * t * j).sin()
    });

    let wall_weight = 2.0 / grid.h.powi(4);
    let apply_b = |x: &DMatrix<f64>| {
        let mut out = DMatrix::zeros(n, x.ncols());
        for c in 0..x.ncols() {
            let col: Vec<f64> = x.column(c).iter().copied().collect();
            let mut y = vec![0.0; n];
            grid.apply_b(&col, &mut y);
            out.set_column(c, &DVector::from_vec(y));
        }
        out
    };
    let mut previous: Option<Vec<f64>> = None;
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let mut y = apply_b(&x);
        for c in 0..block {
            let mut col: Vec<f64> = y.column(c).iter().copied().collect();
            a.solve_in_place(&mut col);
            y.set_column(c, &DVector::from_vec(col));
        }
        let by = apply_b(&y);
        let wall_rows = DMatrix::from_fn(n, block, |k, c| {
            (wall_weight * grid.walls(k) as f64).sqrt() * y[(k, c)]
        });
        let ha = by.transpose() * &by + wall_rows.transpose() * &wall_rows;
        let gy = DMatrix::from_columns(
            &(0..block)
                .map(|c| {
                    let col: Vec<f64> = y.column(c).iter().copied().collect();
                    DVector::from_vec(grid.gradient(&col))
                })
                .collect::<Vec<_>>(),
        );
        let hb = gy.transpose() * &gy;
        let (theta, q) = sym_eig_vectors(&DenseSymmetricPencil::new(ha, hb)?, block)?;
        x = y * q;
        let current: Vec<f64> = theta[..count].to_vec();
        if let Some(prev) = &previous {
            let change = current
                .iter()
                .zip(prev)
                .map(|(c, p)| ((c - p) / c).abs())
                .fold(0.0_f64, f64::max);
            // stop at machine precision, or once rounding noise stops the
            // decrease after the values have settled
            if change <= 4.0 * f64::EPSILON || (change < 1e-12 && change >= last_change) {
                return Ok(current);
            }
            last_change = change;
        }
        previous = Some(current);
    }
    Err(Error::NoConvergence(format!(
        "subspace iteration on a {grid_size}-cell square"
    )))
}
