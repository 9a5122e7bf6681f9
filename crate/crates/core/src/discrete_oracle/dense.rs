//! Dense symmetric-definite generalized eigenproblems.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_DENSE_SIZE: usize = 5000;

/// `A x = λ B x` with `A` symmetric and `B` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct DenseSymmetricPencil {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

fn check_symmetric(m: &DMatrix<f64>, name: &str) -> Result<()> {
    let scale = m.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Domain(format!(
                    "{name} is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

impl DenseSymmetricPencil {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::Mismatch(format!(
                "pencil shapes {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        if a.nrows() > MAX_DENSE_SIZE {
            return Err(Error::Domain(format!(
                "dense size {} exceeds {MAX_DENSE_SIZE}",
                a.nrows()
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        check_symmetric(&a, "A")?;
        check_symmetric(&b, "B")?;
        Ok(DenseSymmetricPencil { a, b })
    }

    /// Standard problem `B = I`.
    pub fn standard(a: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, DMatrix::identity(n, n))
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
}

/// Lowest `count` eigenvalues, ascending.
pub fn sym_eig(pencil: &DenseSymmetricPencil, count: usize) -> Result<Vec<f64>> {
    Ok(sym_eig_vectors(pencil, count)?.0)
}

/// Lowest `count` eigenpairs; eigenvectors are `B`-orthonormal columns.
pub fn sym_eig_vectors(
    pencil: &DenseSymmetricPencil,
    count: usize,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = pencil.size();
    if count > n {
        return Err(Error::Domain(format!(
            "asked for {count} eigenvalues of a size-{n} pencil"
        )));
    }
    let chol = pencil
        .b
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ
    let la = l
        .solve_lower_triangular(&pencil.a)
        .ok_or(Error::NotPositiveDefinite)?;
    let c = l
        .solve_lower_triangular(&la.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 0)
        .ok_or_else(|| Error::NoConvergence("symmetric QR iteration".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .total_cmp(&eig.eigenvalues[j])
            .then(i.cmp(&j))
    });
    order.truncate(count);
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut v = DMatrix::zeros(n, count);
    for (k, &i) in order.iter().enumerate() {
        v.set_column(k, &eig.eigenvectors.column(i));
    }
    let x = l
        .transpose()
        .solve_upper_triangular(&v)
        .ok_or(Error::NotPositiveDefinite)?;
    Ok((values, x))
}
