//! Dense complex matrix helpers shared by the decomposition and planning code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Builds a complex matrix from a row-major slice of real values.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| real(data[i * cols + j]))
}

/// Square diagonal matrix with the given real diagonal.
pub fn diag_real(d: &[f64]) -> CMatrix {
    let n = d.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { real(d[i]) } else { C64::new(0.0, 0.0) })
}

/// Frobenius norm.
#[inline]
pub fn fro(m: &CMatrix) -> f64 {
    m.norm()
}

/// `‖U†U − I‖_F`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.ncols();
    fro(&(u.adjoint() * u - identity(n)))
}

/// `‖A − A†‖_F`.
pub fn hermitian_residual(a: &CMatrix) -> f64 {
    fro(&(a - a.adjoint()))
}

pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Real diagonal of a matrix (imaginary parts dropped).
pub fn real_diagonal(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).collect()
}

/// Largest modulus strictly below the main diagonal.
pub fn max_below_diagonal(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in (j + 1)..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

/// Largest modulus off the main diagonal.
pub fn max_off_diagonal(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Stacks `top` over `bottom`.
pub fn vstack(top: &CMatrix, bottom: &CMatrix) -> Result<CMatrix> {
    if top.ncols() != bottom.ncols() {
        return Err(Error::Domain(format!(
            "cannot stack {}x{} over {}x{}",
            top.nrows(),
            top.ncols(),
            bottom.nrows(),
            bottom.ncols()
        )));
    }
    let rows = top.nrows() + bottom.nrows();
    let mut out = CMatrix::zeros(rows, top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(bottom);
    Ok(out)
}

pub fn check_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::Domain(format!("{what} must be non-empty")));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// Hermitian eigendecomposition with eigenvalues sorted non-increasingly.
///
/// The sort is stable, so equal eigenvalues keep the order produced by the
/// solver.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitize(a));
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `log₂ det(A)` for a Hermitian positive-definite matrix.
pub fn log2_det_hpd(a: &CMatrix) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(hermitize(a))
        .ok_or_else(|| Error::NumericalFailure("Cholesky factorization failed".into()))?;
    let l = chol.l_dirty();
    Ok((0..a.nrows()).map(|i| 2.0 * l[(i, i)].re.log2()).sum())
}

/// `[x]₊`
#[inline]
pub fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Sub-matrix copy.
pub fn block(m: &CMatrix, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
    m.view((r0, c0), (rows, cols)).into_owned()
}
