use crate::decomp::gsv_values;
use crate::error::{Error, Result};
use crate::linalg::{
    check_finite, diag_real, fro, hermitian_eigen, hermitian_residual, identity, log2_det_hpd,
    vstack, CMatrix,
};

/// Hermiticity tolerance, relative to `max(‖K‖, 1)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[−PSD_TOL·max(‖K‖,1), 0)` are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian PSD matrix with tiny negative
/// eigenvalues clamped to zero.
pub(crate) fn psd_eigen(k: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_finite(k, "covariance")?;
    if k.nrows() != k.ncols() {
        return Err(Error::Domain(format!(
            "covariance must be square, got {}x{}",
            k.nrows(),
            k.ncols()
        )));
    }
    let scale = fro(k).max(1.0);
    if hermitian_residual(k) > HERMITIAN_TOL * scale {
        return Err(Error::Domain("covariance is not Hermitian".into()));
    }
    let (mut w, v) = hermitian_eigen(k);
    for x in w.iter_mut() {
        if *x < -PSD_TOL * scale {
            return Err(Error::NotPsd { min_eigenvalue: *x });
        }
        *x = x.max(0.0);
    }
    Ok((w, v))
}

/// Hermitian square root `B = K^{1/2}`, so `B B† = K`. Defined for singular
/// `K`.
pub fn matrix_sqrt(k: &CMatrix) -> Result<CMatrix> {
    let (w, v) = psd_eigen(k)?;
    let roots: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    Ok(&v * diag_real(&roots) * v.adjoint())
}

/// `G(H, K) = [H B; I]` for a square-root factor `B` of the input covariance.
pub fn effective_mmse_matrix(h: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_finite(h, "channel")?;
    let n = b.ncols();
    if b.nrows() != n || h.ncols() != n {
        return Err(Error::Domain(format!(
            "channel is {}x{} but the covariance factor is {}x{}",
            h.nrows(),
            h.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    vstack(&(h * b), &identity(n))
}

fn check_channel(h: &CMatrix, k: &CMatrix, what: &str) -> Result<()> {
    check_finite(h, what)?;
    if h.ncols() != k.nrows() {
        return Err(Error::Domain(format!(
            "{what} has {} columns but the covariance is {}x{}",
            h.ncols(),
            k.nrows(),
            k.ncols()
        )));
    }
    Ok(())
}

/// `log₂|I + H K H†|` in bits.
pub fn gaussian_mi(h: &CMatrix, k: &CMatrix) -> Result<f64> {
    check_channel(h, k, "channel")?;
    let b = matrix_sqrt(k)?;
    let hb = h * b;
    let n = k.nrows();
    Ok(log2_det_hpd(&(identity(n) + hb.adjoint() * hb))?.max(0.0))
}

/// `I(H_B, K) − I(H_E, K)` in bits (may be negative).
pub fn secrecy_mi_difference(h_b: &CMatrix, h_e: &CMatrix, k: &CMatrix) -> Result<f64> {
    Ok(gaussian_mi(h_b, k)? - gaussian_mi(h_e, k)?)
}

/// `μ(H_B, H_E, K) = μ(G(H_B,K), G(H_E,K))`, non-increasing.
pub fn channel_gsv(h_b: &CMatrix, h_e: &CMatrix, k: &CMatrix) -> Result<Vec<f64>> {
    check_channel(h_b, k, "legitimate channel")?;
    check_channel(h_e, k, "eavesdropper channel")?;
    let b = matrix_sqrt(k)?;
    let gb = effective_mmse_matrix(h_b, &b)?;
    let ge = effective_mmse_matrix(h_e, &b)?;
    gsv_values(&gb, &ge)
}
