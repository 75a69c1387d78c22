use crate::decomp::{ql, qr, svd, RANK_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{check_finite, fro, identity, real, real_diagonal, unitarity_residual, CMatrix};

/// Tolerance on `‖V†V − I‖` for caller-supplied precoders.
pub const UNITARY_TOL: f64 = 1e-8;

/// Diagonal form of the GSVD: `A₁ = U₁ L₁ X†`, `A₂ = U₂ L₂ X†` with
/// `L₁†L₁ + L₂†L₂ = I` and non-increasing ratios `L₁ᵢᵢ / L₂ᵢᵢ`.
#[derive(Debug, Clone)]
pub struct GsvdDiagonalFactors {
    pub u1: CMatrix,
    pub u2: CMatrix,
    pub x: CMatrix,
    pub l1: CMatrix,
    pub l2: CMatrix,
}

impl GsvdDiagonalFactors {
    /// `L₁ᵢᵢ / L₂ᵢᵢ`, i.e. the GSVs.
    pub fn ratios(&self) -> Vec<f64> {
        real_diagonal(&self.l1)
            .iter()
            .zip(real_diagonal(&self.l2))
            .map(|(a, b)| a / b)
            .collect()
    }

    /// `‖L₁†L₁ + L₂†L₂ − I‖_F`.
    pub fn normalization_residual(&self) -> f64 {
        let n = self.x.ncols();
        fro(&(self.l1.adjoint() * &self.l1 + self.l2.adjoint() * &self.l2 - identity(n)))
    }

    /// Relative reconstruction residuals for `A₁` and `A₂`.
    pub fn relative_residuals(&self, a1: &CMatrix, a2: &CMatrix) -> (f64, f64) {
        let r1 = fro(&(&self.u1 * &self.l1 * self.x.adjoint() - a1)) / fro(a1);
        let r2 = fro(&(&self.u2 * &self.l2 * self.x.adjoint() - a2)) / fro(a2);
        (r1, r2)
    }
}

/// A joint unitary triangularization `A_k = U_k T_k V_A†`, `k ∈ {1,2}`.
#[derive(Debug, Clone)]
pub struct JointTriangularization {
    pub u1: CMatrix,
    pub u2: CMatrix,
    pub va: CMatrix,
    pub t1: CMatrix,
    pub t2: CMatrix,
    /// Diagonal of `T₁` (`bᵢ` when `A₁` is Bob's effective matrix).
    pub diag1: Vec<f64>,
    /// Diagonal of `T₂` (`eᵢ` for Eve).
    pub diag2: Vec<f64>,
}

impl JointTriangularization {
    pub fn ratios(&self) -> Vec<f64> {
        self.diag1.iter().zip(&self.diag2).map(|(a, b)| a / b).collect()
    }

    pub fn relative_residuals(&self, a1: &CMatrix, a2: &CMatrix) -> (f64, f64) {
        let r1 = fro(&(&self.u1 * &self.t1 * self.va.adjoint() - a1)) / fro(a1);
        let r2 = fro(&(&self.u2 * &self.t2 * self.va.adjoint() - a2)) / fro(a2);
        (r1, r2)
    }
}

/// Shared factorization behind every GSV routine.
///
/// `A₂ = Q₂ [R; 0]` gives the Cholesky factor `R` of `A₂†A₂`; the SVD of
/// `C = A₁ R⁻¹ = P Σ W†` then solves the generalized eigenproblem
/// `A₁†A₁ y = μ² A₂†A₂ y` with `μ = diag(Σ)` and `y = R⁻¹ W`.
struct GsvCore {
    q2: CMatrix,
    r: CMatrix,
    p: CMatrix,
    w: CMatrix,
    mu: Vec<f64>,
}

fn check_pair(a1: &CMatrix, a2: &CMatrix) -> Result<()> {
    check_finite(a1, "first matrix")?;
    check_finite(a2, "second matrix")?;
    if a1.ncols() != a2.ncols() {
        return Err(Error::Domain(format!(
            "matrices must share the column count ({} vs {})",
            a1.ncols(),
            a2.ncols()
        )));
    }
    Ok(())
}

fn gsv_core(a1: &CMatrix, a2: &CMatrix) -> Result<GsvCore> {
    check_pair(a1, a2)?;
    let n = a1.ncols();
    let f2 = qr(a2)?;
    let r = f2.t.view((0, 0), (n, n)).into_owned();
    let r_inv = r
        .solve_upper_triangular(&identity(n))
        .ok_or(Error::RankDeficient {
            pivot: 0.0,
            threshold: RANK_THRESHOLD * fro(a2),
        })?;
    let c = a1 * r_inv;
    let s = svd(&c)?;
    Ok(GsvCore {
        q2: f2.u,
        r,
        mu: s.diagonal(),
        p: s.u,
        w: s.v,
    })
}

/// Generalized singular values of `(A₁, A₂)`, non-increasing.
pub fn gsv_values(a1: &CMatrix, a2: &CMatrix) -> Result<Vec<f64>> {
    Ok(gsv_core(a1, a2)?.mu)
}

/// Diagonal form of the GSVD.
pub fn gsvd_diagonal(a1: &CMatrix, a2: &CMatrix) -> Result<GsvdDiagonalFactors> {
    let core = gsv_core(a1, a2)?;
    let n = a1.ncols();
    let (m1, m2) = (a1.nrows(), a2.nrows());

    let mut l1 = CMatrix::zeros(m1, n);
    let mut l2 = CMatrix::zeros(m2, n);
    let mut scale = CMatrix::zeros(n, n);
    for (i, &mu) in core.mu.iter().enumerate() {
        let lam = mu * mu;
        l1[(i, i)] = real((lam / (1.0 + lam)).sqrt());
        l2[(i, i)] = real((1.0 / (1.0 + lam)).sqrt());
        scale[(i, i)] = real((1.0 + lam).sqrt());
    }
    let x = core.r.adjoint() * &core.w * scale;

    let mut rot = identity(m2);
    rot.view_mut((0, 0), (n, n)).copy_from(&core.w);
    let u2 = &core.q2 * rot;

    Ok(GsvdDiagonalFactors {
        u1: core.p,
        u2,
        x,
        l1,
        l2,
    })
}

/// Triangular form of the GSVD: QL-factor `X = V L` and triangularize both
/// matrices against the shared right factor `V`.
pub fn gsvd_triangular(a1: &CMatrix, a2: &CMatrix) -> Result<JointTriangularization> {
    let diag = gsvd_diagonal(a1, a2)?;
    let v = ql(&diag.x)?.u;
    joint_triangularize(a1, a2, &v)
}

/// `A_k V_A = U_k T_k` by QR, for a caller-chosen unitary `V_A`.
pub fn joint_triangularize(
    a1: &CMatrix,
    a2: &CMatrix,
    va: &CMatrix,
) -> Result<JointTriangularization> {
    check_pair(a1, a2)?;
    let n = a1.ncols();
    if va.shape() != (n, n) {
        return Err(Error::Domain(format!(
            "precoder must be {n}x{n}, got {}x{}",
            va.nrows(),
            va.ncols()
        )));
    }
    let res = unitarity_residual(va);
    if !(res <= UNITARY_TOL) {
        return Err(Error::Domain(format!(
            "precoder is not unitary (‖V†V − I‖ = {res:.3e})"
        )));
    }
    let f1 = qr(&(a1 * va))?;
    let f2 = qr(&(a2 * va))?;
    Ok(JointTriangularization {
        diag1: f1.diagonal(),
        diag2: f2.diagonal(),
        u1: f1.u,
        u2: f2.u,
        va: va.clone(),
        t1: f1.t,
        t2: f2.t,
    })
}
