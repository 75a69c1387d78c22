//! Unitary single- and joint-matrix triangularizations.
//!
//! All routines accept full-column-rank matrices with at least as many rows
//! as columns. Triangular factors always carry a strictly positive real
//! diagonal; phases are absorbed into the unitary factors. Entries below the
//! diagonal of a triangular factor are exactly zero.

mod gsvd;
mod gtd;
mod majorization;
mod svd;
mod triangular;

pub use gsvd::{
    gsv_values, gsvd_diagonal, gsvd_triangular, joint_triangularize, GsvdDiagonalFactors,
    JointTriangularization,
};
pub use gtd::{gmd, gtd};
pub use majorization::{majorization_violation, majorizes, MAJORIZATION_SLACK};
pub use svd::svd;
pub use triangular::{complete_unitary, ql, qr, QlFactors};

use crate::linalg::{fro, real_diagonal, CMatrix};

/// Relative threshold on triangular pivots below which a matrix is treated
/// as rank deficient.
pub const RANK_THRESHOLD: f64 = 1e-12;

/// `A = U T V†` with `U`, `V` unitary and `T` generalized upper-triangular.
#[derive(Debug, Clone)]
pub struct GtdFactors {
    pub u: CMatrix,
    pub t: CMatrix,
    pub v: CMatrix,
}

impl GtdFactors {
    /// Diagonal of `T` (length = number of columns).
    pub fn diagonal(&self) -> Vec<f64> {
        real_diagonal(&self.t)
    }

    pub fn reconstruct(&self) -> CMatrix {
        &self.u * &self.t * self.v.adjoint()
    }

    /// `‖U T V† − A‖_F / ‖A‖_F`.
    pub fn relative_residual(&self, a: &CMatrix) -> f64 {
        fro(&(self.reconstruct() - a)) / fro(a).max(f64::MIN_POSITIVE)
    }
}
