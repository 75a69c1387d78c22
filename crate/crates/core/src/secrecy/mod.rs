//! Secrecy capacity of the MIMO wiretap channel under a covariance
//! constraint, expressed through the GSVs of the effective MMSE matrices.

mod capacity;
mod mmse;
mod power;

pub use capacity::{
    broadcast_region, count_above_one, gsv_monotonicity_check, scalar_secrecy_capacity,
    secrecy_capacity_cov, verify_truncation, MonotonicityReport, TruncationReport, GSV_ONE_TOL,
    MONOTONICITY_TOL, TRUNCATION_TOL,
};
pub use mmse::{
    channel_gsv, effective_mmse_matrix, gaussian_mi, matrix_sqrt, secrecy_mi_difference,
    HERMITIAN_TOL, PSD_TOL,
};
pub use power::{power_constrained_capacity, PowerSearch};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fro, hermitize, CMatrix};

/// Allowed negative eigenvalue of `K̄ − K`, relative to `max(‖K̄‖, 1)`.
pub const DOMINANCE_TOL: f64 = 1e-8;

/// An input covariance `K` with an optional constraint `K̄ ⪰ K`.
#[derive(Debug, Clone)]
pub struct CovarianceSpec {
    pub k: CMatrix,
    pub kbar: Option<CMatrix>,
}

impl CovarianceSpec {
    /// Validates `K` (Hermitian within [`HERMITIAN_TOL`], PSD up to
    /// [`PSD_TOL`]) and stores its Hermitian part.
    pub fn new(k: CMatrix) -> Result<Self> {
        mmse::psd_eigen(&k)?;
        Ok(Self {
            k: hermitize(&k),
            kbar: None,
        })
    }

    /// As [`CovarianceSpec::new`], and additionally checks `K ⪯ K̄`.
    pub fn with_constraint(k: CMatrix, kbar: CMatrix) -> Result<Self> {
        let spec = Self::new(k)?;
        let kbar = Self::new(kbar)?.k;
        if kbar.shape() != spec.k.shape() {
            return Err(Error::Domain("K and K̄ must have the same shape".into()));
        }
        let (w, _) = crate::linalg::hermitian_eigen(&hermitize(&(&kbar - &spec.k)));
        let min = w.last().copied().unwrap_or(0.0);
        if min < -DOMINANCE_TOL * fro(&kbar).max(1.0) {
            return Err(Error::Domain(format!(
                "covariance exceeds its constraint (min eigenvalue of K̄ − K is {min:.3e})"
            )));
        }
        Ok(Self {
            k: spec.k,
            kbar: Some(kbar),
        })
    }

    pub fn dim(&self) -> usize {
        self.k.nrows()
    }
}

/// Output of [`secrecy_capacity_cov`].
#[derive(Debug, Clone)]
pub struct SecrecyResult {
    /// `μᵢ(H_B, H_E, K̄)`, non-increasing.
    pub gsv: Vec<f64>,
    /// Number of GSVs above one.
    pub lb: usize,
    pub capacity_bits: f64,
    /// Optimal covariance, carrying `K̄` as its constraint.
    pub k_star: CovarianceSpec,
    /// Right unitary of the triangular GSVD at `K̄`.
    pub va: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BroadcastRegion {
    pub rb_max: f64,
    pub rc_max: f64,
}

impl BroadcastRegion {
    pub fn contains(&self, rb: f64, rc: f64) -> bool {
        (0.0..=self.rb_max).contains(&rb) && (0.0..=self.rc_max).contains(&rc)
    }
}
