use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decomp::{gmd, gsvd_triangular, svd};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::secrecy::{effective_mmse_matrix, matrix_sqrt};

/// Choice of the shared right unitary `V_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecoderMode {
    /// Triangular GSVD of the effective pair: diagonal ratios equal the GSVs.
    Gsvd,
    /// Right singular vectors of Eve's effective matrix: `T_E` diagonal.
    SvdEve,
    /// Right singular vectors of Bob's effective matrix: `T_B` diagonal.
    SvdBob,
    /// GMD of Bob's effective matrix: constant `diag(T_B)`.
    GmdBob,
}

impl PrecoderMode {
    pub const ALL: [PrecoderMode; 4] = [Self::Gsvd, Self::SvdEve, Self::SvdBob, Self::GmdBob];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gsvd => "gsvd",
            Self::SvdEve => "svd_eve",
            Self::SvdBob => "svd_bob",
            Self::GmdBob => "gmd_bob",
        }
    }
}

impl fmt::Display for PrecoderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrecoderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown precoder mode '{s}' (expected gsvd, svd_eve, svd_bob or gmd_bob)"
                ))
            })
    }
}

/// Unitary `V_A` for the effective matrices `G(H_B, K)`, `G(H_E, K)`.
pub fn select_precoder(h_b: &CMatrix, h_e: &CMatrix, k: &CMatrix, mode: PrecoderMode) -> Result<CMatrix> {
    let b = matrix_sqrt(k)?;
    let gb = effective_mmse_matrix(h_b, &b)?;
    let ge = effective_mmse_matrix(h_e, &b)?;
    Ok(match mode {
        PrecoderMode::Gsvd => gsvd_triangular(&gb, &ge)?.va,
        PrecoderMode::SvdEve => svd(&ge)?.v,
        PrecoderMode::SvdBob => svd(&gb)?.v,
        PrecoderMode::GmdBob => gmd(&gb)?.v,
    })
}
