//! Matrix triangularizations and layered transceiver planning for the MIMO
//! wiretap and confidential broadcast channels.
//!
//! The crate is split into three layers:
//!
//! - [`decomp`]: unitary single- and joint-matrix triangularizations (QR, QL,
//!   SVD, GTD, GMD, both forms of the GSVD) with multiplicative majorization
//!   gating.
//! - [`secrecy`]: effective MMSE matrices, Gaussian mutual informations, the
//!   GSV form of the secrecy capacity under a covariance constraint, the
//!   optimal covariance with GSV truncation and the confidential broadcast
//!   region.
//! - [`scheme`]: layered-SIC, layered-DPC and confidential broadcast plans,
//!   plus a seeded Monte Carlo simulator that checks the analytic SINRs,
//!   rates and leakage with Gaussian signaling.
//!
//! Rates are in bits per channel use throughout.

pub mod decomp;
pub mod error;
pub mod linalg;
pub mod random;
pub mod scheme;
pub mod secrecy;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};

pub use decomp::{
    gmd, gsv_values, gsvd_diagonal, gsvd_triangular, gtd, joint_triangularize, majorizes, ql, qr,
    svd, GsvdDiagonalFactors, GtdFactors, JointTriangularization, QlFactors,
};
pub use scheme::{
    build_broadcast_plan, build_dpc_plan, build_sic_plan, build_wiretap_plan, select_precoder,
    simulate_broadcast, simulate_dpc, simulate_leakage, simulate_sic, BroadcastPlan,
    BroadcastSimulation, DpcPlan, PrecoderMode, SicPlan, SimulationReport, StreamStats,
    WiretapPlan,
};
pub use secrecy::{
    broadcast_region, channel_gsv, effective_mmse_matrix, gaussian_mi, gsv_monotonicity_check,
    matrix_sqrt, power_constrained_capacity, scalar_secrecy_capacity, secrecy_capacity_cov,
    secrecy_mi_difference, verify_truncation, BroadcastRegion, CovarianceSpec, PowerSearch,
    SecrecyResult,
};

/// A complex channel gain matrix (receive antennas x transmit antennas).
pub type ChannelMatrix = CMatrix;
