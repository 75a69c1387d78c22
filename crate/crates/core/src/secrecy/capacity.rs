use rayon::prelude::*;

use crate::decomp::{gsvd_diagonal, ql};
use crate::error::{Error, Result};
use crate::linalg::{block, pos, CMatrix, C64};
use crate::random::{sample_dominated, substream};
use crate::secrecy::mmse::{channel_gsv, effective_mmse_matrix, matrix_sqrt};
use crate::secrecy::{BroadcastRegion, CovarianceSpec, SecrecyResult};

/// `μᵢ² > 1 + GSV_ONE_TOL` counts as a GSV above one.
pub const GSV_ONE_TOL: f64 = 1e-9;

/// Number of leading GSVs with `μ² > 1 + GSV_ONE_TOL`.
pub fn count_above_one(mu: &[f64]) -> usize {
    mu.iter().take_while(|m| *m * *m > 1.0 + GSV_ONE_TOL).count()
}

/// Secrecy capacity of the MIMO wiretap channel under `K ⪯ K̄`, with the GSV
/// vector at `K̄`, the number of GSVs above one and the optimal covariance
/// `K* = K̄^{1/2} V_A I_B V_A† K̄^{†/2}`.
pub fn secrecy_capacity_cov(h_b: &CMatrix, h_e: &CMatrix, kbar: &CMatrix) -> Result<SecrecyResult> {
    let kbar_spec = CovarianceSpec::new(kbar.clone())?;
    let b = matrix_sqrt(&kbar_spec.k)?;
    let gb = effective_mmse_matrix(h_b, &b)?;
    let ge = effective_mmse_matrix(h_e, &b)?;

    let diag = gsvd_diagonal(&gb, &ge)?;
    let gsv = diag.ratios();
    let va = ql(&diag.x)?.u;
    let lb = count_above_one(&gsv);
    let capacity_bits = gsv[..lb].iter().map(|m| 2.0 * m.log2()).sum::<f64>();

    let n = kbar.nrows();
    let v_b = block(&va, 0, 0, n, lb);
    let root = &b * v_b;
    let k_star = &root * root.adjoint();

    Ok(SecrecyResult {
        gsv,
        lb,
        capacity_bits,
        k_star: CovarianceSpec::with_constraint(k_star, kbar_spec.k)?,
        va,
    })
}

/// Rectangle `[0, rb_max] × [0, rc_max]` of the confidential broadcast
/// channel under `K ⪯ K̄`.
pub fn broadcast_region(h_b: &CMatrix, h_c: &CMatrix, kbar: &CMatrix) -> Result<BroadcastRegion> {
    let mu = channel_gsv(h_b, h_c, kbar)?;
    let logs: Vec<f64> = mu.iter().map(|m| 2.0 * m.log2()).collect();
    Ok(BroadcastRegion {
        rb_max: logs.iter().map(|l| pos(*l)).sum(),
        rc_max: logs.iter().map(|l| pos(-l)).sum(),
    })
}

/// `[log₂(1+|h_b|²) − log₂(1+|h_e|²)]₊`
pub fn scalar_secrecy_capacity(h_b: C64, h_e: C64) -> f64 {
    pos((1.0 + h_b.norm_sqr()).log2() - (1.0 + h_e.norm_sqr()).log2())
}

#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub lb: usize,
    pub gsv_kbar: Vec<f64>,
    pub gsv_kstar: Vec<f64>,
    /// `maxᵢ |μᵢ(K*) − clip(μᵢ(K̄))|` where clipping replaces GSVs not above
    /// one by exactly one.
    pub max_deviation: f64,
    pub passed: bool,
}

pub const TRUNCATION_TOL: f64 = 1e-7;

/// Checks that the optimal covariance keeps the GSVs above one and pushes
/// the rest to exactly one.
pub fn verify_truncation(h_b: &CMatrix, h_e: &CMatrix, kbar: &CMatrix) -> Result<TruncationReport> {
    let res = secrecy_capacity_cov(h_b, h_e, kbar)?;
    let gsv_kstar = channel_gsv(h_b, h_e, &res.k_star.k)?;
    let max_deviation = gsv_kstar
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let clipped = if i < res.lb { res.gsv[i] } else { 1.0 };
            (m - clipped).abs()
        })
        .fold(0.0, f64::max);
    Ok(TruncationReport {
        lb: res.lb,
        gsv_kbar: res.gsv,
        gsv_kstar,
        max_deviation,
        passed: max_deviation <= TRUNCATION_TOL,
    })
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub violations: usize,
    /// `minᵢ,K (|ln μᵢ(K̄)| − |ln μᵢ(K)|)`; negative values beyond the
    /// tolerance are violations.
    pub worst_margin: f64,
    /// First sampled `K` (by index) that violated the inequality.
    pub witness: Option<CMatrix>,
}

pub const MONOTONICITY_TOL: f64 = 1e-8;

/// Samples `0 ⪯ K ⪯ K̄` and checks `|log μᵢ(K̄)| ≥ |log μᵢ(K)|` for every
/// index of the non-increasingly ordered GSV vectors. Sample `i` draws from
/// substream `(seed, i)`.
pub fn gsv_monotonicity_check(
    h_b: &CMatrix,
    h_e: &CMatrix,
    kbar: &CMatrix,
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if samples == 0 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    let kbar_sqrt = matrix_sqrt(kbar)?;
    let reference: Vec<f64> = channel_gsv(h_b, h_e, kbar)?.iter().map(|m| m.ln().abs()).collect();

    let margins: Vec<(f64, Option<CMatrix>)> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<(f64, Option<CMatrix>)> {
            let mut rng = substream(seed, i as u64);
            let k = sample_dominated(&mut rng, &kbar_sqrt);
            let mu = channel_gsv(h_b, h_e, &k)?;
            let margin = reference
                .iter()
                .zip(&mu)
                .map(|(r, m)| r - m.ln().abs())
                .fold(f64::INFINITY, f64::min);
            Ok((margin, (margin < -MONOTONICITY_TOL).then_some(k)))
        })
        .collect::<Result<_>>()?;

    let violations = margins.iter().filter(|(_, w)| w.is_some()).count();
    let worst_margin = margins.iter().map(|(m, _)| *m).fold(f64::INFINITY, f64::min);
    let witness = margins.into_iter().find_map(|(_, w)| w);
    Ok(MonotonicityReport {
        samples,
        violations,
        worst_margin,
        witness,
    })
}
