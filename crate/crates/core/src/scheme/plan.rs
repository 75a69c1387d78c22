use crate::decomp::{gsvd_triangular, joint_triangularize, qr};
use crate::error::{Error, Result};
use crate::linalg::{block, check_finite, identity, pos, CMatrix, C64};
use crate::scheme::{select_precoder, PrecoderMode};
use crate::secrecy::{
    count_above_one, effective_mmse_matrix, matrix_sqrt, secrecy_capacity_cov, CovarianceSpec,
};

/// `|T̃ᵢᵢ|` at or below this marks a stream without signal.
pub const ZERO_STREAM_TOL: f64 = 1e-12;

/// Layered SIC receiver for one user.
///
/// The transmitter sends `x = K^{1/2} V_A x̃` with i.i.d. unit-power
/// streams. With `G(H,K) V_A = U T`, the receiver applies `Ũ†` (the top-left
/// `rows(H) × N_A` block of `U`) and sees `Ũ†y = T̃ x̃ + Ũ†z` where
/// `T̃ = [T] − [T]^{−†}`. Streams are decoded last to first; stream `i`
/// subtracts the decoded streams `ℓ > i` and treats the rest as noise.
#[derive(Debug, Clone)]
pub struct SicPlan {
    pub va: CMatrix,
    pub b_sqrt: CMatrix,
    /// Full left unitary of `G(H,K) V_A`.
    pub u: CMatrix,
    /// `[T]`, the leading `N_A × N_A` block of the triangular factor.
    pub t: CMatrix,
    pub u_tilde: CMatrix,
    pub t_tilde: CMatrix,
    /// `Ũ†Ũ`, the covariance of the filtered noise.
    pub noise_cov: CMatrix,
    pub diag_b: Vec<f64>,
    pub sinr: Vec<f64>,
    pub rates_bits: Vec<f64>,
}

impl SicPlan {
    pub fn streams(&self) -> usize {
        self.diag_b.len()
    }

    /// `|T̃ᵢᵢ|² / (K_z̃,ᵢᵢ + Σ_{ℓ<i} |T̃ᵢℓ|²)`, evaluated from the filtered
    /// matrices rather than from `bᵢ`. Streams with `|T̃ᵢᵢ| ≤ ZERO_STREAM_TOL`
    /// carry no signal (`bᵢ = 1`, e.g. `H = 0`) and get SINR zero.
    pub fn filtered_sinr(&self) -> Vec<f64> {
        (0..self.streams())
            .map(|i| {
                let gain = self.t_tilde[(i, i)].norm();
                if gain <= ZERO_STREAM_TOL {
                    return 0.0;
                }
                let noise = self.noise_cov[(i, i)].re
                    + (0..i).map(|l| self.t_tilde[(i, l)].norm_sqr()).sum::<f64>();
                gain * gain / noise
            })
            .collect()
    }

    /// `H K^{1/2} V_A`, the channel seen by the stream vector.
    pub fn stream_channel(&self, h: &CMatrix) -> CMatrix {
        h * &self.b_sqrt * &self.va
    }

    pub fn sum_rate(&self) -> f64 {
        self.rates_bits.iter().sum()
    }
}

/// Plans layered SIC for `H` under input covariance `K` and precoder `V_A`.
pub fn build_sic_plan(h: &CMatrix, k: &CMatrix, va: &CMatrix) -> Result<SicPlan> {
    let b_sqrt = matrix_sqrt(k)?;
    let g = effective_mmse_matrix(h, &b_sqrt)?;
    let n = g.ncols();
    // joint_triangularize validates V_A; the second matrix is a placeholder.
    let f = joint_triangularize(&g, &identity(n), va)?;
    let t = block(&f.t1, 0, 0, n, n);
    let t_inv_adj = t
        .solve_upper_triangular(&identity(n))
        .ok_or_else(|| Error::NumericalFailure("singular triangular factor".into()))?
        .adjoint();
    let t_tilde = &t - &t_inv_adj;
    let u_tilde = block(&f.u1, 0, 0, h.nrows(), n);
    let noise_cov = u_tilde.adjoint() * &u_tilde;
    let diag_b = f.diag1;
    // b ≥ 1 exactly (the identity block of G); clamp round-off below it.
    let sinr = diag_b.iter().map(|b| pos(b * b - 1.0)).collect();
    let rates_bits = diag_b.iter().map(|b| pos(2.0 * b.log2())).collect();
    Ok(SicPlan {
        va: va.clone(),
        b_sqrt,
        u: f.u1,
        t,
        u_tilde,
        t_tilde,
        noise_cov,
        diag_b,
        sinr,
        rates_bits,
    })
}

/// Layered SIC wiretap plan at the optimal covariance.
#[derive(Debug, Clone)]
pub struct WiretapPlan {
    pub base: SicPlan,
    pub k_star: CovarianceSpec,
    pub capacity_bits: f64,
    pub diag_e: Vec<f64>,
    /// `[log₂(bₖ²/eₖ²)]₊`
    pub secret_rates_bits: Vec<f64>,
    /// `log₂ eₖ²`, the rate of the randomization codebooks.
    pub fictitious_rates_bits: Vec<f64>,
    pub mode: PrecoderMode,
}

impl WiretapPlan {
    /// Bob–Eve SNR pairs `(bₖ² − 1, eₖ² − 1)`.
    pub fn snr_pairs(&self) -> Vec<(f64, f64)> {
        self.base
            .diag_b
            .iter()
            .zip(&self.diag_e)
            .map(|(b, e)| (b * b - 1.0, e * e - 1.0))
            .collect()
    }

    pub fn total_secret_rate(&self) -> f64 {
        self.secret_rates_bits.iter().sum()
    }

    /// Rates with back-off `ε`: `([Rₖ − 2ε]₊, R̃ₖ + ε)`.
    pub fn backed_off(&self, eps: f64) -> (Vec<f64>, Vec<f64>) {
        (
            self.secret_rates_bits.iter().map(|r| pos(r - 2.0 * eps)).collect(),
            self.fictitious_rates_bits.iter().map(|r| r + eps).collect(),
        )
    }
}

/// Plans the layered SIC wiretap scheme at `K*` with the chosen precoder.
pub fn build_wiretap_plan(
    h_b: &CMatrix,
    h_e: &CMatrix,
    kbar: &CMatrix,
    mode: PrecoderMode,
) -> Result<WiretapPlan> {
    let cap = secrecy_capacity_cov(h_b, h_e, kbar)?;
    let k = &cap.k_star.k;
    let va = select_precoder(h_b, h_e, k, mode)?;
    let base = build_sic_plan(h_b, k, &va)?;
    let ge = effective_mmse_matrix(h_e, &base.b_sqrt)?;
    let diag_e = qr(&(ge * &va))?.diagonal();
    let secret_rates_bits = base
        .diag_b
        .iter()
        .zip(&diag_e)
        .map(|(b, e)| pos(2.0 * (b / e).log2()))
        .collect();
    let fictitious_rates_bits = diag_e.iter().map(|e| 2.0 * e.log2()).collect();
    Ok(WiretapPlan {
        base,
        k_star: cap.k_star,
        capacity_bits: cap.capacity_bits,
        diag_e,
        secret_rates_bits,
        fictitious_rates_bits,
        mode,
    })
}

/// Layered DPC wiretap plan.
///
/// Stream `k` is encoded knowing the streams `ℓ > k`; the interference
/// `Σ_{ℓ>k} T̃ₖℓ x̃ℓ` is handled by presubtraction with the MMSE coefficient
/// `αₖ`.
#[derive(Debug, Clone)]
pub struct DpcPlan {
    pub wiretap: WiretapPlan,
    /// Strictly upper part of `T̃_B`: row `k` holds the known-interference
    /// coefficients of stream `k`.
    pub presubtraction: CMatrix,
    /// `(bₖ² − 1)/bₖ²`
    pub alpha: Vec<f64>,
    pub rates_bits: Vec<f64>,
    pub fictitious_rates_bits: Vec<f64>,
    /// `log₂(bₖ² + Σ_{ℓ>k} |T_B;kℓ|²)`, the auxiliary codebook rate.
    pub rate_u_bits: Vec<f64>,
}

impl DpcPlan {
    /// `(Rₖ − ε, R̃ₖ − ε, Rᵁₖ − ε)`, with `Rₖ` clipped at zero.
    pub fn backed_off(&self, eps: f64) -> Vec<(f64, f64, f64)> {
        self.rates_bits
            .iter()
            .zip(&self.fictitious_rates_bits)
            .zip(&self.rate_u_bits)
            .map(|((r, f), u)| (pos(r - eps), f - eps, u - eps))
            .collect()
    }
}

pub fn build_dpc_plan(
    h_b: &CMatrix,
    h_e: &CMatrix,
    kbar: &CMatrix,
    mode: PrecoderMode,
) -> Result<DpcPlan> {
    let wiretap = build_wiretap_plan(h_b, h_e, kbar, mode)?;
    let base = &wiretap.base;
    let n = base.streams();
    let presubtraction = CMatrix::from_fn(n, n, |i, j| {
        if j > i { base.t_tilde[(i, j)] } else { C64::new(0.0, 0.0) }
    });
    let alpha = base.diag_b.iter().map(|b| (b * b - 1.0) / (b * b)).map(|a| a.max(0.0)).collect();
    let rate_u_bits = (0..n)
        .map(|k| {
            let b2 = base.diag_b[k].powi(2);
            let known: f64 = (k + 1..n).map(|l| base.t[(k, l)].norm_sqr()).sum();
            (b2 + known).log2()
        })
        .collect();
    Ok(DpcPlan {
        rates_bits: wiretap.secret_rates_bits.clone(),
        fictitious_rates_bits: wiretap.fictitious_rates_bits.clone(),
        presubtraction,
        alpha,
        rate_u_bits,
        wiretap,
    })
}

/// Confidential broadcast by splitting the streams of the triangular GSVD at
/// `K̄`: the first `lb` go to Bob, the remaining `lc` to Charlie.
#[derive(Debug, Clone)]
pub struct BroadcastPlan {
    pub lb: usize,
    pub lc: usize,
    pub gsv: Vec<f64>,
    /// Bob's receiver (all `N_A` filtered streams; he decodes `0..lb`).
    pub bob: SicPlan,
    /// Charlie's receiver (he decodes `lb..N_A`).
    pub charlie: SicPlan,
    /// `N_B × lb` block of `U_B`.
    pub bob_combiner: CMatrix,
    /// Columns `lb..N_A` of the first `N_C` rows of `U_C`.
    pub charlie_combiner: CMatrix,
    /// `log₂(bₖ²/cₖ²)` for `k < lb`.
    pub bob_rates_bits: Vec<f64>,
    /// `log₂(cₖ²/bₖ²)` for `k ≥ lb`.
    pub charlie_rates_bits: Vec<f64>,
}

impl BroadcastPlan {
    pub fn bob_total(&self) -> f64 {
        self.bob_rates_bits.iter().sum()
    }

    pub fn charlie_total(&self) -> f64 {
        self.charlie_rates_bits.iter().sum()
    }
}

pub fn build_broadcast_plan(h_b: &CMatrix, h_c: &CMatrix, kbar: &CMatrix) -> Result<BroadcastPlan> {
    check_finite(h_c, "second receiver channel")?;
    let kbar = CovarianceSpec::new(kbar.clone())?.k;
    let b = matrix_sqrt(&kbar)?;
    let gb = effective_mmse_matrix(h_b, &b)?;
    let gc = effective_mmse_matrix(h_c, &b)?;
    let jt = gsvd_triangular(&gb, &gc)?;
    let gsv = jt.ratios();
    let lb = count_above_one(&gsv);
    let n = gsv.len();

    let bob = build_sic_plan(h_b, &kbar, &jt.va)?;
    let charlie = build_sic_plan(h_c, &kbar, &jt.va)?;
    let bob_combiner = block(&bob.u, 0, 0, h_b.nrows(), lb);
    let charlie_combiner = block(&charlie.u, 0, lb, h_c.nrows(), n - lb);
    let log_ratio = |k: usize| 2.0 * (bob.diag_b[k] / charlie.diag_b[k]).log2();
    let bob_rates_bits = (0..lb).map(|k| pos(log_ratio(k))).collect();
    let charlie_rates_bits = (lb..n).map(|k| pos(-log_ratio(k))).collect();
    Ok(BroadcastPlan {
        lb,
        lc: n - lb,
        gsv,
        bob,
        charlie,
        bob_combiner,
        charlie_combiner,
        bob_rates_bits,
        charlie_rates_bits,
    })
}
