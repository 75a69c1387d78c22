use rand::Rng;
use rayon::prelude::*;

use crate::decomp::gsvd_diagonal;
use crate::error::{Error, Result};
use crate::linalg::{c64, check_finite, identity, CMatrix};
use crate::random::{complex_normal, substream};
use crate::secrecy::capacity::secrecy_capacity_cov;
use crate::secrecy::mmse::effective_mmse_matrix;

/// Objective evaluations allowed per restart.
const EVALS_PER_RESTART: usize = 4000;
/// Local search stops once the step falls below this.
const MIN_STEP: f64 = 1e-7;
const RANDOM_DIRECTIONS: usize = 4;

/// Best-effort maximization of the secrecy capacity over constraint
/// matrices with `tr K̄ = P`.
#[derive(Debug, Clone)]
pub struct PowerSearch {
    /// Capacity of `kbar`, evaluated exactly; a certified lower bound on the
    /// power-constrained secrecy capacity.
    pub capacity_lower_bound: f64,
    pub kbar: CMatrix,
    pub evaluations: usize,
    pub restarts: usize,
}

/// Searches `K̄ = P·AA†/tr(AA†)` over `A`.
///
/// `budget` is the number of restarts: restart 0 starts from `(P/N)·I`,
/// restart 1 from the rank-one beamformer along the top generalized
/// eigenvector of `(I + P H_B†H_B, I + P H_E†H_E)`, later ones from random
/// `A`. Each restart runs a coordinate search with random directions and
/// step halving. Restart `r` draws from substream `(seed, r)`, so the bound
/// never decreases as `budget` grows.
pub fn power_constrained_capacity(
    h_b: &CMatrix,
    h_e: &CMatrix,
    power: f64,
    budget: usize,
    seed: u64,
) -> Result<PowerSearch> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::Domain(format!("power must be positive, got {power}")));
    }
    check_finite(h_b, "legitimate channel")?;
    check_finite(h_e, "eavesdropper channel")?;
    let n = h_b.ncols();
    if h_e.ncols() != n {
        return Err(Error::Domain(format!(
            "channels must share the transmit dimension ({} vs {})",
            n,
            h_e.ncols()
        )));
    }
    let budget = budget.max(1);
    let objective = Objective { h_b, h_e, power };

    let runs: Vec<(f64, Vec<f64>, usize)> = (0..budget)
        .into_par_iter()
        .map(|r| -> Result<(f64, Vec<f64>, usize)> {
            let mut rng = substream(seed, r as u64);
            let start = match r {
                0 => to_params(&identity(n)),
                1 => to_params(&top_beam(h_b, h_e, power)?),
                _ => (0..2 * n * n).map(|_| complex_normal(&mut rng).re).collect(),
            };
            local_search(&objective, start, &mut rng)
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = i;
        }
    }
    let evaluations = runs.iter().map(|r| r.2).sum();
    let kbar = objective.kbar(&runs[best].1).expect("best point has a finite objective");
    Ok(PowerSearch {
        capacity_lower_bound: runs[best].0,
        kbar,
        evaluations,
        restarts: budget,
    })
}

struct Objective<'a> {
    h_b: &'a CMatrix,
    h_e: &'a CMatrix,
    power: f64,
}

impl Objective<'_> {
    fn kbar(&self, x: &[f64]) -> Option<CMatrix> {
        let a = from_params(x);
        let aa = &a * a.adjoint();
        let tr: f64 = (0..aa.nrows()).map(|i| aa[(i, i)].re).sum();
        (tr > 0.0 && tr.is_finite()).then(|| aa.scale(self.power / tr))
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        match self.kbar(x) {
            Some(k) => Ok(secrecy_capacity_cov(self.h_b, self.h_e, &k)?.capacity_bits),
            None => Ok(f64::NEG_INFINITY),
        }
    }
}

fn to_params(a: &CMatrix) -> Vec<f64> {
    a.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_params(x: &[f64]) -> CMatrix {
    let n = ((x.len() / 2) as f64).sqrt().round() as usize;
    CMatrix::from_iterator(n, n, x.chunks(2).map(|p| c64(p[0], p[1])))
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

fn top_beam(h_b: &CMatrix, h_e: &CMatrix, power: f64) -> Result<CMatrix> {
    let n = h_b.ncols();
    let b = identity(n).scale(power.sqrt());
    let gb = effective_mmse_matrix(h_b, &b)?;
    let ge = effective_mmse_matrix(h_e, &b)?;
    // Columns of X^{-†} are the generalized eigenvectors, in GSV order.
    let x = gsvd_diagonal(&gb, &ge)?.x;
    let y = x
        .adjoint()
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("singular GSVD right factor".into()))?;
    let mut a = CMatrix::zeros(n, n);
    a.set_column(0, &y.column(0));
    Ok(a)
}

fn local_search<R: Rng>(
    objective: &Objective,
    mut x: Vec<f64>,
    rng: &mut R,
) -> Result<(f64, Vec<f64>, usize)> {
    normalize(&mut x);
    let mut f = objective.eval(&x)?;
    let mut evals = 1;
    let mut step = 0.25;
    let dim = x.len();

    while step >= MIN_STEP && evals < EVALS_PER_RESTART {
        let mut improved = false;
        let mut directions: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                let mut d = vec![0.0; dim];
                d[i] = 1.0;
                d
            })
            .collect();
        for _ in 0..RANDOM_DIRECTIONS {
            let mut d: Vec<f64> = (0..dim).map(|_| complex_normal(rng).re).collect();
            normalize(&mut d);
            directions.push(d);
        }
        for d in &directions {
            for sign in [1.0, -1.0] {
                let mut cand: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + sign * step * b).collect();
                normalize(&mut cand);
                let fc = objective.eval(&cand)?;
                evals += 1;
                if fc > f {
                    x = cand;
                    f = fc;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((f, x, evals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real_rows, real};
    use crate::random::complex_gaussian;

    #[test]
    fn scalar_without_eavesdropper() {
        let hb = CMatrix::from_element(1, 1, c64(1.5, -0.5));
        let he = CMatrix::zeros(1, 1);
        let r = power_constrained_capacity(&hb, &he, 3.0, 2, 1).unwrap();
        let exact = (1.0 + 2.5 * 3.0f64).log2();
        assert!((r.capacity_lower_bound - exact).abs() < 1e-12);
        assert!((r.kbar[(0, 0)] - real(3.0)).norm() < 1e-12);
    }

    #[test]
    fn identical_channels() {
        let mut rng = substream(60, 0);
        let h = complex_gaussian(&mut rng, 2, 2);
        let r = power_constrained_capacity(&h, &h, 2.0, 3, 1).unwrap();
        assert!(r.capacity_lower_bound.abs() < 1e-9);
    }

    #[test]
    fn bound_is_certified_and_monotone() {
        let mut rng = substream(60, 1);
        let hb = complex_gaussian(&mut rng, 2, 2);
        let he = complex_gaussian(&mut rng, 2, 2);
        let mut last = f64::NEG_INFINITY;
        for budget in 1..=4 {
            let r = power_constrained_capacity(&hb, &he, 2.0, budget, 5).unwrap();
            let tr: f64 = (0..2).map(|i| r.kbar[(i, i)].re).sum();
            assert!((tr - 2.0).abs() < 1e-10);
            let exact = secrecy_capacity_cov(&hb, &he, &r.kbar).unwrap().capacity_bits;
            assert_eq!(exact, r.capacity_lower_bound);
            assert!(r.capacity_lower_bound >= last);
            last = r.capacity_lower_bound;
        }
        let at_identity = secrecy_capacity_cov(&hb, &he, &identity(2)).unwrap().capacity_bits;
        assert!(last >= at_identity);
    }

    #[test]
    fn beats_fixed_beams_on_real_channel() {
        let hb = from_real_rows(2, 2, &[2.0, 0.3, -0.4, 0.5]);
        let he = from_real_rows(2, 2, &[0.2, 1.0, 0.7, -0.1]);
        let r = power_constrained_capacity(&hb, &he, 2.0, 3, 0).unwrap();
        for theta in (0..64).map(|i| i as f64 * std::f64::consts::PI / 64.0) {
            let v = from_real_rows(2, 1, &[theta.cos(), theta.sin()]);
            let k = (&v * v.adjoint()).scale(2.0);
            let c = secrecy_capacity_cov(&hb, &he, &k).unwrap().capacity_bits;
            assert!(r.capacity_lower_bound >= c - 1e-9);
        }
    }

    #[test]
    fn rejects_bad_power() {
        let h = identity(2);
        assert!(power_constrained_capacity(&h, &h, 0.0, 1, 0).is_err());
        assert!(power_constrained_capacity(&h, &h, f64::NAN, 1, 0).is_err());
    }
}
