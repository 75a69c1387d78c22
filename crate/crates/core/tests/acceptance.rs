//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p wtd-core --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use wtd_core::decomp::{
    gmd, gsvd_diagonal, gsvd_triangular, gtd, joint_triangularize, majorizes, ql, qr,
    svd,
};
use wtd_core::linalg::{
    fro, from_real_rows, identity, max_below_diagonal, unitarity_residual, CMatrix,
};
use wtd_core::random::{complex_gaussian, haar_unitary, random_hpd, real_gaussian, substream};
use wtd_core::scheme::{
    build_broadcast_plan, build_dpc_plan, build_sic_plan, build_wiretap_plan, simulate_dpc,
    simulate_leakage, simulate_sic, PrecoderMode,
};
use wtd_core::secrecy::{
    broadcast_region, channel_gsv, effective_mmse_matrix, gaussian_mi, gsv_monotonicity_check,
    matrix_sqrt, power_constrained_capacity, secrecy_capacity_cov, secrecy_mi_difference,
    verify_truncation,
};
use wtd_core::Error;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// The shared wiretap instances of criteria 2–4: 50 draws with
/// `N_A ∈ {2, 3}` and `K̄ = I`.
fn wiretap_instances() -> Vec<(CMatrix, CMatrix)> {
    (0..50)
        .map(|i| {
            let mut rng = substream(1000, i);
            let na = 2 + (i as usize % 2);
            let nb = 1 + (i as usize % 3);
            let ne = 1 + (i as usize / 3 % 3);
            (complex_gaussian(&mut rng, nb, na), complex_gaussian(&mut rng, ne, na))
        })
        .collect()
}

fn criterion_1() -> Outcome {
    struct Row {
        worst_residual: f64,
        gsvd_norm: f64,
        gmd_spread: f64,
        gtd_disagreements: usize,
        gtd_checks: usize,
        below_diagonal: f64,
    }
    let rows: Vec<Row> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(1001, i);
            let n = 1 + (i as usize % 8);
            let m = n + (i as usize / 8 % (9 - n));
            let a = complex_gaussian(&mut rng, m, n);
            let a2 = complex_gaussian(&mut rng, n + (i as usize % 3).min(8 - n), n);

            let mut worst = 0.0f64;
            let mut below = 0.0f64;
            let f = qr(&a).unwrap();
            worst = worst.max(f.relative_residual(&a)).max(unitarity_residual(&f.u));
            below = below.max(max_below_diagonal(&f.t));
            let l = ql(&a).unwrap();
            worst = worst.max(fro(&(&l.u * &l.l - &a)) / fro(&a)).max(unitarity_residual(&l.u));
            let s = svd(&a).unwrap();
            worst = worst.max(s.relative_residual(&a)).max(unitarity_residual(&s.v));
            let g = gmd(&a).unwrap();
            worst = worst.max(g.relative_residual(&a)).max(unitarity_residual(&g.u));
            below = below.max(max_below_diagonal(&g.t));
            let d = g.diagonal();
            let spread = d.iter().cloned().fold(0.0, f64::max) / d.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;

            let gd = gsvd_diagonal(&a, &a2).unwrap();
            let (r1, r2) = gd.relative_residuals(&a, &a2);
            worst = worst.max(r1).max(r2);
            let gt = gsvd_triangular(&a, &a2).unwrap();
            let (r1, r2) = gt.relative_residuals(&a, &a2);
            worst = worst.max(r1).max(r2).max(unitarity_residual(&gt.va));
            below = below.max(max_below_diagonal(&gt.t1)).max(max_below_diagonal(&gt.t2));

            // GTD gate: feasible targets (QR diagonals of rotated A), their 1%
            // prefix violations, and random product-matched targets.
            let sigma = s.diagonal();
            let mut disagreements = 0;
            let mut checks = 0;
            let mut check = |t: &[f64]| {
                let feasible = majorizes(&sigma, t).unwrap();
                let ok = match gtd(&a, t) {
                    Ok(f) => {
                        let fine = f.relative_residual(&a) <= 1e-9
                            && f.diagonal().iter().zip(t).all(|(x, y)| (x - y).abs() <= 1e-8 * y);
                        if !fine {
                            disagreements += 1;
                        }
                        true
                    }
                    Err(Error::Majorization { .. }) => false,
                    Err(e) => panic!("unexpected gtd error {e}"),
                };
                checks += 1;
                if ok != feasible {
                    disagreements += 1;
                }
            };
            let w = haar_unitary(&mut rng, n);
            let mut t = qr(&(&a * w)).unwrap().diagonal();
            t.rotate_left(i as usize % n);
            check(&t);
            if n > 1 {
                let mut bad = sigma.clone();
                bad[0] *= 1.01;
                bad[n - 1] /= 1.01;
                check(&bad);
                let logs: Vec<f64> = (0..n).map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5).collect();
                let shift = (sigma.iter().map(|x| x.ln()).sum::<f64>() - logs.iter().map(|l| 2.0 * l).sum::<f64>()) / n as f64;
                let random_t: Vec<f64> = logs.iter().map(|l| (2.0 * l + shift).exp()).collect();
                check(&random_t);
            }

            Row {
                worst_residual: worst,
                gsvd_norm: gd.normalization_residual(),
                gmd_spread: spread,
                gtd_disagreements: disagreements,
                gtd_checks: checks,
                below_diagonal: below,
            }
        })
        .collect();
    let worst = rows.iter().map(|r| r.worst_residual).fold(0.0, f64::max);
    let norm = rows.iter().map(|r| r.gsvd_norm).fold(0.0, f64::max);
    let spread = rows.iter().map(|r| r.gmd_spread).fold(0.0, f64::max);
    let below = rows.iter().map(|r| r.below_diagonal).fold(0.0, f64::max);
    let dis: usize = rows.iter().map(|r| r.gtd_disagreements).sum();
    let checks: usize = rows.iter().map(|r| r.gtd_checks).sum();
    outcome(
        worst <= 1e-9 && norm <= 1e-9 && spread <= 1e-7 && dis == 0 && below == 0.0,
        format!(
            "200 cases: residual/unitarity {worst:.2e}, GSVD normalization {norm:.2e}, \
             GMD spread {spread:.2e}, below-diagonal {below:e}, GTD gate {dis}/{checks} disagreements"
        ),
    )
}

fn criterion_2(instances: &[(CMatrix, CMatrix)]) -> Outcome {
    let rows: Vec<(usize, f64, f64)> = instances
        .par_iter()
        .enumerate()
        .map(|(i, (hb, he))| {
            let n = hb.ncols();
            let r = secrecy_capacity_cov(hb, he, &identity(n)).unwrap();
            let mut violations = 0;
            let mut worst_gap = f64::INFINITY;
            for s in 0..10_000u64 {
                let mut rng = substream(2000 + i as u64, s);
                let k = wtd_core::random::sample_dominated(&mut rng, &identity(n));
                let d = secrecy_mi_difference(hb, he, &k).unwrap();
                if d > r.capacity_bits + 1e-8 {
                    violations += 1;
                }
                worst_gap = worst_gap.min(r.capacity_bits - d);
            }
            let at_star = secrecy_mi_difference(hb, he, &r.k_star.k).unwrap();
            (violations, worst_gap, (at_star - r.capacity_bits).abs())
        })
        .collect();
    let violations: usize = rows.iter().map(|r| r.0).sum();
    let gap = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let eq = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    outcome(
        violations == 0 && eq <= 1e-8,
        format!("50 instances x 1e4 K: {violations} violations (min C - I_S = {gap:.2e}), |I_S(K*) - C| <= {eq:.2e}"),
    )
}

fn criterion_3(instances: &[(CMatrix, CMatrix)]) -> Outcome {
    let rows: Vec<(f64, f64)> = instances
        .par_iter()
        .map(|(hb, he)| {
            let n = hb.ncols();
            let rep = verify_truncation(hb, he, &identity(n)).unwrap();
            let min = rep.gsv_kstar.iter().cloned().fold(f64::INFINITY, f64::min);
            (rep.max_deviation, min)
        })
        .collect();
    let dev = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    outcome(
        dev <= 1e-7 && min >= 1.0 - 1e-7,
        format!("max |mu(K*) - clip(mu(Kbar))| = {dev:.2e}, min mu(K*) = {min:.12}"),
    )
}

fn criterion_4(instances: &[(CMatrix, CMatrix)]) -> Outcome {
    let mut violations = 0;
    let mut margin = f64::INFINITY;
    for (i, (hb, he)) in instances.iter().enumerate() {
        let n = hb.ncols();
        let rep = gsv_monotonicity_check(hb, he, &identity(n), 1000, 3000 + i as u64).unwrap();
        violations += rep.violations;
        margin = margin.min(rep.worst_margin);
    }
    outcome(
        violations == 0,
        format!("50 instances x 1e3 K: {violations} violations, worst margin {margin:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let rows: Vec<(f64, f64, f64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(4000, i);
            let n = 2 + (i as usize % 3);
            let hb = complex_gaussian(&mut rng, n + (i as usize % 2), n);
            let he = complex_gaussian(&mut rng, n, n);
            let k = random_hpd(&mut rng, n, 0.1);
            let mi = gaussian_mi(&hb, &k).unwrap();
            let is = secrecy_mi_difference(&hb, &he, &k).unwrap();
            let b = matrix_sqrt(&k).unwrap();
            let gb = effective_mmse_matrix(&hb, &b).unwrap();
            let ge = effective_mmse_matrix(&he, &b).unwrap();
            let (mut rate_err, mut tilde_err, mut sinr_err) = (0.0f64, 0.0f64, 0.0f64);
            let mut sec_err = 0.0f64;
            for _ in 0..50 {
                let va = haar_unitary(&mut rng, n);
                let jt = joint_triangularize(&gb, &ge, &va).unwrap();
                let sb: f64 = jt.diag1.iter().map(|x| 2.0 * x.log2()).sum();
                let sr: f64 = jt.ratios().iter().map(|x| 2.0 * x.log2()).sum();
                rate_err = rate_err.max((sb - mi).abs());
                sec_err = sec_err.max((sr - is).abs());

                let plan = build_sic_plan(&hb, &k, &va).unwrap();
                let direct = plan.u_tilde.adjoint() * plan.stream_channel(&hb);
                tilde_err = (direct - &plan.t_tilde).iter().map(|z| z.norm()).fold(tilde_err, f64::max);
                for (s, bi) in plan.filtered_sinr().iter().zip(&plan.diag_b) {
                    sinr_err = sinr_err.max((bi * bi - 1.0 - s).abs());
                }
            }
            (rate_err.max(sec_err), tilde_err, sinr_err, sec_err)
        })
        .collect();
    let rate = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let tilde = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let sinr = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    outcome(
        rate <= 1e-8 && tilde <= 1e-9 && sinr <= 1e-9,
        format!(
            "20 instances x 50 V_A: rate sums {rate:.2e}, T~ identity {tilde:.2e} (entrywise), \
             b^2 - 1 - SINR {sinr:.2e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let rows: Vec<(f64, f64)> = (0..30u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(5000, i);
            let n = 2 + (i as usize % 3);
            let hb = complex_gaussian(&mut rng, n, n);
            let he = complex_gaussian(&mut rng, 1 + (i as usize % n), n);
            let kbar = random_hpd(&mut rng, n, 0.1);
            let totals: Vec<f64> = PrecoderMode::ALL
                .iter()
                .map(|m| build_wiretap_plan(&hb, &he, &kbar, *m).unwrap().total_secret_rate())
                .collect();
            let spread = totals.iter().cloned().fold(f64::MIN, f64::max) - totals.iter().cloned().fold(f64::MAX, f64::min);

            let p = build_wiretap_plan(&hb, &he, &kbar, PrecoderMode::SvdEve).unwrap();
            let heb = &he * &p.base.b_sqrt;
            let (d2, _) = wtd_core::linalg::hermitian_eigen(&(heb.adjoint() * &heb));
            let svd_eve_err = p
                .diag_e
                .iter()
                .zip(&d2)
                .map(|(e, d)| (e * e - 1.0 - d.max(0.0)).abs())
                .fold(0.0, f64::max);
            (spread, svd_eve_err)
        })
        .collect();
    let spread = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let svd_eve_err = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(
        spread <= 1e-8 && svd_eve_err <= 1e-9,
        format!("30 instances, 4 modes: total secret rate spread {spread:.2e}; svd_eve |e^2 - 1 - d^2| {svd_eve_err:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    let mut brackets = 0;
    let mut bracket_fail = 0;
    for i in 0..6u64 {
        let mut rng = substream(6000, i);
        let n = 2 + (i as usize % 2);
        let hb = complex_gaussian(&mut rng, n, n);
        let he = complex_gaussian(&mut rng, n, n);
        let mode = PrecoderMode::ALL[i as usize % 4];
        let dpc = build_dpc_plan(&hb, &he, &identity(n), mode).unwrap();
        let sic = build_wiretap_plan(&hb, &he, &identity(n), mode).unwrap();
        for (a, b) in dpc.rates_bits.iter().zip(&sic.secret_rates_bits) {
            worst = worst.max((a - b).abs());
        }
        let rep = simulate_dpc(&dpc, &hb, 100_000, 6100 + i).unwrap();
        for s in &rep.streams {
            if s.alpha_residuals.is_some() {
                brackets += 1;
                if s.alpha_bracket_ok != Some(true) {
                    bracket_fail += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-9 && bracket_fail == 0 && brackets > 0,
        format!("6 instances: |R_DPC - R_SIC| <= {worst:.2e}; alpha bracket +-10%: {bracket_fail}/{brackets} failures"),
    )
}

fn criterion_8() -> Outcome {
    let rows: Vec<(f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(7000, i);
            let n = 2 + (i as usize % 2);
            let hb = complex_gaussian(&mut rng, 1 + (i as usize % 3), n);
            let hc = complex_gaussian(&mut rng, 1 + (i as usize / 3 % 3), n);
            let kbar = if i % 2 == 0 { identity(n) } else { random_hpd(&mut rng, n, 0.1) };
            let plan = build_broadcast_plan(&hb, &hc, &kbar).unwrap();
            let cb = secrecy_capacity_cov(&hb, &hc, &kbar).unwrap().capacity_bits;
            let cc = secrecy_capacity_cov(&hc, &hb, &kbar).unwrap().capacity_bits;
            let region = broadcast_region(&hb, &hc, &kbar).unwrap();
            let corner = (plan.bob_total() - cb)
                .abs()
                .max((plan.charlie_total() - cc).abs())
                .max((region.rb_max - cb).abs())
                .max((region.rc_max - cc).abs());
            let fwd = channel_gsv(&hb, &hc, &kbar).unwrap();
            let inv = channel_gsv(&hc, &hb, &kbar).unwrap();
            let inversion = (0..n)
                .map(|j| (inv[j].log2() + fwd[n - 1 - j].log2()).abs())
                .fold(0.0, f64::max);
            (corner, inversion)
        })
        .collect();
    let corner = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let inversion = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(
        corner <= 1e-8 && inversion <= 1e-8,
        format!("50 instances: corner error {corner:.2e}, GSV inversion {inversion:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let samples = 100_000;
    let mut sinr_rel = 0.0f64;
    let mut band_fail = 0;
    let mut streams = 0;
    let mut leak_rel = 0.0f64;
    let mut leak_fail = 0;
    let mut leak_streams = 0;
    let mut deterministic = true;
    for i in 0..4u64 {
        let mut rng = substream(8000, i);
        let n = 3;
        let hb = complex_gaussian(&mut rng, n, n);
        let he = complex_gaussian(&mut rng, n, n);
        let va = haar_unitary(&mut rng, n);
        let plan = build_sic_plan(&hb, &identity(n), &va).unwrap();
        let rep = simulate_sic(&plan, &hb, samples, 8100 + i, true).unwrap();
        for s in &rep.streams {
            streams += 1;
            sinr_rel = sinr_rel.max(s.relative_error);
            if !s.within_band || s.relative_error > 0.02 {
                band_fail += 1;
            }
        }
        let again = simulate_sic(&plan, &hb, samples, 8100 + i, true).unwrap();
        deterministic &= serde_json::to_vec(&rep).unwrap() == serde_json::to_vec(&again).unwrap();

        let wt = build_wiretap_plan(&hb, &he, &identity(n), PrecoderMode::ALL[i as usize]).unwrap();
        let leak = simulate_leakage(&wt, &he, samples, 8200 + i).unwrap();
        for s in &leak.streams {
            leak_streams += 1;
            leak_rel = leak_rel.max(s.relative_error);
            if s.leakage_ok != Some(true) {
                leak_fail += 1;
            }
        }
        let again = simulate_leakage(&wt, &he, samples, 8200 + i).unwrap();
        deterministic &= serde_json::to_vec(&leak).unwrap() == serde_json::to_vec(&again).unwrap();
    }
    outcome(
        band_fail == 0 && leak_fail == 0 && deterministic,
        format!(
            "1e5 samples: SINR {band_fail}/{streams} outside 2%/3SE (max rel {sinr_rel:.2e}); \
             leakage {leak_fail}/{leak_streams} outside 3% (max rel {leak_rel:.2e}); byte-identical reruns: {deterministic}"
        ),
    )
}

/// `K̄(a, θ) = P·R(θ) diag(a, 1−a) R(θ)ᵀ`.
fn grid_kbar(p: f64, a: f64, theta: f64) -> CMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    let r = from_real_rows(2, 2, &[c, -s, s, c]);
    let d = from_real_rows(2, 2, &[a * p, 0.0, 0.0, (1.0 - a) * p]);
    &r * d * r.transpose()
}

/// Exhaustive grid over `(a, θ) ∈ [0,1] × [0,π)`, refined twice around the
/// best point.
fn grid_oracle(hb: &CMatrix, he: &CMatrix, p: f64) -> f64 {
    let eval = |a: f64, t: f64| secrecy_capacity_cov(hb, he, &grid_kbar(p, a, t)).unwrap().capacity_bits;
    let steps = 200;
    let (mut a_lo, mut a_hi, mut t_lo, mut t_hi) = (0.0, 1.0, 0.0, PI);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for _ in 0..3 {
        let pts: Vec<(f64, f64, f64)> = (0..=steps)
            .into_par_iter()
            .flat_map_iter(|i| {
                let a = a_lo + (a_hi - a_lo) * i as f64 / steps as f64;
                (0..=steps).map(move |j| {
                    let t = t_lo + (t_hi - t_lo) * j as f64 / steps as f64;
                    (a, t)
                })
            })
            .map(|(a, t)| (eval(a, t), a, t))
            .collect();
        for p in pts {
            if p.0 > best.0 {
                best = p;
            }
        }
        let (da, dt) = ((a_hi - a_lo) / steps as f64 * 2.0, (t_hi - t_lo) / steps as f64 * 2.0);
        a_lo = (best.1 - da).max(0.0);
        a_hi = (best.1 + da).min(1.0);
        t_lo = best.2 - dt;
        t_hi = best.2 + dt;
    }
    best.0
}

fn criterion_10() -> Outcome {
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for i in 0..10u64 {
        let mut rng = substream(9000, i);
        let hb = real_gaussian(&mut rng, 2, 2);
        let he = real_gaussian(&mut rng, 2, 2);
        let grid = grid_oracle(&hb, &he, 2.0);
        let search = power_constrained_capacity(&hb, &he, 2.0, 8, 9100 + i).unwrap();
        let diff = search.capacity_lower_bound - grid;
        worst = worst.max(diff.abs());
        details.push(diff);
    }
    let min = details.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = details.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        worst <= 1e-3,
        format!("10 real 2x2 instances, P = 2: search - grid in [{min:.2e}, {max:.2e}]"),
    )
}

fn main() -> ExitCode {
    let instances = wiretap_instances();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("decomposition suite", Box::new(criterion_1)),
        ("capacity oracle equivalence", Box::new(|| criterion_2(&instances))),
        ("GSV truncation", Box::new(|| criterion_3(&instances))),
        ("GSV monotonicity", Box::new(|| criterion_4(&instances))),
        ("rate identities", Box::new(criterion_5)),
        ("precoder mode invariance", Box::new(criterion_6)),
        ("DPC equivalence", Box::new(criterion_7)),
        ("broadcast rectangle", Box::new(criterion_8)),
        ("Monte Carlo", Box::new(criterion_9)),
        ("power search vs grid", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {:>2} [{}] {name}: {} ({secs:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
