use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use wtd_core::decomp::{gmd, gsvd_diagonal, gsvd_triangular, gtd, ql, qr, svd, GtdFactors};
use wtd_core::linalg::{fro, unitarity_residual, CMatrix};
use wtd_core::scheme::{
    build_broadcast_plan, build_dpc_plan, build_sic_plan, build_wiretap_plan, select_precoder,
    simulate_broadcast, simulate_dpc, simulate_leakage, simulate_sic, PrecoderMode,
    SimulationReport,
};
use wtd_core::secrecy::{broadcast_region, power_constrained_capacity, secrecy_capacity_cov};

use crate::error::{CliError, EXIT_BAND};
use crate::problem::{from_matrix, ProblemFile};
use crate::report::{num, opt, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Qr,
    Ql,
    Svd,
    Gmd,
    Gtd,
    Gsvd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Sic,
    Wiretap,
    Dpc,
    Broadcast,
}

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_BUDGET: usize = 8;

/// Flag values; each overrides the matching problem-file field.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub power: Option<f64>,
    pub budget: Option<usize>,
    pub genie: bool,
}

/// What a command produced: report results, the CSV table and the exit code.
pub struct Output {
    pub settings: Value,
    pub results: Value,
    pub table: Table,
    pub code: u8,
}

fn mode(p: &ProblemFile, o: &Overrides) -> Result<PrecoderMode, CliError> {
    let name = o.mode.as_deref().or(p.mode.as_deref()).unwrap_or("gsvd");
    name.parse()
        .map_err(|_| CliError::input(format!("field 'mode': unknown precoder mode '{name}' (expected gsvd, svd_eve, svd_bob or gmd_bob)")))
}

fn seed(p: &ProblemFile, o: &Overrides) -> u64 {
    o.seed.or(p.seed).unwrap_or(0)
}

fn m(x: &CMatrix) -> Value {
    json!(from_matrix(x))
}

fn factors(f: &GtdFactors, a: &CMatrix) -> Value {
    json!({
        "u": m(&f.u),
        "t": m(&f.t),
        "v": m(&f.v),
        "diagonal": f.diagonal(),
        "reconstruction_residual": f.relative_residual(a),
        "unitarity_residual": unitarity_residual(&f.u).max(unitarity_residual(&f.v)),
    })
}

fn diagonal_table(d: &[f64]) -> Table {
    let mut t = Table::new(&["index", "diagonal"]);
    for (i, x) in d.iter().enumerate() {
        t.push(vec![i.to_string(), num(*x)]);
    }
    t
}

pub fn decompose(p: &ProblemFile, kind: Kind) -> Result<Output, CliError> {
    let a = p.h_b()?;
    let settings = json!({ "kind": kind });
    let (results, table) = match kind {
        Kind::Qr | Kind::Svd | Kind::Gmd | Kind::Gtd => {
            let f = match kind {
                Kind::Qr => qr(&a)?,
                Kind::Svd => svd(&a)?,
                Kind::Gmd => gmd(&a)?,
                _ => {
                    let target = p
                        .target
                        .as_ref()
                        .ok_or_else(|| CliError::input("field 'target' is required for kind gtd"))?;
                    gtd(&a, target)?
                }
            };
            (factors(&f, &a), diagonal_table(&f.diagonal()))
        }
        Kind::Ql => {
            let f = ql(&a)?;
            let residual = fro(&(&f.u * &f.l - &a)) / fro(&a);
            let results = json!({
                "u": m(&f.u),
                "l": m(&f.l),
                "diagonal": f.diagonal(),
                "reconstruction_residual": residual,
                "unitarity_residual": unitarity_residual(&f.u),
            });
            (results, diagonal_table(&f.diagonal()))
        }
        Kind::Gsvd => {
            let (a1, a2) = p.pair()?;
            let d = gsvd_diagonal(&a1, &a2)?;
            let t = gsvd_triangular(&a1, &a2)?;
            let mu = d.ratios();
            let mut table = Table::new(&["index", "mu", "b", "e"]);
            for i in 0..mu.len() {
                table.push(vec![i.to_string(), num(mu[i]), num(t.diag1[i]), num(t.diag2[i])]);
            }
            let results = json!({
                "gsv": mu,
                "diagonal_form": {
                    "u1": m(&d.u1), "u2": m(&d.u2), "x": m(&d.x), "l1": m(&d.l1), "l2": m(&d.l2),
                    "normalization_residual": d.normalization_residual(),
                    "reconstruction_residuals": d.relative_residuals(&a1, &a2),
                },
                "triangular_form": {
                    "u1": m(&t.u1), "u2": m(&t.u2), "va": m(&t.va), "t1": m(&t.t1), "t2": m(&t.t2),
                    "diag1": t.diag1, "diag2": t.diag2,
                    "reconstruction_residuals": t.relative_residuals(&a1, &a2),
                },
            });
            (results, table)
        }
    };
    Ok(Output { settings, results, table, code: 0 })
}

pub fn capacity(p: &ProblemFile, o: &Overrides) -> Result<Output, CliError> {
    let (hb, he) = p.pair()?;
    let kbar = p.kbar(hb.ncols())?;
    let mode = mode(p, o)?;
    let r = secrecy_capacity_cov(&hb, &he, &kbar)?;
    let plan = build_wiretap_plan(&hb, &he, &kbar, mode)?;

    let mut table = Table::new(&["index", "mu", "b", "e", "secret_rate_bits", "fictitious_rate_bits"]);
    let mut streams = Vec::new();
    for i in 0..r.gsv.len() {
        let row = (r.gsv[i], plan.base.diag_b[i], plan.diag_e[i], plan.secret_rates_bits[i], plan.fictitious_rates_bits[i]);
        table.push(vec![i.to_string(), num(row.0), num(row.1), num(row.2), num(row.3), num(row.4)]);
        streams.push(json!({
            "index": i, "mu": row.0, "b": row.1, "e": row.2,
            "secret_rate_bits": row.3, "fictitious_rate_bits": row.4,
        }));
    }
    let mut results = json!({
        "capacity_bits": r.capacity_bits,
        "lb": r.lb,
        "gsv": r.gsv,
        "k_star": m(&r.k_star.k),
        "kbar": m(&kbar),
        "streams": streams,
    });
    let mut settings = json!({ "mode": mode });

    let power = o.power.or(p.power);
    if let Some(power) = power {
        let budget = o.budget.or(p.budget).unwrap_or(DEFAULT_BUDGET);
        let seed = seed(p, o);
        let s = power_constrained_capacity(&hb, &he, power, budget, seed)
            .map_err(|e| CliError::input(format!("field 'power': {e}")))?;
        results["power_search"] = json!({
            "capacity_lower_bound": s.capacity_lower_bound,
            "kbar": m(&s.kbar),
            "evaluations": s.evaluations,
            "restarts": s.restarts,
        });
        settings["power"] = json!(power);
        settings["budget"] = json!(budget);
        settings["seed"] = json!(seed);
    }
    Ok(Output { settings, results, table, code: 0 })
}

pub fn region(p: &ProblemFile) -> Result<Output, CliError> {
    let (hb, hc) = p.pair()?;
    let kbar = p.kbar(hb.ncols())?;
    let r = broadcast_region(&hb, &hc, &kbar)?;
    let plan = build_broadcast_plan(&hb, &hc, &kbar)?;
    let mut table = Table::new(&["index", "mu", "user", "rate_bits"]);
    for (i, mu) in plan.gsv.iter().enumerate() {
        let (user, rate) = if i < plan.lb {
            ("bob", plan.bob_rates_bits[i])
        } else {
            ("charlie", plan.charlie_rates_bits[i - plan.lb])
        };
        table.push(vec![i.to_string(), num(*mu), user.into(), num(rate)]);
    }
    let results = json!({
        "rb_max": r.rb_max,
        "rc_max": r.rc_max,
        "gsv": plan.gsv,
        "lb": plan.lb,
        "lc": plan.lc,
        "bob_rates_bits": plan.bob_rates_bits,
        "charlie_rates_bits": plan.charlie_rates_bits,
    });
    Ok(Output { settings: json!({}), results, table, code: 0 })
}

fn stream_rows(table: &mut Table, part: &str, r: &SimulationReport) {
    for s in &r.streams {
        table.push(vec![
            part.into(),
            s.index.to_string(),
            num(s.analytic_sinr),
            num(s.empirical_sinr),
            num(s.relative_error),
            num(s.standard_error),
            s.within_band.to_string(),
            num(s.analytic_rate_bits),
            num(s.empirical_rate_bits),
            opt(s.analytic_leakage_bits),
            opt(s.leakage_bits),
            opt(s.alpha),
            opt(s.alpha_empirical),
            opt(s.rate_u_bits),
            opt(s.rate_u_empirical_bits),
        ]);
    }
}

const SIM_HEADER: [&str; 15] = [
    "part",
    "index",
    "analytic_sinr",
    "empirical_sinr",
    "relative_error",
    "standard_error",
    "within_band",
    "analytic_rate_bits",
    "empirical_rate_bits",
    "analytic_leakage_bits",
    "leakage_bits",
    "alpha",
    "alpha_empirical",
    "rate_u_bits",
    "rate_u_empirical_bits",
];

pub fn simulate(p: &ProblemFile, scheme: Scheme, o: &Overrides) -> Result<Output, CliError> {
    let samples = o.samples.or(p.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::input("field 'samples': must be at least 1"));
    }
    let seed = seed(p, o);
    let mode = mode(p, o)?;
    let mut table = Table::new(&SIM_HEADER);
    let mut settings = json!({ "scheme": scheme, "samples": samples, "seed": seed, "mode": mode });

    let (results, pass) = match scheme {
        Scheme::Sic => {
            let hb = p.h_b()?;
            let n = hb.ncols();
            let kbar = p.kbar(n)?;
            let he = match p.second()? {
                Some((he, name)) if he.ncols() != n => {
                    return Err(CliError::input(format!("field '{name}': column count must match 'h_b'")))
                }
                Some((he, _)) => he,
                None => CMatrix::zeros(1, n),
            };
            let va = select_precoder(&hb, &he, &kbar, mode)?;
            let plan = build_sic_plan(&hb, &kbar, &va)?;
            let rep = simulate_sic(&plan, &hb, samples, seed, o.genie)?;
            stream_rows(&mut table, "bob", &rep);
            settings["genie"] = json!(o.genie);
            let results = json!({
                "plan": {
                    "va": m(&plan.va),
                    "t_tilde": m(&plan.t_tilde),
                    "diag_b": plan.diag_b,
                    "sinr": plan.sinr,
                    "rates_bits": plan.rates_bits,
                },
                "simulation": rep,
            });
            // Only genie runs are held to the bands.
            (results, !o.genie || rep.bands_pass())
        }
        Scheme::Wiretap => {
            let (hb, he) = p.pair()?;
            let kbar = p.kbar(hb.ncols())?;
            let plan = build_wiretap_plan(&hb, &he, &kbar, mode)?;
            let bob = simulate_sic(&plan.base, &hb, samples, seed, true)?;
            let leak = simulate_leakage(&plan, &he, samples, seed)?;
            stream_rows(&mut table, "bob", &bob);
            stream_rows(&mut table, "eve", &leak);
            let results = json!({
                "plan": {
                    "capacity_bits": plan.capacity_bits,
                    "diag_b": plan.base.diag_b,
                    "diag_e": plan.diag_e,
                    "secret_rates_bits": plan.secret_rates_bits,
                    "fictitious_rates_bits": plan.fictitious_rates_bits,
                    "snr_pairs": plan.snr_pairs(),
                },
                "bob": bob,
                "leakage": leak,
            });
            (results, bob.bands_pass() && leak.leakage_pass())
        }
        Scheme::Dpc => {
            let (hb, he) = p.pair()?;
            let kbar = p.kbar(hb.ncols())?;
            let plan = build_dpc_plan(&hb, &he, &kbar, mode)?;
            let rep = simulate_dpc(&plan, &hb, samples, seed)?;
            stream_rows(&mut table, "bob", &rep);
            let results = json!({
                "plan": {
                    "alpha": plan.alpha,
                    "rates_bits": plan.rates_bits,
                    "fictitious_rates_bits": plan.fictitious_rates_bits,
                    "rate_u_bits": plan.rate_u_bits,
                    "presubtraction": m(&plan.presubtraction),
                },
                "simulation": rep,
            });
            (results, rep.passed())
        }
        Scheme::Broadcast => {
            let (hb, hc) = p.pair()?;
            let kbar = p.kbar(hb.ncols())?;
            let plan = build_broadcast_plan(&hb, &hc, &kbar)?;
            let rep = simulate_broadcast(&plan, &hb, &hc, samples, seed)?;
            stream_rows(&mut table, "bob", &rep.bob);
            stream_rows(&mut table, "charlie", &rep.charlie);
            let pass = rep.passed();
            let results = json!({
                "plan": {
                    "lb": plan.lb,
                    "lc": plan.lc,
                    "gsv": plan.gsv,
                    "bob_rates_bits": plan.bob_rates_bits,
                    "charlie_rates_bits": plan.charlie_rates_bits,
                },
                "simulation": rep,
            });
            (results, pass)
        }
    };
    let mut results = results;
    results["bands_pass"] = json!(pass);
    Ok(Output {
        settings,
        results,
        table,
        code: if pass { 0 } else { EXIT_BAND },
    })
}
