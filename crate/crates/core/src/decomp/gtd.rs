use crate::decomp::majorization::majorization_violation;
use crate::decomp::{svd, GtdFactors};
use crate::error::{Error, Result};
use crate::linalg::{real, CMatrix, C64};

/// Two diagonal entries closer than this (relative) are treated as equal.
const EQUAL_TOL: f64 = 1e-13;

/// Generalized triangular decomposition `A = U T V†` with `diag(T) = target`
/// (in the given order).
///
/// Exists iff `σ(A) ⪰ target`. The construction starts from the SVD and walks
/// down the diagonal: at step `k` it brings a singular value at least
/// `target[k]` and one at most `target[k]` next to each other and applies a
/// pair of 2×2 rotations that plants `target[k]` on the diagonal. The trailing
/// block stays diagonal throughout.
pub fn gtd(a: &CMatrix, target: &[f64]) -> Result<GtdFactors> {
    let n = a.ncols();
    if target.len() != n {
        return Err(Error::Domain(format!(
            "target diagonal has length {}, expected {n}",
            target.len()
        )));
    }
    let f = svd(a)?;
    let sigma = f.diagonal();
    if let Some(prefix) = majorization_violation(&sigma, target)? {
        return Err(Error::Majorization { prefix });
    }

    let m = a.nrows();
    let mut r = f.t.view((0, 0), (n, n)).into_owned();
    let mut u = f.u;
    let mut v = f.v;

    for k in 0..n.saturating_sub(1) {
        let tk = target[k];
        match choose_pair(&r, k, target) {
            Step::Equal(e) => swap_index(&mut r, &mut u, &mut v, k, e),
            Step::Rotate(p, q) => {
                swap_index(&mut r, &mut u, &mut v, k, p);
                let q = if q == k { p } else { q };
                swap_index(&mut r, &mut u, &mut v, k + 1, q);
                rotate(&mut r, &mut u, &mut v, k, tk);
            }
        }
    }

    let mut t = CMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..=j {
            t[(i, j)] = r[(i, j)];
        }
        t[(j, j)] = real(r[(j, j)].re);
    }
    Ok(GtdFactors { u, t, v })
}

/// Geometric mean decomposition: a GTD whose diagonal is constant at the
/// geometric mean of the singular values.
pub fn gmd(a: &CMatrix) -> Result<GtdFactors> {
    let f = svd(a)?;
    let sigma = f.diagonal();
    let n = sigma.len();
    let mean = (sigma.iter().map(|s| s.ln()).sum::<f64>() / n as f64).exp();
    gtd(a, &vec![mean; n])
}

enum Step {
    Equal(usize),
    Rotate(usize, usize),
}

fn choose_pair(r: &CMatrix, k: usize, target: &[f64]) -> Step {
    let n = r.nrows();
    let tk = target[k];
    let vals: Vec<(usize, f64)> = (k..n).map(|j| (j, r[(j, j)].re)).collect();

    if let Some(&(e, _)) = vals.iter().find(|(_, x)| (x - tk).abs() <= EQUAL_TOL * tk) {
        return Step::Equal(e);
    }
    let above: Vec<(usize, f64)> = vals.iter().copied().filter(|(_, x)| *x > tk).collect();
    let below: Vec<(usize, f64)> = vals.iter().copied().filter(|(_, x)| *x < tk).collect();
    // Only reachable through rounding at the majorization boundary.
    if above.is_empty() {
        let (e, _) = vals.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        return Step::Equal(e);
    }
    if below.is_empty() {
        let (e, _) = vals.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        return Step::Equal(e);
    }

    let closest_above = *above.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let closest_below = *below.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();

    let feasible = |p: (usize, f64), q: (usize, f64)| -> bool {
        let mut rest: Vec<f64> = vals
            .iter()
            .filter(|(j, _)| *j != p.0 && *j != q.0)
            .map(|(_, x)| *x)
            .collect();
        rest.push(p.1 * q.1 / tk);
        matches!(majorization_violation(&rest, &target[k + 1..]), Ok(None))
    };

    if feasible(closest_above, closest_below) {
        return Step::Rotate(closest_above.0, closest_below.0);
    }
    for &p in &above {
        for &q in &below {
            if feasible(p, q) {
                return Step::Rotate(p.0, q.0);
            }
        }
    }
    Step::Rotate(closest_above.0, closest_below.0)
}

/// Symmetric permutation of indices `i` and `j`.
fn swap_index(r: &mut CMatrix, u: &mut CMatrix, v: &mut CMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    r.swap_rows(i, j);
    r.swap_columns(i, j);
    u.swap_columns(i, j);
    v.swap_columns(i, j);
}

/// With `δ₁ = R[k,k] > t > δ₂ = R[k+1,k+1]` and a diagonal trailing block,
/// rewrites the 2×2 block at `k` as `[t x; 0 δ₁δ₂/t]`.
fn rotate(r: &mut CMatrix, u: &mut CMatrix, v: &mut CMatrix, k: usize, t: f64) {
    let d1 = r[(k, k)].re;
    let d2 = r[(k + 1, k + 1)].re;
    let c = ((t * t - d2 * d2) / (d1 * d1 - d2 * d2)).clamp(0.0, 1.0).sqrt();
    let s = (1.0 - c * c).max(0.0).sqrt();

    // Left rotation Q = (1/t)[cδ₁ −sδ₂; sδ₂ cδ₁], applied as Qᵀ from the left.
    let q00 = c * d1 / t;
    let q01 = -s * d2 / t;
    let q10 = s * d2 / t;
    let q11 = c * d1 / t;

    let n = r.ncols();
    for j in 0..n {
        let a = r[(k, j)];
        let b = r[(k + 1, j)];
        r[(k, j)] = a * q00 + b * q10;
        r[(k + 1, j)] = a * q01 + b * q11;
    }
    mix_columns(r, k, c, s);
    mix_columns(v, k, c, s);

    for i in 0..u.nrows() {
        let a = u[(i, k)];
        let b = u[(i, k + 1)];
        u[(i, k)] = a * q00 + b * q10;
        u[(i, k + 1)] = a * q01 + b * q11;
    }

    r[(k + 1, k)] = C64::new(0.0, 0.0);
    r[(k, k)] = real(r[(k, k)].norm());
    r[(k + 1, k + 1)] = real(r[(k + 1, k + 1)].re);
}

/// Columns `k, k+1` ← `[col_k col_{k+1}] · [c −s; s c]`.
fn mix_columns(m: &mut CMatrix, k: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let a = m[(i, k)];
        let b = m[(i, k + 1)];
        m[(i, k)] = a * c + b * s;
        m[(i, k + 1)] = b * c - a * s;
    }
}
