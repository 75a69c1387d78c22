use crate::decomp::{complete_unitary, GtdFactors, RANK_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{check_finite, fro, real, CMatrix};

const SVD_MAX_ITER: usize = 10_000;

/// Singular value decomposition `A = U Σ V†` with full unitary `U` (`M×M`),
/// `V` (`N×N`) and singular values non-increasing on the diagonal of `Σ`.
pub fn svd(a: &CMatrix) -> Result<GtdFactors> {
    check_finite(a, "matrix")?;
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::Domain(format!(
            "matrix must have at least as many rows as columns (got {m}x{n})"
        )));
    }
    let dec = a
        .clone()
        .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let u_thin = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested V");
    let sigma = dec.singular_values;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let threshold = RANK_THRESHOLD * fro(a);
    let smallest = sigma[order[n - 1]];
    if !(smallest > threshold) {
        return Err(Error::RankDeficient {
            pivot: smallest,
            threshold,
        });
    }

    let mut u1 = CMatrix::zeros(m, n);
    let mut v = CMatrix::zeros(n, n);
    let mut t = CMatrix::zeros(m, n);
    for (dst, &src) in order.iter().enumerate() {
        u1.set_column(dst, &u_thin.column(src));
        v.set_column(dst, &v_t.row(src).adjoint());
        t[(dst, dst)] = real(sigma[src]);
    }
    let u = if m == n { u1 } else { complete_unitary(&u1) };
    Ok(GtdFactors { u, t, v })
}
