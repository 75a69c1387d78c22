use crate::decomp::{GtdFactors, RANK_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{check_finite, fro, identity, real, CMatrix, C64};

/// Householder triangularization `A = Q R` with a full `M×M` unitary `Q` and
/// the phases of `R`'s diagonal pushed into `Q`.
///
/// Returns the factors and the smallest pivot. Zero columns are skipped,
/// leaving a zero pivot for the caller to reject.
fn householder(a: &CMatrix) -> (CMatrix, CMatrix, f64) {
    let (m, n) = a.shape();
    let mut r = a.clone();
    let mut q = identity(m);
    let steps = n.min(m);

    for k in 0..steps {
        let x = r.view((k, k), (m - k, 1)).into_owned();
        let norm_x = x.norm();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = x[(0, 0)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { real(1.0) };
        let alpha = -phase * norm_x;

        let mut v = x;
        v[(0, 0)] -= alpha;
        let vnorm = v.norm();
        if vnorm == 0.0 {
            continue;
        }
        v /= real(vnorm);

        // R[k.., k..] -= 2 v (v† R[k.., k..])
        {
            let mut sub = r.view_mut((k, k), (m - k, n - k));
            let w = v.adjoint() * &sub;
            sub -= (&v * w) * real(2.0);
        }
        // Q[:, k..] -= 2 (Q[:, k..] v) v†
        {
            let mut sub = q.view_mut((0, k), (m, m - k));
            let w = &sub * &v;
            sub -= (w * v.adjoint()) * real(2.0);
        }
    }

    // Positive real diagonal: R ← D* R, Q ← Q D with D = diag(phase(R_kk)).
    let mut min_pivot = f64::INFINITY;
    for k in 0..steps {
        let d = r[(k, k)];
        let mag = d.norm();
        min_pivot = min_pivot.min(mag);
        if mag > 0.0 {
            let ph = d / mag;
            let ph_conj = ph.conj();
            for j in 0..n {
                r[(k, j)] *= ph_conj;
            }
            for i in 0..m {
                q[(i, k)] *= ph;
            }
            r[(k, k)] = real(mag);
        }
    }
    for j in 0..n {
        for i in (j + 1)..m {
            r[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    (q, r, min_pivot)
}

fn check_tall(a: &CMatrix, what: &str) -> Result<()> {
    check_finite(a, what)?;
    if a.nrows() < a.ncols() {
        return Err(Error::Domain(format!(
            "{what} must have at least as many rows as columns (got {}x{})",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

fn check_rank(min_pivot: f64, a: &CMatrix) -> Result<()> {
    let threshold = RANK_THRESHOLD * fro(a);
    if !(min_pivot > threshold) {
        return Err(Error::RankDeficient {
            pivot: min_pivot,
            threshold,
        });
    }
    Ok(())
}

/// QR decomposition `A = U T` (so `V = I`), Householder-based, with a
/// strictly positive real diagonal in `T`.
pub fn qr(a: &CMatrix) -> Result<GtdFactors> {
    check_tall(a, "matrix")?;
    let (q, r, min_pivot) = householder(a);
    check_rank(min_pivot, a)?;
    Ok(GtdFactors {
        u: q,
        t: r,
        v: identity(a.ncols()),
    })
}

/// `A = U L` with `L` lower-triangular.
///
/// For an `M×N` input (`M ≥ N`) the nonzero part of `L` is its bottom `N×N`
/// block: `L[i, j] = 0` whenever `j > i − (M − N)`. The "diagonal" is
/// `L[M − N + i, i]`, strictly positive.
#[derive(Debug, Clone)]
pub struct QlFactors {
    pub u: CMatrix,
    pub l: CMatrix,
}

impl QlFactors {
    pub fn diagonal(&self) -> Vec<f64> {
        let (m, n) = self.l.shape();
        (0..n).map(|i| self.l[(m - n + i, i)].re).collect()
    }
}

/// QL decomposition, i.e. Gram–Schmidt over the columns from last to first.
///
/// Computed as the QR decomposition of the row- and column-reversed matrix.
pub fn ql(a: &CMatrix) -> Result<QlFactors> {
    check_tall(a, "matrix")?;
    let (m, n) = a.shape();
    let flipped = CMatrix::from_fn(m, n, |i, j| a[(m - 1 - i, n - 1 - j)]);
    let (q, r, min_pivot) = householder(&flipped);
    check_rank(min_pivot, a)?;
    // A = J_M Q' R' J_N = (J_M Q' J_M)(J_M R' J_N)
    let u = CMatrix::from_fn(m, m, |i, j| q[(m - 1 - i, m - 1 - j)]);
    let l = CMatrix::from_fn(m, n, |i, j| r[(m - 1 - i, n - 1 - j)]);
    Ok(QlFactors { u, l })
}

/// Extends an `M×N` matrix with orthonormal columns to an `M×M` unitary whose
/// first `N` columns match the input (up to rounding).
pub fn complete_unitary(q1: &CMatrix) -> CMatrix {
    let (q, _, _) = householder(q1);
    q
}
