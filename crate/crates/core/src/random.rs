//! Seeded random matrix generators.
//!
//! Every Monte Carlo routine in the crate draws from [`substream`], which keys
//! a ChaCha8 generator by `(seed, stream)`. Work split across threads uses one
//! stream per block of samples, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::decomp::qr;
use crate::linalg::{diag_real, CMatrix, C64};

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw of CN(0,1): real and imaginary parts are independent N(0, 1/2).
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. CN(0,1) entries.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Matrix with i.i.d. N(0,1) real entries (zero imaginary part).
pub fn real_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), 0.0))
}

/// Haar-distributed unitary matrix (QR of a Gaussian matrix with a positive
/// triangular diagonal).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let g = complex_gaussian(rng, n, n);
        if let Ok(f) = qr(&g) {
            return f.u;
        }
    }
}

/// Random Hermitian positive-definite matrix `A A† + floor·I`.
pub fn random_hpd<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> CMatrix {
    let a = complex_gaussian(rng, n, n);
    &a * a.adjoint() + CMatrix::identity(n, n).scale(floor)
}

/// Random `W = QΛQ†` with Haar `Q` and eigenvalues uniform on `[0,1]`, so
/// that `0 ⪯ W ⪯ I`.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let q = haar_unitary(rng, n);
    let lambda: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    &q * diag_real(&lambda) * q.adjoint()
}

/// Samples `K = B W B†` with `B B† = K̄` and `W` from [`random_contraction`];
/// the result satisfies `0 ⪯ K ⪯ K̄`.
pub fn sample_dominated<R: Rng + ?Sized>(rng: &mut R, kbar_sqrt: &CMatrix) -> CMatrix {
    let w = random_contraction(rng, kbar_sqrt.ncols());
    kbar_sqrt * w * kbar_sqrt.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: u64 = substream(7, 3).random();
        let b: u64 = substream(7, 3).random();
        let c: u64 = substream(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = substream(1, 0);
        let q = haar_unitary(&mut rng, 5);
        assert!(unitarity_residual(&q) < 1e-12);
    }

    #[test]
    fn complex_normal_has_unit_power() {
        let mut rng = substream(11, 0);
        let n = 200_000;
        let p: f64 = (0..n).map(|_| complex_normal(&mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((p - 1.0).abs() < 0.01, "power {p}");
    }
}
