//! Shared fixtures for the criterion benches.

use wtd_core::random::{complex_gaussian, substream};
use wtd_core::CMatrix;

/// Deterministic `rows × cols` complex Gaussian matrix.
pub fn channel(seed: u64, rows: usize, cols: usize) -> CMatrix {
    complex_gaussian(&mut substream(seed, 0), rows, cols)
}

/// A Bob/Eve pair with `n` antennas everywhere.
pub fn pair(seed: u64, n: usize) -> (CMatrix, CMatrix) {
    let mut rng = substream(seed, 1);
    (complex_gaussian(&mut rng, n, n), complex_gaussian(&mut rng, n, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(channel(3, 4, 2), channel(3, 4, 2));
        assert_eq!(pair(3, 2), pair(3, 2));
        assert_ne!(pair(3, 2).0, pair(3, 2).1);
    }
}
