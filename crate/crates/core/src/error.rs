use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Smallest triangular pivot fell below the rank threshold.
    #[error("matrix is rank deficient (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    RankDeficient { pivot: f64, threshold: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// `prefix` is 1-based. A prefix equal to the vector length means the
    /// total products differ.
    #[error("target diagonal is not majorized by the singular values (first violation at prefix {prefix})")]
    Majorization { prefix: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },
}
