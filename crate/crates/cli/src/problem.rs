//! Problem files: channel matrices and run settings as JSON.
//!
//! Complex entries are `[re, im]` pairs (a bare number is a real entry) in
//! row-major nested arrays. `kbar` is either a matrix or `"identity"`.

use serde::{Deserialize, Serialize};
use wtd_core::linalg::{c64, identity, CMatrix, C64};
use wtd_core::secrecy::CovarianceSpec;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> C64 {
        match e {
            Entry::Complex([re, im]) => c64(re, im),
            Entry::Real(re) => c64(re, 0.0),
        }
    }
}

pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KbarSpec {
    Keyword(String),
    Matrix(MatrixRows),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub h_b: Option<MatrixRows>,
    pub h_e: Option<MatrixRows>,
    pub h_c: Option<MatrixRows>,
    pub kbar: Option<KbarSpec>,
    pub power: Option<f64>,
    pub budget: Option<usize>,
    pub mode: Option<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Target diagonal for `decompose --kind gtd`.
    pub target: Option<Vec<f64>>,
}

/// Converts nested rows into a matrix, naming `field` in every error.
pub fn to_matrix(rows: &MatrixRows, field: &str) -> Result<CMatrix, CliError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(CliError::input(format!("field '{field}': matrix must be non-empty")));
    }
    if let Some(i) = rows.iter().position(|row| row.len() != c) {
        return Err(CliError::input(format!(
            "field '{field}': row {i} has {} entries, expected {c}",
            rows[i].len()
        )));
    }
    let m = CMatrix::from_fn(r, c, |i, j| rows[i][j].into());
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::input(format!("field '{field}': entries must be finite")));
    }
    Ok(m)
}

pub fn from_matrix(m: &CMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Entry::Complex([m[(i, j)].re, m[(i, j)].im])).collect())
        .collect()
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("problem file: {e}")))
    }

    pub fn h_b(&self) -> Result<CMatrix, CliError> {
        let rows = self.h_b.as_ref().ok_or_else(|| CliError::input("field 'h_b' is required"))?;
        to_matrix(rows, "h_b")
    }

    /// The second channel: `h_e` or `h_c` (exactly one may be given).
    pub fn second(&self) -> Result<Option<(CMatrix, &'static str)>, CliError> {
        match (&self.h_e, &self.h_c) {
            (Some(_), Some(_)) => Err(CliError::input("give only one of 'h_e' and 'h_c'")),
            (Some(rows), None) => Ok(Some((to_matrix(rows, "h_e")?, "h_e"))),
            (None, Some(rows)) => Ok(Some((to_matrix(rows, "h_c")?, "h_c"))),
            (None, None) => Ok(None),
        }
    }

    /// Second channel with its column count checked against `h_b`.
    pub fn pair(&self) -> Result<(CMatrix, CMatrix), CliError> {
        let hb = self.h_b()?;
        let (other, name) = self
            .second()?
            .ok_or_else(|| CliError::input("field 'h_e' (or 'h_c') is required"))?;
        if other.ncols() != hb.ncols() {
            return Err(CliError::input(format!(
                "field '{name}': has {} columns but 'h_b' has {}",
                other.ncols(),
                hb.ncols()
            )));
        }
        Ok((hb, other))
    }

    /// `K̄` (defaults to the identity), validated as Hermitian PSD `N × N`.
    pub fn kbar(&self, n: usize) -> Result<CMatrix, CliError> {
        let k = match &self.kbar {
            None => identity(n),
            Some(KbarSpec::Keyword(w)) if w == "identity" => identity(n),
            Some(KbarSpec::Keyword(w)) => {
                return Err(CliError::input(format!(
                    "field 'kbar': unknown keyword '{w}' (expected \"identity\" or a matrix)"
                )))
            }
            Some(KbarSpec::Matrix(rows)) => to_matrix(rows, "kbar")?,
        };
        if k.shape() != (n, n) {
            return Err(CliError::input(format!(
                "field 'kbar': must be {n}x{n} to match the channel columns, got {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        CovarianceSpec::new(k)
            .map(|s| s.k)
            .map_err(|e| CliError::input(format!("field 'kbar': {e}")))
    }
}
