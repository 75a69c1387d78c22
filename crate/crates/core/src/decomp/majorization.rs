use crate::error::{Error, Result};

/// Relative slack on prefix and total products.
pub const MAJORIZATION_SLACK: f64 = 1e-9;

fn sorted_desc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn check_inputs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "vectors must have equal lengths ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::Domain("vectors must be non-empty".into()));
    }
    if let Some(bad) = x.iter().chain(y).find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain(format!(
            "majorization needs positive finite entries (found {bad})"
        )));
    }
    Ok(())
}

/// First index (1-based) at which multiplicative majorization `x ⪰ y`
/// fails, or `None` when it holds.
///
/// Prefixes `1..N−1` compare sorted prefix products; prefix `N` stands for
/// the equal-product condition.
pub fn majorization_violation(x: &[f64], y: &[f64]) -> Result<Option<usize>> {
    check_inputs(x, y)?;
    let xs = sorted_desc(x);
    let ys = sorted_desc(y);
    let n = xs.len();
    let slack = (1.0 - MAJORIZATION_SLACK).ln();
    let mut sx = 0.0;
    let mut sy = 0.0;
    for l in 0..n - 1 {
        sx += xs[l].ln();
        sy += ys[l].ln();
        if sx - sy < slack {
            return Ok(Some(l + 1));
        }
    }
    sx += xs[n - 1].ln();
    sy += ys[n - 1].ln();
    if ((sx - sy).exp() - 1.0).abs() > MAJORIZATION_SLACK {
        return Ok(Some(n));
    }
    Ok(None)
}

/// Multiplicative majorization `x ⪰ y`: sorted prefix products of `x`
/// dominate those of `y` and the total products agree (relative slack
/// [`MAJORIZATION_SLACK`]).
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(majorization_violation(x, y)?.is_none())
}
