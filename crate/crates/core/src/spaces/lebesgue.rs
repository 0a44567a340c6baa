use crate::error::{Error, Result};
use crate::geometry::QuadratureGrid;
use crate::numeric::pairwise_sum;

/// `(Σ w_i |f_i|^q)^(1/q)`, evaluated with the values scaled by their
/// maximum so that large exponents do not overflow.
pub(super) fn lebesgue(abs: &[f64], weights: &[f64], q: f64) -> f64 {
    let m = abs.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let terms: Vec<f64> = abs
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v / m).powf(q))
        .collect();
    m * pairwise_sum(&terms).powf(1.0 / q)
}

/// Iterated mixed norm: integrate `|f|^r1` along the first axis, raise to
/// `r2 / r1` and integrate along the second axis, and so on.
pub(super) fn mixed(abs: &[f64], grid: &QuadratureGrid, r: &[f64]) -> Result<f64> {
    let axes = grid
        .tensor()
        .ok_or_else(|| Error::Incompatible("mixed norm requires a tensor grid".into()))?;
    if r.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: r.len(),
        });
    }
    let m = abs.iter().cloned().fold(0.0, f64::max);
    let mut cur: Vec<f64> = abs.iter().map(|v| v / m).collect();
    // points are stored first-axis-fastest, so each reduction leaves the
    // next axis contiguous
    for (k, &rk) in r.iter().enumerate() {
        let w = &axes.widths[k];
        let len = w.len();
        cur = cur
            .chunks_exact(len)
            .map(|line| {
                let terms: Vec<f64> = line.iter().zip(w).map(|(v, wi)| wi * v.powf(rk)).collect();
                pairwise_sum(&terms).powf(1.0 / rk)
            })
            .collect();
    }
    debug_assert_eq!(cur.len(), 1);
    Ok(m * cur[0])
}
