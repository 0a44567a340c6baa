//! Local and global generalized Herz norms with power weights `t^a`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::geometry::QuadratureGrid;
use crate::numeric::{dist, pairwise_sum};

/// Index `k` of the annulus `2^(k-1) <= d < 2^k`.
fn annulus(d: f64) -> i32 {
    let mut k = d.log2().floor() as i32 + 1;
    while 2f64.powi(k - 1) > d {
        k -= 1;
    }
    while 2f64.powi(k) <= d {
        k += 1;
    }
    k
}

fn local_scaled(scaled: &[f64], grid: &QuadratureGrid, p: f64, q: f64, a: f64, xi: &[f64]) -> f64 {
    let mut rings: BTreeMap<i32, f64> = BTreeMap::new();
    for (i, x) in grid.points().enumerate() {
        if scaled[i] == 0.0 {
            continue;
        }
        let d = dist(x, xi);
        if d == 0.0 {
            continue;
        }
        *rings.entry(annulus(d)).or_insert(0.0) += scaled[i];
    }
    let terms: Vec<f64> = rings
        .iter()
        .map(|(&k, s)| 2f64.powf(k as f64 * a * q) * s.powf(q / p))
        .collect();
    pairwise_sum(&terms).powf(1.0 / q)
}

fn scaled_terms(abs: &[f64], grid: &QuadratureGrid, p: f64) -> (f64, Vec<f64>) {
    let m = abs.iter().cloned().fold(0.0, f64::max);
    let w = grid.weights();
    (m, (0..abs.len()).map(|i| w[i] * (abs[i] / m).powf(p)).collect())
}

/// `{Σ_k ω(2^k)^q ‖f‖_{L^p(R_{ξ,k})}^q}^(1/q)`
pub(super) fn local(abs: &[f64], grid: &QuadratureGrid, p: f64, q: f64, a: f64, xi: &[f64]) -> f64 {
    let (m, scaled) = scaled_terms(abs, grid, p);
    m * local_scaled(&scaled, grid, p, q, a, xi)
}

/// Maximum of the local norm over a lattice of centers with step `step`
/// spanning the bounding box of the grid.
pub(super) fn global(abs: &[f64], grid: &QuadratureGrid, p: f64, q: f64, a: f64, step: f64) -> f64 {
    let (m, scaled) = scaled_terms(abs, grid, p);
    let n = grid.dim();
    let (lo, hi) = grid.bounding_box();
    let shape: Vec<usize> = (0..n).map(|k| ((hi[k] - lo[k]) / step).floor() as usize + 1).collect();
    let total: usize = shape.iter().product();
    let best = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let xi: Vec<f64> = (0..n)
                .map(|k| {
                    let i = rem % shape[k];
                    rem /= shape[k];
                    lo[k] + i as f64 * step
                })
                .collect();
            local_scaled(&scaled, grid, p, q, a, &xi)
        })
        .reduce(|| 0.0, f64::max);
    m * best
}

#[cfg(test)]
mod tests {
    use super::annulus;

    #[test]
    fn annulus_edges() {
        assert_eq!(annulus(0.5), 0);
        assert_eq!(annulus(0.999), 0);
        assert_eq!(annulus(1.0), 1);
        assert_eq!(annulus(0.25), -1);
        assert_eq!(annulus(3.0), 2);
    }
}
