//! Morrey and Besov–Bourgain–Morrey norms.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::geometry::QuadratureGrid;
use crate::numeric::{dist, pairwise_sum, unit_ball_volume};

/// Number of radii in the ball search ladder.
pub(crate) const LADDER_RUNGS: usize = 12;

/// Geometric radii from `2h` up to (just beyond) the domain diameter.
pub(crate) fn radius_ladder(grid: &QuadratureGrid) -> Vec<f64> {
    let diameter = match grid.domain() {
        Some(d) => d.diameter(),
        None => {
            let (lo, hi) = grid.bounding_box();
            dist(&lo, &hi) + grid.spacing()
        }
    };
    let r0 = (2.0 * grid.spacing()).min(diameter);
    let ratio = (diameter / r0).powf(1.0 / (LADDER_RUNGS - 1) as f64);
    let mut out: Vec<f64> = (0..LADDER_RUNGS).map(|k| r0 * ratio.powi(k as i32)).collect();
    out[LADDER_RUNGS - 1] = diameter;
    out
}

/// `max over centers x_i and ladder radii ρ of |B(x,ρ)|^(1/α - 1/r) ‖f‖_{L^r(B(x,ρ))}`
pub(super) fn morrey(abs: &[f64], grid: &QuadratureGrid, alpha: f64, r: f64) -> f64 {
    let m = abs.iter().cloned().fold(0.0, f64::max);
    let radii = radius_ladder(grid);
    let n = grid.dim();
    let vol = unit_ball_volume(n);
    let w = grid.weights();
    let scaled: Vec<f64> = (0..abs.len()).map(|i| w[i] * (abs[i] / m).powf(r)).collect();
    let best = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let x = grid.point(c);
            let mut bins = vec![0.0; radii.len()];
            for (j, y) in grid.points().enumerate() {
                if scaled[j] == 0.0 {
                    continue;
                }
                let d = dist(x, y);
                let k = radii.partition_point(|&rho| rho <= d);
                if k < radii.len() {
                    bins[k] += scaled[j];
                }
            }
            let mut acc = 0.0;
            let mut best: f64 = 0.0;
            for (k, rho) in radii.iter().enumerate() {
                acc += bins[k];
                let ball = vol * rho.powi(n as i32);
                best = best.max(ball.powf(1.0 / alpha - 1.0 / r) * acc.powf(1.0 / r));
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    m * best
}

/// `{Σ_j [Σ_m (|Q_jm|^(1/p - 1/q) ‖f‖_{L^q(Q_jm)})^r]^(τ/r)}^(1/τ)` over dyadic
/// levels `|j| <= depth`; each grid point is assigned to the dyadic cube
/// containing it.
pub(super) fn bbmorrey(abs: &[f64], grid: &QuadratureGrid, q: f64, p: f64, r: f64, tau: f64, depth: i32) -> f64 {
    let m = abs.iter().cloned().fold(0.0, f64::max);
    let n = grid.dim();
    let w = grid.weights();
    let mut levels = Vec::new();
    for j in -depth..=depth {
        let scale = 2f64.powi(j);
        let mut cubes: BTreeMap<[i64; 3], f64> = BTreeMap::new();
        for (i, x) in grid.points().enumerate() {
            if abs[i] == 0.0 {
                continue;
            }
            let mut key = [0i64; 3];
            for k in 0..n {
                key[k] = (x[k] * scale).floor() as i64;
            }
            *cubes.entry(key).or_insert(0.0) += w[i] * (abs[i] / m).powf(q);
        }
        let side_factor = 2f64.powi(-j * n as i32).powf(1.0 / p - 1.0 / q);
        let terms: Vec<f64> = cubes
            .values()
            .map(|s| (side_factor * s.powf(1.0 / q)).powf(r))
            .collect();
        levels.push(pairwise_sum(&terms).powf(tau / r));
    }
    m * pairwise_sum(&levels).powf(1.0 / tau)
}
