//! Luxemburg-type norms: Orlicz, variable exponent and Orlicz-slice.

use rayon::prelude::*;

use super::{ExponentField, OrliczFunction};
use crate::error::{invalid, Error, Result};
use crate::geometry::{NeighborIndex, QuadratureGrid};
use crate::numeric::{luxemburg_root, pairwise_sum, unit_ball_volume};

const MAX_BISECTIONS: usize = 200;

fn root(modular: impl Fn(f64) -> f64, start: f64) -> Result<f64> {
    luxemburg_root(modular, start, MAX_BISECTIONS).map_err(Error::Bracket)
}

fn max_abs(abs: &[f64]) -> f64 {
    abs.iter().cloned().fold(0.0, f64::max)
}

/// `inf{λ > 0 : Σ w Phi(|f| / λ) <= 1}`
pub(super) fn orlicz(abs: &[f64], weights: &[f64], phi: &OrliczFunction) -> Result<f64> {
    let m = max_abs(abs);
    if m == 0.0 {
        return Ok(0.0);
    }
    root(
        |lam| {
            let t: Vec<f64> = abs.iter().zip(weights).map(|(v, w)| w * phi.eval(v / lam)).collect();
            pairwise_sum(&t)
        },
        m,
    )
}

/// `inf{λ > 0 : Σ w (|f| / λ)^r(x) <= 1}`
pub(super) fn variable(abs: &[f64], grid: &QuadratureGrid, exponent: &ExponentField) -> Result<f64> {
    let r: Vec<f64> = grid.points().map(|x| exponent.eval(x)).collect();
    let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 1.0 && hi.is_finite()) {
        return Err(invalid("exponent", format!("need 1 < r- <= r+ < ∞ on the grid, got [{lo}, {hi}]")));
    }
    let m = max_abs(abs);
    if m == 0.0 {
        return Ok(0.0);
    }
    let w = grid.weights();
    root(
        |lam| {
            let t: Vec<f64> = (0..abs.len()).map(|i| w[i] * (abs[i] / lam).powf(r[i])).collect();
            pairwise_sum(&t)
        },
        m,
    )
}

/// `‖1_B‖_{L^Phi(R^n)}` for a ball of measure `measure`.
fn indicator_norm(phi: &OrliczFunction, measure: f64) -> Result<f64> {
    root(|lam| measure * phi.eval(1.0 / lam), 1.0)
}

/// `{∫ [‖f 1_B(x,t)‖_{L^Phi} / ‖1_B(x,t)‖_{L^Phi}]^r dx}^(1/r)` with `f`
/// extended by zero; `x` runs over a lattice of the grid spacing covering
/// the grid's bounding box enlarged by `t`.
pub(super) fn orlicz_slice(
    abs: &[f64],
    grid: &QuadratureGrid,
    phi: &OrliczFunction,
    r: f64,
    t: f64,
) -> Result<f64> {
    let n = grid.dim();
    let h = grid.spacing();
    let denom = indicator_norm(phi, unit_ball_volume(n) * t.powi(n as i32))?;
    let (mut lo, mut hi) = grid.bounding_box();
    for k in 0..n {
        lo[k] -= t;
        hi[k] += t;
    }
    let shape: Vec<usize> = (0..n).map(|k| ((hi[k] - lo[k]) / h).ceil() as usize + 1).collect();
    let total: usize = shape.iter().product();
    let index = NeighborIndex::new(grid, t.max(h));
    let w = grid.weights();
    let cell = h.powi(n as i32);
    let ratios: Vec<Result<f64>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let x: Vec<f64> = (0..n)
                .map(|k| {
                    let i = rem % shape[k];
                    rem /= shape[k];
                    lo[k] + i as f64 * h
                })
                .collect();
            let inside = index.within(&x, t);
            let m = inside.iter().map(|&j| abs[j]).fold(0.0, f64::max);
            if m == 0.0 {
                return Ok(0.0);
            }
            let local = root(
                |lam| {
                    let terms: Vec<f64> = inside.iter().map(|&j| w[j] * phi.eval(abs[j] / lam)).collect();
                    pairwise_sum(&terms)
                },
                m,
            )?;
            Ok(cell * (local / denom).powf(r))
        })
        .collect();
    let ratios: Vec<f64> = ratios.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&ratios).powf(1.0 / r))
}
