//! Brute-force reference computations, written independently of the main
//! engines so they can validate them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::field::TestFunction;
use crate::spaces::StepFunction;

/// Monte Carlo estimate of `∫_{S^(n-1)} |ω_1|^p dσ(ω)` from normalized
/// Gaussian directions. `p = 0` yields the sphere area.
pub fn mc_sphere_moment(p: f64, n: usize, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    if n == 0 {
        return Err(invalid("n", "dimension must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    let mut z = vec![0.0f64; n];
    for _ in 0..samples {
        let mut r2 = 0.0;
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
            r2 += *v * *v;
        }
        let c = z[0].abs() / r2.sqrt();
        acc += if p == 0.0 { 1.0 } else { c.powf(p) };
    }
    let nf = n as f64;
    let area = 2.0 * std::f64::consts::PI.powf(nf / 2.0) / gamma(nf / 2.0);
    Ok(area * acc / samples as f64)
}

/// Kernels understood by [`dense_1d_functional`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DenseKernel {
    /// `1/nu` on `(0, nu]`
    Bump { nu: f64 },
    /// `nu p (2R)^(-nu p) r^(nu p - 1)` on `(0, 2R]`
    Fractional { nu: f64, enclosing_radius: f64 },
    /// `(1 - s) r^(p - 1 - sp)`, i.e. the Gagliardo integrand including the
    /// `(1 - s)` prefactor raised to `p`
    Gagliardo { s: f64 },
}

impl DenseKernel {
    /// `∫_0^r k(t) dt`, one side of the origin.
    fn cumulative(&self, r: f64, p: f64) -> f64 {
        match *self {
            DenseKernel::Bump { nu } => r.min(nu) / nu,
            DenseKernel::Fractional { nu, enclosing_radius } => {
                let top = 2.0 * enclosing_radius;
                (r.min(top) / top).powf(nu * p)
            }
            DenseKernel::Gagliardo { s } => (1.0 - s) * r.powf(p * (1.0 - s)) / (p * (1.0 - s)),
        }
    }

    fn reach(&self) -> f64 {
        match *self {
            DenseKernel::Bump { nu } => nu,
            DenseKernel::Fractional { enclosing_radius, .. } => 2.0 * enclosing_radius,
            DenseKernel::Gagliardo { .. } => f64::INFINITY,
        }
    }
}

/// Direct double Riemann sum for
/// `‖ [∫_a^b |f(·) - f(y)|^p / |· - y|^p k(|· - y|) dy]^(1/p) ‖_{L^q(a,b)}`
/// on midpoints of spacing `resolution / 10`. Each cell is weighted by the
/// exact kernel integral over it; the cell of `x` itself carries the mean
/// difference quotient of its two neighbours.
pub fn dense_1d_functional(
    f: &TestFunction,
    p: f64,
    kernel: DenseKernel,
    q: f64,
    interval: (f64, f64),
    resolution: f64,
) -> Result<f64> {
    let (a, b) = interval;
    if !(b > a) || !(resolution > 0.0) || !(p >= 1.0) || !(q >= 1.0) {
        return Err(invalid("dense", "need a < b, resolution > 0, p >= 1, q >= 1"));
    }
    let h = resolution / 10.0;
    let n = ((b - a) / h).round().max(2.0) as usize;
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f.eval(&[x])).collect();
    let reach = ((kernel.reach() / h).ceil() as usize + 1).min(n);
    // exact kernel mass of the cell at offset d, divided by (d h)^p
    let table: Vec<f64> = (0..reach)
        .map(|d| {
            if d == 0 {
                return 0.0;
            }
            let d = d as f64;
            let mass = kernel.cumulative((d + 0.5) * h, p) - kernel.cumulative((d - 0.5) * h, p);
            mass / (d * h).powf(p)
        })
        .collect();
    let own = 2.0 * kernel.cumulative(0.5 * h, p) / h.powf(p);
    let energy: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let jump = |j: usize| (fs[i] - fs[j]).abs().powf(p);
            let lo = i.saturating_sub(reach - 1);
            let hi = (i + reach).min(n);
            let mut acc = 0.0;
            for j in lo..hi {
                if j != i && fs[j] != fs[i] {
                    acc += jump(j) * table[i.abs_diff(j)];
                }
            }
            let neighbours: Vec<f64> = [i.checked_sub(1), (i + 1 < n).then_some(i + 1)]
                .into_iter()
                .flatten()
                .map(jump)
                .collect();
            if !neighbours.is_empty() {
                acc += own * neighbours.iter().sum::<f64>() / neighbours.len() as f64;
            }
            acc
        })
        .collect();
    let s: f64 = energy.iter().map(|e| h * e.powf(q / p)).sum();
    Ok(s.powf(1.0 / q))
}

/// `f*(t) = inf{s : |{|f| > s}| <= t}` evaluated straight from the
/// distribution function: every value is tested as a level and every
/// attained measure as a breakpoint, with quadratic cost and no sorting of
/// the values.
pub fn rearrangement_oracle(values: &[f64], weights: &[f64]) -> Result<StepFunction> {
    if values.len() != weights.len() {
        return Err(invalid("weights", "length differs from values"));
    }
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let distribution = |s: f64| -> f64 {
        abs.iter()
            .zip(weights)
            .filter(|(v, _)| **v > s)
            .map(|(_, w)| *w)
            .sum()
    };
    let total: f64 = weights.iter().sum();
    let mut candidates: Vec<f64> = abs.clone();
    candidates.push(0.0);
    let star = |t: f64| -> f64 {
        candidates
            .iter()
            .filter(|&&c| distribution(c) <= t)
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };
    let mut breaks: Vec<f64> = candidates.iter().map(|&c| distribution(c)).collect();
    breaks.push(0.0);
    breaks.push(total);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let levels: Vec<f64> = breaks[..breaks.len() - 1].iter().map(|&t| star(t)).collect();
    Ok(StepFunction { breaks, levels })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::Rng;

    use super::*;

    #[test]
    fn sphere_moments() {
        let v = mc_sphere_moment(2.0, 2, 1_000_000, 1).unwrap();
        assert!((v - PI).abs() / PI < 5e-3);
        let v = mc_sphere_moment(2.0, 3, 1_000_000, 2).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() / (4.0 * PI / 3.0) < 5e-3);
        assert!((mc_sphere_moment(0.0, 3, 10, 3).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn dense_linear_bump() {
        let f = TestFunction::Linear { v: vec![1.0] };
        let v = dense_1d_functional(&f, 2.0, DenseKernel::Bump { nu: 0.1 }, 2.0, (0.0, 1.0), 1e-3).unwrap();
        // interior value √2 except a boundary layer of width nu
        assert!(v < 2f64.sqrt() && v > 0.9 * 2f64.sqrt(), "{v}");
        let c = TestFunction::Constant { c: 4.0 };
        assert_eq!(dense_1d_functional(&c, 2.0, DenseKernel::Bump { nu: 0.1 }, 2.0, (0.0, 1.0), 1e-2).unwrap(), 0.0);
    }

    #[test]
    fn dense_indicator_grows() {
        let f = TestFunction::IndicatorHalfspace { normal: vec![1.0], offset: 0.0 };
        let k = |nu| DenseKernel::Fractional { nu, enclosing_radius: 2.0 };
        let a = dense_1d_functional(&f, 2.0, k(0.1), 2.0, (-1.0, 1.0), 4e-3).unwrap();
        let b = dense_1d_functional(&f, 2.0, k(0.05), 2.0, (-1.0, 1.0), 4e-3).unwrap();
        assert!(b > a);
    }

    #[test]
    fn rearrangement_small() {
        let s = rearrangement_oracle(&[3.0, 1.0, 2.0], &[1.0; 3]).unwrap();
        assert_eq!(s.breaks, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.levels, vec![3.0, 2.0, 1.0]);
        let c = rearrangement_oracle(&[2.0; 4], &[0.5; 4]).unwrap();
        assert_eq!(c.breaks, vec![0.0, 2.0]);
        assert_eq!(c.levels, vec![2.0]);
    }

    #[test]
    fn rearrangement_matches_sorting() {
        use crate::geometry::QuadratureGrid;
        use crate::spaces::decreasing_rearrangement;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let n = rng.random_range(1..30);
            // few distinct values so ties occur
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(-3i32..=3) as f64).collect();
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(1..4) as f64 * 0.25).collect();
            let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
            let grid = std::sync::Arc::new(QuadratureGrid::from_points(1, pts, weights.clone(), Some(1.0)).unwrap());
            let field = crate::field::SampledField::new(grid, values.clone()).unwrap();
            let fast = decreasing_rearrangement(&field);
            let slow = rearrangement_oracle(&values, &weights).unwrap();
            let mut probes: Vec<f64> = fast.breaks.iter().chain(&slow.breaks).cloned().collect();
            let mids: Vec<f64> = probes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            probes.extend(mids);
            for t in probes {
                assert_eq!(fast.eval(t), slow.eval(t), "t = {t}");
            }
        }
    }
}
