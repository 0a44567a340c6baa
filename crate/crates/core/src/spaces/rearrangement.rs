//! Decreasing rearrangement of sampled fields and the Lorentz norm built
//! on it.

use crate::field::SampledField;
use crate::numeric::pairwise_sum;

/// Right-continuous, non-increasing step function on `[0, ∞)`: equal to
/// `levels[k]` on `[breaks[k], breaks[k + 1])` and zero past the last break.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct StepFunction {
    pub breaks: Vec<f64>,
    pub levels: Vec<f64>,
}

impl StepFunction {
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::INFINITY;
        }
        // first break strictly greater than t
        let k = self.breaks.partition_point(|&b| b <= t);
        if k == 0 || k > self.levels.len() {
            0.0
        } else {
            self.levels[k - 1]
        }
    }

    /// `∫_0^∞ f*(t)^p dt`.
    pub fn moment(&self, p: f64) -> f64 {
        let terms: Vec<f64> = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, l)| l.powf(p) * (self.breaks[k + 1] - self.breaks[k]))
            .collect();
        pairwise_sum(&terms)
    }
}

fn rearrange(abs: &[f64], weights: &[f64]) -> StepFunction {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    // stable: ties keep their original index order
    order.sort_by(|&a, &b| abs[b].total_cmp(&abs[a]));
    let mut breaks = Vec::with_capacity(abs.len() + 1);
    let mut levels = Vec::with_capacity(abs.len());
    let mut t = 0.0;
    breaks.push(t);
    for i in order {
        t += weights[i];
        breaks.push(t);
        levels.push(abs[i]);
    }
    StepFunction { breaks, levels }
}

/// `f*`, obtained by sorting `|f|` in decreasing order and laying the cell
/// measures end to end.
pub fn decreasing_rearrangement(field: &SampledField) -> StepFunction {
    let abs: Vec<f64> = field.values().iter().map(|v| v.abs()).collect();
    rearrange(&abs, field.grid().weights())
}

/// `{∫_0^∞ [t^(1/r) f*(t)]^tau dt/t}^(1/tau)`, integrated exactly on each step.
pub(super) fn lorentz(abs: &[f64], weights: &[f64], r: f64, tau: f64) -> f64 {
    let m = abs.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let step = rearrange(abs, weights);
    let e = tau / r;
    let terms: Vec<f64> = step
        .levels
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let (a, b) = (step.breaks[k], step.breaks[k + 1]);
            (l / m).powf(tau) * (r / tau) * (b.powf(e) - a.powf(e))
        })
        .collect();
    m * pairwise_sum(&terms).powf(1.0 / tau)
}
