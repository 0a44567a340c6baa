//! The constant `κ(p,n)`, convergence studies of nonlocal functionals as
//! the kernel concentrates, limit extrapolation and the Sobolev membership
//! verdict.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::field::SampledField;
use crate::geometry::Domain;
use crate::mollifiers::RdatiFamily;
use crate::nonlocal::{bbm_functional_strided, gagliardo_functional_strided, gagliardo_via_fractional, nu_min, EnergyParams};
use crate::spaces::{norm, SpaceSpec};

/// Minimum number of schedule points.
pub const MIN_SCHEDULE: usize = 4;
/// Points used by the extrapolation fit.
pub const FIT_POINTS: usize = 4;
/// Admissible range of the fitted rate exponent.
pub const BETA_RANGE: (f64, f64) = (0.5, 2.0);

/// `κ(p,n) = ∫_{S^(n-1)} |e·ω|^p dσ(ω) = 2 π^((n-1)/2) Γ((p+1)/2) / Γ((p+n)/2)`.
pub fn kappa(p: f64, n: usize) -> f64 {
    if n == 1 {
        // the Gamma factors cancel
        return 2.0;
    }
    let nf = n as f64;
    let log = std::f64::consts::LN_2 + 0.5 * (nf - 1.0) * std::f64::consts::PI.ln() + ln_gamma(0.5 * (p + 1.0))
        - ln_gamma(0.5 * (p + nf));
    log.exp()
}

/// `κ(p,n)^(1/p) ‖ |∇f| ‖_X`.
pub fn sobolev_target(f: &SampledField, p: f64, spec: &SpaceSpec) -> Result<f64> {
    let grad = f.gradient_magnitude()?;
    Ok(kappa(p, f.grid().dim()).powf(1.0 / p) * norm(spec, &grad)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// RDATI kernels `rho_nu`, schedule in `nu`.
    #[default]
    Rdati,
    /// Gagliardo kernels `|x-y|^(-n-sp)` scaled by `(1-s)^(1/p)`, schedule in `s`.
    Gagliardo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

/// How a finite limit is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Extrapolated limit within tolerance of the target.
    ExactLimit,
    /// Ratio to the target stays bounded (for norms that are not absolutely
    /// continuous, where only two-sided bounds hold).
    BoundedRatio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Divergence {
    Diverging,
}

/// Extrapolated limit: a number, or the marker `"diverging"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Limit {
    Finite(f64),
    Marker(Divergence),
}

/// Least-squares fit `v(ν) = L + C ν^β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub limit: f64,
    pub coefficient: f64,
    pub beta: f64,
    /// Root-mean-square residual over the fitted points.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub mode: Mode,
    pub p: f64,
    pub dim: usize,
    pub space: String,
    pub criterion: Criterion,
    /// `ν` values (rdati) or `s` values (gagliardo), in evaluation order.
    pub schedule: Vec<f64>,
    pub functional_values: Vec<f64>,
    pub target: Option<f64>,
    pub extrapolated_limit: Option<Limit>,
    pub fit: Option<Fit>,
    pub relative_error: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Direct minus fractional-family route at each `s` (gagliardo mode, when
    /// requested).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route_defects: Option<Vec<f64>>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub note: String,
}

/// Tuning of [`convergence_study`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StudyOptions {
    /// Evaluate the outer norm on every `stride`-th point.
    pub stride: usize,
    /// Relative tolerance for a member verdict.
    pub tolerance: f64,
    /// Divergence needs `last > factor · first`.
    pub divergence_factor: f64,
    /// ... and strictly increasing values over this many trailing points.
    pub monotone_tail: usize,
    /// Bounded-ratio criterion: largest admissible spread `max/min` of the
    /// ratio to the target over the fitted points.
    pub ratio_spread: f64,
    /// Gagliardo mode: also evaluate through the fractional family.
    pub check_routes: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            stride: 1,
            tolerance: 0.03,
            divergence_factor: 10.0,
            monotone_tail: 5,
            ratio_spread: 2.0,
            check_routes: false,
        }
    }
}

/// Everything a study needs besides the options.
#[derive(Clone, Debug)]
pub struct Study<'a> {
    pub field: &'a SampledField,
    pub p: f64,
    pub spec: &'a SpaceSpec,
    pub family: &'a RdatiFamily,
    pub domain: &'a Domain,
    pub schedule: &'a [f64],
    pub mode: Mode,
}

/// Fits `L + C ν^β` to `(nu, v)` by a grid search over `β` with linear least
/// squares for `(L, C)`, refined by golden-section search.
pub fn fit_power_model(nu: &[f64], v: &[f64]) -> Option<Fit> {
    if nu.len() < 3 || nu.len() != v.len() {
        return None;
    }
    let solve = |beta: f64| -> (f64, f64, f64) {
        let m = nu.len() as f64;
        let x: Vec<f64> = nu.iter().map(|t| t.powf(beta)).collect();
        let mx = x.iter().sum::<f64>() / m;
        let my = v.iter().sum::<f64>() / m;
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let sxy: f64 = x.iter().zip(v).map(|(a, b)| (a - mx) * (b - my)).sum();
        let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let l = my - c * mx;
        let sse: f64 = x.iter().zip(v).map(|(a, b)| (l + c * a - b).powi(2)).sum();
        (l, c, sse)
    };
    let (lo, hi) = BETA_RANGE;
    let steps = 150;
    let mut best = (lo, f64::INFINITY);
    for k in 0..=steps {
        let beta = lo + (hi - lo) * k as f64 / steps as f64;
        let sse = solve(beta).2;
        if sse < best.1 {
            best = (beta, sse);
        }
    }
    let dh = (hi - lo) / steps as f64;
    let (mut a, mut b) = ((best.0 - dh).max(lo), (best.0 + dh).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c1 = b - g * (b - a);
        let c2 = a + g * (b - a);
        if solve(c1).2 <= solve(c2).2 {
            b = c2;
        } else {
            a = c1;
        }
    }
    let mid = 0.5 * (a + b);
    let beta = if solve(mid).2 <= best.1 { mid } else { best.0 };
    let (l, c, sse) = solve(beta);
    Some(Fit {
        limit: l,
        coefficient: c,
        beta,
        residual: (sse / nu.len() as f64).sqrt(),
    })
}

/// Kendall rank correlation (tau-b) between two samples.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    let (mut conc, mut disc, mut tx, mut ty) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[i] - x[j]).signum() * f64::from(x[i] != x[j]);
            let b = (y[i] - y[j]).signum() * f64::from(y[i] != y[j]);
            if a == 0.0 && b == 0.0 {
                continue;
            } else if a == 0.0 {
                tx += 1.0;
            } else if b == 0.0 {
                ty += 1.0;
            } else if a * b > 0.0 {
                conc += 1.0;
            } else {
                disc += 1.0;
            }
        }
    }
    let denom = ((conc + disc + tx) * (conc + disc + ty)).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (conc - disc) / denom
    }
}

/// `last > factor · first` and strictly increasing over the last `tail`
/// points (values listed in schedule order, i.e. as the kernel concentrates).
pub fn is_diverging(values: &[f64], factor: f64, tail: usize) -> bool {
    let (Some(&first), Some(&last)) = (values.first(), values.last()) else {
        return false;
    };
    let start = values.len().saturating_sub(tail.max(2));
    last > factor * first && values[start..].windows(2).all(|w| w[1] > w[0])
}

/// Evaluates the functional along the schedule and classifies the limit.
pub fn convergence_study(study: &Study, opts: &StudyOptions) -> Result<ConvergenceReport> {
    let Study {
        field,
        p,
        spec,
        family,
        domain,
        schedule,
        mode,
    } = *study;
    if schedule.len() < MIN_SCHEDULE {
        return Err(Error::ScheduleTooShort {
            min: MIN_SCHEDULE,
            got: schedule.len(),
        });
    }
    if !(opts.tolerance > 0.0) {
        return Err(invalid("tolerance", "must be positive"));
    }
    let nus: Vec<f64> = match mode {
        Mode::Rdati => schedule.to_vec(),
        Mode::Gagliardo => {
            if let Some(&s) = schedule.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
                return Err(invalid("schedule", format!("s = {s} outside (0, 1)")));
            }
            schedule.iter().map(|s| 1.0 - s).collect()
        }
    };
    if nus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid(
            "schedule",
            match mode {
                Mode::Rdati => "nu values must be strictly decreasing",
                Mode::Gagliardo => "s values must be strictly increasing",
            },
        ));
    }
    spec.validate()?;
    let n = domain.dim();
    let h = field.grid().spacing();
    let mut warnings = Vec::new();
    for &nu in &nus {
        if nu < nu_min(h, p) {
            warnings.push(format!(
                "nu = {nu} below nu_min = 4hp = {}; quadrature error not controlled",
                nu_min(h, p)
            ));
        }
    }
    let params: Vec<Option<EnergyParams>> = match mode {
        Mode::Rdati => nus
            .iter()
            .map(|&nu| EnergyParams::new(p, *family, nu, domain.clone()).map(Some))
            .collect::<Result<_>>()?,
        Mode::Gagliardo => vec![None; nus.len()],
    };
    let values: Vec<f64> = schedule
        .par_iter()
        .zip(&params)
        .map(|(&t, par)| match par {
            Some(par) => bbm_functional_strided(field, par, spec, opts.stride),
            None => gagliardo_functional_strided(field, p, t, spec, domain, opts.stride),
        })
        .collect::<Result<_>>()?;
    let route_defects = if mode == Mode::Gagliardo && opts.check_routes {
        let routed: Vec<f64> = schedule
            .par_iter()
            .map(|&s| gagliardo_via_fractional(field, p, s, spec, domain, opts.stride))
            .collect::<Result<_>>()?;
        Some(values.iter().zip(&routed).map(|(a, b)| a - b).collect())
    } else {
        None
    };

    let target = if field.has_gradients() {
        let full = sobolev_target(field, p, spec)?;
        Some(match mode {
            Mode::Rdati => full,
            Mode::Gagliardo => full / p.powf(1.0 / p),
        })
    } else {
        None
    };
    let criterion = if spec.is_absolutely_continuous() {
        Criterion::ExactLimit
    } else {
        Criterion::BoundedRatio
    };

    let k = values.len();
    let fit = fit_power_model(&nus[k - FIT_POINTS..], &values[k - FIT_POINTS..]);
    let diverging = is_diverging(&values, opts.divergence_factor, opts.monotone_tail);
    let all_zero = values.iter().all(|&v| v == 0.0);
    let limit = if all_zero { Some(0.0) } else { fit.map(|f| f.limit) };
    let relative_error = match (limit, target) {
        (Some(l), Some(t)) if t != 0.0 => Some((l - t).abs() / t.abs()),
        (Some(l), Some(_)) => Some(l.abs()),
        _ => None,
    };
    let (verdict, note) = if diverging {
        (
            Verdict::NonMember,
            format!(
                "values grew by more than {}x and increased over the last {} points",
                opts.divergence_factor, opts.monotone_tail
            ),
        )
    } else {
        match (criterion, target, relative_error) {
            (Criterion::ExactLimit, Some(_), Some(e)) if e <= opts.tolerance => {
                (Verdict::Member, format!("extrapolated limit within {} of the target", opts.tolerance))
            }
            (Criterion::BoundedRatio, Some(t), _) if t > 0.0 || all_zero => {
                let ratios: Vec<f64> = values[k - FIT_POINTS..].iter().map(|v| v / t).collect();
                let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
                if all_zero || (lo > 0.0 && hi / lo <= opts.ratio_spread) {
                    (Verdict::Member, format!("ratio to target bounded (spread <= {})", opts.ratio_spread))
                } else {
                    (Verdict::Inconclusive, "ratio to target not yet stable".to_string())
                }
            }
            (_, None, _) => (Verdict::Inconclusive, "no gradient available and no divergence detected".to_string()),
            _ => (Verdict::Inconclusive, "neither the limit nor the divergence criterion holds".to_string()),
        }
    };
    let note = format!("numerical diagnosis, not a proof: {note}");
    Ok(ConvergenceReport {
        mode,
        p,
        dim: n,
        space: spec.label(),
        criterion,
        schedule: schedule.to_vec(),
        functional_values: values,
        target,
        extrapolated_limit: if diverging {
            Some(Limit::Marker(Divergence::Diverging))
        } else {
            limit.map(Limit::Finite)
        },
        fit,
        relative_error,
        tolerance: opts.tolerance,
        verdict,
        route_defects,
        warnings,
        note,
    })
}

/// Geometric schedule `start · ratio^k`, `k = 0..count`.
pub fn geometric_schedule(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

impl ConvergenceReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rows `nu_or_s,value,target,ratio`; target and ratio are empty when no
    /// target is known.
    pub fn write_series_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["nu_or_s", "value", "target", "ratio"])?;
        for (t, v) in self.schedule.iter().zip(&self.functional_values) {
            let (target, ratio) = match self.target {
                Some(tg) => (
                    tg.to_string(),
                    if tg != 0.0 { (v / tg).to_string() } else { String::new() },
                ),
                None => (String::new(), String::new()),
            };
            w.write_record([t.to_string(), v.to_string(), target, ratio])?;
        }
        w.flush()?;
        Ok(())
    }
}
