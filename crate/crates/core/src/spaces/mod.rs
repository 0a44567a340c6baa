//! Norm engines for ball Banach function spaces restricted to a domain,
//! acting on sampled fields. Integrals become weighted sums over cells,
//! suprema over balls or centers become maxima over a fixed finite search
//! set, and Luxemburg infima are found by bisection on the scale.

mod herz;
mod lebesgue;
mod luxemburg;
mod morrey;
pub mod axioms;
pub mod muckenhoupt;
pub mod rearrangement;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::SampledField;
use crate::numeric::{dist, norm as euclid, pairwise_sum};

pub use muckenhoupt::{ap_constant, ApEstimate};
pub use rearrangement::{decreasing_rearrangement, StepFunction};

/// Which function-space norm to apply, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceSpec {
    Lebesgue {
        q: f64,
    },
    Weighted {
        q: f64,
        weight: Weight,
    },
    Lorentz {
        r: f64,
        tau: f64,
    },
    Orlicz {
        phi: OrliczFunction,
    },
    Morrey {
        alpha: f64,
        r: f64,
    },
    Variable {
        exponent: ExponentField,
    },
    Mixed {
        r: Vec<f64>,
    },
    /// Local generalized Herz space with power weight `omega(t) = t^a`
    /// centered at `xi`.
    HerzLocal {
        p: f64,
        q: f64,
        a: f64,
        xi: Vec<f64>,
    },
    /// Global generalized Herz space; the supremum over centers runs over a
    /// lattice of step `xi_spacing` on the bounding box of the grid.
    HerzGlobal {
        p: f64,
        q: f64,
        a: f64,
        #[serde(default)]
        xi_spacing: Option<f64>,
    },
    /// Besov–Bourgain–Morrey space; dyadic levels truncated to `|j| <= depth`.
    Bbmorrey {
        q: f64,
        p: f64,
        r: f64,
        tau: f64,
        #[serde(default = "default_depth")]
        depth: i32,
    },
    OrliczSlice {
        phi: OrliczFunction,
        r: f64,
        t: f64,
    },
    /// `X^(1/s)` for the inner space `X`:
    /// `‖g‖ = ‖ |g|^(1/s) ‖_X^s`.
    Convexified {
        inner: Box<SpaceSpec>,
        s: f64,
    },
}

fn default_depth() -> i32 {
    8
}

/// Orlicz functions `Phi` with `Phi(0) = 0`, positive and non-decreasing on
/// `(0, ∞)` and unbounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrliczFunction {
    /// `t^q`
    Power { q: f64 },
    /// `t^q log(e + t)`
    PowerLog { q: f64 },
    /// Piecewise linear through `(t[i], phi[i])`, extended past the last node
    /// with the last slope. `t[0]` must be 0 with `phi[0] = 0`.
    Table { t: Vec<f64>, phi: Vec<f64> },
}

impl OrliczFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            OrliczFunction::Power { q } => t.powf(*q),
            OrliczFunction::PowerLog { q } => t.powf(*q) * (std::f64::consts::E + t).ln(),
            OrliczFunction::Table { t: ts, phi } => {
                let k = match ts.iter().position(|&x| x > t) {
                    Some(0) => return 0.0,
                    Some(k) => k,
                    None => ts.len() - 1,
                };
                let (t0, t1) = (ts[k - 1], ts[k]);
                let (p0, p1) = (phi[k - 1], phi[k]);
                p0 + (p1 - p0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OrliczFunction::Power { q } | OrliczFunction::PowerLog { q } => {
                if !(*q > 0.0 && q.is_finite()) {
                    return Err(invalid("phi.q", "exponent must be positive"));
                }
            }
            OrliczFunction::Table { t, phi } => {
                if t.len() < 2 || t.len() != phi.len() {
                    return Err(invalid("phi", "table needs >= 2 matching nodes"));
                }
                if t[0] != 0.0 || phi[0] != 0.0 {
                    return Err(invalid("phi", "table must start at (0, 0)"));
                }
                if t.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("phi", "nodes must be strictly increasing"));
                }
                if phi.windows(2).any(|w| w[1] < w[0]) || phi[1..].iter().any(|&v| v <= 0.0) {
                    return Err(invalid("phi", "values must be positive and non-decreasing"));
                }
                let k = t.len() - 1;
                if phi[k] - phi[k - 1] <= 0.0 {
                    return Err(invalid("phi", "last segment must increase so Phi is unbounded"));
                }
            }
        }
        Ok(())
    }

    /// Declared `(lower, upper)` types.
    pub fn types(&self) -> (f64, f64) {
        match self {
            OrliczFunction::Power { q } => (*q, *q),
            OrliczFunction::PowerLog { q } => (*q, q + 1.0),
            OrliczFunction::Table { t, phi } => {
                let slopes: Vec<f64> = t
                    .windows(2)
                    .zip(phi.windows(2))
                    .skip(1)
                    .map(|(tt, pp)| (pp[1] / pp[0]).ln() / (tt[1] / tt[0]).ln())
                    .collect();
                let lo = slopes.iter().cloned().fold(1.0, f64::min);
                let hi = slopes.iter().cloned().fold(1.0, f64::max);
                (lo, hi)
            }
        }
    }
}

/// Weights on R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Weight {
    Constant { c: f64 },
    /// `|x|^a`
    Power { a: f64 },
    /// Nearest-sample lookup in user data.
    Table { points: Vec<Vec<f64>>, values: Vec<f64> },
}

impl Weight {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Constant { c } => *c,
            Weight::Power { a } => euclid(x).powf(*a),
            Weight::Table { points, values } => {
                let mut best = (f64::INFINITY, 0.0);
                for (p, v) in points.iter().zip(values) {
                    let d = dist(p, x);
                    if d < best.0 {
                        best = (d, *v);
                    }
                }
                best.1
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Weight::Constant { c } if !(*c > 0.0 && c.is_finite()) => {
                Err(invalid("weight", "constant weight must be positive"))
            }
            Weight::Power { a } if !a.is_finite() => Err(invalid("weight", "exponent must be finite")),
            Weight::Table { points, values }
                if points.is_empty()
                    || points.len() != values.len()
                    || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) =>
            {
                Err(invalid("weight", "table needs matching points and positive values"))
            }
            _ => Ok(()),
        }
    }

    /// Reads a weight table from CSV with header `x1,..,xn,value`.
    pub fn from_csv(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let cols = rdr.headers()?.len();
        if cols < 2 {
            return Err(invalid("csv", "need columns x1..xn, value"));
        }
        let mut points = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let nums: Vec<f64> = rec?
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| invalid("csv", e.to_string()))?;
            if nums.len() != cols {
                return Err(invalid("csv", "ragged row"));
            }
            points.push(nums[..cols - 1].to_vec());
            values.push(nums[cols - 1]);
        }
        let w = Weight::Table { points, values };
        w.validate()?;
        Ok(w)
    }
}

/// Variable exponent `r(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExponentField {
    Constant { r: f64 },
    /// `base + slope · x`
    Affine { base: f64, slope: Vec<f64> },
    /// Nearest-sample lookup in user data.
    Table { points: Vec<Vec<f64>>, values: Vec<f64> },
}

impl ExponentField {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ExponentField::Constant { r } => *r,
            ExponentField::Affine { base, slope } => {
                base + slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            }
            ExponentField::Table { points, values } => {
                Weight::Table {
                    points: points.clone(),
                    values: values.clone(),
                }
                .eval(x)
            }
        }
    }
}

impl SpaceSpec {
    /// Checks parameter ranges against the hypotheses of each family.
    pub fn validate(&self) -> Result<()> {
        fn above_one(name: &'static str, v: f64) -> Result<()> {
            if v > 1.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must lie in (1, ∞), got {v}")))
            }
        }
        match self {
            SpaceSpec::Lebesgue { q } | SpaceSpec::Weighted { q, .. } => {
                if !(*q >= 1.0 && q.is_finite()) {
                    return Err(invalid("q", format!("must lie in [1, ∞), got {q}")));
                }
                if let SpaceSpec::Weighted { weight, .. } = self {
                    weight.validate()?;
                }
            }
            SpaceSpec::Lorentz { r, tau } => {
                above_one("r", *r)?;
                above_one("tau", *tau)?;
            }
            SpaceSpec::Orlicz { phi } => phi.validate()?,
            SpaceSpec::Morrey { alpha, r } => {
                above_one("r", *r)?;
                if !(alpha >= r && alpha.is_finite()) {
                    return Err(invalid("alpha", format!("need r <= alpha < ∞, got alpha = {alpha}")));
                }
            }
            SpaceSpec::Variable { exponent } => {
                if let ExponentField::Constant { r } = exponent {
                    above_one("exponent.r", *r)?;
                }
            }
            SpaceSpec::Mixed { r } => {
                if r.is_empty() {
                    return Err(invalid("r", "need one exponent per axis"));
                }
                for &v in r {
                    above_one("r", v)?;
                }
            }
            SpaceSpec::HerzLocal { p, q, a, .. } | SpaceSpec::HerzGlobal { p, q, a, .. } => {
                above_one("p", *p)?;
                above_one("q", *q)?;
                if !a.is_finite() {
                    return Err(invalid("a", "weight exponent must be finite"));
                }
                if let SpaceSpec::HerzGlobal { xi_spacing: Some(s), .. } = self {
                    if !(*s > 0.0) {
                        return Err(invalid("xi_spacing", "must be positive"));
                    }
                }
            }
            SpaceSpec::Bbmorrey { q, p, r, tau, depth } => {
                if !(*q >= 1.0 && q <= p && p <= r && r.is_finite()) {
                    return Err(invalid("bbmorrey", format!("need 1 <= q <= p <= r < ∞, got q={q}, p={p}, r={r}")));
                }
                if !(*tau >= 1.0 && tau.is_finite()) {
                    return Err(invalid("tau", "must lie in [1, ∞)"));
                }
                if *depth < 0 {
                    return Err(invalid("depth", "must be nonnegative"));
                }
            }
            SpaceSpec::OrliczSlice { phi, r, t } => {
                phi.validate()?;
                if !(*r >= 1.0 && r.is_finite()) {
                    return Err(invalid("r", "must lie in [1, ∞)"));
                }
                if !(*t > 0.0 && t.is_finite()) {
                    return Err(invalid("t", "ball radius must be positive"));
                }
            }
            SpaceSpec::Convexified { inner, s } => {
                if !(*s > 0.0 && s.is_finite()) {
                    return Err(invalid("s", "must be positive"));
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// Whether the norm is absolutely continuous, so that exact limit
    /// statements for nonlocal functionals apply. Morrey and global Herz
    /// norms are not.
    pub fn is_absolutely_continuous(&self) -> bool {
        match self {
            SpaceSpec::Morrey { alpha, r } => alpha == r,
            SpaceSpec::HerzGlobal { .. } => false,
            SpaceSpec::Convexified { inner, .. } => inner.is_absolutely_continuous(),
            _ => true,
        }
    }

    pub fn requires_tensor_grid(&self) -> bool {
        match self {
            SpaceSpec::Mixed { .. } => true,
            SpaceSpec::Convexified { inner, .. } => inner.requires_tensor_grid(),
            _ => false,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpaceSpec::Lebesgue { q } => format!("lebesgue({q})"),
            SpaceSpec::Weighted { q, .. } => format!("weighted({q})"),
            SpaceSpec::Lorentz { r, tau } => format!("lorentz({r},{tau})"),
            SpaceSpec::Orlicz { .. } => "orlicz".into(),
            SpaceSpec::Morrey { alpha, r } => format!("morrey({alpha},{r})"),
            SpaceSpec::Variable { .. } => "variable".into(),
            SpaceSpec::Mixed { r } => format!("mixed({r:?})"),
            SpaceSpec::HerzLocal { p, q, a, .. } => format!("herz-local({p},{q},{a})"),
            SpaceSpec::HerzGlobal { p, q, a, .. } => format!("herz-global({p},{q},{a})"),
            SpaceSpec::Bbmorrey { q, p, r, tau, .. } => format!("bbmorrey({q},{p},{r},{tau})"),
            SpaceSpec::OrliczSlice { r, t, .. } => format!("orlicz-slice({r},{t})"),
            SpaceSpec::Convexified { inner, s } => format!("({})^(1/{s})", inner.label()),
        }
    }
}

/// Norm of `field` in the space `spec` restricted to the field's domain.
pub fn norm(spec: &SpaceSpec, field: &SampledField) -> Result<f64> {
    spec.validate()?;
    let abs: Vec<f64> = field.values().iter().map(|v| v.abs()).collect();
    if abs.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let grid = field.grid();
    let w = grid.weights();
    match spec {
        SpaceSpec::Lebesgue { q } => Ok(lebesgue::lebesgue(&abs, w, *q)),
        SpaceSpec::Weighted { q, weight } => {
            let ww: Vec<f64> = grid.points().zip(w).map(|(x, wi)| wi * weight.eval(x)).collect();
            if ww.iter().any(|v| !v.is_finite()) {
                return Err(Error::Incompatible("weight is infinite at a grid point".into()));
            }
            Ok(lebesgue::lebesgue(&abs, &ww, *q))
        }
        SpaceSpec::Mixed { r } => lebesgue::mixed(&abs, grid, r),
        SpaceSpec::Lorentz { r, tau } => Ok(rearrangement::lorentz(&abs, w, *r, *tau)),
        SpaceSpec::Orlicz { phi } => luxemburg::orlicz(&abs, w, phi),
        SpaceSpec::Variable { exponent } => luxemburg::variable(&abs, grid, exponent),
        SpaceSpec::OrliczSlice { phi, r, t } => luxemburg::orlicz_slice(&abs, grid, phi, *r, *t),
        SpaceSpec::Morrey { alpha, r } => Ok(morrey::morrey(&abs, grid, *alpha, *r)),
        SpaceSpec::Bbmorrey { q, p, r, tau, depth } => {
            Ok(morrey::bbmorrey(&abs, grid, *q, *p, *r, *tau, *depth))
        }
        SpaceSpec::HerzLocal { p, q, a, xi } => {
            if xi.len() != grid.dim() {
                return Err(Error::DimensionMismatch {
                    expected: grid.dim(),
                    got: xi.len(),
                });
            }
            Ok(herz::local(&abs, grid, *p, *q, *a, xi))
        }
        SpaceSpec::HerzGlobal { p, q, a, xi_spacing } => {
            let step = xi_spacing.unwrap_or(4.0 * grid.spacing());
            Ok(herz::global(&abs, grid, *p, *q, *a, step))
        }
        SpaceSpec::Convexified { inner, s } => {
            let root = field.with_values(abs.iter().map(|v| v.powf(1.0 / s)).collect())?;
            Ok(norm(inner, &root)?.powf(*s))
        }
    }
}

/// The space `X^(1/s)`, so that `‖f‖_X = ‖ |f|^s ‖_{X^(1/s)}^(1/s)`.
/// Lebesgue-type families map their exponents to `q / s`; other families
/// are wrapped generically.
pub fn convexify(spec: &SpaceSpec, s: f64) -> Result<SpaceSpec> {
    spec.validate()?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid("p", "convexification exponent must be positive"));
    }
    let out = match spec {
        SpaceSpec::Lebesgue { q } => SpaceSpec::Lebesgue { q: q / s },
        SpaceSpec::Weighted { q, weight } => SpaceSpec::Weighted {
            q: q / s,
            weight: weight.clone(),
        },
        SpaceSpec::Mixed { r } => SpaceSpec::Mixed {
            r: r.iter().map(|v| v / s).collect(),
        },
        other => SpaceSpec::Convexified {
            inner: Box::new(other.clone()),
            s,
        },
    };
    out.validate()
        .map_err(|e| invalid("p", format!("convexified space leaves the admissible range: {e}")))?;
    Ok(out)
}

/// `∫|fg| - ‖f‖_{L^q} ‖g‖_{L^q'}`; never positive beyond rounding.
pub fn holder_defect(f: &SampledField, g: &SampledField, q: f64) -> Result<f64> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(invalid("q", "must lie in (1, ∞)"));
    }
    if f.len() != g.len() || !same_points(f, g) {
        return Err(Error::Incompatible("Hölder check needs a shared grid".into()));
    }
    let w = f.grid().weights();
    let prod: Vec<f64> = (0..f.len())
        .map(|i| w[i] * (f.values()[i] * g.values()[i]).abs())
        .collect();
    let qc = q / (q - 1.0);
    let nf = norm(&SpaceSpec::Lebesgue { q }, f)?;
    let ng = norm(&SpaceSpec::Lebesgue { q: qc }, g)?;
    Ok(pairwise_sum(&prod) - nf * ng)
}

fn same_points(f: &SampledField, g: &SampledField) -> bool {
    std::sync::Arc::ptr_eq(f.grid(), g.grid())
        || f.grid()
            .points()
            .zip(g.grid().points())
            .all(|(a, b)| a == b)
}

#[cfg(test)]
mod tests;
