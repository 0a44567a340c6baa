//! Sampled scalar fields, the analytic test-function catalog and the
//! operations that move fields between grids.

use std::f64::consts::PI;
use std::io::Read;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{NeighborIndex, QuadratureGrid};

/// Closed-form test functions. Everything except `IndicatorHalfspace` is the
/// restriction of a smooth function on R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    Constant { c: f64 },
    /// `v · x`
    Linear { v: Vec<f64> },
    /// `|x|^2`
    Quadratic,
    /// `prod_k sin(pi x_k)`
    ProductSine,
    /// `1` where `normal · x > offset`, else `0`.
    IndicatorHalfspace { normal: Vec<f64>, offset: f64 },
    /// `exp(1 - 1 / (1 - |x - c|^2 / r^2))` inside `B(c, r)`, zero outside.
    RadialBump { center: Vec<f64>, radius: f64 },
}

impl TestFunction {
    /// The dimension the function is tied to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            TestFunction::Linear { v } => Some(v.len()),
            TestFunction::IndicatorHalfspace { normal, .. } => Some(normal.len()),
            TestFunction::RadialBump { center, .. } => Some(center.len()),
            _ => None,
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, TestFunction::IndicatorHalfspace { .. })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Constant { c } => *c,
            TestFunction::Linear { v } => v.iter().zip(x).map(|(a, b)| a * b).sum(),
            TestFunction::Quadratic => x.iter().map(|t| t * t).sum(),
            TestFunction::ProductSine => x.iter().map(|t| (PI * t).sin()).product(),
            TestFunction::IndicatorHalfspace { normal, offset } => {
                let s: f64 = normal.iter().zip(x).map(|(a, b)| a * b).sum();
                if s > *offset {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::RadialBump { center, radius } => {
                let t = crate::numeric::dist(x, center).powi(2) / (radius * radius);
                if t < 1.0 {
                    (1.0 - 1.0 / (1.0 - t)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Analytic gradient; `None` for the indicator.
    pub fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        match self {
            TestFunction::Constant { .. } => Some(vec![0.0; n]),
            TestFunction::Linear { v } => Some(v.clone()),
            TestFunction::Quadratic => Some(x.iter().map(|t| 2.0 * t).collect()),
            TestFunction::ProductSine => Some(
                (0..n)
                    .map(|k| {
                        (0..n)
                            .map(|j| {
                                if j == k {
                                    PI * (PI * x[j]).cos()
                                } else {
                                    (PI * x[j]).sin()
                                }
                            })
                            .product()
                    })
                    .collect(),
            ),
            TestFunction::IndicatorHalfspace { .. } => None,
            TestFunction::RadialBump { center, radius } => {
                let r2 = radius * radius;
                let t = crate::numeric::dist(x, center).powi(2) / r2;
                if t >= 1.0 {
                    return Some(vec![0.0; n]);
                }
                let val = (1.0 - 1.0 / (1.0 - t)).exp();
                let dt = -val / (1.0 - t).powi(2);
                Some(
                    x.iter()
                        .zip(center)
                        .map(|(a, c)| dt * 2.0 * (a - c) / r2)
                        .collect(),
                )
            }
        }
    }
}

/// Function values (and optionally gradients) on the points of a grid.
#[derive(Clone, Debug)]
pub struct SampledField {
    grid: Arc<QuadratureGrid>,
    values: Vec<f64>,
    gradients: Option<Vec<f64>>,
    source: Option<TestFunction>,
}

impl SampledField {
    pub fn new(grid: Arc<QuadratureGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("values", format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "all values must be finite"));
        }
        Ok(SampledField {
            grid,
            values,
            gradients: None,
            source: None,
        })
    }

    /// Attaches gradient vectors, flattened point-major.
    pub fn with_gradients(mut self, gradients: Vec<f64>) -> Result<Self> {
        if gradients.len() != self.grid.len() * self.grid.dim() {
            return Err(invalid("gradient_values", "length must be points x dimension"));
        }
        if gradients.iter().any(|v| !v.is_finite()) {
            return Err(invalid("gradient_values", "all gradients must be finite"));
        }
        self.gradients = Some(gradients);
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn gradient(&self, i: usize) -> Option<&[f64]> {
        let d = self.grid.dim();
        self.gradients.as_ref().map(|g| &g[i * d..(i + 1) * d])
    }

    pub fn has_gradients(&self) -> bool {
        self.gradients.is_some()
    }

    pub fn source(&self) -> Option<&TestFunction> {
        self.source.as_ref()
    }

    /// Same grid, new values; gradients and source are dropped.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        SampledField::new(self.grid.clone(), values)
    }

    /// Pointwise map of the values onto the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// The field `x -> |∇f(x)|`.
    pub fn gradient_magnitude(&self) -> Result<Self> {
        let g = self.gradients.as_ref().ok_or(Error::MissingGradient)?;
        let d = self.grid.dim();
        self.with_values(
            g.chunks_exact(d)
                .map(|c| c.iter().map(|t| t * t).sum::<f64>().sqrt())
                .collect(),
        )
    }

    /// Reads a field from CSV with header `x1,..,xn,weight,value`.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let cols = rdr.headers()?.len();
        if cols < 3 {
            return Err(invalid("csv", "need columns x1..xn, weight, value"));
        }
        let dim = cols - 2;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let nums: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| invalid("csv", e.to_string()))?;
            if nums.len() != cols {
                return Err(invalid("csv", "ragged row"));
            }
            points.push(nums[..dim].to_vec());
            weights.push(nums[dim]);
            values.push(nums[dim + 1]);
        }
        let grid = QuadratureGrid::from_points(dim, points, weights, None)?;
        SampledField::new(Arc::new(grid), values)
    }
}

/// Evaluates a catalog function (and its analytic gradient, when defined) on
/// every grid point.
pub fn sample(f: &TestFunction, grid: &Arc<QuadratureGrid>) -> Result<SampledField> {
    if let Some(d) = f.dim() {
        if d != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                got: d,
            });
        }
    }
    let values: Vec<f64> = grid.points().map(|x| f.eval(x)).collect();
    let mut field = SampledField::new(grid.clone(), values)?;
    if f.is_smooth() {
        let grads: Vec<f64> = grid
            .points()
            .flat_map(|x| f.gradient(x).expect("smooth catalog member"))
            .collect();
        field = field.with_gradients(grads)?;
    }
    field.source = Some(f.clone());
    Ok(field)
}

/// Central-difference gradient of a catalog-sampled field; axes whose
/// central stencil leaves the domain fall back to a one-sided difference.
pub fn fd_gradient(field: &SampledField, h: f64) -> Result<SampledField> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("h", format!("step must be positive, got {h}")));
    }
    let f = field
        .source
        .as_ref()
        .ok_or_else(|| invalid("field", "finite differences need a catalog source"))?;
    let grid = &field.grid;
    let d = grid.dim();
    let inside = |x: &[f64]| grid.domain().is_none_or(|dom| dom.contains_unchecked(x));
    let mut grads = Vec::with_capacity(grid.len() * d);
    let mut probe = vec![0.0; d];
    for (i, x) in grid.points().enumerate() {
        let fx = field.values[i];
        for j in 0..d {
            probe.copy_from_slice(x);
            probe[j] = x[j] + h;
            let fwd_ok = inside(&probe);
            let fp = f.eval(&probe);
            probe[j] = x[j] - h;
            let bwd_ok = inside(&probe);
            let fm = f.eval(&probe);
            let g = match (fwd_ok, bwd_ok) {
                (true, true) | (false, false) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - fx) / h,
                (false, true) => (fx - fm) / h,
            };
            grads.push(g);
        }
    }
    let mut out = SampledField::new(grid.clone(), field.values.clone())?.with_gradients(grads)?;
    out.source = field.source.clone();
    Ok(out)
}

/// Extends a field by zero onto an outer grid: outer points inside the
/// field's domain copy the nearest sample within half a cell, all other
/// points get zero.
pub fn zero_extension(field: &SampledField, outer: &Arc<QuadratureGrid>) -> Result<SampledField> {
    let inner = &field.grid;
    if inner.dim() != outer.dim() {
        return Err(Error::DimensionMismatch {
            expected: inner.dim(),
            got: outer.dim(),
        });
    }
    let reach = 0.5 * inner.spacing().max(outer.spacing()) * (1.0 + 1e-9);
    let index = NeighborIndex::new(inner, reach.max(1e-300));
    let values = outer
        .points()
        .map(|x| {
            if let Some(dom) = inner.domain() {
                if !dom.contains_unchecked(x) {
                    return 0.0;
                }
            }
            index
                .within(x, reach)
                .into_iter()
                .map(|j| (crate::numeric::dist(x, inner.point(j)), j))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map_or(0.0, |(_, j)| field.values[j])
        })
        .collect();
    SampledField::new(outer.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_quadrature, Domain, Scheme};

    fn grid(d: &Domain, h: f64) -> Arc<QuadratureGrid> {
        Arc::new(sample_quadrature(d, h, Scheme::TensorMidpoint).unwrap())
    }

    #[test]
    fn linear_samples_and_gradients() {
        let g = grid(&Domain::unit_square(), 0.25);
        let f = sample(&TestFunction::Linear { v: vec![1.0, 0.0] }, &g).unwrap();
        for i in 0..g.len() {
            assert_eq!(f.values()[i], g.point(i)[0]);
            assert_eq!(f.gradient(i).unwrap(), &[1.0, 0.0]);
        }
    }

    #[test]
    fn indicator_has_no_gradient() {
        let g = grid(&Domain::interval(-1.0, 1.0).unwrap(), 0.1);
        let f = sample(
            &TestFunction::IndicatorHalfspace { normal: vec![1.0], offset: 0.0 },
            &g,
        )
        .unwrap();
        assert!(!f.has_gradients());
        assert!(f.values().iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(matches!(f.gradient_magnitude(), Err(Error::MissingGradient)));
    }

    #[test]
    fn quadratic_point_values() {
        let q = TestFunction::Quadratic;
        assert!((q.eval(&[0.3, 0.4]) - 0.25).abs() < 1e-15);
        let g = q.gradient(&[0.3, 0.4]).unwrap();
        assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn bump_gradient_matches_difference_quotient() {
        let b = TestFunction::RadialBump { center: vec![0.5, 0.5], radius: 0.4 };
        let x = [0.6, 0.45];
        let g = b.gradient(&x).unwrap();
        let h = 1e-6;
        let dx = (b.eval(&[x[0] + h, x[1]]) - b.eval(&[x[0] - h, x[1]])) / (2.0 * h);
        assert!((g[0] - dx).abs() < 1e-8);
    }

    #[test]
    fn fd_gradient_on_affine_is_exact() {
        let g = grid(&Domain::unit_square(), 0.1);
        let f = sample(&TestFunction::Linear { v: vec![2.0, -3.0] }, &g).unwrap();
        let fd = fd_gradient(&f, 0.05).unwrap();
        for i in 0..g.len() {
            let gr = fd.gradient(i).unwrap();
            assert!((gr[0] - 2.0).abs() < 1e-12 && (gr[1] + 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fd_gradient_accuracy() {
        let pts = Arc::new(
            QuadratureGrid::from_points(2, vec![vec![0.3, 0.4], vec![0.5, 0.5]], vec![0.1, 0.1], None)
                .unwrap(),
        );
        let q = sample(&TestFunction::Quadratic, &pts).unwrap();
        let fd = fd_gradient(&q, 1e-4).unwrap();
        let g = fd.gradient(0).unwrap();
        assert!((g[0] - 0.6).abs() < 1e-7 && (g[1] - 0.8).abs() < 1e-7);
        let s = sample(&TestFunction::ProductSine, &pts).unwrap();
        let g = fd_gradient(&s, 1e-4).unwrap();
        let g = g.gradient(1).unwrap();
        assert!(g[0].abs() < 1e-7 && g[1].abs() < 1e-7);
        assert!(fd_gradient(&s, 0.0).is_err());
    }

    #[test]
    fn fd_gradient_one_sided_near_boundary() {
        let g = grid(&Domain::unit_interval(), 0.1);
        let f = sample(&TestFunction::Quadratic, &g).unwrap();
        let fd = fd_gradient(&f, 0.08).unwrap();
        // x = 0.05: backward probe leaves (0,1), forward difference is used
        let g0 = fd.gradient(0).unwrap()[0];
        assert!((g0 - (0.13f64.powi(2) - 0.05f64.powi(2)) / 0.08).abs() < 1e-12);
    }

    #[test]
    fn zero_extension_of_constant_is_indicator() {
        let disk = Domain::unit_disk();
        let inner = grid(&disk, 0.1);
        let outer = grid(&Domain::new_box(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap(), 0.1);
        let one = sample(&TestFunction::Constant { c: 1.0 }, &inner).unwrap();
        let ext = zero_extension(&one, &outer).unwrap();
        for (i, x) in outer.points().enumerate() {
            let expect = if disk.contains(x).unwrap() { 1.0 } else { 0.0 };
            assert_eq!(ext.values()[i], expect);
        }
        let zero = sample(&TestFunction::Constant { c: 0.0 }, &inner).unwrap();
        assert!(zero_extension(&zero, &outer).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn csv_import() {
        let data = "x1,x2,weight,value\n0.1,0.2,0.5,3.0\n0.3,0.4,0.5,-1.0\n";
        let f = SampledField::from_csv(data.as_bytes()).unwrap();
        assert_eq!(f.grid().dim(), 2);
        assert_eq!(f.values(), &[3.0, -1.0]);
        assert_eq!(f.grid().point(1), &[0.3, 0.4]);
    }

    #[test]
    fn rejects_non_finite_values() {
        let g = grid(&Domain::unit_interval(), 0.5);
        assert!(SampledField::new(g, vec![1.0, f64::NAN]).is_err());
    }
}
