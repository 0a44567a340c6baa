//! Nonlocal BBM-type energies on sampled fields.
//!
//! For a radial kernel `K` the pointwise energy is
//! `E(x) = ∫_Ω |f(x) - f(y)|^p / |x - y|^p K(|x - y|) dy`, discretized on the
//! field's own grid:
//!
//! * far field (`|x - y| >= 2h`): each cell contributes its difference
//!   quotient times the kernel averaged over the radial band
//!   `[d - h/2, d + h/2]`, so discontinuous and singular kernels are
//!   integrated rather than point-sampled;
//! * near field (`0 < |x - y| < 2h`): the near cells together with the cell
//!   of `x` form a ball of the same measure, over which the kernel's radial
//!   mass is integrated in closed form against the weighted mean of the
//!   frozen difference quotients.
//!
//! On lattice grids the discrete kernel mass of the stencil is normalized to
//! the exact mass of the ball it covers.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::field::SampledField;
use crate::geometry::{Domain, NeighborIndex, QuadratureGrid};
use crate::mollifiers::{FamilyKind, RadialKernel, RdatiFamily};
use crate::numeric::{dist, pairwise_sum, unit_ball_volume, unit_sphere_area};
use crate::spaces::{norm, SpaceSpec};

/// Largest lattice stencil (in offsets) used for the mass normalization.
const STENCIL_RADIUS_CELLS: f64 = 400.0;

/// `|x - y|^(p - n - sp)`: with the difference quotient `|Δf|^p / |x - y|^p`
/// this is the Gagliardo integrand `|Δf|^p / |x - y|^(n + sp)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GagliardoKernel {
    pub dim: usize,
    pub p: f64,
    pub s: f64,
}

impl RadialKernel for GagliardoKernel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, r: f64) -> f64 {
        if r > 0.0 {
            r.powf(self.p - self.dim as f64 - self.s * self.p)
        } else {
            0.0
        }
    }

    fn radial_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let e = self.p * (1.0 - self.s);
        (b.powf(e) - a.max(0.0).powf(e)) / e
    }

    fn support(&self) -> Option<f64> {
        None
    }
}

/// Exponent, kernel family, scale and domain of a BBM energy.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyParams {
    pub p: f64,
    pub family: RdatiFamily,
    pub nu: f64,
    pub domain: Domain,
}

impl EnergyParams {
    pub fn new(p: f64, family: RdatiFamily, nu: f64, domain: Domain) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid("p", format!("exponent must be >= 1, got {p}")));
        }
        if family.dim != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: family.dim,
            });
        }
        if let FamilyKind::Fractional { p: fp, .. } = family.kind {
            if fp != p {
                return Err(invalid("family.p", format!("fractional family built for p = {fp}, energy uses p = {p}")));
            }
        }
        family.check_nu(nu)?;
        Ok(EnergyParams { p, family, nu, domain })
    }

    /// Smallest `ν` for which the quadrature error stays `O(h)`.
    pub fn nu_min(&self, h: f64) -> f64 {
        nu_min(h, self.p)
    }
}

/// `4hp`, below which the kernel concentrates inside a few cells.
pub fn nu_min(h: f64, p: f64) -> f64 {
    4.0 * h * p
}

/// Average of `K` over the annulus `a < |z| < b`.
fn band_average<K: RadialKernel + ?Sized>(kernel: &K, a: f64, b: f64) -> f64 {
    let n = kernel.dim() as i32;
    let shell = unit_ball_volume(kernel.dim()) * (b.powi(n) - a.powi(n));
    if shell <= 0.0 {
        return 0.0;
    }
    unit_sphere_area(kernel.dim()) * kernel.radial_mass(a, b) / shell
}

/// Ratio of exact to discrete kernel mass over an interior lattice stencil.
fn stencil_normalization<K: RadialKernel + ?Sized>(kernel: &K, h: f64, reach: f64) -> f64 {
    let n = kernel.dim();
    if n == 1 {
        // near ball and far bands tile the line exactly
        return 1.0;
    }
    let cells = (reach / h).clamp(2.0, STENCIL_RADIUS_CELLS);
    let m = cells.floor() as i64;
    let cell = h.powi(n as i32);
    let mut near = 0usize;
    let mut count = 1usize;
    let mut far = Vec::new();
    let span = |d: usize| if d < n { -m..=m } else { 0..=0 };
    for a in span(0) {
        for b in span(1) {
            for c in span(2) {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                let r = ((a * a + b * b + c * c) as f64).sqrt();
                if r >= cells {
                    continue;
                }
                count += 1;
                if r < 2.0 {
                    near += 1;
                } else {
                    let d = r * h;
                    far.push(cell * band_average(kernel, d - 0.5 * h, d + 0.5 * h));
                }
            }
        }
    }
    let area = unit_sphere_area(n);
    let ball_radius = |k: usize| (k as f64 * cell / unit_ball_volume(n)).powf(1.0 / n as f64);
    let discrete = area * kernel.radial_mass(0.0, ball_radius(near + 1)) + pairwise_sum(&far);
    let exact = area * kernel.radial_mass(0.0, ball_radius(count));
    if discrete > 0.0 && exact > 0.0 {
        exact / discrete
    } else {
        1.0
    }
}

struct Assembler<'a, K: RadialKernel + ?Sized> {
    grid: &'a QuadratureGrid,
    values: &'a [f64],
    kernel: &'a K,
    p: f64,
    h: f64,
    scale: f64,
    index: Option<NeighborIndex<'a>>,
    reach: f64,
}

impl<'a, K: RadialKernel + ?Sized> Assembler<'a, K> {
    fn new(field: &'a SampledField, kernel: &'a K, p: f64) -> Result<Self> {
        let grid: &QuadratureGrid = field.grid();
        if kernel.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                got: kernel.dim(),
            });
        }
        let h = grid.spacing();
        let (lo, hi) = grid.bounding_box();
        let span = dist(&lo, &hi) + h;
        let reach = kernel.support().map_or(span, |s| s.min(span)) + h;
        let scale = if grid.is_uniform() {
            stencil_normalization(kernel, h, reach)
        } else {
            1.0
        };
        // a bucket index pays off when the kernel reaches a fraction of the grid
        let index = (reach < 0.25 * span).then(|| NeighborIndex::new(grid, reach.max(2.0 * h)));
        Ok(Assembler {
            grid,
            values: field.values(),
            kernel,
            p,
            h,
            scale,
            index,
            reach,
        })
    }

    fn energy(&self, i: usize) -> f64 {
        let x = self.grid.point(i);
        let fx = self.values[i];
        let w = self.grid.weights();
        let h = self.h;
        let mut far = Vec::new();
        let mut near_q = Vec::new();
        let mut near_w = Vec::new();
        let mut visit = |j: usize| {
            if j == i {
                return;
            }
            let y = self.grid.point(j);
            let d = dist(x, y);
            if d == 0.0 {
                return;
            }
            let q = (fx - self.values[j]).abs().powf(self.p) / d.powf(self.p);
            if d < 2.0 * h {
                near_q.push(q * w[j]);
                near_w.push(w[j]);
            } else {
                let k = band_average(self.kernel, d - 0.5 * h, d + 0.5 * h);
                if k > 0.0 && q > 0.0 {
                    far.push(q * w[j] * k);
                }
            }
        };
        match &self.index {
            Some(idx) => idx.within(x, self.reach).into_iter().for_each(&mut visit),
            None => (0..self.grid.len()).for_each(&mut visit),
        }
        let mut total = pairwise_sum(&far);
        let wsum = pairwise_sum(&near_w);
        if wsum > 0.0 {
            let n = self.grid.dim();
            let r_nf = ((w[i] + wsum) / unit_ball_volume(n)).powf(1.0 / n as f64);
            let mean_q = pairwise_sum(&near_q) / wsum;
            total += unit_sphere_area(n) * self.kernel.radial_mass(0.0, r_nf) * mean_q;
        }
        self.scale * total
    }
}

/// `E(x_i)` for the kernel `rho_nu` of `params`.
pub fn pointwise_energy(f: &SampledField, x_index: usize, params: &EnergyParams) -> Result<f64> {
    if x_index >= f.len() {
        return Err(invalid("x_index", format!("{x_index} out of range for {} points", f.len())));
    }
    let kernel = params.family.at(params.nu)?;
    let asm = Assembler::new(f, &kernel, params.p)?;
    Ok(asm.energy(x_index))
}

/// The field `x -> E(x)^(1/p)` for a general radial kernel, evaluated on
/// every `stride`-th grid point (weights rescaled to keep the total measure).
pub fn energy_root_field<K: RadialKernel + ?Sized>(
    f: &SampledField,
    kernel: &K,
    p: f64,
    stride: usize,
) -> Result<SampledField> {
    let stride = stride.max(1);
    let asm = Assembler::new(f, kernel, p)?;
    let idx: Vec<usize> = (0..f.len()).step_by(stride).collect();
    let roots: Vec<f64> = idx.par_iter().map(|&i| asm.energy(i).powf(1.0 / p)).collect();
    let grid = if stride == 1 {
        f.grid().clone()
    } else {
        std::sync::Arc::new(f.grid().thinned(stride))
    };
    SampledField::new(grid, roots)
}

fn check_stride(spec: &SpaceSpec, stride: usize) -> Result<()> {
    if stride > 1 && spec.requires_tensor_grid() {
        return Err(Error::Incompatible(format!(
            "{} needs a tensor grid, which stride {stride} thinning destroys",
            spec.label()
        )));
    }
    Ok(())
}

fn warn_below_nu_min(nu: f64, h: f64, p: f64) {
    if nu < nu_min(h, p) {
        log::warn!("nu = {nu} is below nu_min = 4hp = {}; quadrature error may dominate", nu_min(h, p));
    }
}

/// `‖ E(·)^(1/p) ‖_X` with the RDATI kernel `rho_nu`.
pub fn bbm_functional(f: &SampledField, params: &EnergyParams, spec: &SpaceSpec) -> Result<f64> {
    bbm_functional_strided(f, params, spec, 1)
}

/// [`bbm_functional`] with the outer norm sampled on every `stride`-th point.
pub fn bbm_functional_strided(f: &SampledField, params: &EnergyParams, spec: &SpaceSpec, stride: usize) -> Result<f64> {
    spec.validate()?;
    check_stride(spec, stride)?;
    if f.grid().dim() != params.domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.domain.dim(),
            got: f.grid().dim(),
        });
    }
    warn_below_nu_min(params.nu, f.grid().spacing(), params.p);
    let kernel = params.family.at(params.nu)?;
    let roots = energy_root_field(f, &kernel, params.p, stride)?;
    norm(spec, &roots)
}

/// `(1 - s)^(1/p) ‖ [∫_Ω |f(·) - f(y)|^p / |· - y|^(n + sp) dy]^(1/p) ‖_X`.
pub fn gagliardo_functional(f: &SampledField, p: f64, s: f64, spec: &SpaceSpec, domain: &Domain) -> Result<f64> {
    gagliardo_functional_strided(f, p, s, spec, domain, 1)
}

pub fn gagliardo_functional_strided(
    f: &SampledField,
    p: f64,
    s: f64,
    spec: &SpaceSpec,
    domain: &Domain,
    stride: usize,
) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("s", format!("must lie in (0, 1), got {s}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("exponent must be >= 1, got {p}")));
    }
    spec.validate()?;
    check_stride(spec, stride)?;
    if f.grid().dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: f.grid().dim(),
        });
    }
    warn_below_nu_min(1.0 - s, f.grid().spacing(), p);
    let kernel = GagliardoKernel {
        dim: domain.dim(),
        p,
        s,
    };
    let roots = energy_root_field(f, &kernel, p, stride)?;
    Ok((1.0 - s).powf(1.0 / p) * norm(spec, &roots)?)
}

/// The Gagliardo functional computed through the fractional RDATI family at
/// `nu = 1 - s`: `(1 - s)^(1/p) · bbm / ((nu p)^(1/p) (2R)^(-nu))`.
pub fn gagliardo_via_fractional(
    f: &SampledField,
    p: f64,
    s: f64,
    spec: &SpaceSpec,
    domain: &Domain,
    stride: usize,
) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("s", format!("must lie in (0, 1), got {s}")));
    }
    let nu = 1.0 - s;
    let r = domain.enclosing_radius();
    let family = crate::mollifiers::fractional_family(p, r, domain.dim())?;
    let params = EnergyParams::new(p, family, nu, domain.clone())?;
    let bbm = bbm_functional_strided(f, &params, spec, stride)?;
    Ok((1.0 - s).powf(1.0 / p) * bbm / ((nu * p).powf(1.0 / p) * (2.0 * r).powf(-nu)))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::field::{sample, TestFunction};
    use crate::geometry::{sample_quadrature, Scheme};
    use crate::mollifiers::{bump_family, fractional_family};

    fn grid(d: &Domain, h: f64) -> Arc<QuadratureGrid> {
        Arc::new(sample_quadrature(d, h, Scheme::TensorMidpoint).unwrap())
    }

    fn nearest(g: &QuadratureGrid, x: &[f64]) -> usize {
        (0..g.len())
            .min_by(|&a, &b| dist(g.point(a), x).total_cmp(&dist(g.point(b), x)))
            .unwrap()
    }

    #[test]
    fn linear_interior_1d_is_kappa() {
        let d = Domain::unit_interval();
        let g = grid(&d, 1e-3);
        let f = sample(&TestFunction::Linear { v: vec![1.0] }, &g).unwrap();
        let params = EnergyParams::new(2.0, bump_family(1), 0.1, d).unwrap();
        let e = pointwise_energy(&f, nearest(&g, &[0.5]), &params).unwrap();
        assert!((e - 2.0).abs() < 0.02 * 2.0, "{e}");
        assert!((e - 2.0).abs() < 1e-10, "{e}");
    }

    #[test]
    fn linear_interior_2d_is_kappa() {
        let d = Domain::unit_disk();
        let g = grid(&d, 0.02);
        let v = vec![0.6, -0.8];
        let f = sample(&TestFunction::Linear { v }, &g).unwrap();
        let params = EnergyParams::new(2.0, bump_family(2), 0.2, d).unwrap();
        let e = pointwise_energy(&f, nearest(&g, &[0.01, 0.01]), &params).unwrap();
        let kappa = std::f64::consts::PI;
        assert!((e - kappa).abs() < 0.01 * kappa, "{e}");
    }

    #[test]
    fn constant_has_zero_energy() {
        let d = Domain::unit_square();
        let g = grid(&d, 0.05);
        let f = sample(&TestFunction::Constant { c: 3.0 }, &g).unwrap();
        let params = EnergyParams::new(2.0, bump_family(2), 0.2, d.clone()).unwrap();
        assert_eq!(pointwise_energy(&f, 5, &params).unwrap(), 0.0);
        assert_eq!(bbm_functional(&f, &params, &SpaceSpec::Lebesgue { q: 2.0 }).unwrap(), 0.0);
        assert_eq!(
            gagliardo_functional(&f, 2.0, 0.9, &SpaceSpec::Lebesgue { q: 2.0 }, &d).unwrap(),
            0.0
        );
    }

    #[test]
    fn linear_functional_1d() {
        let d = Domain::unit_interval();
        let g = grid(&d, 1e-3);
        let f = sample(&TestFunction::Linear { v: vec![1.0] }, &g).unwrap();
        let params = EnergyParams::new(2.0, bump_family(1), 0.05, d).unwrap();
        let v = bbm_functional(&f, &params, &SpaceSpec::Lebesgue { q: 2.0 }).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 0.03 * 2f64.sqrt(), "{v}");
    }

    #[test]
    fn gagliardo_routes_agree() {
        let d = Domain::unit_interval();
        let g = grid(&d, 2e-3);
        let f = sample(&TestFunction::Linear { v: vec![1.0] }, &g).unwrap();
        let spec = SpaceSpec::Lebesgue { q: 2.0 };
        for s in [0.6, 0.9] {
            let direct = gagliardo_functional(&f, 2.0, s, &spec, &d).unwrap();
            let routed = gagliardo_via_fractional(&f, 2.0, s, &spec, &d, 1).unwrap();
            assert!((direct - routed).abs() < 1e-8, "{direct} {routed}");
        }
        let d2 = Domain::unit_square();
        let g2 = grid(&d2, 0.05);
        let f2 = sample(&TestFunction::ProductSine, &g2).unwrap();
        let direct = gagliardo_functional(&f2, 1.5, 0.7, &spec, &d2).unwrap();
        let routed = gagliardo_via_fractional(&f2, 1.5, 0.7, &spec, &d2, 1).unwrap();
        assert!((direct - routed).abs() < 1e-8 * direct.max(1.0));
    }

    #[test]
    fn stride_respects_tensor_requirement() {
        let d = Domain::unit_square();
        let g = grid(&d, 0.1);
        let f = sample(&TestFunction::ProductSine, &g).unwrap();
        let params = EnergyParams::new(2.0, bump_family(2), 0.3, d).unwrap();
        let mixed = SpaceSpec::Mixed { r: vec![2.0, 2.0] };
        assert!(bbm_functional_strided(&f, &params, &mixed, 2).is_err());
        assert!(bbm_functional_strided(&f, &params, &mixed, 1).is_ok());
    }

    #[test]
    fn fractional_family_must_match_p() {
        let d = Domain::unit_interval();
        let fam = fractional_family(2.0, 2.0, 1).unwrap();
        assert!(EnergyParams::new(1.0, fam, 0.1, d.clone()).is_err());
        assert!(matches!(
            EnergyParams::new(2.0, fam, 0.6, d),
            Err(Error::NuOutOfRange { .. })
        ));
    }

    #[test]
    fn stencil_normalization_is_near_one() {
        for nu in [0.02, 0.1, 0.5] {
            let k = bump_family(2).at(nu).unwrap();
            let c = stencil_normalization(&k, 0.01, nu + 0.01);
            assert!((c - 1.0).abs() < 0.05, "{nu} {c}");
        }
        let k = fractional_family(2.0, 2.0, 2).unwrap().at(0.3).unwrap();
        let c = stencil_normalization(&k, 0.01, 2.0);
        assert!((c - 1.0).abs() < 0.1, "{c}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn energy_symmetries(
            vals in proptest::collection::vec(-3.0f64..3.0, 100),
            shift in -5.0f64..5.0,
            c in -4.0f64..4.0,
            i in 0usize..100,
            p in 1.0f64..3.0,
        ) {
            let d = Domain::unit_square();
            let g = grid(&d, 0.1);
            let f = SampledField::new(g.clone(), vals.clone()).unwrap();
            let fam = fractional_family(p, d.enclosing_radius(), 2).unwrap();
            let params = EnergyParams::new(p, fam, 0.3, d).unwrap();
            let e = pointwise_energy(&f, i, &params).unwrap();
            let shifted = f.map(|v| v + shift).unwrap();
            let negated = f.map(|v| -v).unwrap();
            let scaled = f.map(|v| c * v).unwrap();
            let tol = 1e-12 * e.max(1.0);
            prop_assert!((pointwise_energy(&shifted, i, &params).unwrap() - e).abs() <= 1e-9 * e.max(1.0));
            prop_assert!((pointwise_energy(&negated, i, &params).unwrap() - e).abs() <= tol);
            let es = pointwise_energy(&scaled, i, &params).unwrap();
            prop_assert!((es - c.abs().powf(p) * e).abs() <= 1e-12 * es.max(1.0).max(c.abs().powf(p) * e));
        }
    }
}
