//! f(x) = x_1 on the unit disk; the limit is kappa(2,2)^(1/2) |disk|^(1/2) = pi.
//! Pass a grid spacing as the first argument (default 0.02).

use std::sync::Arc;

use bbmlab::bbm::{convergence_study, geometric_schedule, Mode, Study, StudyOptions};
use bbmlab::{bump_family, sample, sample_quadrature, Domain, Scheme, SpaceSpec, TestFunction};

fn main() -> bbmlab::Result<()> {
    let h: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let domain = Domain::unit_disk();
    let grid = Arc::new(sample_quadrature(&domain, h, Scheme::TensorMidpoint)?);
    let f = sample(&TestFunction::Linear { v: vec![1.0, 0.0] }, &grid)?;
    let spec = SpaceSpec::Lebesgue { q: 2.0 };
    let family = bump_family(2);
    let schedule = geometric_schedule(0.4, 0.5, 5);
    let study = Study { field: &f, p: 2.0, spec: &spec, family: &family, domain: &domain, schedule: &schedule, mode: Mode::Rdati };
    let opts = StudyOptions { stride: 2, tolerance: 0.04, ..StudyOptions::default() };
    let r = convergence_study(&study, &opts)?;
    println!("{} grid points, h = {h}", grid.len());
    println!("values {:?}", r.functional_values);
    println!("limit {:?} vs pi, relative error {:?}, verdict {:?}", r.extrapolated_limit, r.relative_error, r.verdict);
    Ok(())
}
