//! f(x) = x on (0, 1) with the bump family: the functional tends to
//! kappa(p, 1)^(1/p) = 2^(1/p).

use std::sync::Arc;

use bbmlab::bbm::{convergence_study, geometric_schedule, Mode, Study, StudyOptions};
use bbmlab::{bump_family, sample, sample_quadrature, Domain, Scheme, SpaceSpec, TestFunction};

fn main() -> bbmlab::Result<()> {
    let domain = Domain::unit_interval();
    let grid = Arc::new(sample_quadrature(&domain, 1e-3, Scheme::TensorMidpoint)?);
    let f = sample(&TestFunction::Linear { v: vec![1.0] }, &grid)?;
    let spec = SpaceSpec::Lebesgue { q: 2.0 };
    let family = bump_family(1);
    let schedule = geometric_schedule(0.2, 0.5, 7);
    for p in [1.0, 2.0] {
        let study = Study { field: &f, p, spec: &spec, family: &family, domain: &domain, schedule: &schedule, mode: Mode::Rdati };
        let r = convergence_study(&study, &StudyOptions::default())?;
        println!("p = {p}");
        for (nu, v) in r.schedule.iter().zip(&r.functional_values) {
            println!("  nu = {nu:<10.6} value = {v:.6}");
        }
        println!("  limit {:?}, target {:?}, verdict {:?}", r.extrapolated_limit, r.target, r.verdict);
    }
    Ok(())
}
