//! (1 - s)^(1/p) times the Gagliardo seminorm as s -> 1, computed directly and
//! through the fractional family.

use std::sync::Arc;

use bbmlab::bbm::{convergence_study, Mode, Study, StudyOptions};
use bbmlab::{bump_family, sample, sample_quadrature, Domain, Scheme, SpaceSpec, TestFunction};

fn main() -> bbmlab::Result<()> {
    let domain = Domain::unit_interval();
    let grid = Arc::new(sample_quadrature(&domain, 1e-3, Scheme::TensorMidpoint)?);
    let f = sample(&TestFunction::Linear { v: vec![1.0] }, &grid)?;
    let spec = SpaceSpec::Lebesgue { q: 2.0 };
    let family = bump_family(1);
    let s = [0.8, 0.9, 0.95, 0.975];
    let study = Study { field: &f, p: 2.0, spec: &spec, family: &family, domain: &domain, schedule: &s, mode: Mode::Gagliardo };
    let opts = StudyOptions { check_routes: true, ..StudyOptions::default() };
    let r = convergence_study(&study, &opts)?;
    let defects = r.route_defects.clone().unwrap_or_default();
    for ((s, v), d) in r.schedule.iter().zip(&r.functional_values).zip(&defects) {
        println!("s = {s:<6} value = {v:.6}  direct - fractional = {d:.1e}");
    }
    println!("limit {:?}, target {:?}, verdict {:?}", r.extrapolated_limit, r.target, r.verdict);
    Ok(())
}
