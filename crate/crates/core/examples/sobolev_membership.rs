//! A jump function is not in W^{1,p}: with the fractional family the
//! functional grows without bound and the verdict is non-member. A smooth
//! function on the same interval converges.

use std::sync::Arc;

use bbmlab::bbm::{convergence_study, geometric_schedule, Mode, Study, StudyOptions};
use bbmlab::{fractional_family, sample, sample_quadrature, Domain, Scheme, SpaceSpec, TestFunction};

fn main() -> bbmlab::Result<()> {
    let domain = Domain::interval(-1.0, 1.0)?;
    let grid = Arc::new(sample_quadrature(&domain, 1e-3, Scheme::TensorMidpoint)?);
    let spec = SpaceSpec::Lebesgue { q: 2.0 };
    let family = fractional_family(2.0, domain.enclosing_radius(), 1)?;
    let schedule = geometric_schedule(0.4, 0.5, 6);
    let cases = [
        ("step", TestFunction::IndicatorHalfspace { normal: vec![1.0], offset: 0.0 }),
        ("quadratic", TestFunction::Quadratic),
    ];
    for (name, tf) in cases {
        let f = sample(&tf, &grid)?;
        let study = Study { field: &f, p: 2.0, spec: &spec, family: &family, domain: &domain, schedule: &schedule, mode: Mode::Rdati };
        let r = convergence_study(&study, &StudyOptions::default())?;
        let v: Vec<String> = r.functional_values.iter().map(|x| format!("{x:.3}")).collect();
        println!("{name:<10} [{}] -> {:?}", v.join(", "), r.verdict);
    }
    Ok(())
}
