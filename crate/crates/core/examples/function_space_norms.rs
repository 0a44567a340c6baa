//! One field measured in every norm engine, plus the reductions that
//! collapse an engine onto a Lebesgue norm.

use std::sync::Arc;

use bbmlab::spaces::{axioms, convexify, norm, OrliczFunction, SpaceSpec};
use bbmlab::{sample, sample_quadrature, Domain, Scheme, TestFunction};

fn main() -> bbmlab::Result<()> {
    let grid = Arc::new(sample_quadrature(&Domain::unit_square(), 0.05, Scheme::TensorMidpoint)?);
    let f = sample(&TestFunction::ProductSine, &grid)?;
    for spec in axioms::banach_catalog() {
        println!("{:<48} {:.6}", spec.label(), norm(&spec, &f)?);
    }
    let l2 = norm(&SpaceSpec::Lebesgue { q: 2.0 }, &f)?;
    println!("\nreductions to L^2 = {l2:.12}");
    for spec in axioms::lebesgue_reductions(2.0) {
        println!("{:<48} {:.12}", spec.label(), norm(&spec, &f)?);
    }
    let orlicz = SpaceSpec::Orlicz { phi: OrliczFunction::Power { q: 3.0 } };
    let convex = convexify(&orlicz, 0.5)?;
    println!("\n{} = {:.6}", convex.label(), norm(&convex, &f)?);
    Ok(())
}
