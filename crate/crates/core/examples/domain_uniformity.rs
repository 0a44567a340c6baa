//! Domain geometry: measure, enclosing radius and an empirical uniformity
//! constant from a lattice graph.

use bbmlab::geometry::estimate_uniformity;
use bbmlab::Domain;

fn main() -> bbmlab::Result<()> {
    let domains = [
        ("interval", Domain::unit_interval()),
        ("square", Domain::unit_square()),
        ("disk", Domain::unit_disk()),
        ("L-shape", Domain::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]])?),
    ];
    for (name, d) in domains {
        let eps = estimate_uniformity(&d, 200, 0.05, 1)?;
        println!(
            "{name:<9} measure {:.4} enclosing radius {:.4} diameter {:.4} uniformity >= {eps:.3}",
            d.measure(),
            d.enclosing_radius(),
            d.diameter()
        );
    }
    Ok(())
}
