//! Normalization, tail mass and admissible range of the two RDATI families.

use bbmlab::mollifiers::RadialKernel;
use bbmlab::{bump_family, fractional_family, Domain};

fn main() -> bbmlab::Result<()> {
    let domain = Domain::unit_square();
    let r = domain.enclosing_radius();
    let families = [("bump", bump_family(2)), ("fractional p=2", fractional_family(2.0, r, 2)?)];
    for (name, fam) in families {
        println!("{name}: nu in (0, {})", fam.nu_max);
        for nu in [0.5, 0.1, 0.01] {
            let m = fam.at(nu)?;
            println!(
                "  nu = {nu:<5} rho(0.05) = {:<12.4e} mass defect = {:.1e}  tail beyond {:.3} = {:.4}",
                m.value(0.05),
                fam.normalization_defect(nu)?,
                0.1 * r,
                fam.tail_mass(nu, 0.1 * r)?
            );
        }
    }
    if let Err(e) = fractional_family(3.0, r, 2)?.at(0.9) {
        println!("{e}");
    }
    Ok(())
}
