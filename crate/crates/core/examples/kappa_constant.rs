//! The sphere moment kappa(p, n) in closed form against Monte Carlo.

use bbmlab::bbm::kappa;
use bbmlab::oracle::mc_sphere_moment;

fn main() -> bbmlab::Result<()> {
    println!("{:>4} {:>2} {:>12} {:>12} {:>9}", "p", "n", "closed form", "monte carlo", "rel err");
    for n in [1, 2, 3] {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let exact = kappa(p, n);
            let mc = mc_sphere_moment(p, n, 200_000, 42)?;
            println!("{p:>4} {n:>2} {exact:>12.6} {mc:>12.6} {:>9.2e}", (mc - exact).abs() / exact);
        }
    }
    Ok(())
}
