//! Radial decreasing approximations of the identity (RDATI): one-parameter
//! families `nu -> rho_nu` of radial profiles with unit radial mass that
//! concentrate at the origin as `nu -> 0+`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::integrate;

const QUAD_TOL: f64 = 1e-12;

/// A radial profile `k(|z|)` on R^n as used by the nonlocal energies.
pub trait RadialKernel: Sync {
    fn dim(&self) -> usize;

    /// `k(r)` for `r > 0`.
    fn value(&self, r: f64) -> f64;

    /// Closed form of `∫_a^b k(r) r^(n-1) dr`.
    fn radial_mass(&self, a: f64, b: f64) -> f64;

    /// Radius beyond which `k` vanishes, if any.
    fn support(&self) -> Option<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `rho_nu(r) = nu p (2R)^(-nu p) r^(-n + nu p) 1_(0, 2R](r)`
    Fractional { p: f64, enclosing_radius: f64 },
    /// `rho_nu(r) = (n / nu^n) 1_(0, nu](r)`
    Bump,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdatiFamily {
    pub kind: FamilyKind,
    pub nu_max: f64,
    pub dim: usize,
}

/// Fractional family built from the power kernel truncated at `2R`, where
/// `R` is the enclosing radius of the domain. Admissible for
/// `nu < min(n/p, 1)`.
pub fn fractional_family(p: f64, enclosing_radius: f64, n: usize) -> Result<RdatiFamily> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("exponent must be >= 1, got {p}")));
    }
    if !(enclosing_radius > 0.0 && enclosing_radius.is_finite()) {
        return Err(invalid("R", "enclosing radius must be positive"));
    }
    if n == 0 {
        return Err(invalid("n", "dimension must be positive"));
    }
    Ok(RdatiFamily {
        kind: FamilyKind::Fractional { p, enclosing_radius },
        nu_max: (n as f64 / p).min(1.0),
        dim: n,
    })
}

/// Normalized indicator family with support `(0, nu]`.
pub fn bump_family(n: usize) -> RdatiFamily {
    RdatiFamily {
        kind: FamilyKind::Bump,
        nu_max: 1.0,
        dim: n,
    }
}

impl RdatiFamily {
    pub fn check_nu(&self, nu: f64) -> Result<()> {
        if !(nu > 0.0 && nu < self.nu_max) {
            return Err(Error::NuOutOfRange {
                nu,
                nu_max: self.nu_max,
            });
        }
        Ok(())
    }

    /// The member `rho_nu`.
    pub fn at(&self, nu: f64) -> Result<Mollifier> {
        self.check_nu(nu)?;
        Ok(Mollifier { family: *self, nu })
    }

    /// `|∫_0^∞ rho_nu(r) r^(n-1) dr - 1|`, integrated numerically.
    pub fn normalization_defect(&self, nu: f64) -> Result<f64> {
        let m = self.at(nu)?;
        Ok((m.numeric_mass(0.0) - 1.0).abs())
    }

    /// `∫_delta^∞ rho_nu(r) r^(n-1) dr`, integrated numerically.
    pub fn tail_mass(&self, nu: f64, delta: f64) -> Result<f64> {
        if !(delta > 0.0) {
            return Err(invalid("delta", "must be positive"));
        }
        Ok(self.at(nu)?.numeric_mass(delta))
    }

    /// Number of sampled pairs `r1 < r2` (over random admissible `nu`) where
    /// `rho_nu(r1) < rho_nu(r2)`.
    pub fn monotonicity_violations(&self, pairs: usize, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rmax = match self.kind {
            FamilyKind::Fractional { enclosing_radius, .. } => 2.5 * enclosing_radius,
            FamilyKind::Bump => 1.5,
        };
        let mut bad = 0;
        for _ in 0..pairs {
            let nu = rng.random_range(1e-4..1.0) * self.nu_max;
            let m = Mollifier { family: *self, nu };
            let a = rng.random_range(1e-9..rmax);
            let b = rng.random_range(1e-9..rmax);
            let (r1, r2) = if a < b { (a, b) } else { (b, a) };
            if r1 < r2 && m.value(r1) < m.value(r2) {
                bad += 1;
            }
        }
        bad
    }
}

/// A single profile `rho_nu` of an [`RdatiFamily`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    family: RdatiFamily,
    nu: f64,
}

impl Mollifier {
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn family(&self) -> &RdatiFamily {
        &self.family
    }

    fn numeric_mass(&self, from: f64) -> f64 {
        let n = self.family.dim as i32;
        match self.family.kind {
            FamilyKind::Fractional { p, enclosing_radius } => {
                let top = 2.0 * enclosing_radius;
                if from >= top {
                    return 0.0;
                }
                // in t = ln r the mass density is rho(e^t) e^(nt) = c e^(e t),
                // evaluated in log form so tiny nu p neither under- nor
                // overflows; mass below t_top - 60/e is under e^-60, dropped
                let e = self.nu * p;
                let ln_c = e.ln() - e * top.ln();
                let t_top = top.ln();
                let t_lo = if from > 0.0 { from.ln() } else { t_top - 60.0 / e };
                let n = n as f64;
                integrate(|t| (ln_c + (e - n) * t + n * t).exp(), t_lo, t_top, QUAD_TOL)
            }
            FamilyKind::Bump => {
                if from >= self.nu {
                    return 0.0;
                }
                integrate(|r| self.value(r) * r.powi(n - 1), from, self.nu, QUAD_TOL)
            }
        }
    }
}

impl RadialKernel for Mollifier {
    fn dim(&self) -> usize {
        self.family.dim
    }

    fn value(&self, r: f64) -> f64 {
        let n = self.family.dim as f64;
        match self.family.kind {
            FamilyKind::Fractional { p, enclosing_radius } => {
                if r > 0.0 && r <= 2.0 * enclosing_radius {
                    self.nu * p * (2.0 * enclosing_radius).powf(-self.nu * p) * r.powf(-n + self.nu * p)
                } else {
                    0.0
                }
            }
            FamilyKind::Bump => {
                if r > 0.0 && r <= self.nu {
                    n / self.nu.powf(n)
                } else {
                    0.0
                }
            }
        }
    }

    fn radial_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self.family.kind {
            FamilyKind::Fractional { p, enclosing_radius } => {
                let top = 2.0 * enclosing_radius;
                let e = self.nu * p;
                (b.min(top) / top).powf(e) - (a.min(top) / top).powf(e)
            }
            FamilyKind::Bump => {
                let n = self.family.dim as i32;
                (b.min(self.nu).powi(n) - a.min(self.nu).powi(n)) / self.nu.powi(n)
            }
        }
    }

    fn support(&self) -> Option<f64> {
        Some(match self.family.kind {
            FamilyKind::Fractional { enclosing_radius, .. } => 2.0 * enclosing_radius,
            FamilyKind::Bump => self.nu,
        })
    }
}
