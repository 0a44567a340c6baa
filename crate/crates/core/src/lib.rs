//! Numerical laboratory for nonlocal approximations of Sobolev-type norms.
//!
//! A [`field::SampledField`] lives on a [`geometry::QuadratureGrid`] covering
//! a bounded [`geometry::Domain`]. The [`nonlocal`] module turns it into the
//! functional
//!
//! ```text
//! ‖ [ ∫_Ω |f(·) - f(y)|^p / |· - y|^p ρ_ν(|· - y|) dy ]^(1/p) ‖_X
//! ```
//!
//! for a radial family `ρ_ν` from [`mollifiers`] and a ball Banach function
//! space `X` from [`spaces`]. [`bbm::convergence_study`] tracks it as
//! `ν → 0`, extrapolates the limit and compares it with
//! `κ(p,n)^(1/p) ‖ |∇f| ‖_X`. [`experiment`] drives studies from config
//! files, and [`oracle`] holds brute-force reference computations.
//!
//! ```
//! use bbmlab::bbm::kappa;
//! assert_eq!(kappa(2.0, 1), 2.0);
//! assert!((kappa(2.0, 2) - std::f64::consts::PI).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bbm;
pub mod error;
pub mod experiment;
pub mod field;
pub mod geometry;
pub mod mollifiers;
pub mod nonlocal;
pub mod numeric;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod spaces;

pub use bbm::{convergence_study, kappa, ConvergenceReport, Mode, Study, StudyOptions, Verdict};
pub use error::{Error, Result};
pub use field::{sample, SampledField, TestFunction};
pub use geometry::{sample_quadrature, Domain, QuadratureGrid, Scheme};
pub use mollifiers::{bump_family, fractional_family, RdatiFamily};
pub use nonlocal::{bbm_functional, gagliardo_functional, EnergyParams};
pub use spaces::{norm, SpaceSpec};
