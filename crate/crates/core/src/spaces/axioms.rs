//! Randomized audits of the ball Banach function space axioms for every
//! norm engine: lattice property, Fatou property along truncations,
//! triangle inequality and positive homogeneity.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{norm, ExponentField, OrliczFunction, SpaceSpec, Weight};
use crate::error::Result;
use crate::field::SampledField;
use crate::geometry::{sample_quadrature, Domain, QuadratureGrid, Scheme};

/// Absolute slack for `‖g‖ <= ‖f‖` when `|g| <= |f|`.
pub const LATTICE_SLACK: f64 = 1e-12;
/// Absolute slack for the triangle inequality.
pub const TRIANGLE_SLACK: f64 = 1e-10;
/// Relative slack for `‖cf‖ = |c| ‖f‖`.
pub const HOMOGENEITY_SLACK: f64 = 1e-12;
/// Absolute slack for monotonicity along truncations and for reaching the
/// limit.
pub const FATOU_SLACK: f64 = 1e-12;

const TRUNCATION_LEVELS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Lattice,
    Fatou,
    Triangle,
    Homogeneity,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomOutcome {
    pub engine: String,
    pub axiom: Axiom,
    pub cases: usize,
    pub failures: usize,
    /// Largest violation seen (negative when every case held with room).
    pub worst_excess: f64,
}

impl AxiomOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// The 8×8 tensor-midpoint grid on the unit square used by the audits.
pub fn audit_grid() -> Arc<QuadratureGrid> {
    Arc::new(sample_quadrature(&Domain::unit_square(), 0.125, Scheme::TensorMidpoint).expect("unit square grid"))
}

/// One engine per family on the unit square, parameters inside the Banach
/// range.
pub fn banach_catalog() -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::Lebesgue { q: 1.0 },
        SpaceSpec::Lebesgue { q: 2.5 },
        SpaceSpec::Weighted {
            q: 2.0,
            weight: Weight::Power { a: 0.5 },
        },
        SpaceSpec::Lorentz { r: 3.0, tau: 2.0 },
        SpaceSpec::Orlicz {
            phi: OrliczFunction::PowerLog { q: 1.5 },
        },
        SpaceSpec::Orlicz {
            phi: OrliczFunction::Table {
                t: vec![0.0, 0.5, 1.0, 2.0],
                phi: vec![0.0, 0.25, 1.0, 4.0],
            },
        },
        SpaceSpec::Morrey { alpha: 4.0, r: 2.0 },
        SpaceSpec::Variable {
            exponent: ExponentField::Affine {
                base: 1.5,
                slope: vec![0.5, 0.5],
            },
        },
        SpaceSpec::Mixed { r: vec![1.5, 3.0] },
        SpaceSpec::HerzLocal {
            p: 2.0,
            q: 1.5,
            a: 0.5,
            xi: vec![0.5, 0.5],
        },
        SpaceSpec::HerzGlobal {
            p: 2.0,
            q: 2.0,
            a: -0.3,
            xi_spacing: Some(0.25),
        },
        SpaceSpec::Bbmorrey {
            q: 1.5,
            p: 2.0,
            r: 2.5,
            tau: 2.0,
            depth: 4,
        },
        SpaceSpec::OrliczSlice {
            phi: OrliczFunction::Power { q: 2.0 },
            r: 2.0,
            t: 0.25,
        },
        SpaceSpec::Convexified {
            inner: Box::new(SpaceSpec::Lorentz { r: 3.0, tau: 2.0 }),
            s: 0.5,
        },
    ]
}

fn random_values(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| {
            if rng.random_bool(0.25) {
                0.0
            } else {
                rng.random_range(-1.0..1.0)
            }
        })
        .collect()
}

struct Tally {
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    /// Records a case whose violation is `excess`; the case fails when
    /// `excess > 0`.
    fn record(&mut self, excess: f64) {
        self.cases += 1;
        if excess > 0.0 || excess.is_nan() {
            self.failures += 1;
        }
        self.worst = self.worst.max(excess);
    }

    fn finish(self, engine: &str, axiom: Axiom) -> AxiomOutcome {
        AxiomOutcome {
            engine: engine.to_string(),
            axiom,
            cases: self.cases,
            failures: self.failures,
            worst_excess: self.worst,
        }
    }
}

/// Runs `cases` random instances of each axiom against one engine.
pub fn audit_engine(spec: &SpaceSpec, grid: &Arc<QuadratureGrid>, cases: usize, seed: u64) -> Result<Vec<AxiomOutcome>> {
    let label = spec.label();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let field = |v: Vec<f64>| SampledField::new(grid.clone(), v);
    let mut lattice = Tally::new();
    let mut fatou = Tally::new();
    let mut triangle = Tally::new();
    let mut homogeneity = Tally::new();
    for _ in 0..cases {
        let f = random_values(&mut rng, n);
        let nf = norm(spec, &field(f.clone())?)?;

        let shrink: Vec<f64> = f.iter().map(|v| v * rng.random_range(0.0..=1.0)).collect();
        let ng = norm(spec, &field(shrink)?)?;
        lattice.record(ng - nf - LATTICE_SLACK);

        let abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
        let top = abs.iter().cloned().fold(0.0, f64::max);
        let mut prev = 0.0;
        let mut excess = f64::NEG_INFINITY;
        for k in 1..=TRUNCATION_LEVELS {
            let m = top * k as f64 / TRUNCATION_LEVELS as f64;
            let cut: Vec<f64> = abs.iter().map(|v| v.min(m)).collect();
            let nk = norm(spec, &field(cut)?)?;
            excess = excess.max(prev - nk - FATOU_SLACK);
            prev = nk;
        }
        excess = excess.max((prev - nf).abs() - FATOU_SLACK);
        fatou.record(excess);

        let g = random_values(&mut rng, n);
        let ng = norm(spec, &field(g.clone())?)?;
        let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let ns = norm(spec, &field(sum)?)?;
        triangle.record(ns - nf - ng - TRIANGLE_SLACK);

        let c = rng.random_range(-3.0..3.0f64);
        let c = if rng.random_bool(0.5) { -(10f64.powf(c)) } else { 10f64.powf(c) };
        let scaled: Vec<f64> = f.iter().map(|v| c * v).collect();
        let nc = norm(spec, &field(scaled)?)?;
        let expect = c.abs() * nf;
        homogeneity.record((nc - expect).abs() - HOMOGENEITY_SLACK * expect.max(1.0));
    }
    Ok(vec![
        lattice.finish(&label, Axiom::Lattice),
        fatou.finish(&label, Axiom::Fatou),
        triangle.finish(&label, Axiom::Triangle),
        homogeneity.finish(&label, Axiom::Homogeneity),
    ])
}

/// Audits every engine of [`banach_catalog`] on [`audit_grid`].
pub fn audit_all(cases: usize, seed: u64) -> Result<Vec<AxiomOutcome>> {
    let grid = audit_grid();
    let per_engine: Vec<Vec<AxiomOutcome>> = banach_catalog()
        .par_iter()
        .enumerate()
        .map(|(k, spec)| audit_engine(spec, &grid, cases, seed.wrapping_add(k as u64)))
        .collect::<Result<_>>()?;
    Ok(per_engine.into_iter().flatten().collect())
}

/// Largest `|‖f‖_X - ‖f‖_{L^q}|` over random fields for an engine whose
/// parameters collapse it onto `L^q`.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionOutcome {
    pub engine: String,
    pub cases: usize,
    pub worst_defect: f64,
}

/// The parameter choices that reduce an engine to `L^q`.
pub fn lebesgue_reductions(q: f64) -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::Lorentz { r: q, tau: q },
        SpaceSpec::Orlicz { phi: OrliczFunction::Power { q } },
        SpaceSpec::Morrey { alpha: q, r: q },
        SpaceSpec::Mixed { r: vec![q, q] },
        SpaceSpec::Variable { exponent: ExponentField::Constant { r: q } },
        SpaceSpec::Weighted { q, weight: Weight::Constant { c: 1.0 } },
    ]
}

/// Compares each reduction of [`lebesgue_reductions`] with the Lebesgue
/// engine on `cases` random fields over [`audit_grid`], with `q` drawn
/// from `[1.2, 4)` per field.
pub fn reduction_audit(cases: usize, seed: u64) -> Result<Vec<ReductionOutcome>> {
    let grid = audit_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<&str> = vec!["lorentz(q,q)", "orlicz(t^q)", "morrey(q,q)", "mixed(q,q)", "variable(q)", "weighted(q,1)"];
    let mut worst = vec![0.0f64; names.len()];
    for _ in 0..cases {
        let f = SampledField::new(grid.clone(), random_values(&mut rng, grid.len()))?;
        let q = rng.random_range(1.2..4.0);
        let l = norm(&SpaceSpec::Lebesgue { q }, &f)?;
        for (w, spec) in worst.iter_mut().zip(lebesgue_reductions(q)) {
            *w = w.max((norm(&spec, &f)? - l).abs());
        }
    }
    Ok(names
        .into_iter()
        .zip(worst)
        .map(|(engine, worst_defect)| ReductionOutcome {
            engine: engine.to_string(),
            cases,
            worst_defect,
        })
        .collect())
}
