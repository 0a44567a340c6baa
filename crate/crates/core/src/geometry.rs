//! Bounded uniform domains, quadrature grids on them, and an empirical
//! estimate of the (ε, ∞) cigar constant.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{dist, norm};

/// Points closer than this to a polygon edge count as boundary points.
const POLYGON_EDGE_EPS: f64 = 1e-12;

/// The closed catalog of connected bounded domains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Disk { center: [f64; 2], radius: f64 },
    /// Simple polygon, vertices listed counter-clockwise.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = Domain::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_interval() -> Self {
        Domain::Interval { a: 0.0, b: 1.0 }
    }

    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let d = Domain::Box { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_square() -> Self {
        Domain::Box {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        }
    }

    pub fn disk(center: [f64; 2], radius: f64) -> Result<Self> {
        let d = Domain::Disk { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let d = Domain::Polygon { vertices };
        d.validate()?;
        Ok(d)
    }

    /// Checks the shape invariants. Deserialized domains must pass this
    /// before use.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Domain::Interval { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(invalid("domain", format!("interval needs a < b, got ({a}, {b})")));
                }
            }
            Domain::Box { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() || lo.len() > 3 {
                    return Err(invalid("domain", "box needs matching lo/hi of dimension 1..=3"));
                }
                if !finite(lo) || !finite(hi) || lo.iter().zip(hi).any(|(l, h)| l >= h) {
                    return Err(invalid("domain", "box needs lo < hi on every axis"));
                }
            }
            Domain::Disk { center, radius } => {
                if !finite(center) || !(radius.is_finite() && *radius > 0.0) {
                    return Err(invalid("domain", "disk needs a finite center and positive radius"));
                }
            }
            Domain::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(invalid("domain", "polygon needs at least 3 vertices"));
                }
                if vertices.iter().any(|v| !finite(v)) {
                    return Err(invalid("domain", "polygon vertices must be finite"));
                }
                if signed_area(vertices) <= 0.0 {
                    return Err(invalid("domain", "polygon vertices must be counter-clockwise"));
                }
                if !is_simple(vertices) {
                    return Err(invalid("domain", "polygon must be simple"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Box { lo, .. } => lo.len(),
            Domain::Disk { .. } | Domain::Polygon { .. } => 2,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Strict membership; boundary points are outside.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &[f64]) -> bool {
        match self {
            Domain::Interval { a, b } => *a < x[0] && x[0] < *b,
            Domain::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| l < v && v < h),
            Domain::Disk { center, radius } => dist(x, center) < *radius,
            Domain::Polygon { vertices } => {
                winding_number(vertices, [x[0], x[1]]) != 0
                    && polygon_edge_distance(vertices, [x[0], x[1]]) > POLYGON_EDGE_EPS
            }
        }
    }

    /// Distance from an interior point to the boundary.
    pub fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        if !self.contains(x)? {
            return Err(Error::OutsideDomain);
        }
        Ok(self.boundary_distance_unchecked(x))
    }

    pub(crate) fn boundary_distance_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Interval { a, b } => (x[0] - a).min(b - x[0]),
            Domain::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| (v - l).min(h - v))
                .fold(f64::INFINITY, f64::min),
            Domain::Disk { center, radius } => radius - dist(x, center),
            Domain::Polygon { vertices } => polygon_edge_distance(vertices, [x[0], x[1]]),
        }
    }

    /// Smallest `R` with the domain inside `B(0, R/2)`.
    pub fn enclosing_radius(&self) -> f64 {
        let half = match self {
            Domain::Interval { a, b } => a.abs().max(b.abs()),
            Domain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| l.abs().max(h.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
            Domain::Disk { center, radius } => norm(center) + radius,
            Domain::Polygon { vertices } => vertices
                .iter()
                .map(|v| norm(v))
                .fold(0.0, f64::max),
        };
        2.0 * half
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Interval { a, b } => (vec![*a], vec![*b]),
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
            Domain::Disk { center, radius } => (
                vec![center[0] - radius, center[1] - radius],
                vec![center[0] + radius, center[1] + radius],
            ),
            Domain::Polygon { vertices } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Box { lo, hi } => dist(lo, hi),
            Domain::Disk { radius, .. } => 2.0 * radius,
            Domain::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for p in vertices {
                    for q in vertices {
                        d = d.max(dist(p, q));
                    }
                }
                d
            }
        }
    }

    /// Lebesgue measure |Ω|.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
            Domain::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Domain::Polygon { vertices } => signed_area(vertices),
        }
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        * 0.5
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn is_simple(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn winding_number(v: &[[f64; 2]], p: [f64; 2]) -> i32 {
    let n = v.len();
    let mut wn = 0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross(a, b, p) > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && cross(a, b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0);
    let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
    dist(&p, &c)
}

fn polygon_edge_distance(v: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| segment_distance(v[i], v[(i + 1) % n], p))
        .fold(f64::INFINITY, f64::min)
}

/// How cell centers are laid out by [`sample_quadrature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    TensorMidpoint,
    QuasiRandom,
}

/// Per-axis cell centers and widths of a tensor-product grid. Points of the
/// owning grid are ordered with the first axis varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorAxes {
    pub centers: Vec<Vec<f64>>,
    pub widths: Vec<Vec<f64>>,
}

impl TensorAxes {
    pub fn shape(&self) -> Vec<usize> {
        self.centers.iter().map(Vec::len).collect()
    }
}

/// Quadrature nodes in a domain with nonnegative cell measures.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    spacing: f64,
    uniform: bool,
    tensor: Option<TensorAxes>,
    domain: Option<Domain>,
}

impl QuadratureGrid {
    /// Builds a grid from raw points (e.g. imported from CSV). `spacing` is the
    /// characteristic cell size; pass `None` to derive it from the mean weight.
    pub fn from_points(
        dim: usize,
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
        spacing: Option<f64>,
    ) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(invalid("weights", "length differs from point count"));
        }
        if points.is_empty() {
            return Err(invalid("points", "grid needs at least one point"));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights", "cell measures must be finite and nonnegative"));
        }
        let spacing = spacing.unwrap_or_else(|| {
            let mean = weights.iter().sum::<f64>() / weights.len() as f64;
            mean.powf(1.0 / dim as f64)
        });
        Ok(QuadratureGrid {
            dim,
            coords,
            weights,
            spacing,
            uniform: false,
            tensor: None,
            domain: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Characteristic spacing h.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// True when interior cells sit on a regular lattice of step `spacing`.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn tensor(&self) -> Option<&TensorAxes> {
        self.tensor.as_ref()
    }

    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    pub fn total_weight(&self) -> f64 {
        crate::numeric::pairwise_sum(&self.weights)
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Every `stride`-th point, with weights rescaled so the total measure is
    /// preserved. Tensor structure is dropped for `stride > 1`.
    pub fn thinned(&self, stride: usize) -> QuadratureGrid {
        if stride <= 1 {
            return self.clone();
        }
        let idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        let kept: f64 = idx.iter().map(|&i| self.weights[i]).sum();
        let scale = if kept > 0.0 { self.total_weight() / kept } else { 0.0 };
        let mut coords = Vec::with_capacity(idx.len() * self.dim);
        for &i in &idx {
            coords.extend_from_slice(self.point(i));
        }
        QuadratureGrid {
            dim: self.dim,
            coords,
            weights: idx.iter().map(|&i| self.weights[i] * scale).collect(),
            spacing: self.spacing,
            uniform: false,
            tensor: None,
            domain: self.domain.clone(),
        }
    }
}

/// Samples quadrature cells of side `h` in the domain.
pub fn sample_quadrature(domain: &Domain, h: f64, scheme: Scheme) -> Result<QuadratureGrid> {
    domain.validate()?;
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("h", format!("spacing must be positive, got {h}")));
    }
    let diameter = domain.diameter();
    if h > diameter {
        return Err(Error::SpacingTooLarge { h, diameter });
    }
    match scheme {
        Scheme::TensorMidpoint => match domain {
            Domain::Interval { .. } | Domain::Box { .. } => Ok(tensor_box_grid(domain, h)),
            _ => Ok(accepted_lattice_grid(domain, h)),
        },
        Scheme::QuasiRandom => Ok(halton_grid(domain, h)),
    }
}

fn axis_cells(lo: f64, hi: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let m = (((hi - lo) / h) - 1e-9).ceil().max(1.0) as usize;
    let mut centers = Vec::with_capacity(m);
    let mut widths = Vec::with_capacity(m);
    for k in 0..m {
        let a = lo + k as f64 * h;
        let b = if k + 1 == m { hi } else { (lo + (k + 1) as f64 * h).min(hi) };
        centers.push(0.5 * (a + b));
        widths.push(b - a);
    }
    (centers, widths)
}

fn tensor_box_grid(domain: &Domain, h: f64) -> QuadratureGrid {
    let (lo, hi) = domain.bounding_box();
    let dim = lo.len();
    let (centers, widths): (Vec<_>, Vec<_>) =
        (0..dim).map(|k| axis_cells(lo[k], hi[k], h)).unzip();
    let shape: Vec<usize> = centers.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut coords = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        let mut w = 1.0;
        for k in 0..dim {
            coords.push(centers[k][idx[k]]);
            w *= widths[k][idx[k]];
        }
        weights.push(w);
        for k in 0..dim {
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    QuadratureGrid {
        dim,
        coords,
        weights,
        spacing: h,
        uniform: true,
        tensor: Some(TensorAxes { centers, widths }),
        domain: Some(domain.clone()),
    }
}

fn lattice_shape(lo: &[f64], hi: &[f64], h: f64) -> Vec<usize> {
    lo.iter()
        .zip(hi)
        .map(|(l, u)| (((u - l) / h) - 1e-9).ceil().max(1.0) as usize)
        .collect()
}

fn accepted_lattice_grid(domain: &Domain, h: f64) -> QuadratureGrid {
    let (lo, hi) = domain.bounding_box();
    let dim = lo.len();
    let shape = lattice_shape(&lo, &hi, h);
    let total: usize = shape.iter().product();
    let cell = h.powi(dim as i32);
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    for _ in 0..total {
        for k in 0..dim {
            x[k] = lo[k] + (idx[k] as f64 + 0.5) * h;
        }
        if domain.contains_unchecked(&x) {
            coords.extend_from_slice(&x);
            weights.push(cell);
        }
        for k in 0..dim {
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    QuadratureGrid {
        dim,
        coords,
        weights,
        spacing: h,
        uniform: true,
        tensor: None,
        domain: Some(domain.clone()),
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn halton_grid(domain: &Domain, h: f64) -> QuadratureGrid {
    const BASES: [u64; 3] = [2, 3, 5];
    let (lo, hi) = domain.bounding_box();
    let dim = lo.len();
    let vol: f64 = lo.iter().zip(&hi).map(|(l, u)| u - l).product();
    let n = (vol / h.powi(dim as i32)).ceil().max(1.0) as u64;
    let w = vol / n as f64;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut x = vec![0.0; dim];
    for i in 1..=n {
        for k in 0..dim {
            x[k] = lo[k] + radical_inverse(i, BASES[k]) * (hi[k] - lo[k]);
        }
        if domain.contains_unchecked(&x) {
            coords.extend_from_slice(&x);
            weights.push(w);
        }
    }
    QuadratureGrid {
        dim,
        coords,
        weights,
        spacing: h,
        uniform: false,
        tensor: None,
        domain: Some(domain.clone()),
    }
}

/// Bucket index over grid points for fixed-radius neighbour queries.
pub(crate) struct NeighborIndex<'a> {
    grid: &'a QuadratureGrid,
    lo: Vec<f64>,
    cell: f64,
    buckets: HashMap<[i64; 3], Vec<usize>>,
}

impl<'a> NeighborIndex<'a> {
    pub(crate) fn new(grid: &'a QuadratureGrid, cell: f64) -> Self {
        let (lo, _) = grid.bounding_box();
        let mut buckets: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (i, p) in grid.points().enumerate() {
            buckets.entry(Self::key(&lo, cell, p)).or_default().push(i);
        }
        NeighborIndex {
            grid,
            lo,
            cell,
            buckets,
        }
    }

    fn key(lo: &[f64], cell: f64, p: &[f64]) -> [i64; 3] {
        let mut k = [0i64; 3];
        for (d, v) in p.iter().enumerate() {
            k[d] = ((v - lo[d]) / cell).floor() as i64;
        }
        k
    }

    /// Indices of points `y` with `|x - y| < r`, in ascending order.
    pub(crate) fn within(&self, x: &[f64], r: f64) -> Vec<usize> {
        let dim = self.grid.dim();
        let reach = (r / self.cell).ceil() as i64;
        let c = Self::key(&self.lo, self.cell, x);
        let mut out = Vec::new();
        let span = |d: usize| if d < dim { -reach..=reach } else { 0..=0 };
        for a in span(0) {
            for b in span(1) {
                for e in span(2) {
                    let k = [c[0] + a, c[1] + b, c[2] + e];
                    if let Some(list) = self.buckets.get(&k) {
                        for &j in list {
                            if dist(x, self.grid.point(j)) < r {
                                out.push(j);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .partial_cmp(&self.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lattice graph of interior cell centers, joined to all lattice neighbours
/// (8-connected in 2-D, 2-connected in 1-D, 26-connected in 3-D).
struct LatticeGraph {
    dim: usize,
    nodes: Vec<Vec<f64>>,
    index: Vec<[i64; 3]>,
    lookup: HashMap<[i64; 3], usize>,
}

impl LatticeGraph {
    fn build(domain: &Domain, h: f64) -> Self {
        let (lo, hi) = domain.bounding_box();
        let dim = lo.len();
        let shape = lattice_shape(&lo, &hi, h);
        let total: usize = shape.iter().product();
        let mut nodes = Vec::new();
        let mut index = Vec::new();
        let mut lookup = HashMap::new();
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let x: Vec<f64> = (0..dim).map(|k| lo[k] + (idx[k] as f64 + 0.5) * h).collect();
            if domain.contains_unchecked(&x) {
                let mut key = [0i64; 3];
                for k in 0..dim {
                    key[k] = idx[k] as i64;
                }
                lookup.insert(key, nodes.len());
                nodes.push(x);
                index.push(key);
            }
            for k in 0..dim {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        LatticeGraph {
            dim,
            nodes,
            index,
            lookup,
        }
    }

    fn nearest(&self, x: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, p) in self.nodes.iter().enumerate() {
            let d = dist(x, p);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    fn shortest_path(&self, from: usize, to: usize) -> Option<(f64, Vec<usize>)> {
        let n = self.nodes.len();
        let mut best = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        best[from] = 0.0;
        heap.push(Frontier(0.0, from));
        let offsets: Vec<[i64; 3]> = {
            let r = |d: usize| if d < self.dim { -1..=1 } else { 0..=0 };
            let mut v = Vec::new();
            for a in r(0) {
                for b in r(1) {
                    for c in r(2) {
                        if (a, b, c) != (0, 0, 0) {
                            v.push([a, b, c]);
                        }
                    }
                }
            }
            v
        };
        while let Some(Frontier(d, u)) = heap.pop() {
            if u == to {
                break;
            }
            if d > best[u] {
                continue;
            }
            let key = self.index[u];
            for o in &offsets {
                let k = [key[0] + o[0], key[1] + o[1], key[2] + o[2]];
                if let Some(&v) = self.lookup.get(&k) {
                    // lengths are accumulated in units of h
                    let step = ((o[0] * o[0] + o[1] * o[1] + o[2] * o[2]) as f64).sqrt();
                    let nd = d + step;
                    if nd < best[v] {
                        best[v] = nd;
                        prev[v] = u;
                        heap.push(Frontier(nd, v));
                    }
                }
            }
        }
        if !best[to].is_finite() {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        Some((best[to], path))
    }
}

/// Lower estimate of the uniformity constant ε of the domain: the infimum,
/// over `trials` random point pairs, of the length and cigar ratios along
/// grid-graph geodesics. Deterministic per `seed`; a prefix of the trial
/// sequence is shared across trial counts, so the value is antitone in
/// `trials`.
pub fn estimate_uniformity(domain: &Domain, trials: usize, grid_h: f64, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    let graph = LatticeGraph::build(domain, grid_h);
    if graph.nodes.len() < 2 {
        return Err(Error::Disconnected);
    }
    let (lo, hi) = domain.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eps: f64 = 1.0;
    let mut done = 0;
    let mut attempts = 0usize;
    while done < trials {
        attempts += 1;
        if attempts > 1000 * trials {
            return Err(Error::Disconnected);
        }
        let mut sample = || loop {
            let x: Vec<f64> = (0..graph.dim).map(|k| rng.random_range(lo[k]..hi[k])).collect();
            if domain.contains_unchecked(&x) {
                break x;
            }
        };
        let (a, b) = (sample(), sample());
        let (ia, ib) = (graph.nearest(&a), graph.nearest(&b));
        if ia == ib {
            continue;
        }
        let (len, path) = graph.shortest_path(ia, ib).ok_or(Error::Disconnected)?;
        let x = &graph.nodes[ia];
        let y = &graph.nodes[ib];
        let dxy = dist(x, y);
        let units: f64 = (0..3)
            .map(|k| ((graph.index[ia][k] - graph.index[ib][k]) as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        let mut value = units / len;
        for &z in &path[1..path.len() - 1] {
            let zp = &graph.nodes[z];
            let denom = dist(x, zp) * dist(y, zp);
            if denom > 0.0 {
                value = value.min(domain.boundary_distance_unchecked(zp) * dxy / denom);
            }
        }
        eps = eps.min(value);
        done += 1;
    }
    Ok(eps.clamp(f64::MIN_POSITIVE, 1.0))
}
