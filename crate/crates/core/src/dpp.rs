//! Lattice discretization of Ω ∪ Γ_ε and the fixed-point DPP solver.
//!
//! The domain and its outer ε-strip are sampled on a translate of hℤ³
//! anchored at the shape center, so every node's ε-ball candidate set sits at
//! integer lattice offsets and is exactly centrally symmetric about the node.
//! Strip membership uses per-constraint violations (gauge excess over the
//! outer radius, deficit under the inner radius, horizontal deficit under the
//! axis clearance), each of which lower-bounds the metric distance to Ω; the
//! strip therefore covers every exterior point an interior ball can reach.
//! The solver runs Jacobi sweeps of the natural p-mean over precomputed
//! neighbor quadratures with weight h³ per node.

use crate::calculus::ScalarField;
use crate::geometry::{Metric, Point};
use crate::pmean::{pairwise_sum, pmean_uniform_slice, Exponent, PMeanError};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DppError {
    #[error("shape radii must satisfy 0 < r_inner < r_outer (and clearance > 0)")]
    BadShape,
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("spacing must satisfy 0 < h <= epsilon/8, got h = {h} for epsilon = {epsilon}")]
    BadSpacing { h: f64, epsilon: f64 },
    #[error("no interior nodes: domain too thin for spacing {0}")]
    NoInteriorNodes(f64),
    #[error("interior ball exits the covered lattice box")]
    BallExitsLattice,
    #[error("node {0} is not an interior node")]
    NotInterior(usize),
    #[error("solver did not converge within {iterations} iterations (last sup-change {last_change:e})")]
    SolverDidNotConverge {
        iterations: u64,
        last_change: f64,
        history: Vec<(u64, f64)>,
    },
    #[error("results live on mismatched domains or exponents")]
    MismatchedDomains,
    #[error("point is not on the domain boundary (offset {0:e})")]
    NotOnBoundary(f64),
    #[error("no interior nodes within delta0 = {0} of the boundary point")]
    EmptyNeighborhood(f64),
    #[error(transparent)]
    PMean(#[from] PMeanError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Domain geometry. Korányi shapes use the gauge metric; Euclidean shapes the
/// standard one. The axis-excluded annulus removes a vertical cylinder around
/// the center axis, keeping the horizontal gradient of gauge-radial data away
/// from zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum DomainShape {
    KoranyiBall {
        center: [f64; 3],
        radius: f64,
    },
    KoranyiAnnulus {
        center: [f64; 3],
        r_inner: f64,
        r_outer: f64,
    },
    EuclideanBall {
        center: [f64; 3],
        radius: f64,
    },
    EuclideanAnnulus {
        center: [f64; 3],
        r_inner: f64,
        r_outer: f64,
    },
    AxisExcludedAnnulus {
        center: [f64; 3],
        r_inner: f64,
        r_outer: f64,
        axis_clearance: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainSpec {
    pub shape: DomainShape,
}

impl DomainSpec {
    pub fn new(shape: DomainShape) -> Result<DomainSpec, DppError> {
        let ok = match shape {
            DomainShape::KoranyiBall { radius, .. } | DomainShape::EuclideanBall { radius, .. } => {
                radius > 0.0
            }
            DomainShape::KoranyiAnnulus {
                r_inner, r_outer, ..
            }
            | DomainShape::EuclideanAnnulus {
                r_inner, r_outer, ..
            } => 0.0 < r_inner && r_inner < r_outer,
            DomainShape::AxisExcludedAnnulus {
                r_inner,
                r_outer,
                axis_clearance,
                ..
            } => 0.0 < r_inner && r_inner < r_outer && axis_clearance > 0.0,
        };
        if ok {
            Ok(DomainSpec { shape })
        } else {
            Err(DppError::BadShape)
        }
    }

    pub fn metric(&self) -> Metric {
        match self.shape {
            DomainShape::EuclideanBall { .. } | DomainShape::EuclideanAnnulus { .. } => {
                Metric::Euclidean3
            }
            _ => Metric::HeisenbergKoranyi,
        }
    }

    pub fn center(&self) -> Point {
        let c = match self.shape {
            DomainShape::KoranyiBall { center, .. }
            | DomainShape::KoranyiAnnulus { center, .. }
            | DomainShape::EuclideanBall { center, .. }
            | DomainShape::EuclideanAnnulus { center, .. }
            | DomainShape::AxisExcludedAnnulus { center, .. } => center,
        };
        Point {
            x1: c[0],
            x2: c[1],
            x3: c[2],
        }
    }

    fn outer_radius(&self) -> f64 {
        match self.shape {
            DomainShape::KoranyiBall { radius, .. } | DomainShape::EuclideanBall { radius, .. } => {
                radius
            }
            DomainShape::KoranyiAnnulus { r_outer, .. }
            | DomainShape::EuclideanAnnulus { r_outer, .. }
            | DomainShape::AxisExcludedAnnulus { r_outer, .. } => r_outer,
        }
    }

    /// Metric distance from the shape center.
    fn radial(&self, p: Point) -> f64 {
        self.metric().distance(self.center(), p)
    }

    /// Horizontal distance from the vertical axis through the center.
    fn axis_distance(&self, p: Point) -> f64 {
        let c = self.center();
        (p.x1 - c.x1).hypot(p.x2 - c.x2)
    }

    /// Strict interior membership.
    pub fn contains(&self, p: Point) -> bool {
        let g = self.radial(p);
        match self.shape {
            DomainShape::KoranyiBall { radius, .. } | DomainShape::EuclideanBall { radius, .. } => {
                g < radius
            }
            DomainShape::KoranyiAnnulus {
                r_inner, r_outer, ..
            }
            | DomainShape::EuclideanAnnulus {
                r_inner, r_outer, ..
            } => r_inner < g && g < r_outer,
            DomainShape::AxisExcludedAnnulus {
                r_inner,
                r_outer,
                axis_clearance,
                ..
            } => r_inner < g && g < r_outer && self.axis_distance(p) > axis_clearance,
        }
    }

    /// Largest single-constraint violation for a point outside the closure;
    /// each term lower-bounds dist(p, Ω), so {violation ≤ ε} contains every
    /// exterior point an interior ε-ball can reach. Zero on the closure.
    pub fn exterior_violation(&self, p: Point) -> f64 {
        let g = self.radial(p);
        let v = match self.shape {
            DomainShape::KoranyiBall { radius, .. } | DomainShape::EuclideanBall { radius, .. } => {
                g - radius
            }
            DomainShape::KoranyiAnnulus {
                r_inner, r_outer, ..
            }
            | DomainShape::EuclideanAnnulus {
                r_inner, r_outer, ..
            } => (g - r_outer).max(r_inner - g),
            DomainShape::AxisExcludedAnnulus {
                r_inner,
                r_outer,
                axis_clearance,
                ..
            } => (g - r_outer)
                .max(r_inner - g)
                .max(axis_clearance - self.axis_distance(p)),
        };
        v.max(0.0)
    }

    /// Smallest absolute constraint slack; near zero only near ∂Ω.
    pub fn boundary_offset(&self, p: Point) -> f64 {
        let g = self.radial(p);
        match self.shape {
            DomainShape::KoranyiBall { radius, .. } | DomainShape::EuclideanBall { radius, .. } => {
                (g - radius).abs()
            }
            DomainShape::KoranyiAnnulus {
                r_inner, r_outer, ..
            }
            | DomainShape::EuclideanAnnulus {
                r_inner, r_outer, ..
            } => (g - r_outer).abs().min((g - r_inner).abs()),
            DomainShape::AxisExcludedAnnulus {
                r_inner,
                r_outer,
                axis_clearance,
                ..
            } => (g - r_outer)
                .abs()
                .min((g - r_inner).abs())
                .min((self.axis_distance(p) - axis_clearance).abs()),
        }
    }

    /// Half-extents (around the center) of a box covering Ω ∪ Γ_ε.
    fn bounding_half_extents(&self, epsilon: f64) -> [f64; 3] {
        let r = self.outer_radius() + epsilon;
        let c = self.center();
        match self.metric() {
            Metric::Euclidean3 => [r, r, r],
            Metric::HeisenbergKoranyi => {
                // gauge ball about c: x3 spread grows with the shear |c_h|·r/2
                [r, r, 0.25 * r * r + 0.5 * (c.x1.abs() + c.x2.abs()) * r]
            }
        }
    }
}

/// Node classification inside a [`DiscreteDomain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Strip,
}

/// Lattice discretization of Ω ∪ Γ_ε: interior nodes first, strip nodes after,
/// plus per-interior-node neighbor quadratures (indices with weight h³).
pub struct DiscreteDomain {
    pub spec: DomainSpec,
    pub epsilon: f64,
    pub h: f64,
    nodes: Vec<Point>,
    n_interior: usize,
    nbr_offsets: Vec<u64>,
    nbr_targets: Vec<u32>,
}

/// Tolerance factor absorbing last-ulp disagreements between the ball-window
/// decomposition and the classifier's gauge arithmetic.
const STRIP_SLACK: f64 = 1.0 + 1e-9;

impl DiscreteDomain {
    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn n_strip(&self) -> usize {
        self.nodes.len() - self.n_interior
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn interior_nodes(&self) -> &[Point] {
        &self.nodes[..self.n_interior]
    }

    pub fn strip_nodes(&self) -> &[Point] {
        &self.nodes[self.n_interior..]
    }

    pub fn kind(&self, idx: usize) -> NodeKind {
        if idx < self.n_interior {
            NodeKind::Interior
        } else {
            NodeKind::Strip
        }
    }

    /// Quadrature weight per neighbor node.
    pub fn node_weight(&self) -> f64 {
        self.h * self.h * self.h
    }

    /// Neighbor indices of an interior node (its ε-ball quadrature support).
    pub fn neighbors(&self, idx: usize) -> &[u32] {
        let lo = self.nbr_offsets[idx] as usize;
        let hi = self.nbr_offsets[idx + 1] as usize;
        &self.nbr_targets[lo..hi]
    }
}

/// Discretize Ω ∪ Γ_ε on a lattice of spacing `h ≤ ε/8`.
pub fn discretize(spec: DomainSpec, epsilon: f64, h: f64) -> Result<DiscreteDomain, DppError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(DppError::BadEpsilon(epsilon));
    }
    if !(h > 0.0 && h <= epsilon / 8.0) {
        return Err(DppError::BadSpacing { h, epsilon });
    }
    let metric = spec.metric();
    let center = spec.center();
    let half = spec.bounding_half_extents(epsilon);
    // integer lattice i ∈ [−m, m] per axis anchored at the center
    let m: [i64; 3] = [
        (half[0] / h).ceil() as i64 + 1,
        (half[1] / h).ceil() as i64 + 1,
        (half[2] / h).ceil() as i64 + 1,
    ];
    let dims: [i64; 3] = [2 * m[0] + 1, 2 * m[1] + 1, 2 * m[2] + 1];
    let grid_len = (dims[0] * dims[1] * dims[2]) as usize;
    let coord = |i: i64, j: i64, k: i64| Point {
        x1: center.x1 + i as f64 * h,
        x2: center.x2 + j as f64 * h,
        x3: center.x3 + k as f64 * h,
    };
    let grid_index = |i: i64, j: i64, k: i64| -> Option<usize> {
        if i.abs() > m[0] || j.abs() > m[1] || k.abs() > m[2] {
            return None;
        }
        Some((((i + m[0]) * dims[1] + (j + m[1])) * dims[2] + (k + m[2])) as usize)
    };

    // classification pass, parallel over x1-slabs
    let strip_eps = epsilon * STRIP_SLACK;
    let slab_len = (dims[1] * dims[2]) as usize;
    let kinds: Vec<u8> = (-m[0]..=m[0])
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut slab = vec![0u8; slab_len];
            let mut idx = 0usize;
            for j in -m[1]..=m[1] {
                for k in -m[2]..=m[2] {
                    let p = coord(i, j, k);
                    if spec.contains(p) {
                        slab[idx] = 1;
                    } else if spec.exterior_violation(p) <= strip_eps {
                        slab[idx] = 2;
                    }
                    idx += 1;
                }
            }
            slab
        })
        .collect();

    let n_interior = kinds.iter().filter(|&&k| k == 1).count();
    if n_interior == 0 {
        return Err(DppError::NoInteriorNodes(h));
    }
    let n_strip = kinds.iter().filter(|&&k| k == 2).count();

    // node ids: interior in scan order, then strip in scan order
    let mut ids = vec![-1i64; grid_len];
    let mut next_interior = 0i64;
    let mut next_strip = n_interior as i64;
    let mut flat = 0usize;
    let mut interior_coords = Vec::with_capacity(n_interior);
    let mut strip_coords = Vec::with_capacity(n_strip);
    for i in -m[0]..=m[0] {
        for j in -m[1]..=m[1] {
            for k in -m[2]..=m[2] {
                match kinds[flat] {
                    1 => {
                        ids[flat] = next_interior;
                        next_interior += 1;
                        interior_coords.push((i, j, k));
                    }
                    2 => {
                        ids[flat] = next_strip;
                        next_strip += 1;
                        strip_coords.push((i, j, k));
                    }
                    _ => {}
                }
                flat += 1;
            }
        }
    }
    let mut nodes = Vec::with_capacity(n_interior + n_strip);
    for &(i, j, k) in &interior_coords {
        nodes.push(coord(i, j, k));
    }
    for &(i, j, k) in &strip_coords {
        nodes.push(coord(i, j, k));
    }

    // neighbor quadratures: all nodes within metric distance ε of each
    // interior node; the candidate window is exact for the gauge ball
    // (|w_h| ≤ ε and |w₃| ≤ √(ε⁴−|w_h|⁴)/4 with w₃ = Δ₃ − shear)
    let kmax = (epsilon / h).ceil() as i64;
    let eps4 = epsilon.powi(4);
    let lists: Result<Vec<Vec<u32>>, DppError> = interior_coords
        .par_iter()
        .map(|&(i, j, k)| {
            let x = coord(i, j, k);
            let mut list: Vec<u32> = Vec::new();
            for di in -kmax..=kmax {
                let d1 = di as f64 * h;
                for dj in -kmax..=kmax {
                    let d2 = dj as f64 * h;
                    match metric {
                        Metric::HeisenbergKoranyi => {
                            let rho2 = d1 * d1 + d2 * d2;
                            let rem = eps4 - rho2 * rho2;
                            if rem < 0.0 {
                                continue;
                            }
                            let s3 = 0.25 * rem.sqrt();
                            let shear = 0.5 * (x.x1 * d2 - x.x2 * d1);
                            let k_lo = ((shear - s3) / h).floor() as i64;
                            let k_hi = ((shear + s3) / h).ceil() as i64;
                            for dk in k_lo..=k_hi {
                                let w3 = dk as f64 * h - shear;
                                if w3.abs() > s3 {
                                    continue;
                                }
                                let flat = grid_index(i + di, j + dj, k + dk)
                                    .ok_or(DppError::BallExitsLattice)?;
                                let id = ids[flat];
                                if id < 0 {
                                    return Err(DppError::BallExitsLattice);
                                }
                                list.push(id as u32);
                            }
                        }
                        Metric::Euclidean3 => {
                            let rem = epsilon * epsilon - (d1 * d1 + d2 * d2);
                            if rem < 0.0 {
                                continue;
                            }
                            let s3 = rem.sqrt();
                            let k_span = (s3 / h).floor() as i64;
                            for dk in -k_span..=k_span {
                                if (dk as f64 * h).abs() > s3 {
                                    continue;
                                }
                                let flat = grid_index(i + di, j + dj, k + dk)
                                    .ok_or(DppError::BallExitsLattice)?;
                                let id = ids[flat];
                                if id < 0 {
                                    return Err(DppError::BallExitsLattice);
                                }
                                list.push(id as u32);
                            }
                        }
                    }
                }
            }
            Ok(list)
        })
        .collect();
    let lists = lists?;

    let mut nbr_offsets = Vec::with_capacity(n_interior + 1);
    nbr_offsets.push(0u64);
    let mut total = 0u64;
    for l in &lists {
        total += l.len() as u64;
        nbr_offsets.push(total);
    }
    let mut nbr_targets = Vec::with_capacity(total as usize);
    for l in lists {
        nbr_targets.extend_from_slice(&l);
    }

    Ok(DiscreteDomain {
        spec,
        epsilon,
        h,
        nodes,
        n_interior,
        nbr_offsets,
        nbr_targets,
    })
}

/// Natural p-mean of `values` over the ε-ball quadrature of an interior node.
pub fn dpp_apply(
    dom: &DiscreteDomain,
    values: &[f64],
    node: usize,
    p: Exponent,
    tol: f64,
) -> Result<f64, DppError> {
    if node >= dom.n_interior {
        return Err(DppError::NotInterior(node));
    }
    let buf: Vec<f64> = dom
        .neighbors(node)
        .iter()
        .map(|&t| values[t as usize])
        .collect();
    Ok(pmean_uniform_slice(&buf, dom.node_weight(), p, tol, None)?)
}

/// Converged DPP node values plus iteration diagnostics.
#[derive(Clone, Debug)]
pub struct SolveResult {
    /// One value per node, interior first then strip (strip = datum exactly).
    pub values: Vec<f64>,
    pub iterations: u64,
    pub final_residual: f64,
    /// (iteration, sup-change) at geometrically spaced iterations.
    pub residual_history: Vec<(u64, f64)>,
    pub epsilon: f64,
    pub h: f64,
    pub p: Exponent,
    pub tol: f64,
    pub n_interior: usize,
}

impl SolveResult {
    pub fn interior_values(&self) -> &[f64] {
        &self.values[..self.n_interior]
    }

    pub fn strip_values(&self) -> &[f64] {
        &self.values[self.n_interior..]
    }
}

pub const DEFAULT_MAX_ITER: u64 = 1_000_000;

/// Inner root tolerance used by the sweeps, well under the outer stop rule.
fn inner_tol(tol: f64) -> f64 {
    (tol * 1e-3).min(crate::pmean::DEFAULT_TOL)
}

/// Jacobi fixed-point iteration u ← μ_p(u, ε) from the mean of the strip
/// datum; stops when the sup-change drops to `tol`
/// (default 1e−9·(1 + range of G)).
pub fn solve(
    dom: &DiscreteDomain,
    g: &dyn ScalarField,
    p: Exponent,
    tol: Option<f64>,
    max_iter: u64,
) -> Result<SolveResult, DppError> {
    let n_int = dom.n_interior;
    let n_tot = dom.n_nodes();
    let mut values = vec![0.0f64; n_tot];
    for (slot, &node) in values[n_int..].iter_mut().zip(dom.strip_nodes()) {
        *slot = g.value(node);
    }
    let strip = &values[n_int..];
    let g_min = strip.iter().cloned().fold(f64::INFINITY, f64::min);
    let g_max = strip.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = g_max - g_min;
    let tol = tol.unwrap_or_else(|| 1e-9 * (1.0 + range));
    let itol = inner_tol(tol);
    let init = pairwise_sum(strip) / strip.len() as f64;
    for slot in values[..n_int].iter_mut() {
        *slot = init;
    }

    let weight = dom.node_weight();
    let mut next = values.clone();
    let mut history: Vec<(u64, f64)> = Vec::new();
    let mut next_log = 1u64;
    let mut iterations = 0u64;
    let mut last_change = f64::INFINITY;
    let warm_floor = 64.0 * f64::EPSILON * (1.0 + g_min.abs().max(g_max.abs()));

    loop {
        if iterations >= max_iter {
            return Err(DppError::SolverDidNotConverge {
                iterations,
                last_change,
                history,
            });
        }
        iterations += 1;
        let warm_width = if last_change.is_finite() {
            Some(4.0 * last_change + warm_floor)
        } else {
            None
        };
        let failure: Mutex<Option<PMeanError>> = Mutex::new(None);
        {
            let cur = &values;
            next[..n_int]
                .par_iter_mut()
                .enumerate()
                .for_each_init(Vec::new, |buf: &mut Vec<f64>, (i, slot)| {
                    buf.clear();
                    buf.extend(dom.neighbors(i).iter().map(|&t| cur[t as usize]));
                    let warm = warm_width.map(|w| (cur[i], w));
                    match pmean_uniform_slice(buf, weight, p, itol, warm) {
                        Ok(v) => *slot = v,
                        Err(e) => {
                            *slot = cur[i];
                            let mut guard = failure.lock().unwrap();
                            guard.get_or_insert(e);
                        }
                    }
                });
        }
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e.into());
        }
        let change = values[..n_int]
            .par_iter()
            .zip(&next[..n_int])
            .map(|(a, b)| (a - b).abs())
            .reduce(|| 0.0, f64::max);
        std::mem::swap(&mut values, &mut next);
        last_change = change;
        if iterations >= next_log {
            history.push((iterations, change));
            next_log *= 2;
        }
        if change <= tol {
            if history.last().map(|&(i, _)| i) != Some(iterations) {
                history.push((iterations, change));
            }
            break;
        }
    }

    // cold residual sweep on the converged iterate
    let failure: Mutex<Option<PMeanError>> = Mutex::new(None);
    let final_residual = (0..n_int)
        .into_par_iter()
        .map_init(Vec::new, |buf: &mut Vec<f64>, i| {
            buf.clear();
            buf.extend(dom.neighbors(i).iter().map(|&t| values[t as usize]));
            match pmean_uniform_slice(buf, weight, p, itol, None) {
                Ok(v) => (values[i] - v).abs(),
                Err(e) => {
                    let mut guard = failure.lock().unwrap();
                    guard.get_or_insert(e);
                    0.0
                }
            }
        })
        .reduce(|| 0.0, f64::max);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e.into());
    }

    Ok(SolveResult {
        values,
        iterations,
        final_residual,
        residual_history: history,
        epsilon: dom.epsilon,
        h: dom.h,
        p,
        tol,
        n_interior: n_int,
    })
}

/// Outcome of a pointwise check, with the first witness when it fails.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub pass: bool,
    /// Most negative slack seen (≥ 0 when the inequality holds everywhere).
    pub worst_margin: f64,
    pub witness: Option<(usize, Point)>,
}

fn same_domain(a: &SolveResult, b: &SolveResult) -> bool {
    a.epsilon == b.epsilon
        && a.h == b.h
        && a.n_interior == b.n_interior
        && a.values.len() == b.values.len()
        && a.p == b.p
}

/// Verify u_F ≤ u_G + strip_gap + slack at every node, where strip_gap is
/// sup over the strip of (F−G) and slack = 2·max solver tolerance.
pub fn comparison_check(
    dom: &DiscreteDomain,
    result_f: &SolveResult,
    result_g: &SolveResult,
    strip_gap: f64,
) -> Result<CheckReport, DppError> {
    if !same_domain(result_f, result_g) || result_f.values.len() != dom.n_nodes() {
        return Err(DppError::MismatchedDomains);
    }
    let slack = 2.0 * result_f.tol.max(result_g.tol);
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for i in 0..dom.n_nodes() {
        let margin = result_g.values[i] + strip_gap + slack - result_f.values[i];
        if margin < worst {
            worst = margin;
            if margin < 0.0 && witness.is_none() {
                witness = Some((i, dom.nodes()[i]));
            }
        }
    }
    Ok(CheckReport {
        pass: worst >= 0.0,
        worst_margin: worst,
        witness,
    })
}

fn solution_inequality_check(
    field: &dyn ScalarField,
    dom: &DiscreteDomain,
    p: Exponent,
    tol: f64,
    sign: f64,
) -> Result<CheckReport, DppError> {
    let slack = 10.0 * tol;
    let itol = inner_tol(tol);
    let values: Vec<f64> = dom.nodes().iter().map(|&n| field.value(n)).collect();
    let weight = dom.node_weight();
    let failure: Mutex<Option<PMeanError>> = Mutex::new(None);
    let margins: Vec<f64> = (0..dom.n_interior)
        .into_par_iter()
        .map_init(Vec::new, |buf: &mut Vec<f64>, i| {
            buf.clear();
            buf.extend(dom.neighbors(i).iter().map(|&t| values[t as usize]));
            match pmean_uniform_slice(buf, weight, p, itol, None) {
                Ok(mu) => sign * (mu - values[i]) + slack,
                Err(e) => {
                    let mut guard = failure.lock().unwrap();
                    guard.get_or_insert(e);
                    0.0
                }
            }
        })
        .collect();
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e.into());
    }
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for (i, &mgn) in margins.iter().enumerate() {
        if mgn < worst {
            worst = mgn;
            if mgn < 0.0 && witness.is_none() {
                witness = Some((i, dom.nodes()[i]));
            }
        }
    }
    Ok(CheckReport {
        pass: worst >= 0.0,
        worst_margin: worst,
        witness,
    })
}

/// field(x) ≤ μ_p(field, ε)(x) + 10·tol at every interior node.
pub fn subsolution_check(
    field: &dyn ScalarField,
    dom: &DiscreteDomain,
    p: Exponent,
    tol: f64,
) -> Result<CheckReport, DppError> {
    solution_inequality_check(field, dom, p, tol, 1.0)
}

/// field(x) ≥ μ_p(field, ε)(x) − 10·tol at every interior node.
pub fn supersolution_check(
    field: &dyn ScalarField,
    dom: &DiscreteDomain,
    p: Exponent,
    tol: f64,
) -> Result<CheckReport, DppError> {
    solution_inequality_check(field, dom, p, tol, -1.0)
}

/// max |u(x) − G(y)| over interior nodes within distance delta0 of the
/// boundary point y.
pub fn boundary_gap(
    dom: &DiscreteDomain,
    result: &SolveResult,
    y: Point,
    delta0: f64,
    g: &dyn ScalarField,
) -> Result<f64, DppError> {
    let offset = dom.spec.boundary_offset(y);
    if offset > 2.0 * dom.h {
        return Err(DppError::NotOnBoundary(offset));
    }
    let metric = dom.spec.metric();
    let gy = g.value(y);
    let mut gap: Option<f64> = None;
    for (i, &x) in dom.interior_nodes().iter().enumerate() {
        if metric.distance(x, y) <= delta0 {
            let d = (result.values[i] - gy).abs();
            gap = Some(gap.map_or(d, |cur: f64| cur.max(d)));
        }
    }
    gap.ok_or(DppError::EmptyNeighborhood(delta0))
}

// ── serialization ──

#[derive(Serialize)]
struct DomainJson<'a> {
    shape: &'a DomainShape,
    epsilon: f64,
    h: f64,
    n_interior: usize,
    n_strip: usize,
    interior_nodes: Vec<[f64; 3]>,
    strip_nodes: Vec<[f64; 3]>,
}

#[derive(Serialize)]
struct ResultJson<'a> {
    p: String,
    tol: f64,
    iterations: u64,
    final_residual: f64,
    residual_history: &'a [(u64, f64)],
    interior_values: &'a [f64],
    strip_values: &'a [f64],
}

#[derive(Serialize)]
struct RunJson<'a> {
    domain: DomainJson<'a>,
    result: ResultJson<'a>,
}

fn as_triplets(pts: &[Point]) -> Vec<[f64; 3]> {
    pts.iter().map(|p| [p.x1, p.x2, p.x3]).collect()
}

/// Serialize a solve run (domain plus result) as JSON.
pub fn write_run_json<W: Write>(
    dom: &DiscreteDomain,
    result: &SolveResult,
    out: W,
) -> Result<(), DppError> {
    let run = RunJson {
        domain: DomainJson {
            shape: &dom.spec.shape,
            epsilon: dom.epsilon,
            h: dom.h,
            n_interior: dom.n_interior(),
            n_strip: dom.n_strip(),
            interior_nodes: as_triplets(dom.interior_nodes()),
            strip_nodes: as_triplets(dom.strip_nodes()),
        },
        result: ResultJson {
            p: result.p.to_string(),
            tol: result.tol,
            iterations: result.iterations,
            final_residual: result.final_residual,
            residual_history: &result.residual_history,
            interior_values: result.interior_values(),
            strip_values: result.strip_values(),
        },
    };
    serde_json::to_writer_pretty(out, &run).map_err(std::io::Error::other)?;
    Ok(())
}

/// CSV export: `x1,x2,x3,kind,value,residual` per node; interior residuals
/// are recomputed cold, strip rows carry 0.
pub fn write_run_csv<W: Write>(
    dom: &DiscreteDomain,
    result: &SolveResult,
    mut out: W,
) -> Result<(), DppError> {
    writeln!(out, "x1,x2,x3,kind,value,residual")?;
    let itol = inner_tol(result.tol);
    for (i, &node) in dom.nodes().iter().enumerate() {
        let (kind, residual) = if i < dom.n_interior() {
            let mu = dpp_apply(dom, &result.values, i, result.p, itol)?;
            ("interior", (result.values[i] - mu).abs())
        } else {
            ("strip", 0.0)
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            node.x1, node.x2, node.x3, kind, result.values[i], residual
        )?;
    }
    Ok(())
}
