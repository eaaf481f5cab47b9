//! Heisenberg group algebra, Korányi metric structure, and ball quadrature.
//!
//! Points are elements of ℍ ≅ ℝ³ with the non-commutative product
//! `(x*y)₃ = x₃ + y₃ + (x₁y₂ − x₂y₁)/2`. The Korányi gauge
//! `|x| = ((x₁²+x₂²)² + 16x₃²)^{1/4}` induces the left-invariant metric
//! `d(x,y) = |x⁻¹*y|`, and the anisotropic dilations `ρ_λ(x) = (λx₁, λx₂, λ²x₃)`
//! scale it exactly. Haar measure is Lebesgue measure, so ball quadrature
//! weights are plain cell volumes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::Mul;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("coordinates must be finite")]
    NonFinitePoint,
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("lattice resolution must be at least 2, got {0}")]
    ResolutionTooCoarse(usize),
    #[error("Monte Carlo sample count must be at least 1")]
    NoSamples,
    #[error("quadrature is empty: resolution {resolution} too coarse for radius {radius}")]
    EmptyQuadrature { radius: f64, resolution: usize },
}

/// A point of ℍ ≅ ℝ³ carrying the group-algebra semantics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

pub const ORIGIN: Point = Point {
    x1: 0.0,
    x2: 0.0,
    x3: 0.0,
};

impl Point {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Point, GeometryError> {
        if x1.is_finite() && x2.is_finite() && x3.is_finite() {
            Ok(Point { x1, x2, x3 })
        } else {
            Err(GeometryError::NonFinitePoint)
        }
    }

    /// Group inverse; coordinate negation.
    pub fn inverse(self) -> Point {
        Point {
            x1: -self.x1,
            x2: -self.x2,
            x3: -self.x3,
        }
    }

    /// Anisotropic dilation ρ_λ(x) = (λx₁, λx₂, λ²x₃).
    pub fn dilate(self, lambda: f64) -> Result<Point, GeometryError> {
        if !(lambda > 0.0) {
            return Err(GeometryError::NonPositiveDilation(lambda));
        }
        Ok(Point {
            x1: lambda * self.x1,
            x2: lambda * self.x2,
            x3: lambda * lambda * self.x3,
        })
    }

    /// Distance of the horizontal projection from the origin.
    pub fn horizontal_norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }
}

impl Mul for Point {
    type Output = Point;

    /// The Heisenberg group law.
    fn mul(self, rhs: Point) -> Point {
        Point {
            x1: self.x1 + rhs.x1,
            x2: self.x2 + rhs.x2,
            x3: self.x3 + rhs.x3 + 0.5 * (self.x1 * rhs.x2 - self.x2 * rhs.x1),
        }
    }
}

pub fn group_mul(a: Point, b: Point) -> Point {
    a * b
}

pub fn group_inv(a: Point) -> Point {
    a.inverse()
}

/// Metric structure all geometry operations dispatch on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Metric {
    HeisenbergKoranyi,
    Euclidean3,
}

impl Metric {
    /// Gauge of a point: Korányi gauge in Heisenberg mode, Euclidean norm otherwise.
    pub fn gauge(self, a: Point) -> f64 {
        match self {
            Metric::HeisenbergKoranyi => {
                let rho2 = a.x1 * a.x1 + a.x2 * a.x2;
                (rho2 * rho2 + 16.0 * a.x3 * a.x3).sqrt().sqrt()
            }
            Metric::Euclidean3 => (a.x1 * a.x1 + a.x2 * a.x2 + a.x3 * a.x3).sqrt(),
        }
    }

    /// d(a,b) = gauge(a⁻¹ * b) (Heisenberg) or |b − a| (Euclidean).
    pub fn distance(self, a: Point, b: Point) -> f64 {
        match self {
            Metric::HeisenbergKoranyi => self.gauge(a.inverse() * b),
            Metric::Euclidean3 => self.gauge(Point {
                x1: b.x1 - a.x1,
                x2: b.x2 - a.x2,
                x3: b.x3 - a.x3,
            }),
        }
    }

    /// Half-extents of the tight bounding box of the gauge ball of radius `r`
    /// centered at the group origin. Heisenberg: 16x₃² ≤ r⁴ forces |x₃| ≤ r²/4.
    pub fn ball_half_extents(self, r: f64) -> [f64; 3] {
        match self {
            Metric::HeisenbergKoranyi => [r, r, 0.25 * r * r],
            Metric::Euclidean3 => [r, r, r],
        }
    }

    /// Attach a canonical offset `z` (gauge coordinates around the origin)
    /// to a ball center: group translation in Heisenberg mode, vector
    /// addition in Euclidean mode.
    pub fn attach(self, center: Point, z: Point) -> Point {
        match self {
            Metric::HeisenbergKoranyi => center * z,
            Metric::Euclidean3 => Point {
                x1: center.x1 + z.x1,
                x2: center.x2 + z.x2,
                x3: center.x3 + z.x3,
            },
        }
    }
}

/// Quadrature construction scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Midpoint-rule cells of the tight bounding box whose centers lie in the
    /// ball; `resolution` cells per axis, weight = cell volume.
    Lattice { resolution: usize },
    /// Rejection-sampled uniform points with equal weights summing to the
    /// lattice-estimated ball volume. Sample i draws from a stream derived
    /// from (seed, i), so generation order is irrelevant.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Internal lattice resolution used to normalize Monte-Carlo weights.
const MC_VOLUME_RESOLUTION: usize = 256;

/// A finite measure approximation of a metric ball: nodes plus Lebesgue weights.
///
/// Both construction schemes produce equal weights per node, so the weight is
/// stored once.
#[derive(Clone, Debug)]
pub struct BallQuadrature {
    pub center: Point,
    pub radius: f64,
    pub metric: Metric,
    pub scheme: Scheme,
    nodes: Vec<Point>,
    node_weight: f64,
}

impl BallQuadrature {
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node_weight(&self) -> f64 {
        self.node_weight
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of weights; the quadrature's estimate of the ball volume.
    pub fn total_weight(&self) -> f64 {
        self.node_weight * self.nodes.len() as f64
    }
}

/// Walk the midpoint lattice of the tight bounding box of the radius-`radius`
/// ball around `center` and call `visit` with each node inside the ball.
/// Returns (node count, weight per node).
///
/// The cell-center grid is symmetric under z → −z for every resolution, and
/// group translation preserves that symmetry, so the emitted node cloud is
/// exactly centrally symmetric about the center.
pub fn for_each_lattice_node<F: FnMut(Point)>(
    center: Point,
    radius: f64,
    metric: Metric,
    resolution: usize,
    mut visit: F,
) -> Result<(usize, f64), GeometryError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    if resolution < 2 {
        return Err(GeometryError::ResolutionTooCoarse(resolution));
    }
    let half = metric.ball_half_extents(radius);
    let n = resolution;
    let step = [
        2.0 * half[0] / n as f64,
        2.0 * half[1] / n as f64,
        2.0 * half[2] / n as f64,
    ];
    let weight = step[0] * step[1] * step[2];
    let mut count = 0usize;
    let r4 = radius.powi(4);
    let r2 = radius * radius;
    for i in 0..n {
        let z1 = -half[0] + (i as f64 + 0.5) * step[0];
        for j in 0..n {
            let z2 = -half[1] + (j as f64 + 0.5) * step[1];
            let rho2 = z1 * z1 + z2 * z2;
            for k in 0..n {
                let z3 = -half[2] + (k as f64 + 0.5) * step[2];
                let inside = match metric {
                    Metric::HeisenbergKoranyi => rho2 * rho2 + 16.0 * z3 * z3 <= r4,
                    Metric::Euclidean3 => rho2 + z3 * z3 <= r2,
                };
                if inside {
                    count += 1;
                    visit(metric.attach(center, Point { x1: z1, x2: z2, x3: z3 }));
                }
            }
        }
    }
    Ok((count, weight))
}

/// Lattice estimate of the volume of the radius-`radius` ball.
pub fn lattice_ball_volume(
    radius: f64,
    metric: Metric,
    resolution: usize,
) -> Result<f64, GeometryError> {
    let (count, weight) = for_each_lattice_node(ORIGIN, radius, metric, resolution, |_| {})?;
    Ok(count as f64 * weight)
}

/// Evaluate `f` at every lattice node of the ball without materializing the
/// node list; returns the values and the per-node weight. Used for the large
/// expansion sweeps where storing points would be wasteful.
pub fn lattice_ball_values<F: Fn(Point) -> f64>(
    center: Point,
    radius: f64,
    metric: Metric,
    resolution: usize,
    f: F,
) -> Result<(Vec<f64>, f64), GeometryError> {
    let mut values = Vec::new();
    let (count, weight) =
        for_each_lattice_node(center, radius, metric, resolution, |p| values.push(f(p)))?;
    if count == 0 {
        return Err(GeometryError::EmptyQuadrature { radius, resolution });
    }
    Ok((values, weight))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Build a ball quadrature with the requested scheme.
pub fn ball_quadrature(
    center: Point,
    radius: f64,
    metric: Metric,
    scheme: Scheme,
) -> Result<BallQuadrature, GeometryError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    let nodes;
    let node_weight;
    match scheme {
        Scheme::Lattice { resolution } => {
            let mut pts = Vec::new();
            let (count, weight) =
                for_each_lattice_node(center, radius, metric, resolution, |p| pts.push(p))?;
            if count == 0 {
                return Err(GeometryError::EmptyQuadrature { radius, resolution });
            }
            nodes = pts;
            node_weight = weight;
        }
        Scheme::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(GeometryError::NoSamples);
            }
            let volume = lattice_ball_volume(radius, metric, MC_VOLUME_RESOLUTION)?;
            let half = metric.ball_half_extents(radius);
            let r4 = radius.powi(4);
            let r2 = radius * radius;
            let mut pts = Vec::with_capacity(samples);
            for i in 0..samples {
                let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (i as u64)));
                loop {
                    let z1 = rng.random_range(-half[0]..half[0]);
                    let z2 = rng.random_range(-half[1]..half[1]);
                    let z3 = rng.random_range(-half[2]..half[2]);
                    let rho2 = z1 * z1 + z2 * z2;
                    let inside = match metric {
                        Metric::HeisenbergKoranyi => rho2 * rho2 + 16.0 * z3 * z3 <= r4,
                        Metric::Euclidean3 => rho2 + z3 * z3 <= r2,
                    };
                    if inside {
                        pts.push(metric.attach(center, Point { x1: z1, x2: z2, x3: z3 }));
                        break;
                    }
                }
            }
            node_weight = volume / samples as f64;
            nodes = pts;
        }
    }
    Ok(BallQuadrature {
        center,
        radius,
        metric,
        scheme,
        nodes,
        node_weight,
    })
}

/// Sum of quadrature weights.
pub fn ball_volume(q: &BallQuadrature) -> f64 {
    q.total_weight()
}

/// Independent Monte-Carlo volume estimate by acceptance ratio:
/// box volume × accepted / tried. Used as an oracle against the lattice
/// estimate; it does not share the lattice code path.
pub fn monte_carlo_volume_estimate(
    radius: f64,
    metric: Metric,
    accepted_target: usize,
    seed: u64,
) -> Result<f64, GeometryError> {
    if !(radius > 0.0) {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    if accepted_target == 0 {
        return Err(GeometryError::NoSamples);
    }
    let half = metric.ball_half_extents(radius);
    let box_volume = 8.0 * half[0] * half[1] * half[2];
    let r4 = radius.powi(4);
    let r2 = radius * radius;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let mut accepted = 0usize;
    let mut tried = 0usize;
    while accepted < accepted_target {
        let z1 = rng.random_range(-half[0]..half[0]);
        let z2 = rng.random_range(-half[1]..half[1]);
        let z3 = rng.random_range(-half[2]..half[2]);
        tried += 1;
        let rho2 = z1 * z1 + z2 * z2;
        let inside = match metric {
            Metric::HeisenbergKoranyi => rho2 * rho2 + 16.0 * z3 * z3 <= r4,
            Metric::Euclidean3 => rho2 + z3 * z3 <= r2,
        };
        if inside {
            accepted += 1;
        }
    }
    Ok(box_volume * accepted as f64 / tried as f64)
}
