//! Named test fields with analytic Euclidean derivatives.
//!
//! These back the expansion studies and the CLI field registry. Gauge powers
//! |q⁻¹*x|^s are differentiated through G(w) = (w₁²+w₂²)² + 16w₃² composed
//! with the left translation w = q⁻¹*x, which is affine in x with constant
//! Jacobian [[1,0,0],[0,1,0],[q₂/2,−q₁/2,1]], so the chain rule has no
//! second-order correction.

use crate::calculus::ScalarField;
use crate::geometry::Point;
use crate::harmonics::RadialSolution;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldParseError {
    #[error("unknown field '{0}'; known: x1, rsq, x3, gauge:<s>[@x1,x2,x3], radial:<p>,<a>,<b>[@x1,x2,x3]")]
    Unknown(String),
    #[error("malformed field parameter in '{0}'")]
    BadParameter(String),
}

/// The built-in registry of analytic fields.
#[derive(Clone, Copy, Debug)]
pub enum TestField {
    /// f(x) = x₁ (linear horizontal; p-harmonic for every p)
    LinearX1,
    /// f(x) = x₁² + x₂²
    HorizontalSquare,
    /// f(x) = x₃
    Vertical,
    /// f(x) = |q⁻¹*x|^s (Korányi gauge power)
    GaugePower { center: Point, s: f64 },
    /// Radial annulus solution a/|z⁻¹*x|^ξ + b (log profile at p = 4)
    Radial(RadialSolution),
}

/// G(w) = (w₁²+w₂²)² + 16w₃² and its derivatives.
fn g_val(w: Point) -> f64 {
    let rho2 = w.x1 * w.x1 + w.x2 * w.x2;
    rho2 * rho2 + 16.0 * w.x3 * w.x3
}

fn g_grad(w: Point) -> [f64; 3] {
    let rho2 = w.x1 * w.x1 + w.x2 * w.x2;
    [4.0 * w.x1 * rho2, 4.0 * w.x2 * rho2, 32.0 * w.x3]
}

fn g_hess(w: Point) -> [[f64; 3]; 3] {
    let rho2 = w.x1 * w.x1 + w.x2 * w.x2;
    [
        [4.0 * rho2 + 8.0 * w.x1 * w.x1, 8.0 * w.x1 * w.x2, 0.0],
        [8.0 * w.x1 * w.x2, 4.0 * rho2 + 8.0 * w.x2 * w.x2, 0.0],
        [0.0, 0.0, 32.0],
    ]
}

/// Derivatives of φ(G) pushed through w = q⁻¹*x.
/// phi_d1 = φ'(G), phi_d2 = φ''(G).
fn compose(center: Point, x: Point, phi_d1: f64, phi_d2: f64) -> ([f64; 3], [[f64; 3]; 3]) {
    let q = center;
    let w = q.inverse() * x;
    let dg = g_grad(w);
    let hg = g_hess(w);
    // grad_w and hess_w of φ(G(w))
    let mut grad_w = [0.0; 3];
    let mut hess_w = [[0.0; 3]; 3];
    for i in 0..3 {
        grad_w[i] = phi_d1 * dg[i];
        for j in 0..3 {
            hess_w[i][j] = phi_d2 * dg[i] * dg[j] + phi_d1 * hg[i][j];
        }
    }
    // J = dw/dx; row k lists ∂w_k/∂x_i
    let j = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.5 * q.x2, -0.5 * q.x1, 1.0],
    ];
    let mut grad_x = [0.0; 3];
    for i in 0..3 {
        for k in 0..3 {
            grad_x[i] += grad_w[k] * j[k][i];
        }
    }
    let mut hess_x = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    acc += j[k][a] * hess_w[k][l] * j[l][b];
                }
            }
            hess_x[a][b] = acc;
        }
    }
    (grad_x, hess_x)
}

impl TestField {
    /// Field id for CSV footers and CLI echoes.
    pub fn describe(&self) -> String {
        match self {
            TestField::LinearX1 => "x1".into(),
            TestField::HorizontalSquare => "rsq".into(),
            TestField::Vertical => "x3".into(),
            TestField::GaugePower { center, s } => format!(
                "gauge:{s}@{},{},{}",
                center.x1, center.x2, center.x3
            ),
            TestField::Radial(sol) => format!(
                "radial:{},{},{}@{},{},{}",
                sol.p, sol.coeff_a, sol.coeff_b, sol.center.x1, sol.center.x2, sol.center.x3
            ),
        }
    }
}

impl ScalarField for TestField {
    fn value(&self, x: Point) -> f64 {
        match self {
            TestField::LinearX1 => x.x1,
            TestField::HorizontalSquare => x.x1 * x.x1 + x.x2 * x.x2,
            TestField::Vertical => x.x3,
            TestField::GaugePower { center, s } => {
                g_val(center.inverse() * x).powf(s / 4.0)
            }
            TestField::Radial(sol) => {
                let g = g_val(sol.center.inverse() * x);
                if sol.p == 4.0 {
                    0.25 * sol.coeff_a * g.ln() + sol.coeff_b
                } else {
                    let xi = (4.0 - sol.p) / (sol.p - 1.0);
                    sol.coeff_a * g.powf(-xi / 4.0) + sol.coeff_b
                }
            }
        }
    }

    fn euclidean_gradient(&self, x: Point) -> Option<[f64; 3]> {
        Some(match self {
            TestField::LinearX1 => [1.0, 0.0, 0.0],
            TestField::HorizontalSquare => [2.0 * x.x1, 2.0 * x.x2, 0.0],
            TestField::Vertical => [0.0, 0.0, 1.0],
            TestField::GaugePower { center, s } => {
                let alpha = s / 4.0;
                let g = g_val(center.inverse() * x);
                compose(*center, x, alpha * g.powf(alpha - 1.0), 0.0).0
            }
            TestField::Radial(sol) => {
                let g = g_val(sol.center.inverse() * x);
                let (d1, _) = radial_phi_derivs(sol, g);
                compose(sol.center, x, d1, 0.0).0
            }
        })
    }

    fn euclidean_hessian(&self, x: Point) -> Option<[[f64; 3]; 3]> {
        Some(match self {
            TestField::LinearX1 | TestField::Vertical => [[0.0; 3]; 3],
            TestField::HorizontalSquare => [
                [2.0, 0.0, 0.0],
                [0.0, 2.0, 0.0],
                [0.0, 0.0, 0.0],
            ],
            TestField::GaugePower { center, s } => {
                let alpha = s / 4.0;
                let g = g_val(center.inverse() * x);
                compose(
                    *center,
                    x,
                    alpha * g.powf(alpha - 1.0),
                    alpha * (alpha - 1.0) * g.powf(alpha - 2.0),
                )
                .1
            }
            TestField::Radial(sol) => {
                let g = g_val(sol.center.inverse() * x);
                let (d1, d2) = radial_phi_derivs(sol, g);
                compose(sol.center, x, d1, d2).1
            }
        })
    }
}

/// φ'(G), φ''(G) for the radial profile written as a function of G = gauge⁴.
fn radial_phi_derivs(sol: &RadialSolution, g: f64) -> (f64, f64) {
    if sol.p == 4.0 {
        // φ(G) = (a/4)·ln G + b
        (0.25 * sol.coeff_a / g, -0.25 * sol.coeff_a / (g * g))
    } else {
        let xi = (4.0 - sol.p) / (sol.p - 1.0);
        let alpha = -xi / 4.0;
        (
            sol.coeff_a * alpha * g.powf(alpha - 1.0),
            sol.coeff_a * alpha * (alpha - 1.0) * g.powf(alpha - 2.0),
        )
    }
}

fn parse_point(s: &str, raw: &str) -> Result<Point, FieldParseError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(FieldParseError::BadParameter(raw.into()));
    }
    let mut c = [0.0; 3];
    for (slot, text) in c.iter_mut().zip(&parts) {
        *slot = text
            .trim()
            .parse()
            .map_err(|_| FieldParseError::BadParameter(raw.into()))?;
    }
    Ok(Point {
        x1: c[0],
        x2: c[1],
        x3: c[2],
    })
}

/// Parse a registry id: `x1`, `rsq`, `x3`, `gauge:<s>[@x1,x2,x3]`,
/// `radial:<p>,<a>,<b>[@x1,x2,x3]`.
pub fn parse_field(spec: &str) -> Result<TestField, FieldParseError> {
    let spec = spec.trim();
    match spec {
        "x1" => return Ok(TestField::LinearX1),
        "rsq" => return Ok(TestField::HorizontalSquare),
        "x3" => return Ok(TestField::Vertical),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("gauge:") {
        let (params, center) = match rest.split_once('@') {
            Some((p, c)) => (p, parse_point(c, spec)?),
            None => (rest, crate::geometry::ORIGIN),
        };
        let s: f64 = params
            .trim()
            .parse()
            .map_err(|_| FieldParseError::BadParameter(spec.into()))?;
        return Ok(TestField::GaugePower { center, s });
    }
    if let Some(rest) = spec.strip_prefix("radial:") {
        let (params, center) = match rest.split_once('@') {
            Some((p, c)) => (p, parse_point(c, spec)?),
            None => (rest, crate::geometry::ORIGIN),
        };
        let parts: Vec<&str> = params.split(',').collect();
        if parts.len() != 3 {
            return Err(FieldParseError::BadParameter(spec.into()));
        }
        let p: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| FieldParseError::BadParameter(spec.into()))?;
        let a: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| FieldParseError::BadParameter(spec.into()))?;
        let b: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| FieldParseError::BadParameter(spec.into()))?;
        let sol = RadialSolution::new(center, a, b, p)
            .map_err(|_| FieldParseError::BadParameter(spec.into()))?;
        return Ok(TestField::Radial(sol));
    }
    Err(FieldParseError::Unknown(spec.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{delta_h, horizontal_gradient, normalized_p_laplacian};
    use crate::geometry::{Metric, ORIGIN};
    use crate::harmonics::fit_radial_coeffs;
    use crate::pmean::Exponent;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(x1: f64, x2: f64, x3: f64) -> Point {
        Point { x1, x2, x3 }
    }

    /// Analytic derivatives must agree with the finite-difference path taken
    /// by a closure wrapping the same value function.
    #[test]
    fn analytic_vs_finite_difference() {
        let center = pt(0.3, -0.5, 0.2);
        let sol = fit_radial_coeffs(center, 0.4, 1.5, 0.0, 1.0, 3.0).unwrap();
        let fields: Vec<TestField> = vec![
            TestField::LinearX1,
            TestField::HorizontalSquare,
            TestField::Vertical,
            TestField::GaugePower { center, s: 4.0 },
            TestField::GaugePower { center, s: 5.5 },
            TestField::Radial(sol),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for field in &fields {
            for _ in 0..12 {
                let x = pt(
                    rng.random_range(-1.5..1.5),
                    rng.random_range(-1.5..1.5),
                    rng.random_range(-0.5..0.5),
                );
                // keep clear of the gauge singularity for the radial families
                if Metric::HeisenbergKoranyi.gauge(center.inverse() * x) < 0.3 {
                    continue;
                }
                let fval = |y: Point| field.value(y);
                let ga = horizontal_gradient(field, x, None);
                let gf = horizontal_gradient(&fval, x, None);
                let scale = 1.0 + ga.norm();
                assert!(
                    (ga.c1 - gf.c1).abs() < 1e-6 * scale && (ga.c2 - gf.c2).abs() < 1e-6 * scale,
                    "{}: gradient mismatch at {x:?}",
                    field.describe()
                );
                let la = delta_h(field, x, None);
                let lf = delta_h(&fval, x, None);
                assert!(
                    (la - lf).abs() < 2e-4 * (1.0 + la.abs()),
                    "{}: laplacian mismatch {la} vs {lf}",
                    field.describe()
                );
            }
        }
    }

    #[test]
    fn radial_field_is_p_harmonic() {
        for p in [2.0, 3.0, 4.0, 6.0] {
            let sol = fit_radial_coeffs(ORIGIN, 0.4, 1.5, 0.0, 1.0, p).unwrap();
            let field = TestField::Radial(sol);
            for x in [pt(0.8, 0.1, 0.05), pt(0.5, -0.5, -0.1), pt(-0.9, 0.4, 0.2)] {
                let r =
                    normalized_p_laplacian(&field, x, Exponent::finite(p).unwrap(), None).unwrap();
                assert!(r.abs() < 1e-9, "p = {p}: residual {r} at {x:?}");
            }
        }
    }

    #[test]
    fn gauge_power_normalized_laplacian() {
        // Δ^N_p |x|⁴ = 12·p·ρ² off the axis (A = 12ρ²·I for the quartic)
        let field = TestField::GaugePower {
            center: ORIGIN,
            s: 4.0,
        };
        for (x, p) in [(pt(2.0, 0.0, 0.0), 3.0), (pt(1.5, 1.0, 0.5), 3.0)] {
            let rho2 = x.x1 * x.x1 + x.x2 * x.x2;
            let v = normalized_p_laplacian(&field, x, Exponent::finite(p).unwrap(), None).unwrap();
            assert!(
                (v - 12.0 * p * rho2).abs() < 1e-9 * (1.0 + v.abs()),
                "got {v}, want {}",
                12.0 * p * rho2
            );
        }
    }

    #[test]
    fn parse_round_trip() {
        assert!(matches!(parse_field("x1").unwrap(), TestField::LinearX1));
        assert!(matches!(parse_field("rsq").unwrap(), TestField::HorizontalSquare));
        assert!(matches!(parse_field("x3").unwrap(), TestField::Vertical));
        match parse_field("gauge:4@-2,0,0").unwrap() {
            TestField::GaugePower { center, s } => {
                assert_eq!(s, 4.0);
                assert_eq!(center, pt(-2.0, 0.0, 0.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_field("radial:3,-1.5,2@0,0,0").unwrap() {
            TestField::Radial(sol) => {
                assert_eq!(sol.p, 3.0);
                assert_eq!(sol.coeff_a, -1.5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_field("nope").is_err());
        assert!(parse_field("gauge:abc").is_err());
        assert!(parse_field("radial:3,1").is_err());
    }
}
