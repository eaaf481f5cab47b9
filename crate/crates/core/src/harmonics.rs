//! Explicit p-harmonic reference solutions and boundary-iteration constants.
//!
//! The gauge power |z⁻¹*x|^{−ξ} with ξ = (4−p)/(p−1) is Δ^N_{ℍ,p}-harmonic
//! away from the vertical axis through its center (where the horizontal
//! gradient of any gauge-radial function vanishes); at p = 4 the profile
//! degenerates to a logarithm. Annulus solutions a/|·|^ξ + b furnish the
//! barriers behind the boundary estimate, whose contraction factor θ and
//! iteration count k₀ are computed here.

use crate::geometry::{Metric, Point};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarmonicsError {
    #[error("exponent must be finite with p > 1, got {0}")]
    ExponentOutOfRange(f64),
    #[error("boundary-iteration exponent must satisfy p >= 2, got {0}")]
    ExponentBelowTwo(f64),
    #[error("mu must lie in (0, 1), got {0}")]
    MuOutOfRange(f64),
    #[error("radii must satisfy 0 < r_inner < r_outer, got ({0}, {1})")]
    BadRadii(f64, f64),
    #[error("radial solutions cannot be evaluated at their center")]
    EvalAtCenter,
    #[error("perturbation exponent must satisfy s >= 4, got {0}")]
    BadPerturbationExponent(f64),
    #[error("delta and eta must be positive")]
    BadIterationParams,
    #[error("need sup_g >= inf_g, got sup {0} < inf {1}")]
    BadBounds(f64, f64),
    #[error("theta must lie in (0, 1), got {0}")]
    ThetaOutOfRange(f64),
}

/// ξ(p) = (4 − p)/(p − 1); the gauge-power exponent of radial solutions.
/// Zero exactly at p = 4, where the radial profile is logarithmic.
pub fn xi(p: f64) -> Result<f64, HarmonicsError> {
    if !p.is_finite() || p <= 1.0 {
        return Err(HarmonicsError::ExponentOutOfRange(p));
    }
    Ok((4.0 - p) / (p - 1.0))
}

/// Radial annulus solution: a/|z⁻¹*x|^ξ + b for p ≠ 4, a·log|z⁻¹*x| + b at p = 4.
#[derive(Clone, Copy, Debug)]
pub struct RadialSolution {
    pub center: Point,
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub p: f64,
}

impl RadialSolution {
    pub fn new(center: Point, coeff_a: f64, coeff_b: f64, p: f64) -> Result<Self, HarmonicsError> {
        xi(p)?;
        Ok(RadialSolution {
            center,
            coeff_a,
            coeff_b,
            p,
        })
    }

    pub(crate) fn eval_at_gauge(&self, r: f64) -> f64 {
        if self.p == 4.0 {
            self.coeff_a * r.ln() + self.coeff_b
        } else {
            let xi = (4.0 - self.p) / (self.p - 1.0);
            self.coeff_a * r.powf(-xi) + self.coeff_b
        }
    }
}

/// Evaluate the radial solution; errs at the center where the gauge vanishes.
pub fn radial_eval(sol: &RadialSolution, x: Point) -> Result<f64, HarmonicsError> {
    let r = Metric::HeisenbergKoranyi.gauge(sol.center.inverse() * x);
    if r == 0.0 {
        return Err(HarmonicsError::EvalAtCenter);
    }
    Ok(sol.eval_at_gauge(r))
}

/// Solve the two boundary conditions U(r_inner) = v_inner, U(r_outer) = v_outer
/// for the radial coefficients (a, b).
pub fn fit_radial_coeffs(
    center: Point,
    r_inner: f64,
    r_outer: f64,
    v_inner: f64,
    v_outer: f64,
    p: f64,
) -> Result<RadialSolution, HarmonicsError> {
    if !(0.0 < r_inner && r_inner < r_outer) {
        return Err(HarmonicsError::BadRadii(r_inner, r_outer));
    }
    let xi = xi(p)?;
    let (a, b);
    if p == 4.0 {
        a = (v_outer - v_inner) / (r_outer.ln() - r_inner.ln());
        b = v_inner - a * r_inner.ln();
    } else {
        let phi_in = r_inner.powf(-xi);
        let phi_out = r_outer.powf(-xi);
        a = (v_inner - v_outer) / (phi_in - phi_out);
        b = v_inner - a * phi_in;
    }
    Ok(RadialSolution {
        center,
        coeff_a: a,
        coeff_b: b,
        p,
    })
}

/// The perturbation function v(x) = |q₀⁻¹*x|^s, s ≥ 4.
#[derive(Clone, Copy, Debug)]
pub struct PerturbationFn {
    pub q0: Point,
    pub s: f64,
}

impl PerturbationFn {
    pub fn new(q0: Point, s: f64) -> Result<Self, HarmonicsError> {
        if !(s >= 4.0) {
            return Err(HarmonicsError::BadPerturbationExponent(s));
        }
        Ok(PerturbationFn { q0, s })
    }
}

pub fn perturbation_eval(v: &PerturbationFn, x: Point) -> f64 {
    Metric::HeisenbergKoranyi.gauge(v.q0.inverse() * x).powf(v.s)
}

/// Contraction factor of the boundary iteration,
/// θ = [1 − ½(μ/(2−μ))^ξ − ½(μ/2)^ξ] / [1 − (μ/2)^ξ] for p ≥ 2, p ≠ 4.
/// At p = 4 the expression is a 0/0 form in ξ and is replaced by its ξ → 0
/// limit [ln(μ/(2−μ)) + ln(μ/2)] / (2·ln(μ/2)).
pub fn theta(mu: f64, p: f64) -> Result<f64, HarmonicsError> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(HarmonicsError::MuOutOfRange(mu));
    }
    if !p.is_finite() || p < 2.0 {
        return Err(HarmonicsError::ExponentBelowTwo(p));
    }
    let a = mu / (2.0 - mu);
    let b = mu / 2.0;
    if p == 4.0 {
        return Ok(0.5 * (a.ln() + b.ln()) / b.ln());
    }
    let xi = (4.0 - p) / (p - 1.0);
    Ok((1.0 - 0.5 * a.powf(xi) - 0.5 * b.powf(xi)) / (1.0 - b.powf(xi)))
}

/// Smallest iteration count k₀ with θ^{k₀}(sup_g − inf_g) ≤ η/2, computed as
/// the smallest integer strictly exceeding log_θ(η/2 · (sup_g − inf_g + 1)⁻¹)
/// and at least 1. A zero gap needs no contraction, so k₀ = 1. Logs landing
/// within 1e−9 of an integer are bumped up one to keep the strict inequality
/// robust under floating point.
pub fn k0(eta: f64, sup_g: f64, inf_g: f64, theta: f64) -> Result<u32, HarmonicsError> {
    if !(eta > 0.0) {
        return Err(HarmonicsError::BadIterationParams);
    }
    if sup_g < inf_g {
        return Err(HarmonicsError::BadBounds(sup_g, inf_g));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(HarmonicsError::ThetaOutOfRange(theta));
    }
    if sup_g == inf_g {
        return Ok(1);
    }
    let arg = 0.5 * eta / (sup_g - inf_g + 1.0);
    let log = arg.ln() / theta.ln();
    let k = if (log - log.round()).abs() <= 1e-9 {
        log.round() + 1.0
    } else {
        log.ceil()
    };
    Ok(k.max(1.0) as u32)
}

/// Validated inputs for the boundary iteration.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryIterationParams {
    pub mu: f64,
    pub p: f64,
    pub delta: f64,
    pub eta: f64,
}

impl BoundaryIterationParams {
    pub fn new(mu: f64, p: f64, delta: f64, eta: f64) -> Result<Self, HarmonicsError> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(HarmonicsError::MuOutOfRange(mu));
        }
        if !p.is_finite() || p < 2.0 {
            return Err(HarmonicsError::ExponentBelowTwo(p));
        }
        if !(delta > 0.0 && eta > 0.0) {
            return Err(HarmonicsError::BadIterationParams);
        }
        Ok(BoundaryIterationParams { mu, p, delta, eta })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleEntry {
    pub k: u32,
    /// δ_k = δ/4^{k−1}
    pub delta_k: f64,
    /// M_k = N + θ^k (M − N)
    pub m_k: f64,
}

/// The (δ_k, M_k) schedule for k = 1..k₀; M_k decreases to N.
pub fn iteration_schedule(
    params: &BoundaryIterationParams,
    m_eps: f64,
    n_eps: f64,
) -> Result<Vec<ScheduleEntry>, HarmonicsError> {
    if m_eps < n_eps {
        return Err(HarmonicsError::BadBounds(m_eps, n_eps));
    }
    let th = theta(params.mu, params.p)?;
    let kmax = k0(params.eta, m_eps, n_eps, th)?;
    let gap = m_eps - n_eps;
    Ok((1..=kmax)
        .map(|k| ScheduleEntry {
            k,
            delta_k: params.delta / 4f64.powi(k as i32 - 1),
            m_k: n_eps + th.powi(k as i32) * gap,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{normalized_p_laplacian, ScalarField};
    use crate::geometry::ORIGIN;
    use crate::pmean::Exponent;

    fn pt(x1: f64, x2: f64, x3: f64) -> Point {
        Point { x1, x2, x3 }
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(2.0).unwrap(), 2.0);
        assert_eq!(xi(4.0).unwrap(), 0.0);
        assert!((xi(8.0).unwrap() - (-4.0 / 7.0)).abs() < 1e-15);
        assert!(xi(1.0).is_err());
        assert!(xi(0.5).is_err());
    }

    #[test]
    fn radial_eval_examples() {
        let c = RadialSolution::new(ORIGIN, 0.0, 7.0, 3.0).unwrap();
        assert_eq!(radial_eval(&c, pt(0.5, 0.2, -0.1)).unwrap(), 7.0);
        assert!(radial_eval(&c, ORIGIN).is_err());

        // p = 2 (ξ = 2), boundary values 0 at gauge 1 and 1 at gauge 2
        let sol = fit_radial_coeffs(ORIGIN, 1.0, 2.0, 0.0, 1.0, 2.0).unwrap();
        assert!((sol.coeff_a - (-4.0 / 3.0)).abs() < 1e-12);
        assert!((sol.coeff_b - 4.0 / 3.0).abs() < 1e-12);
        assert!((sol.eval_at_gauge(1.0)).abs() < 1e-12);
        assert!((sol.eval_at_gauge(2.0) - 1.0).abs() < 1e-12);
        assert!((sol.eval_at_gauge(2f64.sqrt()) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn fit_examples() {
        // equal boundary values give the constant solution
        let sol = fit_radial_coeffs(ORIGIN, 0.5, 2.0, 3.25, 3.25, 5.0).unwrap();
        assert_eq!(sol.coeff_a, 0.0);
        assert_eq!(sol.coeff_b, 3.25);
        // p = 4 logarithmic profile on (1, e) with values (0, 1)
        let sol = fit_radial_coeffs(ORIGIN, 1.0, std::f64::consts::E, 0.0, 1.0, 4.0).unwrap();
        assert!((sol.coeff_a - 1.0).abs() < 1e-12);
        assert!(sol.coeff_b.abs() < 1e-12);
        assert!(fit_radial_coeffs(ORIGIN, 1.0, 1.0, 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn fit_reproduces_boundary_values() {
        for p in [1.5, 2.0, 3.0, 4.0, 8.0] {
            let sol = fit_radial_coeffs(ORIGIN, 0.3, 0.9, -1.2, 2.5, p).unwrap();
            assert!((sol.eval_at_gauge(0.3) + 1.2).abs() < 1e-12, "p = {p}");
            assert!((sol.eval_at_gauge(0.9) - 2.5).abs() < 1e-12, "p = {p}");
        }
    }

    /// Gauge-radial solutions are numerically Δ^N_{ℍ,p}-harmonic at off-axis
    /// points: finite-difference residual below 1e−5.
    #[test]
    fn radial_solutions_are_p_harmonic_off_axis() {
        let points = [
            pt(1.0, 0.0, 0.0),
            pt(0.8, 0.5, 0.3),
            pt(0.5, -0.7, 0.2),
            pt(-0.6, 0.6, -0.4),
        ];
        for p in [2.0, 3.0, 4.0, 8.0] {
            let sol = fit_radial_coeffs(ORIGIN, 0.5, 2.0, 0.0, 1.0, p).unwrap();
            let field = move |x: Point| {
                sol.eval_at_gauge(Metric::HeisenbergKoranyi.gauge(x))
            };
            for &x in &points {
                // keep horizontal distance from the axis ≥ 0.2·gauge radius
                assert!(x.horizontal_norm() >= 0.2 * Metric::HeisenbergKoranyi.gauge(x));
                let r = normalized_p_laplacian(
                    &field,
                    x,
                    Exponent::finite(p).unwrap(),
                    Some(1e-4),
                )
                .unwrap();
                assert!(r.abs() < 1e-5, "p = {p}, x = {x:?}, residual = {r}");
            }
        }
    }

    #[test]
    fn perturbation_examples() {
        let v = PerturbationFn::new(ORIGIN, 4.0).unwrap();
        assert!((perturbation_eval(&v, pt(0.0, 0.0, 1.0)) - 16.0).abs() < 1e-12);
        assert!((perturbation_eval(&v, pt(1.0, 0.0, 0.0)) - 1.0).abs() < 1e-12);
        let q0 = pt(0.4, -0.2, 0.9);
        let v = PerturbationFn::new(q0, 4.5).unwrap();
        assert_eq!(perturbation_eval(&v, q0), 0.0);
        assert!(PerturbationFn::new(ORIGIN, 3.9).is_err());
    }

    #[test]
    fn perturbation_scales_under_dilation_about_center() {
        let v = PerturbationFn::new(ORIGIN, 5.0).unwrap();
        let z = pt(0.3, 0.2, -0.1);
        for lambda in [0.5, 2.0, 3.7] {
            let scaled = perturbation_eval(&v, z.dilate(lambda).unwrap());
            let base = perturbation_eval(&v, z);
            assert!((scaled - lambda.powf(5.0) * base).abs() < 1e-10 * (1.0 + scaled));
        }
        // nonnegative everywhere
        assert!(perturbation_eval(&v, pt(-2.0, 1.0, 0.5)) >= 0.0);
    }

    #[test]
    fn theta_examples() {
        let t = theta(0.5, 2.0).unwrap();
        assert!((t - 263.0 / 270.0).abs() < 1e-12, "theta = {t}");
        // independent oracle: direct evaluation of the ξ = −4/7 expression
        let xi8 = -4.0 / 7.0;
        let a = (1.0f64 / 3.0).powf(xi8);
        let b = 0.25f64.powf(xi8);
        let expected = (1.0 - 0.5 * a - 0.5 * b) / (1.0 - b);
        let t8 = theta(0.5, 8.0).unwrap();
        assert!((t8 - expected).abs() < 1e-14);
        assert!((t8 - 0.861471).abs() < 1e-6);
    }

    #[test]
    fn theta_range_and_p4_limit() {
        for i in 1..50 {
            let mu = i as f64 / 50.0;
            for j in 0..50 {
                let p = 2.0 + 48.0 * j as f64 / 49.0;
                if p == 4.0 {
                    continue;
                }
                let t = theta(mu, p).unwrap();
                assert!(t > 0.0 && t < 1.0, "theta({mu}, {p}) = {t}");
            }
            // the logarithmic limit continues the family through p = 4
            let t4 = theta(mu, 4.0).unwrap();
            assert!(t4 > 0.0 && t4 < 1.0);
            let near = theta(mu, 4.0 + 1e-6).unwrap();
            assert!((t4 - near).abs() < 1e-5, "mu = {mu}: {t4} vs {near}");
        }
        // weaker corkscrew (small mu) contracts slower
        assert!(theta(0.05, 3.0).unwrap() > theta(0.5, 3.0).unwrap());
        assert!(theta(0.001, 3.0).unwrap() > 0.99);
    }

    #[test]
    fn k0_examples() {
        assert_eq!(k0(0.1, 1.0, 0.0, 0.9).unwrap(), 36);
        // immediate cases
        assert_eq!(k0(4.1, 1.0, 0.0, 0.9).unwrap(), 1); // eta >= 2(gap+1)
        assert_eq!(k0(0.1, 2.0, 2.0, 0.9).unwrap(), 1); // zero gap
        // post-check of the guarantee
        for (eta, sup, inf, th) in [
            (0.1, 1.0, 0.0, 0.9),
            (0.02, 3.0, -1.0, 0.97),
            (1.0, 0.4, 0.1, 0.5),
        ] {
            let k = k0(eta, sup, inf, th).unwrap();
            assert!(
                th.powi(k as i32) * (sup - inf) <= eta / 2.0,
                "guarantee fails for k0 = {k}"
            );
        }
        assert!(k0(0.1, 0.0, 1.0, 0.9).is_err());
        assert!(k0(0.0, 1.0, 0.0, 0.9).is_err());
        assert!(k0(0.1, 1.0, 0.0, 1.1).is_err());
    }

    #[test]
    fn schedule_examples() {
        let params = BoundaryIterationParams::new(0.5, 2.0, 0.1, 0.1).unwrap();
        let sched = iteration_schedule(&params, 1.0, 0.0).unwrap();
        assert_eq!(sched[0].k, 1);
        assert_eq!(sched[0].delta_k, 0.1);
        let th = theta(0.5, 2.0).unwrap();
        assert!((sched[1].m_k - th * th).abs() < 1e-12);
        // M_k decreasing toward N
        for w in sched.windows(2) {
            assert!(w[1].m_k <= w[0].m_k);
            assert!((w[1].delta_k - w[0].delta_k / 4.0).abs() < 1e-15);
        }
        // zero gap collapses to the boundary value
        let sched = iteration_schedule(&params, 2.0, 2.0).unwrap();
        assert_eq!(sched.len(), 1);
        assert_eq!(sched[0].m_k, 2.0);
    }
}
