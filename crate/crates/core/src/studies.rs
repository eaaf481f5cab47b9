//! Expansion sweeps and convergence tables with log-log order fits.
//!
//! An expansion sweep evaluates μ_p(u, ε)(x₀) − u(x₀) over a list of ε and
//! compares against the predicted c·ε²·Δ^N u(x₀) (Korányi constant c_p, or
//! 1/(2(n+p)) in Euclidean mode). The remainder after subtracting the
//! predicted term is what the sweep is really after, so the per-ε quadrature
//! resolution must refine as ε shrinks: the lattice nodes have identical
//! canonical preimages for every ε at fixed resolution, so a fixed-resolution
//! quadrature bias scales exactly like ε² and would masquerade as a leading
//! term.

use crate::calculus::{self, ScalarField};
use crate::geometry::{self, Metric, Point};
use crate::pmean::{self, Exponent};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("epsilon list and resolution list must be nonempty and equal length")]
    BadSweepShape,
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Calculus(#[from] calculus::CalculusError),
    #[error(transparent)]
    PMean(#[from] pmean::PMeanError),
}

/// One row of an expansion sweep.
#[derive(Clone, Copy, Debug)]
pub struct ExpansionRow {
    pub epsilon: f64,
    pub resolution: usize,
    pub nodes: usize,
    /// μ_p(u, ε)(x₀)
    pub mu: f64,
    /// μ_p(u, ε)(x₀) − u(x₀)
    pub mu_minus_u: f64,
    /// c·ε²·Δ^N u(x₀)
    pub predicted: f64,
    pub remainder: f64,
}

#[derive(Clone, Debug)]
pub struct ExpansionStudy {
    pub rows: Vec<ExpansionRow>,
    /// Expansion constant used for the prediction (c_p or 1/(2(n+p))).
    pub constant: f64,
    /// Δ^N_{ℍ,p} u(x₀), or its Euclidean analogue in Euclidean mode.
    pub operator_value: f64,
    /// Fitted order of |μ − u| (expected 2).
    pub leading_order: Option<f64>,
    /// Fitted coefficient of the leading term (expected constant·|Δ^N u|).
    pub leading_coeff: Option<f64>,
    /// Fitted order of the remainder (expected ≥ 3 for p ≥ 2).
    pub remainder_order: Option<f64>,
    /// Set when Δ^N u(x₀) ≈ 0 and the rows are quadrature noise.
    pub degenerate: bool,
}

/// Least-squares fit of ln|y| against ln x; returns (slope, exp(intercept)).
/// Zero and non-finite values are skipped; needs at least two surviving points.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y != 0.0 && y.is_finite())
        .map(|(&x, &y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in &pts {
        cov += (x - mx) * (y - my);
        var += (x - mx) * (x - mx);
    }
    if var == 0.0 {
        return None;
    }
    let slope = cov / var;
    Some((slope, (my - slope * mx).exp()))
}

fn shift(x: Point, idx: usize, d: f64) -> Point {
    let mut c = [x.x1, x.x2, x.x3];
    c[idx] += d;
    Point {
        x1: c[0],
        x2: c[1],
        x3: c[2],
    }
}

/// Euclidean-mode operator Δu + (p−2)·⟨D²u ν, ν⟩ with ν the Euclidean
/// gradient direction (the homogeneous p-Laplacian of the ℝ³ expansion).
fn euclidean_p_operator(
    field: &dyn ScalarField,
    x0: Point,
    p: f64,
) -> Result<f64, calculus::CalculusError> {
    let grad = field.euclidean_gradient(x0).unwrap_or_else(|| {
        let h = f64::EPSILON.cbrt();
        let mut g = [0.0; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = (field.value(shift(x0, i, h)) - field.value(shift(x0, i, -h))) / (2.0 * h);
        }
        g
    });
    let hess = field.euclidean_hessian(x0).unwrap_or_else(|| {
        let h = f64::EPSILON.powf(0.25);
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i][i] = (field.value(shift(x0, i, h)) - 2.0 * field.value(x0)
                + field.value(shift(x0, i, -h)))
                / (h * h);
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let v = (field.value(shift(shift(x0, i, h), j, h))
                    - field.value(shift(shift(x0, i, h), j, -h))
                    - field.value(shift(shift(x0, i, -h), j, h))
                    + field.value(shift(shift(x0, i, -h), j, -h)))
                    / (4.0 * h * h);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    });
    let norm = (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]).sqrt();
    if norm < 1e-8 {
        return Err(calculus::CalculusError::VanishingHorizontalGradient {
            grad: norm,
            threshold: 1e-8,
        });
    }
    let nu = [grad[0] / norm, grad[1] / norm, grad[2] / norm];
    let lap = hess[0][0] + hess[1][1] + hess[2][2];
    let mut inf = 0.0;
    for (i, ni) in nu.iter().enumerate() {
        for (j, nj) in nu.iter().enumerate() {
            inf += hess[i][j] * ni * nj;
        }
    }
    Ok(lap + (p - 2.0) * inf)
}

/// Run an expansion sweep at `x0`; `resolutions[i]` is the lattice resolution
/// used for `eps[i]`.
pub fn expansion_sweep(
    field: &dyn ScalarField,
    x0: Point,
    p: Exponent,
    eps: &[f64],
    resolutions: &[usize],
    metric: Metric,
) -> Result<ExpansionStudy, StudyError> {
    if eps.is_empty() || eps.len() != resolutions.len() {
        return Err(StudyError::BadSweepShape);
    }
    let u0 = field.value(x0);
    let (constant, operator_value) = match metric {
        Metric::HeisenbergKoranyi => (
            calculus::c_p(p)?,
            calculus::normalized_p_laplacian(field, x0, p, None)?,
        ),
        Metric::Euclidean3 => {
            let pv = p.finite_value().ok_or(StudyError::Calculus(
                calculus::CalculusError::ExponentOutOfRange(f64::INFINITY),
            ))?;
            (
                calculus::euclidean_amvp_constant(3, pv)?,
                euclidean_p_operator(field, x0, pv)?,
            )
        }
    };
    let degenerate = operator_value.abs() <= 1e-9;

    let mut rows = Vec::with_capacity(eps.len());
    for (&e, &n) in eps.iter().zip(resolutions) {
        let (values, weight) =
            geometry::lattice_ball_values(x0, e, metric, n, |pt| field.value(pt))?;
        let nodes = values.len();
        let mu = pmean::pmean(
            &pmean::SampleSet::uniform(values, weight)?.continuous(),
            p,
            pmean::DEFAULT_TOL,
        )?;
        let mu_minus_u = mu - u0;
        let predicted = constant * e * e * operator_value;
        rows.push(ExpansionRow {
            epsilon: e,
            resolution: n,
            nodes,
            mu,
            mu_minus_u,
            predicted,
            remainder: mu_minus_u - predicted,
        });
    }
    let exps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let leading: Vec<f64> = rows.iter().map(|r| r.mu_minus_u).collect();
    let rem: Vec<f64> = rows.iter().map(|r| r.remainder).collect();
    let lead_fit = if degenerate {
        None
    } else {
        fit_loglog(&exps, &leading)
    };
    let rem_fit = if degenerate {
        None
    } else {
        fit_loglog(&exps, &rem)
    };
    Ok(ExpansionStudy {
        rows,
        constant,
        operator_value,
        leading_order: lead_fit.map(|f| f.0),
        leading_coeff: lead_fit.map(|f| f.1),
        remainder_order: rem_fit.map(|f| f.0),
        degenerate,
    })
}

/// One row of a DPP convergence table.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub h: f64,
    pub n_interior: usize,
    pub iterations: u64,
    pub final_residual: f64,
    /// sup over interior nodes of |u_ε − reference|
    pub sup_error: f64,
}

/// Fitted decay order of sup_error against ε; needs at least two rows.
pub fn convergence_rate(rows: &[ConvergenceRow]) -> Option<f64> {
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let err: Vec<f64> = rows.iter().map(|r| r.sup_error).collect();
    fit_loglog(&eps, &err).map(|f| f.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::TestField;
    use crate::geometry::ORIGIN;

    #[test]
    fn loglog_fit_recovers_exact_powers() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x * x).collect();
        let (slope, coeff) = fit_loglog(&xs, &ys).unwrap();
        assert!((slope - 3.0).abs() < 1e-12);
        assert!((coeff - 3.0).abs() < 1e-12);
        // signs do not matter, zeros are skipped
        let ys = [-1.0, 0.0, -0.25, -0.0625];
        let (slope, _) = fit_loglog(&[1.0, 0.5, 0.5, 0.25], &ys).unwrap();
        assert!(slope > 0.0);
        assert!(fit_loglog(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn sweep_flags_degenerate_fields() {
        // x1 is p-harmonic: Δ^N = 0, rows are quadrature noise
        let study = expansion_sweep(
            &TestField::LinearX1,
            Point {
                x1: 1.0,
                x2: 0.0,
                x3: 0.0,
            },
            Exponent::finite(3.0).unwrap(),
            &[0.4, 0.2],
            &[48, 48],
            Metric::HeisenbergKoranyi,
        )
        .unwrap();
        assert!(study.degenerate);
        assert!(study.leading_order.is_none());
        for row in &study.rows {
            assert!(row.mu_minus_u.abs() < 1e-4);
        }
    }

    #[test]
    fn sweep_rejects_vanishing_gradient() {
        // gradient of x1²+x2² vanishes at the origin
        let err = expansion_sweep(
            &TestField::HorizontalSquare,
            ORIGIN,
            Exponent::finite(3.0).unwrap(),
            &[0.2],
            &[32],
            Metric::HeisenbergKoranyi,
        );
        assert!(err.is_err());
    }

    #[test]
    fn quadratic_field_leading_term() {
        // small smoke version of the acceptance sweep
        let x0 = Point {
            x1: 1.0,
            x2: 0.0,
            x3: 0.0,
        };
        let p = Exponent::finite(2.0).unwrap();
        let study = expansion_sweep(
            &TestField::HorizontalSquare,
            x0,
            p,
            &[0.4, 0.2, 0.1],
            &[64, 90, 128],
            Metric::HeisenbergKoranyi,
        )
        .unwrap();
        assert!(!study.degenerate);
        let order = study.leading_order.unwrap();
        assert!((order - 2.0).abs() < 0.05, "order = {order}");
        let coeff = study.leading_coeff.unwrap();
        let target = study.constant * study.operator_value;
        assert!(
            (coeff - target).abs() / target.abs() < 0.05,
            "coeff {coeff} vs {target}"
        );
    }
}
