//! Natural p-means of weighted samples.
//!
//! For 1 < p < ∞ the natural p-mean of a weighted sample set is the unique λ
//! with Σᵢ wᵢ·|uᵢ−λ|^{p−2}(uᵢ−λ) = 0 (convention 0^{p−2}·0 = 0). Closed forms
//! exist for p = 1 (weighted median, continuous-origin data only), p = 2
//! (weighted mean) and p = ∞ (midrange of the support); everything else is
//! found by bisection on [min u, max u], which always brackets the root
//! because the residual is nonincreasing in λ with the right signs at the
//! sample extremes.

use crate::geometry::BallQuadrature;
use crate::Point;
use thiserror::Error;

/// Default absolute bracket tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_BISECT_ITERS: usize = 220;

#[derive(Debug, Error)]
pub enum PMeanError {
    #[error("exponent must satisfy p >= 1 (p = 1 only for continuous-origin data), got {0}")]
    InvalidExponent(f64),
    #[error("p = 1 requires a sample set flagged as arising from continuous data")]
    MedianNeedsContinuousData,
    #[error("operation requires a finite exponent p > 1")]
    FiniteExponentRequired,
    #[error("sample values and weights must have equal, nonzero length")]
    BadSampleShape,
    #[error("sample values and weights must be finite and weights nonnegative")]
    BadSampleData,
    #[error("total sample weight must be positive")]
    ZeroTotalWeight,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("bisection did not converge within {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// The exponent p: a finite real ≥ 1 or ∞. Values in [1, 2) are admitted for
/// construction; operations that need p > 1 or p < ∞ enforce it themselves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Exponent, PMeanError> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(PMeanError::InvalidExponent(p))
        }
    }

    pub fn finite_value(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// h(s) = |s|^{p−2}·s, evaluated through a shape picked once per call site.
/// Integer p uses `powi`; the general branch uses sign(s)·|s|^{p−1}, which
/// realizes the 0^{p−2}·0 = 0 convention for 1 < p < 2 as well.
#[derive(Clone, Copy)]
pub(crate) enum HKind {
    Int(i32),
    Frac(f64),
}

pub(crate) fn h_kind(p: f64) -> HKind {
    if p.fract() == 0.0 && p >= 2.0 && p <= 64.0 {
        HKind::Int(p as i32 - 2)
    } else {
        HKind::Frac(p - 1.0)
    }
}

#[inline]
pub(crate) fn h_eval(kind: HKind, s: f64) -> f64 {
    match kind {
        HKind::Int(k) => s.abs().powi(k) * s,
        HKind::Frac(pm1) => s.signum() * s.abs().powf(pm1),
    }
}

/// |s|^{p−2}·s with h(0) = 0; finite p > 1 only.
pub fn h_power(s: f64, p: Exponent) -> Result<f64, PMeanError> {
    match p {
        Exponent::Finite(p) if p > 1.0 => Ok(h_eval(h_kind(p), s)),
        Exponent::Finite(p) => Err(PMeanError::InvalidExponent(p)),
        Exponent::Infinity => Err(PMeanError::FiniteExponentRequired),
    }
}

/// Weighted real values a natural p-mean is computed on.
#[derive(Clone, Debug)]
pub struct SampleSet {
    values: Vec<f64>,
    weights: Weights,
    continuous: bool,
}

#[derive(Clone, Debug)]
enum Weights {
    Uniform(f64),
    PerSample(Vec<f64>),
}

impl SampleSet {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<SampleSet, PMeanError> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(PMeanError::BadSampleShape);
        }
        if values.iter().any(|v| !v.is_finite())
            || weights.iter().any(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(PMeanError::BadSampleData);
        }
        if !(pairwise_sum(&weights) > 0.0) {
            return Err(PMeanError::ZeroTotalWeight);
        }
        Ok(SampleSet {
            values,
            weights: Weights::PerSample(weights),
            continuous: false,
        })
    }

    /// Equal-weight samples (the common quadrature case).
    pub fn uniform(values: Vec<f64>, weight: f64) -> Result<SampleSet, PMeanError> {
        if values.is_empty() {
            return Err(PMeanError::BadSampleShape);
        }
        if values.iter().any(|v| !v.is_finite()) || !weight.is_finite() || weight < 0.0 {
            return Err(PMeanError::BadSampleData);
        }
        if !(weight > 0.0) {
            return Err(PMeanError::ZeroTotalWeight);
        }
        Ok(SampleSet {
            values,
            weights: Weights::Uniform(weight),
            continuous: false,
        })
    }

    /// Unit-weight samples.
    pub fn unit(values: Vec<f64>) -> Result<SampleSet, PMeanError> {
        SampleSet::uniform(values, 1.0)
    }

    /// Flag the set as arising from continuous data, unlocking p = 1.
    pub fn continuous(mut self) -> SampleSet {
        self.continuous = true;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Weights::Uniform(w) => *w,
            Weights::PerSample(ws) => ws[i],
        }
    }

    pub fn total_weight(&self) -> f64 {
        match &self.weights {
            Weights::Uniform(w) => w * self.values.len() as f64,
            Weights::PerSample(ws) => pairwise_sum(ws),
        }
    }

    /// Min and max over samples with positive weight (essential inf/sup of
    /// the discrete measure).
    fn support_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, &v) in self.values.iter().enumerate() {
            if self.weight(i) > 0.0 {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }
}

/// Pairwise summation, sequential below a block threshold. Keeps the rounding
/// error at O(log n)·ε so residual magnitudes near 1e−12·scale stay meaningful
/// on multi-million-node quadratures.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 256 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub(crate) fn pairwise_map_sum<F: Fn(f64) -> f64 + Copy>(xs: &[f64], f: F) -> f64 {
    if xs.len() <= 256 {
        return xs.iter().map(|&x| f(x)).sum();
    }
    let mid = xs.len() / 2;
    pairwise_map_sum(&xs[..mid], f) + pairwise_map_sum(&xs[mid..], f)
}

/// Same shape but parallel at the top of the tree; the split points are fixed
/// by the slice structure, so the result is independent of thread scheduling.
pub(crate) fn par_pairwise_map_sum<F: Fn(f64) -> f64 + Copy + Sync>(xs: &[f64], f: F) -> f64 {
    if xs.len() <= 1 << 16 {
        return pairwise_map_sum(xs, f);
    }
    let mid = xs.len() / 2;
    let (a, b) = rayon::join(
        || par_pairwise_map_sum(&xs[..mid], f),
        || par_pairwise_map_sum(&xs[mid..], f),
    );
    a + b
}

/// Σᵢ wᵢ·h(uᵢ − λ); nonincreasing in λ, with residual(min u) ≥ 0 ≥ residual(max u).
pub fn pmean_residual(samples: &SampleSet, lambda: f64, p: Exponent) -> Result<f64, PMeanError> {
    let pv = match p {
        Exponent::Finite(p) if p > 1.0 => p,
        Exponent::Finite(p) => return Err(PMeanError::InvalidExponent(p)),
        Exponent::Infinity => return Err(PMeanError::FiniteExponentRequired),
    };
    let kind = h_kind(pv);
    Ok(residual(samples, lambda, kind))
}

/// Residual with arguments scaled by `inv_scale`; the root is unchanged and
/// |s|^{p−1} stays in range even for very large p.
fn residual_scaled(samples: &SampleSet, lambda: f64, kind: HKind, inv_scale: f64) -> f64 {
    match &samples.weights {
        Weights::Uniform(w) => {
            w * par_pairwise_map_sum(&samples.values, move |v| {
                h_eval(kind, (v - lambda) * inv_scale)
            })
        }
        Weights::PerSample(ws) => {
            // weighted variant stays sequential-pairwise; it is not on the hot path
            fn go(vs: &[f64], ws: &[f64], lambda: f64, kind: HKind, inv_scale: f64) -> f64 {
                if vs.len() <= 256 {
                    return vs
                        .iter()
                        .zip(ws)
                        .map(|(&v, &w)| w * h_eval(kind, (v - lambda) * inv_scale))
                        .sum();
                }
                let mid = vs.len() / 2;
                go(&vs[..mid], &ws[..mid], lambda, kind, inv_scale)
                    + go(&vs[mid..], &ws[mid..], lambda, kind, inv_scale)
            }
            go(&samples.values, ws, lambda, kind, inv_scale)
        }
    }
}

fn residual(samples: &SampleSet, lambda: f64, kind: HKind) -> f64 {
    residual_scaled(samples, lambda, kind, 1.0)
}

fn weighted_mean(samples: &SampleSet) -> f64 {
    match &samples.weights {
        Weights::Uniform(_) => {
            par_pairwise_map_sum(&samples.values, |v| v) / samples.values.len() as f64
        }
        Weights::PerSample(ws) => {
            fn go(vs: &[f64], ws: &[f64]) -> f64 {
                if vs.len() <= 256 {
                    return vs.iter().zip(ws).map(|(&v, &w)| w * v).sum();
                }
                let mid = vs.len() / 2;
                go(&vs[..mid], &ws[..mid]) + go(&vs[mid..], &ws[mid..])
            }
            go(&samples.values, ws) / pairwise_sum(ws)
        }
    }
}

/// Weighted median with the midpoint tie rule: when the cumulative weight
/// hits exactly half the total, return the midpoint of the straddling values.
fn weighted_median(samples: &SampleSet) -> f64 {
    let mut order: Vec<usize> = (0..samples.len())
        .filter(|&i| samples.weight(i) > 0.0)
        .collect();
    order.sort_by(|&a, &b| samples.values[a].total_cmp(&samples.values[b]));
    let total: f64 = order.iter().map(|&i| samples.weight(i)).sum();
    let half = 0.5 * total;
    let mut cum = 0.0;
    for (k, &i) in order.iter().enumerate() {
        cum += samples.weight(i);
        if cum > half {
            return samples.values[i];
        }
        if cum == half {
            let next = order[(k + 1).min(order.len() - 1)];
            return 0.5 * (samples.values[i] + samples.values[next]);
        }
    }
    samples.values[*order.last().expect("nonempty support")]
}

struct Bisection {
    root: f64,
    iterations: usize,
    residual: f64,
}

/// Bisection for the residual root on [lo0, hi0]. `warm` proposes a narrower
/// bracket around a previous iterate; it is used only if the residual signs
/// still straddle there.
fn bisect(
    samples: &SampleSet,
    p: f64,
    tol: f64,
    warm: Option<(f64, f64)>,
) -> Result<Bisection, PMeanError> {
    let kind = h_kind(p);
    let (lo0, hi0) = samples.support_bounds();
    if lo0 == hi0 {
        return Ok(Bisection {
            root: lo0,
            iterations: 0,
            residual: 0.0,
        });
    }
    let range = hi0 - lo0;
    let max_abs = lo0.abs().max(hi0.abs());
    let width_tol = tol * (1.0 + max_abs);
    // residuals are evaluated on arguments scaled by 1/range, so the stopping
    // scale tol·Σw·range^{p−1} collapses to tol·Σw
    let inv_range = 1.0 / range;
    let res_tol = tol * samples.total_weight();

    let (mut lo, mut hi) = (lo0, hi0);
    let mut iterations = 0usize;
    if let Some((center, half_width)) = warm {
        let wl = (center - half_width).max(lo0);
        let wh = (center + half_width).min(hi0);
        if wl < wh {
            iterations += 2;
            if residual_scaled(samples, wl, kind, inv_range) >= 0.0
                && residual_scaled(samples, wh, kind, inv_range) <= 0.0
            {
                lo = wl;
                hi = wh;
            }
        }
    }

    let mut last_res = f64::INFINITY;
    while iterations < MAX_BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // f64 exhausted; the bracket cannot shrink further
            break;
        }
        let r = residual_scaled(samples, mid, kind, inv_range);
        iterations += 1;
        last_res = r;
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= width_tol && r.abs() <= res_tol {
            return Ok(Bisection {
                root: 0.5 * (lo + hi),
                iterations,
                residual: r,
            });
        }
    }
    if hi - lo <= width_tol.max(4.0 * f64::EPSILON * (1.0 + max_abs)) {
        // width criterion met; residual floor is set by rounding, accept
        return Ok(Bisection {
            root: 0.5 * (lo + hi),
            iterations,
            residual: last_res,
        });
    }
    Err(PMeanError::NoConvergence {
        iterations,
        residual: last_res,
    })
}

fn validate_tol(tol: f64) -> Result<(), PMeanError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(PMeanError::BadTolerance(tol))
    }
}

/// The natural p-mean. Closed forms for p ∈ {1, 2, ∞}, bisection otherwise;
/// the result always lies in [min u, max u].
pub fn pmean(samples: &SampleSet, p: Exponent, tol: f64) -> Result<f64, PMeanError> {
    validate_tol(tol)?;
    match p {
        Exponent::Infinity => {
            let (lo, hi) = samples.support_bounds();
            Ok(0.5 * (lo + hi))
        }
        Exponent::Finite(pv) if pv == 1.0 => {
            if !samples.continuous {
                return Err(PMeanError::MedianNeedsContinuousData);
            }
            Ok(weighted_median(samples))
        }
        Exponent::Finite(pv) if pv == 2.0 => Ok(weighted_mean(samples)),
        Exponent::Finite(pv) if pv > 1.0 => Ok(bisect(samples, pv, tol, None)?.root),
        Exponent::Finite(pv) => Err(PMeanError::InvalidExponent(pv)),
    }
}

/// The bisection path without closed-form dispatch (finite p > 1 only).
/// Exists so the root-finder can be checked against the closed forms.
pub fn pmean_via_bisection(samples: &SampleSet, p: Exponent, tol: f64) -> Result<f64, PMeanError> {
    validate_tol(tol)?;
    match p {
        Exponent::Finite(pv) if pv > 1.0 => Ok(bisect(samples, pv, tol, None)?.root),
        Exponent::Finite(pv) => Err(PMeanError::InvalidExponent(pv)),
        Exponent::Infinity => Err(PMeanError::FiniteExponentRequired),
    }
}

/// Like [`pmean`] but reporting iteration count and final residual.
pub fn pmean_with_stats(
    samples: &SampleSet,
    p: Exponent,
    tol: f64,
) -> Result<(f64, usize, f64), PMeanError> {
    validate_tol(tol)?;
    match p {
        Exponent::Finite(pv) if pv > 1.0 && pv != 2.0 => {
            let b = bisect(samples, pv, tol, None)?;
            Ok((b.root, b.iterations, b.residual))
        }
        _ => {
            let m = pmean(samples, p, tol)?;
            let res = match p {
                Exponent::Finite(pv) if pv > 1.0 => pmean_residual(samples, m, p)?,
                _ => 0.0,
            };
            Ok((m, 0, res))
        }
    }
}

/// Allocation-free bisection on a uniform-weight value slice; the solver's
/// inner loop. Mirrors [`bisect`] with the residual evaluated in place.
fn bisect_uniform(
    values: &[f64],
    weight: f64,
    p: f64,
    tol: f64,
    warm: Option<(f64, f64)>,
) -> Result<Bisection, PMeanError> {
    let kind = h_kind(p);
    let lo0 = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi0 = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo0 == hi0 {
        return Ok(Bisection {
            root: lo0,
            iterations: 0,
            residual: 0.0,
        });
    }
    let range = hi0 - lo0;
    let max_abs = lo0.abs().max(hi0.abs());
    let width_tol = tol * (1.0 + max_abs);
    let inv_range = 1.0 / range;
    let res_tol = tol * weight * values.len() as f64;
    let res = |lambda: f64| {
        weight * pairwise_map_sum(values, move |v| h_eval(kind, (v - lambda) * inv_range))
    };

    let (mut lo, mut hi) = (lo0, hi0);
    let mut iterations = 0usize;
    if let Some((center, half_width)) = warm {
        let wl = (center - half_width).max(lo0);
        let wh = (center + half_width).min(hi0);
        if wl < wh {
            iterations += 2;
            if res(wl) >= 0.0 && res(wh) <= 0.0 {
                lo = wl;
                hi = wh;
            }
        }
    }
    let mut last_res = f64::INFINITY;
    while iterations < MAX_BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = res(mid);
        iterations += 1;
        last_res = r;
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= width_tol && r.abs() <= res_tol {
            return Ok(Bisection {
                root: 0.5 * (lo + hi),
                iterations,
                residual: r,
            });
        }
    }
    if hi - lo <= width_tol.max(4.0 * f64::EPSILON * (1.0 + max_abs)) {
        return Ok(Bisection {
            root: 0.5 * (lo + hi),
            iterations,
            residual: last_res,
        });
    }
    Err(PMeanError::NoConvergence {
        iterations,
        residual: last_res,
    })
}

/// Hot-path variant on a plain value slice with uniform weights. `warm`
/// proposes a bracket center/half-width from a previous sweep. Does not
/// allocate except for the p = 1 median sort.
pub(crate) fn pmean_uniform_slice(
    values: &[f64],
    weight: f64,
    p: Exponent,
    tol: f64,
    warm: Option<(f64, f64)>,
) -> Result<f64, PMeanError> {
    match p {
        Exponent::Infinity => {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok(0.5 * (lo + hi))
        }
        Exponent::Finite(pv) if pv == 2.0 => {
            Ok(pairwise_map_sum(values, |v| v) / values.len() as f64)
        }
        Exponent::Finite(pv) if pv == 1.0 => {
            let set = SampleSet::uniform(values.to_vec(), weight)?.continuous();
            Ok(weighted_median(&set))
        }
        Exponent::Finite(pv) if pv > 1.0 => Ok(bisect_uniform(values, weight, pv, tol, warm)?.root),
        Exponent::Finite(pv) => Err(PMeanError::InvalidExponent(pv)),
    }
}

/// p-mean of a scalar field sampled on a ball quadrature.
pub fn pmean_on_ball<F: Fn(Point) -> f64>(
    f: F,
    q: &BallQuadrature,
    p: Exponent,
    tol: f64,
) -> Result<f64, PMeanError> {
    let values: Vec<f64> = q.nodes().iter().map(|&n| f(n)).collect();
    let samples = SampleSet::uniform(values, q.node_weight())?.continuous();
    pmean(&samples, p, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit(values: &[f64]) -> SampleSet {
        SampleSet::unit(values.to_vec()).unwrap()
    }

    #[test]
    fn h_power_examples() {
        for p in [1.5, 2.0, 3.0, 7.5] {
            assert_eq!(h_power(0.0, Exponent::finite(p).unwrap()).unwrap(), 0.0);
        }
        assert_eq!(h_power(-2.0, Exponent::finite(3.0).unwrap()).unwrap(), -4.0);
        assert_eq!(h_power(0.5, Exponent::finite(4.0).unwrap()).unwrap(), 0.125);
        assert!(h_power(1.0, Exponent::Infinity).is_err());
        assert!(h_power(1.0, Exponent::finite(1.0).unwrap()).is_err());
        // odd and nondecreasing
        let p = Exponent::finite(1.3).unwrap();
        assert_eq!(
            h_power(-0.7, p).unwrap(),
            -h_power(0.7, p).unwrap()
        );
        assert!(h_power(0.2, p).unwrap() < h_power(0.3, p).unwrap());
    }

    #[test]
    fn residual_examples() {
        let s = unit(&[0.0, 1.0]);
        assert_eq!(
            pmean_residual(&s, 0.5, Exponent::finite(2.0).unwrap()).unwrap(),
            0.0
        );
        let s = unit(&[0.0, 0.0, 1.0]);
        assert_eq!(
            pmean_residual(&s, 0.0, Exponent::finite(3.0).unwrap()).unwrap(),
            1.0
        );
        // bracketing signs
        for p in [1.5, 2.5, 4.0] {
            let p = Exponent::finite(p).unwrap();
            let s = unit(&[-1.0, 0.3, 2.0, 2.0]);
            assert!(pmean_residual(&s, -1.0, p).unwrap() >= 0.0);
            assert!(pmean_residual(&s, 2.0, p).unwrap() <= 0.0);
        }
    }

    #[test]
    fn closed_forms() {
        let s = unit(&[1.0, 2.0, 3.0]);
        assert_eq!(pmean(&s, Exponent::finite(2.0).unwrap(), 1e-12).unwrap(), 2.0);
        let vals: Vec<f64> = (0..=10).map(f64::from).collect();
        let s = SampleSet::unit(vals).unwrap();
        assert_eq!(pmean(&s, Exponent::Infinity, 1e-12).unwrap(), 5.0);
    }

    #[test]
    fn median_rules() {
        // p = 1 requires the continuous-data flag
        let s = unit(&[1.0, 2.0, 9.0]);
        assert!(matches!(
            pmean(&s, Exponent::finite(1.0).unwrap(), 1e-12),
            Err(PMeanError::MedianNeedsContinuousData)
        ));
        let s = s.continuous();
        assert_eq!(pmean(&s, Exponent::finite(1.0).unwrap(), 1e-12).unwrap(), 2.0);
        // exact-half tie: midpoint of the straddling values
        let s = unit(&[0.0, 1.0, 2.0, 3.0]).continuous();
        assert_eq!(pmean(&s, Exponent::finite(1.0).unwrap(), 1e-12).unwrap(), 1.5);
        // weighted: {0 w2, 1 w1, 2 w1} -> cum hits half at value 0
        let s = SampleSet::new(vec![0.0, 1.0, 2.0], vec![2.0, 1.0, 1.0])
            .unwrap()
            .continuous();
        assert_eq!(pmean(&s, Exponent::finite(1.0).unwrap(), 1e-12).unwrap(), 0.5);
    }

    /// Exact roots of the residual equation for {0,0,1}, derived by hand:
    /// p=3: (1−λ)² = 2λ² ⇒ λ² + 2λ − 1 = 0 ⇒ λ = √2 − 1;
    /// p=4: (1−λ)³ = 2λ³ ⇒ λ = 1/(1 + 2^{1/3}).
    #[test]
    fn derived_exact_roots() {
        let s = unit(&[0.0, 0.0, 1.0]);
        let root3 = pmean(&s, Exponent::finite(3.0).unwrap(), 1e-14).unwrap();
        assert!((root3 - (2f64.sqrt() - 1.0)).abs() < 1e-10, "{root3}");
        let root4 = pmean(&s, Exponent::finite(4.0).unwrap(), 1e-14).unwrap();
        assert!((root4 - 1.0 / (1.0 + 2f64.cbrt())).abs() < 1e-10, "{root4}");
        // bisection path agrees with the dispatcher
        let b3 = pmean_via_bisection(&s, Exponent::finite(3.0).unwrap(), 1e-14).unwrap();
        assert!((b3 - root3).abs() < 1e-12);
    }

    #[test]
    fn bisection_consistent_with_mean_at_p2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(2..40);
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
            let s = SampleSet::new(values, weights).unwrap();
            let mean = pmean(&s, Exponent::finite(2.0).unwrap(), 1e-13).unwrap();
            let bis = pmean_via_bisection(&s, Exponent::finite(2.0).unwrap(), 1e-13).unwrap();
            assert!((mean - bis).abs() < 1e-10, "{mean} vs {bis}");
        }
    }

    #[test]
    fn continuity_in_data() {
        // perturbing every sample by at most δ moves the p-mean by at most δ
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for p in [1.5f64, 3.0, 7.0] {
            let p = Exponent::finite(p).unwrap();
            for _ in 0..20 {
                let n = rng.random_range(2..30);
                let values: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
                let delta = rng.random_range(0.0..0.5);
                let perturbed: Vec<f64> = values
                    .iter()
                    .map(|v| v + rng.random_range(-delta..=delta))
                    .collect();
                let s0 = SampleSet::unit(values).unwrap();
                let s1 = SampleSet::unit(perturbed).unwrap();
                let m0 = pmean(&s0, p, 1e-12).unwrap();
                let m1 = pmean(&s1, p, 1e-12).unwrap();
                assert!((m0 - m1).abs() <= delta + 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn stability(values in proptest::collection::vec(-10.0f64..10.0, 1..40),
                     praw in 1.0f64..10.0) {
            let s = SampleSet::unit(values.clone()).unwrap();
            let p = Exponent::finite(1.0 + praw).unwrap();
            let m = pmean(&s, p, 1e-12).unwrap();
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m >= lo - 1e-12 && m <= hi + 1e-12);
        }

        #[test]
        fn monotonicity(values in proptest::collection::vec(-5.0f64..5.0, 2..30),
                        bumps in proptest::collection::vec(0.0f64..3.0, 2..30),
                        praw in 0.2f64..8.0) {
            let n = values.len().min(bumps.len());
            let u: Vec<f64> = values[..n].to_vec();
            let v: Vec<f64> = u.iter().zip(&bumps[..n]).map(|(a, b)| a + b).collect();
            let p = Exponent::finite(1.0 + praw).unwrap();
            let mu = pmean(&SampleSet::unit(u).unwrap(), p, 1e-12).unwrap();
            let mv = pmean(&SampleSet::unit(v).unwrap(), p, 1e-12).unwrap();
            prop_assert!(mu <= mv + 1e-9);
        }

        #[test]
        fn affine_invariance(values in proptest::collection::vec(-5.0f64..5.0, 2..30),
                             alpha in -3.0f64..3.0, c in -5.0f64..5.0,
                             praw in 0.2f64..8.0) {
            let p = Exponent::finite(1.0 + praw).unwrap();
            let m = pmean(&SampleSet::unit(values.clone()).unwrap(), p, 1e-13).unwrap();
            let mapped: Vec<f64> = values.iter().map(|v| alpha * v + c).collect();
            let ma = pmean(&SampleSet::unit(mapped).unwrap(), p, 1e-13).unwrap();
            prop_assert!((ma - (alpha * m + c)).abs() <= 1e-8 * (1.0 + alpha.abs() * m.abs() + c.abs()));
        }
    }

    #[test]
    fn limits_toward_median_and_midrange() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = 2 * rng.random_range(2..12) + 1; // odd count, unit weights: unique median
            let mut values: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
            values.sort_by(f64::total_cmp);
            values.dedup_by(|a, b| (*a - *b).abs() < 0.05);
            if values.len() % 2 == 0 {
                values.pop();
            }
            let s = SampleSet::unit(values.clone()).unwrap().continuous();
            let med = pmean(&s, Exponent::finite(1.0).unwrap(), 1e-12).unwrap();
            let near1 = pmean(&s, Exponent::finite(1.001).unwrap(), 1e-13).unwrap();
            assert!((near1 - med).abs() < 1e-3, "median {med} vs p→1 {near1}");

            let midrange = pmean(&s, Exponent::Infinity, 1e-12).unwrap();
            let big = pmean(&s, Exponent::finite(600.0).unwrap(), 1e-13).unwrap();
            assert!(
                (big - midrange).abs() < 2e-2 * (1.0 + midrange.abs()),
                "midrange {midrange} vs p=600 {big}"
            );
        }
    }

    #[test]
    fn uniform_slice_matches_sampleset() {
        let values = vec![0.3, -0.2, 1.7, 0.4, 0.4];
        let a = pmean_uniform_slice(&values, 0.5, Exponent::finite(3.0).unwrap(), 1e-13, None)
            .unwrap();
        let s = SampleSet::uniform(values, 0.5).unwrap();
        let b = pmean(&s, Exponent::finite(3.0).unwrap(), 1e-13).unwrap();
        assert!((a - b).abs() < 1e-12);
        // warm start converges to the same root
        let c = pmean_uniform_slice(
            &vec![0.3, -0.2, 1.7, 0.4, 0.4],
            0.5,
            Exponent::finite(3.0).unwrap(),
            1e-13,
            Some((b, 0.05)),
        )
        .unwrap();
        assert!((c - b).abs() < 1e-11);
    }

    #[test]
    fn constant_samples() {
        let s = SampleSet::uniform(vec![4.0; 9], 0.3).unwrap();
        for p in [
            Exponent::finite(1.7).unwrap(),
            Exponent::finite(2.0).unwrap(),
            Exponent::finite(5.0).unwrap(),
            Exponent::Infinity,
        ] {
            assert_eq!(pmean(&s, p, 1e-12).unwrap(), 4.0);
        }
    }

    #[test]
    fn sample_set_validation() {
        assert!(SampleSet::new(vec![], vec![]).is_err());
        assert!(SampleSet::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(SampleSet::new(vec![1.0], vec![-1.0]).is_err());
        assert!(SampleSet::new(vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
        assert!(SampleSet::new(vec![f64::NAN], vec![1.0]).is_err());
    }
}
