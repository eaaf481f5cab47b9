//! Acceptance checks, shared by the `acceptance` test target and the CLI
//! `verify` subcommand. Every tolerance is pinned here.
//!
//! The heavy artifacts (the expansion sweeps and the annulus convergence
//! runs) are computed once per process and shared across the criteria that
//! consume them.

use crate::calculus::{self, ScalarField};
use crate::dpp::{self, DiscreteDomain, DomainShape, DomainSpec, SolveResult};
use crate::fields::TestField;
use crate::geometry::{self, Metric, Point, Scheme, ORIGIN};
use crate::harmonics::{self, PerturbationFn, RadialSolution};
use crate::pmean::{self, Exponent, SampleSet};
use crate::studies::{self, ConvergenceRow, ExpansionStudy};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "acceptance {:<28} {} — {} [{:.1}s]",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail,
            self.seconds
        )
    }
}

fn report(id: &'static str, start: Instant, pass: bool, detail: String) -> CriterionReport {
    CriterionReport {
        id,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn fin(p: f64) -> Exponent {
    Exponent::finite(p).expect("valid exponent")
}

// ── shared sweep/solve configuration (pinned) ──

/// Expansion sweep scales and per-ε lattice resolutions. The resolution must
/// refine as ε shrinks so the quadrature bias (which scales exactly like ε²
/// at fixed resolution) stays below the ε³ term the remainder fit measures.
pub const AMVP_EPS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];
pub const AMVP_RESOLUTIONS: [usize; 4] = [96, 160, 280, 480];
pub const AMVP_PS: [f64; 3] = [2.0, 3.0, 6.0];
pub const AMVP_POINT: Point = Point {
    x1: 1.0,
    x2: 0.0,
    x3: 0.0,
};

/// Axis-excluded Korányi annulus used for the convergence, perturbation and
/// boundary-gap studies.
pub const ANNULUS_R_INNER: f64 = 0.3;
pub const ANNULUS_R_OUTER: f64 = 0.65;
pub const ANNULUS_CLEARANCE: f64 = 0.15;
pub const ANNULUS_P: f64 = 3.0;
pub const ANNULUS_EPS: [f64; 3] = [0.2, 0.1, 0.05];
const ANNULUS_SOLVER_TOL: f64 = 1e-7;

/// Base point of the gauge-power perturbation. Far enough out that the
/// quartic's uniform horizontal convexity (Δ^N_p v = 12p·ρ² at horizontal
/// distance ρ from the axis of q₀) dominates the anisotropy mismatch of the
/// radial datum at the pinned ε.
pub const PERTURBATION_Q0: Point = Point {
    x1: -8.0,
    x2: 0.0,
    x3: 0.0,
};
pub const PERTURBATION_S: f64 = 4.0;

fn annulus_spec() -> DomainSpec {
    DomainSpec::new(DomainShape::AxisExcludedAnnulus {
        center: [0.0; 3],
        r_inner: ANNULUS_R_INNER,
        r_outer: ANNULUS_R_OUTER,
        axis_clearance: ANNULUS_CLEARANCE,
    })
    .expect("valid annulus")
}

/// The p-harmonic reference datum: radial solution fitted to 0 on the inner
/// sphere and 1 on the outer sphere.
pub fn annulus_datum() -> RadialSolution {
    harmonics::fit_radial_coeffs(ORIGIN, ANNULUS_R_INNER, ANNULUS_R_OUTER, 0.0, 1.0, ANNULUS_P)
        .expect("valid fit")
}

pub struct AnnulusRun {
    pub epsilon: f64,
    pub dom: DiscreteDomain,
    /// solve with the radial p-harmonic datum
    pub radial: SolveResult,
    /// solve with the non-harmonic datum x₁²+x₂²
    pub nonharmonic: SolveResult,
    pub row: ConvergenceRow,
}

pub struct AnnulusReference {
    pub solution: RadialSolution,
    pub runs: Vec<AnnulusRun>,
}

static ANNULUS: OnceLock<AnnulusReference> = OnceLock::new();

/// Convergence runs on the axis-excluded annulus, computed once.
pub fn annulus_reference() -> &'static AnnulusReference {
    ANNULUS.get_or_init(|| {
        let spec = annulus_spec();
        let solution = annulus_datum();
        let datum = TestField::Radial(solution);
        let p = fin(ANNULUS_P);
        let mut runs = Vec::new();
        for &eps in &ANNULUS_EPS {
            let dom = dpp::discretize(spec, eps, eps / 8.0).expect("discretization");
            let radial = dpp::solve(
                &dom,
                &datum,
                p,
                Some(ANNULUS_SOLVER_TOL),
                dpp::DEFAULT_MAX_ITER,
            )
            .expect("radial solve");
            let nonharmonic = dpp::solve(
                &dom,
                &TestField::HorizontalSquare,
                p,
                Some(ANNULUS_SOLVER_TOL),
                dpp::DEFAULT_MAX_ITER,
            )
            .expect("non-harmonic solve");
            let mut sup_error = 0.0f64;
            for (i, &x) in dom.interior_nodes().iter().enumerate() {
                let reference = harmonics::radial_eval(&solution, x).expect("off-center");
                sup_error = sup_error.max((radial.values[i] - reference).abs());
            }
            let row = ConvergenceRow {
                epsilon: eps,
                h: dom.h,
                n_interior: dom.n_interior(),
                iterations: radial.iterations,
                final_residual: radial.final_residual,
                sup_error,
            };
            runs.push(AnnulusRun {
                epsilon: eps,
                dom,
                radial,
                nonharmonic,
                row,
            });
        }
        AnnulusReference { solution, runs }
    })
}

static SWEEPS: OnceLock<Vec<(f64, ExpansionStudy)>> = OnceLock::new();

/// The expansion sweeps behind the order and remainder criteria.
pub fn amvp_sweeps() -> &'static Vec<(f64, ExpansionStudy)> {
    SWEEPS.get_or_init(|| {
        AMVP_PS
            .iter()
            .map(|&p| {
                let study = studies::expansion_sweep(
                    &TestField::HorizontalSquare,
                    AMVP_POINT,
                    fin(p),
                    &AMVP_EPS,
                    &AMVP_RESOLUTIONS,
                    Metric::HeisenbergKoranyi,
                )
                .expect("sweep");
                (p, study)
            })
            .collect()
    })
}

// ── criterion 1 ──

/// Sample sets for the closed-form limit checks. The finite-p surrogates
/// (p = 1.001 for the median, p = 200 for the midrange) only identify the
/// closed forms when the median atom is decisive and the extremes are
/// isolated carrying comparable weights, so the generator enforces: distinct
/// values with isolated extremes, weights within ±2% of unit, and cumulative
/// weights staying ≥ 5% of the total away from the half-weight tie.
fn random_limit_friendly_set(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    'outer: loop {
        let n = rng.random_range(3..=25usize);
        let mut values: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        values.sort_by(f64::total_cmp);
        let range = values[n - 1] - values[0];
        if range < 0.5 {
            continue;
        }
        for w in values.windows(2) {
            if w[1] - w[0] < 1e-3 {
                continue 'outer;
            }
        }
        if values[1] - values[0] < 0.05 * range || values[n - 1] - values[n - 2] < 0.05 * range {
            continue;
        }
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.98..1.02)).collect();
        let total: f64 = weights.iter().sum();
        let mut cum = 0.0;
        for w in &weights[..n - 1] {
            cum += w;
            if (2.0 * cum - total).abs() < 0.05 * total {
                continue 'outer;
            }
        }
        return (values, weights);
    }
}

pub fn criterion_01_pmean_oracle_equivalence() -> CriterionReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_mean = 0.0f64;
    let mut worst_median = 0.0f64;
    let mut worst_midrange = 0.0f64;
    for _ in 0..1000 {
        let (values, weights) = random_limit_friendly_set(&mut rng);
        let set = SampleSet::new(values, weights).unwrap().continuous();
        let mean = pmean::pmean(&set, fin(2.0), 1e-13).unwrap();
        let bis = pmean::pmean_via_bisection(&set, fin(2.0), 1e-13).unwrap();
        worst_mean = worst_mean.max((mean - bis).abs());
        let median = pmean::pmean(&set, fin(1.0), 1e-13).unwrap();
        let near1 = pmean::pmean(&set, fin(1.001), 1e-13).unwrap();
        worst_median = worst_median.max((median - near1).abs());
        let midrange = pmean::pmean(&set, Exponent::Infinity, 1e-13).unwrap();
        let big = pmean::pmean(&set, fin(200.0), 1e-13).unwrap();
        worst_midrange = worst_midrange.max((midrange - big).abs());
    }
    let pass = worst_mean <= 1e-10 && worst_median <= 1e-3 && worst_midrange <= 1e-3;
    report(
        "01-pmean-oracle-equivalence",
        start,
        pass,
        format!(
            "1000 sets: |bisect−mean| ≤ {worst_mean:.2e} (tol 1e-10), \
             |p=1.001−median| ≤ {worst_median:.2e}, |p=200−midrange| ≤ {worst_midrange:.2e} (tol 1e-3)"
        ),
    )
}

// ── criterion 2 ──

pub fn criterion_02_derived_exact_roots() -> CriterionReport {
    let start = Instant::now();
    let set = SampleSet::unit(vec![0.0, 0.0, 1.0]).unwrap();
    // residual roots derived by hand: p=3 ⇒ λ²+2λ−1=0; p=4 ⇒ (1−λ)³=2λ³
    let exact3 = 2f64.sqrt() - 1.0;
    let exact4 = 1.0 / (1.0 + 2f64.cbrt());
    let root3 = pmean::pmean(&set, fin(3.0), 1e-14).unwrap();
    let root4 = pmean::pmean(&set, fin(4.0), 1e-14).unwrap();
    let d3 = (root3 - exact3).abs();
    let d4 = (root4 - exact4).abs();
    report(
        "02-derived-exact-roots",
        start,
        d3 <= 1e-10 && d4 <= 1e-10,
        format!("|λ₃−(√2−1)| = {d3:.2e}, |λ₄−1/(1+2^(1/3))| = {d4:.2e} (tol 1e-10)"),
    )
}

// ── criterion 3 ──

/// c_2 against 1/(3π), and the p → ∞ limit. The raw Γ-formula constant decays
/// like 1/(2p) (it multiplies Δ^N_{ℍ,p} = (p−2)Δ_∞ + Δ_ℍ, which grows like p),
/// so the meaningful limit statement is (p−2)·c_p → c_∞ = 1/2, the coefficient
/// the midrange expansion puts in front of Δ_{ℍ,∞}.
pub fn criterion_03_c_p() -> CriterionReport {
    let start = Instant::now();
    let c2 = calculus::c_p(fin(2.0)).unwrap();
    let d2 = (c2 - 1.0 / (3.0 * std::f64::consts::PI)).abs();
    let p = 1e4;
    let limit = (p - 2.0) * calculus::c_p(fin(p)).unwrap();
    let dlim = (limit - 0.5).abs();
    let cinf = calculus::c_p(Exponent::Infinity).unwrap();
    report(
        "03-c-p-constant",
        start,
        d2 <= 1e-12 && dlim <= 1e-3 && cinf == 0.5,
        format!("|c₂−1/(3π)| = {d2:.2e} (tol 1e-12); (p−2)·c_p at p=10⁴: {limit:.6} (|Δ| ≤ 1e-3); c_∞ = {cinf}"),
    )
}

// ── criteria 4 and 5 ──

pub fn criterion_04_amvp_order() -> CriterionReport {
    let start = Instant::now();
    let mut pass = true;
    let mut lines = Vec::new();
    for (p, study) in amvp_sweeps() {
        let min_nodes = study.rows.iter().map(|r| r.nodes).min().unwrap();
        let order = study.leading_order.unwrap_or(f64::NAN);
        let coeff = study.leading_coeff.unwrap_or(f64::NAN);
        let target = study.constant * study.operator_value;
        let rel = (coeff - target).abs() / target.abs();
        let ok = (order - 2.0).abs() <= 0.1 && rel <= 0.05 && min_nodes >= 100_000;
        pass &= ok;
        lines.push(format!(
            "p={p}: order {order:.3}, coeff err {:.2}%",
            rel * 100.0
        ));
    }
    report(
        "04-amvp-order",
        start,
        pass,
        format!(
            "{} (order 2±0.1, coeff ±5%, ≥1e5 nodes/ball)",
            lines.join("; ")
        ),
    )
}

pub fn criterion_05_remainder_order() -> CriterionReport {
    let start = Instant::now();
    let mut pass = true;
    let mut lines = Vec::new();
    for (p, study) in amvp_sweeps() {
        let order = study.remainder_order.unwrap_or(f64::NAN);
        let ok = order >= 2.5;
        pass &= ok;
        let floor = study
            .rows
            .last()
            .map(|r| r.remainder.abs())
            .unwrap_or(f64::NAN);
        lines.push(format!(
            "p={p}: remainder order {order:.2}, floor {floor:.1e}"
        ));
    }
    report(
        "05-remainder-order",
        start,
        pass,
        format!(
            "{} (tol ≥ 2.5; floor = quadrature level at smallest ε)",
            lines.join("; ")
        ),
    )
}

// ── criterion 6 ──

pub fn criterion_06_convergence_p_harmonic() -> CriterionReport {
    let start = Instant::now();
    let reference = annulus_reference();
    let rows: Vec<ConvergenceRow> = reference.runs.iter().map(|r| r.row).collect();
    let rate = studies::convergence_rate(&rows).unwrap_or(f64::NAN);
    let decreasing = rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error);
    let table = rows
        .iter()
        .map(|r| {
            format!(
                "ε={}: err {:.3e} ({} nodes, {} iters)",
                r.epsilon, r.sup_error, r.n_interior, r.iterations
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    report(
        "06-convergence-p-harmonic",
        start,
        rate >= 0.8 && decreasing,
        format!("{table}; fitted rate {rate:.2} (tol ≥ 0.8)"),
    )
}

// ── criterion 7 ──

struct QuadraticDatum {
    c: [f64; 6],
}

impl QuadraticDatum {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut c = [0.0; 6];
        for slot in &mut c {
            *slot = rng.random_range(-1.0..1.0);
        }
        QuadraticDatum { c }
    }
}

impl ScalarField for QuadraticDatum {
    fn value(&self, x: Point) -> f64 {
        self.c[0]
            + self.c[1] * x.x1
            + self.c[2] * x.x2
            + self.c[3] * x.x3
            + self.c[4] * x.x1 * x.x1
            + self.c[5] * x.x2 * x.x2
    }
}

/// F plus a nonnegative square, so F ≤ G with a nontrivial gap.
struct Dominating<'a> {
    base: &'a QuadraticDatum,
    q: [f64; 3],
}

impl ScalarField for Dominating<'_> {
    fn value(&self, x: Point) -> f64 {
        let lin = self.q[0] + self.q[1] * x.x1 + self.q[2] * x.x2;
        self.base.value(x) + lin * lin
    }
}

pub fn criterion_07_comparison_principle() -> CriterionReport {
    let start = Instant::now();
    let spec = DomainSpec::new(DomainShape::KoranyiBall {
        center: [0.0; 3],
        radius: 0.5,
    })
    .unwrap();
    let dom = dpp::discretize(spec, 0.25, 0.03125).unwrap();
    let p = fin(3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst_ordered = f64::INFINITY;
    let mut worst_general = f64::INFINITY;
    let mut pass = true;
    for _ in 0..20 {
        // ordered pair F <= G
        let f = QuadraticDatum::random(&mut rng);
        let g = Dominating {
            base: &f,
            q: [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ],
        };
        let rf = dpp::solve(&dom, &f, p, None, dpp::DEFAULT_MAX_ITER).unwrap();
        let rg = dpp::solve(&dom, &g, p, None, dpp::DEFAULT_MAX_ITER).unwrap();
        let rep = dpp::comparison_check(&dom, &rf, &rg, 0.0).unwrap();
        pass &= rep.pass;
        worst_ordered = worst_ordered.min(rep.worst_margin);

        // non-ordered pair with the sup(F−G) correction
        let f2 = QuadraticDatum::random(&mut rng);
        let g2 = QuadraticDatum::random(&mut rng);
        let rf2 = dpp::solve(&dom, &f2, p, None, dpp::DEFAULT_MAX_ITER).unwrap();
        let rg2 = dpp::solve(&dom, &g2, p, None, dpp::DEFAULT_MAX_ITER).unwrap();
        let gap = rf2
            .strip_values()
            .iter()
            .zip(rg2.strip_values())
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max);
        let rep = dpp::comparison_check(&dom, &rf2, &rg2, gap).unwrap();
        pass &= rep.pass;
        worst_general = worst_general.min(rep.worst_margin);
    }
    report(
        "07-comparison-principle",
        start,
        pass,
        format!(
            "20 ordered + 20 general pairs on one domain ({} interior nodes): \
             worst margins {worst_ordered:.2e} / {worst_general:.2e} (≥ 0 required)",
            dom.n_interior()
        ),
    )
}

// ── criterion 8 ──

struct Perturbed {
    u: TestField,
    v: PerturbationFn,
    eps: f64,
    sign: f64,
}

impl ScalarField for Perturbed {
    fn value(&self, x: Point) -> f64 {
        self.u.value(x) + self.sign * self.eps * harmonics::perturbation_eval(&self.v, x)
    }
}

pub fn criterion_08_perturbation_lemma() -> CriterionReport {
    let start = Instant::now();
    let reference = annulus_reference();
    let run = reference
        .runs
        .iter()
        .find(|r| r.epsilon == 0.05)
        .expect("ε = 0.05 run present");
    let v = PerturbationFn::new(PERTURBATION_Q0, PERTURBATION_S).unwrap();
    let u = TestField::Radial(reference.solution);
    let p = fin(ANNULUS_P);
    let sub = dpp::subsolution_check(
        &Perturbed {
            u,
            v,
            eps: 0.05,
            sign: 1.0,
        },
        &run.dom,
        p,
        ANNULUS_SOLVER_TOL,
    )
    .unwrap();
    let sup = dpp::supersolution_check(
        &Perturbed {
            u,
            v,
            eps: 0.05,
            sign: -1.0,
        },
        &run.dom,
        p,
        ANNULUS_SOLVER_TOL,
    )
    .unwrap();
    report(
        "08-perturbation-lemma",
        start,
        sub.pass && sup.pass,
        format!(
            "U+εv subsolution margin {:.2e}, U−εv supersolution margin {:.2e} \
             over {} interior nodes (slack 10·tol = {:.0e})",
            sub.worst_margin,
            sup.worst_margin,
            run.dom.n_interior(),
            10.0 * ANNULUS_SOLVER_TOL
        ),
    )
}

// ── criterion 9 ──

pub fn criterion_09_ball_volume() -> CriterionReport {
    let start = Instant::now();
    let exact = std::f64::consts::PI.powi(2) / 8.0;
    let lattice = geometry::lattice_ball_volume(1.0, Metric::HeisenbergKoranyi, 200).unwrap();
    let mc_quad = geometry::ball_quadrature(
        ORIGIN,
        1.0,
        Metric::HeisenbergKoranyi,
        Scheme::MonteCarlo {
            samples: 200_000,
            seed: 9,
        },
    )
    .unwrap()
    .total_weight();
    let mc_oracle =
        geometry::monte_carlo_volume_estimate(1.0, Metric::HeisenbergKoranyi, 200_000, 2024)
            .unwrap();
    let radii = [0.5, 0.75, 1.0, 1.5, 2.0];
    let volumes: Vec<f64> = radii
        .iter()
        .map(|&r| geometry::lattice_ball_volume(r, Metric::HeisenbergKoranyi, 200).unwrap())
        .collect();
    let (slope, _) = studies::fit_loglog(&radii, &volumes).unwrap();
    let rl = (lattice - exact).abs() / exact;
    let rq = (mc_quad - exact).abs() / exact;
    let ro = (mc_oracle - exact).abs() / exact;
    let pass = rl <= 0.01 && rq <= 0.01 && ro <= 0.01 && (slope - 4.0).abs() <= 0.05;
    report(
        "09-ball-volume",
        start,
        pass,
        format!(
            "lattice err {rl:.2e}, MC-quadrature err {rq:.2e}, MC-oracle err {ro:.2e} (tol 1%); \
             radius exponent {slope:.3} (tol 4±0.05)"
        ),
    )
}

// ── criterion 10 ──

pub fn criterion_10_euclidean_cross_check() -> CriterionReport {
    let start = Instant::now();
    let study = studies::expansion_sweep(
        &TestField::HorizontalSquare,
        AMVP_POINT,
        fin(2.0),
        &AMVP_EPS,
        &[64, 96, 128, 192],
        Metric::Euclidean3,
    )
    .unwrap();
    let coeff = study.leading_coeff.unwrap_or(f64::NAN);
    // Δu = 4 for x₁²+x₂², constant 1/(2(3+2)) = 0.1
    let target = 0.1 * study.operator_value;
    let rel = (coeff - target).abs() / target.abs();
    report(
        "10-euclidean-cross-check",
        start,
        rel <= 0.05 && (study.constant - 0.1).abs() < 1e-15,
        format!(
            "leading coefficient {coeff:.5} vs 0.1·Δu = {target:.5} (err {:.2}%, tol 5%)",
            rel * 100.0
        ),
    )
}

// ── boundary-gap decay (main-theorem probe) ──

pub fn criterion_11_boundary_gap_decay() -> CriterionReport {
    let start = Instant::now();
    let reference = annulus_reference();
    let y = Point {
        x1: ANNULUS_R_OUTER,
        x2: 0.0,
        x3: 0.0,
    };
    let mut gaps = Vec::new();
    for run in &reference.runs {
        let gap = dpp::boundary_gap(
            &run.dom,
            &run.nonharmonic,
            y,
            run.epsilon,
            &TestField::HorizontalSquare,
        )
        .unwrap();
        gaps.push((run.epsilon, gap));
    }
    let monotone = gaps.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
    let table = gaps
        .iter()
        .map(|(e, g)| format!("gap(ε={e}) = {g:.3e}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        "11-boundary-gap-decay",
        start,
        monotone,
        format!("non-harmonic datum, δ₀ = ε: {table} (monotone decrease required)"),
    )
}

/// Run every criterion in order.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_01_pmean_oracle_equivalence(),
        criterion_02_derived_exact_roots(),
        criterion_03_c_p(),
        criterion_04_amvp_order(),
        criterion_05_remainder_order(),
        criterion_06_convergence_p_harmonic(),
        criterion_07_comparison_principle(),
        criterion_08_perturbation_lemma(),
        criterion_09_ball_volume(),
        criterion_10_euclidean_cross_check(),
        criterion_11_boundary_gap_decay(),
    ]
}

/// Criterion ids in run order, for CLI selection.
pub const CRITERION_IDS: [&str; 11] = [
    "01-pmean-oracle-equivalence",
    "02-derived-exact-roots",
    "03-c-p-constant",
    "04-amvp-order",
    "05-remainder-order",
    "06-convergence-p-harmonic",
    "07-comparison-principle",
    "08-perturbation-lemma",
    "09-ball-volume",
    "10-euclidean-cross-check",
    "11-boundary-gap-decay",
];

/// Run a single criterion by id.
pub fn run_one(id: &str) -> Option<CriterionReport> {
    match id {
        "01-pmean-oracle-equivalence" => Some(criterion_01_pmean_oracle_equivalence()),
        "02-derived-exact-roots" => Some(criterion_02_derived_exact_roots()),
        "03-c-p-constant" => Some(criterion_03_c_p()),
        "04-amvp-order" => Some(criterion_04_amvp_order()),
        "05-remainder-order" => Some(criterion_05_remainder_order()),
        "06-convergence-p-harmonic" => Some(criterion_06_convergence_p_harmonic()),
        "07-comparison-principle" => Some(criterion_07_comparison_principle()),
        "08-perturbation-lemma" => Some(criterion_08_perturbation_lemma()),
        "09-ball-volume" => Some(criterion_09_ball_volume()),
        "10-euclidean-cross-check" => Some(criterion_10_euclidean_cross_check()),
        "11-boundary-gap-decay" => Some(criterion_11_boundary_gap_decay()),
        _ => None,
    }
}
