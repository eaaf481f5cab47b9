//! Cross-module checks of the ball-mean operators through the public API.

use pmean_lab::fields::TestField;
use pmean_lab::geometry::{self, Metric, Point, Scheme, ORIGIN};
use pmean_lab::pmean::{self, Exponent};

const H: Metric = Metric::HeisenbergKoranyi;

fn pt(x1: f64, x2: f64, x3: f64) -> Point {
    Point { x1, x2, x3 }
}

fn fin(p: f64) -> Exponent {
    Exponent::finite(p).unwrap()
}

#[test]
fn ball_pmean_of_constant_is_constant() {
    let q = geometry::ball_quadrature(pt(0.3, -0.2, 0.1), 0.7, H, Scheme::Lattice {
        resolution: 40,
    })
    .unwrap();
    for p in [fin(1.5), fin(2.0), fin(6.0), Exponent::Infinity] {
        let m = pmean::pmean_on_ball(|_| 4.25, &q, p, 1e-12).unwrap();
        assert!((m - 4.25).abs() < 1e-12);
    }
}

#[test]
fn ball_pmean_of_linear_horizontal_vanishes_at_origin() {
    // odd symmetry of the node cloud makes the root exact, not just small
    let q = geometry::ball_quadrature(ORIGIN, 1.0, H, Scheme::Lattice { resolution: 60 }).unwrap();
    let m2 = pmean::pmean_on_ball(|x: Point| x.x1, &q, fin(2.0), 1e-13).unwrap();
    assert!(m2.abs() < 1e-13, "p = 2: {m2}");
    let m4 = pmean::pmean_on_ball(|x: Point| x.x1, &q, fin(4.0), 1e-13).unwrap();
    assert!(m4.abs() < 1e-6, "p = 4: {m4}");
}

/// μ_p over B_ε(x) of u equals μ_p over B_1(0) of z ↦ u(x * ρ_ε(z)): the
/// radius-ε lattice is the exact ρ_ε-image of the unit-ball lattice.
#[test]
fn rescaling_identity() {
    let x = pt(0.4, 0.1, -0.05);
    let eps = 0.35;
    let u = TestField::HorizontalSquare;
    use pmean_lab::calculus::ScalarField;

    let q_eps = geometry::ball_quadrature(x, eps, H, Scheme::Lattice { resolution: 36 }).unwrap();
    let q_unit = geometry::ball_quadrature(ORIGIN, 1.0, H, Scheme::Lattice { resolution: 36 })
        .unwrap();
    for p in [fin(2.0), fin(3.0)] {
        let direct = pmean::pmean_on_ball(|y| u.value(y), &q_eps, p, 1e-13).unwrap();
        let pulled = pmean::pmean_on_ball(
            |z: Point| u.value(x * z.dilate(eps).unwrap()),
            &q_unit,
            p,
            1e-13,
        )
        .unwrap();
        assert!(
            (direct - pulled).abs() < 1e-12,
            "p = {p:?}: {direct} vs {pulled}"
        );
    }
}

#[test]
fn monte_carlo_pmean_consistent_with_lattice() {
    let x = pt(0.5, 0.0, 0.0);
    let u = |y: Point| y.x1 * y.x1 + y.x2 * y.x2 + 0.3 * y.x3;
    let lattice =
        geometry::ball_quadrature(x, 0.4, H, Scheme::Lattice { resolution: 80 }).unwrap();
    let mc = geometry::ball_quadrature(
        x,
        0.4,
        H,
        Scheme::MonteCarlo {
            samples: 60_000,
            seed: 5,
        },
    )
    .unwrap();
    for p in [fin(2.0), fin(3.5)] {
        let a = pmean::pmean_on_ball(u, &lattice, p, 1e-12).unwrap();
        let b = pmean::pmean_on_ball(u, &mc, p, 1e-12).unwrap();
        assert!((a - b).abs() < 5e-3, "p = {p:?}: lattice {a} vs mc {b}");
    }
}
