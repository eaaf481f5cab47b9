// scratch probe: error anatomy of the annulus convergence study
use pmean_lab::dpp::{self, DomainShape, DomainSpec};
use pmean_lab::fields::TestField;
use pmean_lab::geometry::{Metric, ORIGIN};
use pmean_lab::harmonics;
use pmean_lab::pmean::Exponent;

fn main() {
    let (r_in, r_out, clr): (f64, f64, f64) = (0.3, 0.65, 0.15);
    let spec = DomainSpec::new(DomainShape::AxisExcludedAnnulus {
        center: [0.0; 3], r_inner: r_in, r_outer: r_out, axis_clearance: clr,
    }).unwrap();
    let sol = harmonics::fit_radial_coeffs(ORIGIN, r_in, r_out, 0.0, 1.0, 3.0).unwrap();
    let datum = TestField::Radial(sol);
    let p = Exponent::finite(3.0).unwrap();
    for eps in [0.2f64, 0.1] {
        let dom = dpp::discretize(spec, eps, eps / 8.0).unwrap();
        let r = dpp::solve(&dom, &datum, p, Some(1e-7), 1_000_000).unwrap();
        let mut sup = 0.0f64; let mut sup_x = ORIGIN;
        let mut sup_core = 0.0f64; // away from boundary and axis
        let mut by_rho = vec![0.0f64; 7];
        let mut by_gauge = vec![0.0f64; 8];
        for (i, &x) in dom.interior_nodes().iter().enumerate() {
            let u = harmonics::radial_eval(&sol, x).unwrap();
            let e = (r.values[i] - u).abs();
            if e > sup { sup = e; sup_x = x; }
            let g = Metric::HeisenbergKoranyi.gauge(x);
            let rho = x.horizontal_norm();
            let core = g > r_in + 2.0*eps && g < r_out - 2.0*eps && rho > clr + 2.0*eps;
            if core { sup_core = sup_core.max(e); }
            let bi = (((rho - clr) / 0.05) as usize).min(6);
            by_rho[bi] = by_rho[bi].max(e);
            let gi = (((g - r_in) / 0.05) as usize).min(7);
            by_gauge[gi] = by_gauge[gi].max(e);
        }
        println!("eps={eps}: sup={sup:.4e} at ({:.3},{:.3},{:.3}) gauge={:.3} rho={:.3}; core_sup={sup_core:.3e}; iters={}",
            sup_x.x1, sup_x.x2, sup_x.x3, Metric::HeisenbergKoranyi.gauge(sup_x), sup_x.horizontal_norm(), r.iterations);
        println!("  by rho-clr bins(0.05): {:?}", by_rho.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>());
        println!("  by g-rin bins(0.05):  {:?}", by_gauge.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>());
    }
}
