//! The Legendrian ODE along a circle and over a rectangle, with the Grönwall bound.

use mergelyan::geometry::{sample_curve, PiecewiseCurve};
use mergelyan::ode::{gronwall_bound, integrate_along_curve, integrate_over_domain, LegendrianODE, Rect};
use mergelyan::{c64, C64};

fn main() {
    // dw = w/z dz: w(z) = z on the circle, single valued.
    let ode = LegendrianODE::new(|p: C64, w: C64, _t: &[C64]| w / p, 2.0, 10.0);
    let circle = sample_curve(&PiecewiseCurve::circle(c64(0.0, 0.0), 1.0), 64).expect("samples");
    let sol = integrate_along_curve(&ode, &circle, c64(1.0, 0.0), &[]).expect("integrates");
    println!(
        "circle: w(end) = {:.12}, {} steps, estimated error {:.1e}",
        sol.terminal(),
        sol.report.steps,
        sol.estimated_error
    );

    let exp = LegendrianODE::new(|_p: C64, w: C64, _t: &[C64]| w, 1.0, 100.0);
    let rect = Rect { origin: c64(0.0, 0.0), width: 1.0, height: 1.0, nx: 8, ny: 8 };
    let dom = integrate_over_domain(&exp, &rect, c64(1.0, 0.0), &[]).expect("integrates");
    let z = rect.point(8, 8);
    println!("rectangle: w(1 + i) = {:.12} vs e^(1+i) = {:.12}, flow discrepancy {:.1e}", dom.at(8, 8), z.exp(), dom.discrepancy);

    let seg = sample_curve(&PiecewiseCurve::segment(c64(0.0, 0.0), c64(1.0, 0.0)).expect("segment"), 32).expect("samples");
    let a = integrate_along_curve(&exp, &seg, c64(1.0, 0.0), &[]).expect("integrates");
    let b = integrate_along_curve(&exp, &seg, c64(1.001, 0.0), &[]).expect("integrates");
    println!(
        "Grönwall: |Δw(1)| = {:.3e} ≤ {:.3e}",
        (a.terminal() - b.terminal()).norm(),
        gronwall_bound(1.0, 1.0, 0.001, 1.0)
    );
}
