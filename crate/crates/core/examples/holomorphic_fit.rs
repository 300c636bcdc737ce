//! Rational least-squares approximation of a function with a pole in a hole.

use mergelyan::approx::{complement_anchors, holomorphic_approximate, sample_set, FitConfig};
use mergelyan::{c64, fixtures, C64};

fn main() {
    let set = fixtures::annulus();
    let f = |z: C64| (z * 0.3).exp() / (z - c64(0.1, 0.05));
    let samples = sample_set(&set, 128, 12).fit_samples(f, true);
    let fit = holomorphic_approximate(&samples, &complement_anchors(&set), &FitConfig::default()).expect("fit");
    println!(
        "values {:.2e}, tangential derivatives {:.2e}, cond {:.2e}",
        fit.sup_residual, fit.derivative_residual, fit.cond
    );
    let check = sample_set(&set, 500, 40).all_points();
    let off = check.iter().map(|&z| (fit.function.eval(z) - f(z)).norm()).fold(0.0, f64::max);
    println!("sup error on a finer sample: {off:.2e}");
}
