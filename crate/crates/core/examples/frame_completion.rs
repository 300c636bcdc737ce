//! Completing a row field to an invertible frame, with a holonomy repair, and
//! solving the Bezout identity on an annulus.

use std::f64::consts::PI;
use std::sync::Arc;

use mergelyan::contact::{arens_identity, matrix_completion, ArensConfig, CompletionConfig, ScalarFn};
use mergelyan::geometry::{Island, PiecewiseCurve};
use mergelyan::geometry::AdmissibleSet;
use mergelyan::{c64, C64};
use nalgebra::DMatrix;

fn main() {
    let m = 400;
    let alpha = PI / 3.0;
    let th: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let a: Vec<DMatrix<C64>> = th
        .iter()
        .map(|t| {
            DMatrix::from_row_slice(1, 3, &[c64(alpha.sin() * t.cos(), 0.0), c64(alpha.sin() * t.sin(), 0.0), c64(alpha.cos(), 0.0)])
        })
        .collect();
    let pos: Vec<C64> = th.iter().map(|&t| C64::from_polar(1.0, t)).collect();
    let fc = matrix_completion(&a, &pos, &CompletionConfig { closed: true, ..CompletionConfig::default() }).expect("completion");
    println!(
        "latitude loop: holonomy {:.3}, repaired {}, max ‖A·B − (I, 0)‖ = {:.1e}",
        fc.holonomy, fc.repaired, fc.identity_residual
    );

    let c = c64(0.3, 0.2);
    let set = AdmissibleSet::islands_only(vec![Island::new(
        PiecewiseCurve::circle(c, 0.75),
        vec![PiecewiseCurve::circle(c, 0.5)],
        c + 0.6,
    )
    .expect("island")])
    .expect("set");
    let fs: Vec<ScalarFn> = vec![Arc::new(|z: C64| z * z), Arc::new(|z: C64| z - 1.0)];
    let sol = arens_identity(fs, &set, &ArensConfig::default()).expect("bezout");
    println!("z²·G₁ + (z − 1)·G₂ = 1 with residual {:.1e} (constant: {})", sol.residual, sol.constant);
}
