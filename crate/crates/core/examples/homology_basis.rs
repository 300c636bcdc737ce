//! Runge homology bases of the fixture sets, checked at two raster resolutions.

use mergelyan::fixtures;
use mergelyan::homology::{build_homology_basis, runge_check, RungeConfig};

fn main() {
    for name in ["disc", "annulus", "pants", "fig1", "triangle"] {
        let set = fixtures::by_name(name).expect("fixture");
        let basis = build_homology_basis(&set).expect("basis");
        let polys = basis.polylines();
        let coarse = runge_check(&set, &polys, &RungeConfig { cells: 200, eps: None }).expect("runge");
        let fine = runge_check(&set, &polys, &RungeConfig { cells: 800, eps: None }).expect("runge");
        println!(
            "{name:>9}: l = {} (1 − χ = {}), kinds {:?}, Runge {coarse}/{fine}, private clearance {:.3}",
            basis.rank(),
            1 - set.euler_characteristic(),
            basis.kinds,
            basis.private_clearance
        );
    }
}
