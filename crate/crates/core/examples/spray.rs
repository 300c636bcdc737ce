//! Period-normalised sprays on the annulus and the two-island set.

use mergelyan::approx::{build_spray, complement_anchors, SprayConfig};
use mergelyan::fixtures;
use mergelyan::geometry::sample_curve_at_least;
use mergelyan::homology::build_homology_basis;

fn main() {
    for name in ["annulus", "fig1", "pants"] {
        let set = fixtures::by_name(name).expect("fixture");
        let basis = build_homology_basis(&set).expect("basis");
        let members: Vec<_> = basis.cycles.iter().map(|c| sample_curve_at_least(c, 2048)).collect();
        let t = std::time::Instant::now();
        let spray = build_spray(&members, &complement_anchors(&set), &SprayConfig::default()).expect("spray");
        println!("{name}: ‖P − I‖∞ = {:.2e} in {:?}", spray.defect, t.elapsed());
        for row in &spray.period_matrix {
            let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re:+.3e}{im:+.3e}i")).collect();
            println!("    [{}]", cells.join(", "));
        }
    }
}
