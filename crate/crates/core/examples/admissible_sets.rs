//! Builds the fixture sets and prints their topology and JSON size.

use mergelyan::fixtures;

fn main() {
    for name in ["disc", "annulus", "pants", "fig1", "triangle", "loop", "circle"] {
        let set = fixtures::by_name(name).expect("fixture");
        let json = serde_json::to_string(&set.to_json()).expect("serialises");
        println!(
            "{name:>9}: islands {} arcs {} connected {} χ = {:>2} feature size {:.3} ({} bytes of JSON)",
            set.islands.len(),
            set.arcs.len(),
            set.connected,
            set.euler_characteristic(),
            set.feature_size,
            json.len()
        );
    }
}
