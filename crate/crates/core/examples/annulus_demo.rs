//! Holomorphic Legendrian annuli around loops on the unit circle.

use mergelyan::pipeline::{annulus_demo, scenarios, AnnulusDemoConfig};

fn main() {
    let cfg = AnnulusDemoConfig::default();
    for (name, input) in [
        ("cos 2θ", scenarios::cos2_loop(0.05, 128)),
        ("generic", scenarios::generic_loop(128)),
        ("cos θ", scenarios::cos_loop(0.05, 128)),
    ] {
        match annulus_demo(&input, &cfg) {
            Ok(r) => println!(
                "{name:>8}: ρ = {}, closeness {:.1e} / {:.1e}, isotropy on A_ρ {:.1e}",
                r.rho, r.closeness_c0.value, r.closeness_c1.value, r.isotropy_standard.value
            ),
            Err(e) => println!("{name:>8}: {e} (exit {})", e.exit_code()),
        }
    }
}
