//! Partial normal form of a perturbed contact form along the annulus.

use mergelyan::contact::{normal_form, NormalFormConfig};
use mergelyan::{fixtures, pipeline::scenarios};

fn main() {
    let set = fixtures::annulus();
    for (name, form) in scenarios::reduced_family() {
        let nf = normal_form(&form, &set, &NormalFormConfig::default()).expect("normal form");
        println!("{name}: {} / {}, axis {:.1e}, linear {:.1e}, h ∈ [{:.3}, {:.3}]", nf.step1, nf.step2, nf.axis_residual, nf.linear_residual, nf.h_min, nf.h_max);
        for t in nf.residual_terms.iter().take(4) {
            println!("    {:?} in d{} max {:.2e}", t.class, t.differential, t.max_abs);
        }
    }
}
