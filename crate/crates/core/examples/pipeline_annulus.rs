//! The full pipeline on the annulus with the perturbed form.

use mergelyan::pipeline::{mergelyan_pipeline, scenarios, PipelineConfig};

fn main() {
    let cfg = PipelineConfig::for_fixture("annulus", &scenarios::perturbed(0.05));
    let rep = mergelyan_pipeline(&cfg).expect("pipeline");
    let solve = rep.solve.as_ref().expect("l = 1");
    println!("l = {}, spray defect {:.1e}", rep.members, rep.spray_defect.value);
    println!("normal form: {} / {}", rep.normal_form.step1, rep.normal_form.step2);
    println!("certificate at δ = {}: margin {:.4}, guard {:.1e}", solve.delta_used, solve.certificate.margin, solve.certificate.guard);
    println!("t⁰ = {:?}, ‖𝒫(t⁰)‖ = {:.1e}, refined {:.1e}", rep.t0, solve.residual, rep.period_recheck.value);
    println!(
        "isotropy γ {:.1e} β {:.1e}, closeness {:.1e} / {:.1e}",
        rep.isotropy_gamma.value, rep.isotropy_beta.value, rep.closeness_c0.value, rep.closeness_c1.value
    );
    println!("{} output curves", rep.output.len());
}
