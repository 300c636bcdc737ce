//! Two islands joined by three bridges, perturbed contact form.

use mergelyan::pipeline::{fig1_demo, PipelineConfig};

fn main() {
    let t = std::time::Instant::now();
    let run = fig1_demo(&PipelineConfig::default()).expect("pipeline");
    let rep = &run.report;
    let solve = rep.solve.as_ref().expect("l = 2");
    println!("l = {} in {:?}", rep.members, t.elapsed());
    println!("certificate: {} samples, margin {:.4}, guard {:.1e}", solve.certificate.samples, solve.certificate.margin, solve.certificate.guard);
    println!("t⁰ = {:?}, refined period {:.1e}", rep.t0, rep.period_recheck.value);
    println!("isotropy γ {:.1e}, min self distance {:.3}", rep.isotropy_gamma.value, rep.min_self_distance);
}
