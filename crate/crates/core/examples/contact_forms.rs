//! Contact values and the isotropy of a Legendrian line.

use mergelyan::contact::{contact_check, contact_value, isotropy_residual, ContactForm, SampleGrid};
use mergelyan::ode::LegendrianSample;
use mergelyan::{c64, C64};

fn main() {
    let std1 = ContactForm::standard(1);
    let std2 = ContactForm::standard(2);
    let pert = ContactForm::new(1, 1.0, &["-y", "1", "0.05*w"]).expect("form");
    let flat = ContactForm::new(1, 1.0, &["0", "1"]).expect("form");
    let base: Vec<C64> = (0..8).map(|k| C64::from_polar(0.8, k as f64)).collect();
    for (name, form) in [("standard n=1", &std1), ("standard n=2", &std2), ("perturbed", &pert), ("dw", &flat)] {
        let grid = SampleGrid::ball(base.clone(), form.n, 0.5, 16, 1);
        match contact_check(form, &grid, 1e-6) {
            Ok(m) => println!("{name:>13}: contact, min |η∧(dη)^n| = {m:.3}"),
            Err(e) => println!("{name:>13}: {e}"),
        }
    }
    let v = contact_value(&pert, c64(0.2, 0.0), &[c64(0.3, 0.0), c64(0.1, 0.0)]);
    println!("perturbed value at w = 0.3: {v:.4}");

    // z ↦ (z, a·z²/2, a·z): Legendrian for dw − y dz.
    let a = c64(0.2, -0.1);
    let zs: Vec<C64> = (0..16).map(|k| c64(k as f64 / 15.0, 0.0)).collect();
    let line = LegendrianSample {
        s: zs.iter().map(|z| z.re).collect(),
        z: zs.clone(),
        dz: vec![c64(1.0, 0.0); zs.len()],
        fiber: zs.iter().map(|&z| vec![a * z * z * 0.5, a * z]).collect(),
        dfiber: zs.iter().map(|&z| vec![a * z, a]).collect(),
        ..Default::default()
    };
    println!("isotropy of the line: {:.1e}", isotropy_residual(&line, &std1).expect("tangents"));
    println!("against the perturbed form: {:.1e}", isotropy_residual(&line, &pert).expect("tangents"));
}
