//! Named contact forms and Legendrian loops used by the demos and tests.

use crate::contact::ContactForm;

/// `dw − y dz + ε·w dy`.
pub fn perturbed(eps: f64) -> ContactForm {
    let dy = format!("{eps}*w");
    ContactForm::new(1, 1.0, &["-y", "1", &dy]).expect("perturbed form parses")
}

/// Three non-standard forms with `S × 0` Legendrian and standard linear part.
pub fn reduced_family() -> Vec<(&'static str, ContactForm)> {
    vec![
        ("dw - y dz + 0.05 w dy", perturbed(0.05)),
        ("(1 + 0.1 w) dw - y dz", ContactForm::new(1, 1.0, &["-y", "1 + 0.1*w"]).expect("form parses")),
        ("dw - (y + 0.3 w y) dz", ContactForm::new(1, 1.0, &["-y - 0.3*w*y", "1"]).expect("form parses")),
    ]
}

/// Every scenario form by name, for the CLI.
pub fn by_name(name: &str) -> Option<ContactForm> {
    match name {
        "standard" => Some(ContactForm::standard(1)),
        "perturbed" => Some(perturbed(0.05)),
        "standard2" => Some(ContactForm::standard(2)),
        _ => reduced_family().into_iter().find(|(n, _)| *n == name).map(|(_, f)| f),
    }
}

/// Closed-form Laurent data of the loop `y = ε cos 2θ` on `|z| = 1`:
/// `y = ε(z² + z⁻²)/2`, `w = ε(z³/3 − z⁻¹)/2`.
pub fn cos2_laurent(eps: f64, z: crate::C64) -> (crate::C64, crate::C64) {
    let w = (z.powu(3) / 3.0 - z.inv()) * (0.5 * eps);
    let y = (z * z + (z * z).inv()) * (0.5 * eps);
    (w, y)
}

/// `y = ε cos 2θ` with its exact primitive.
pub fn cos2_loop(eps: f64, samples: usize) -> super::LegendrianLoop {
    super::LegendrianLoop::from_fn(samples, |z| cos2_laurent(eps, z))
}

/// `y = ε cos θ`; `y·iz` has mean `iε/2`, so no periodic primitive exists.
pub fn cos_loop(eps: f64, samples: usize) -> super::LegendrianLoop {
    super::LegendrianLoop::from_y(samples, |th| crate::c64(eps * th.cos(), 0.0))
}

/// `y = 0.03 cos 2θ + 0.02 sin 3θ + 0.01i e^{iθ}` with its spectral primitive.
pub fn generic_loop(samples: usize) -> super::LegendrianLoop {
    super::LegendrianLoop::from_y(samples, |th| {
        crate::c64(0.03 * (2.0 * th).cos() + 0.02 * (3.0 * th).sin(), 0.0) + crate::C64::from_polar(0.01, th) * crate::c64(0.0, 1.0)
    })
}
