use super::*;
use crate::approx::{build_spray, SprayConfig};
use crate::contact::ContactForm;
use crate::geometry::{sample_curve, PiecewiseCurve};
use proptest::prelude::*;
use std::f64::consts::{E as EULER, PI};

fn segment(a: C64, b: C64, n: usize) -> CurveSamples {
    sample_curve(&PiecewiseCurve::segment(a, b).unwrap(), n).unwrap()
}

fn circle(n: usize) -> CurveSamples {
    sample_curve(&PiecewiseCurve::circle(c64(0.0, 0.0), 1.0), n).unwrap()
}

fn zero() -> C64 {
    c64(0.0, 0.0)
}

#[test]
fn zero_field_keeps_w_constant() {
    let ode = LegendrianODE::new(|_, _, _| c64(0.0, 0.0), 0.0, 10.0);
    let sol = integrate_along_curve(&ode, &circle(64), c64(0.3, -0.2), &[]).unwrap();
    assert!(sol.w().iter().all(|&w| w == c64(0.3, -0.2)));
}

#[test]
fn constant_field_on_a_segment() {
    let c = c64(0.7, 0.2);
    let ode = LegendrianODE::new(move |_, _, _| c, 0.0, 10.0);
    let sol = integrate_along_curve(&ode, &segment(zero(), c64(1.0, 0.0), 16), c64(1.0, 0.0), &[]).unwrap();
    assert!((sol.terminal() - (c64(1.0, 0.0) + c)).norm() < 1e-14);
}

#[test]
fn linear_field_gives_the_exponential() {
    let ode = LegendrianODE::new(|_, w, _| w, 1.0, 10.0);
    let w0 = c64(0.4, 0.3);
    let sol = integrate_along_curve(&ode, &segment(zero(), c64(1.0, 0.0), 8), w0, &[]).unwrap();
    let exact = w0 * EULER;
    assert!((sol.terminal() - exact).norm() / exact.norm() < 1e-9);
    for (s, w) in sol.s.iter().zip(sol.w()) {
        assert!((w - w0 * s.exp()).norm() < 1e-10);
    }
    assert!(sol.report.max_budget_ratio <= 1.0);
}

#[test]
fn escape_reports_the_exit_parameter() {
    let ode = LegendrianODE::new(|_, w, _| w, 1.0, 2.0);
    let err = integrate_along_curve(&ode, &segment(zero(), c64(1.0, 0.0), 64), c64(1.0, 0.0), &[]).unwrap_err();
    match err {
        OdeError::Escape { s, radius, .. } => {
            assert_eq!(radius, 2.0);
            assert!(s >= 2f64.ln() - 1e-12 && s < 2f64.ln() + 0.05, "s = {s}");
        }
        e => panic!("{e}"),
    }
}

#[test]
fn periods_by_residue_and_primitive() {
    let kernel = LegendrianODE::new(|z, _, _| 1.0 / (c64(0.0, 2.0 * PI) * z), 0.0, 10.0);
    let p = period(&kernel, &circle(256), zero(), &[]).unwrap();
    assert!((p.value - 1.0).norm() < 1e-10);
    let ident = LegendrianODE::new(|z, _, _| z, 0.0, 10.0);
    assert!(period(&ident, &circle(256), zero(), &[]).unwrap().value.norm() < 1e-12);
    let zero_field = LegendrianODE::new(|_, _, _| c64(0.0, 0.0), 0.0, 10.0);
    assert_eq!(period(&zero_field, &circle(32), c64(0.5, 0.0), &[]).unwrap().value, zero());
    assert!(matches!(
        period(&ident, &segment(zero(), c64(1.0, 0.0), 4), zero(), &[]),
        Err(OdeError::InvalidInput(_))
    ));
}

#[test]
fn period_does_not_depend_on_the_parameterisation() {
    let ode = LegendrianODE::new(|z, w, _| w * z * z / 3.0 + 1.0 / (c64(0.0, 2.0 * PI) * z), 1.0, 10.0).with_tol(1e-10);
    let whole = PiecewiseCurve::circle(c64(0.0, 0.0), 1.0);
    let a = period(&ode, &sample_curve(&whole, 64).unwrap(), zero(), &[]).unwrap();
    let b = period(&ode, &sample_curve(&whole, 300).unwrap(), zero(), &[]).unwrap();
    let halves = PiecewiseCurve::concat(&[whole.sub_curve(0.0, 0.3).unwrap(), whole.sub_curve(0.3, 1.0).unwrap()]).unwrap();
    let c = period(&ode, &sample_curve(&halves, 100).unwrap(), zero(), &[]).unwrap();
    for other in [b, c] {
        let diff = (a.value - other.value).norm();
        assert!(diff <= 2.0 * (a.estimated_error + other.estimated_error), "{diff:e}");
    }
}

#[test]
fn tolerance_refinement_shows_high_order() {
    // w' = z w from 0 to 1 + i: w = w0 e^{z²/2}.
    let ode = LegendrianODE::new(|z, w, _| z * w, 2.0, 10.0);
    let end = c64(1.0, 1.0);
    let exact = 0.5 * (end * end / 2.0).exp();
    let curve = segment(zero(), end, 2);
    let run = |tol: f64| {
        let sol = integrate_along_curve(&ode.clone().with_tol(tol), &curve, c64(0.5, 0.0), &[]).unwrap();
        ((sol.terminal() - exact).norm(), sol.report.steps as f64)
    };
    let (e1, n1) = run(1e-5);
    let (e2, n2) = run(1e-8);
    let order = (e1 / e2).ln() / (n2 / n1).ln();
    assert!(order >= 3.5, "observed order {order}");
}

#[test]
fn estimated_error_covers_refinement() {
    let ode = LegendrianODE::new(|z, w, _| (w * w) / 4.0 + z, 1.0, 10.0).with_tol(1e-9);
    let curve = segment(c64(-0.5, 0.0), c64(0.5, 0.8), 16);
    let coarse = integrate_along_curve(&ode, &curve, c64(0.1, 0.0), &[]).unwrap();
    let fine = integrate_along_curve(&ode.clone().with_tol(1e-13), &curve, c64(0.1, 0.0), &[]).unwrap();
    assert!((coarse.terminal() - fine.terminal()).norm() <= coarse.estimated_error + fine.estimated_error);
}

#[test]
fn holomorphic_dependence_on_the_initial_value() {
    let ode = LegendrianODE::new(|z, w, _| (w * w) / 4.0 + z, 1.0, 10.0).with_tol(1e-13);
    let curve = segment(zero(), c64(0.6, 0.6), 8);
    let w0 = c64(0.2, 0.1);
    let deriv = |h: f64, dir: C64| {
        let a = integrate_along_curve(&ode, &curve, w0 + dir * h, &[]).unwrap().terminal();
        let b = integrate_along_curve(&ode, &curve, w0 - dir * h, &[]).unwrap().terminal();
        (a - b) / (dir * (2.0 * h))
    };
    let d1 = deriv(1e-3, c64(1.0, 0.0));
    let d2 = deriv(5e-4, c64(1.0, 0.0));
    let di = deriv(5e-4, c64(0.0, 1.0));
    assert!((d1 - d2).norm() < 1e-6);
    // Complex differentiability: real and imaginary directions agree.
    assert!((d2 - di).norm() < 1e-6);
}

#[test]
fn rectangle_flows_for_simple_fields() {
    let rect = Rect { origin: c64(0.2, -0.3), width: 0.8, height: 0.6, nx: 4, ny: 3 };
    let w0 = c64(0.5, 0.1);
    let zero_field = LegendrianODE::new(|_, _, _| c64(0.0, 0.0), 0.0, 10.0);
    let sol = integrate_over_domain(&zero_field, &rect, w0, &[]).unwrap();
    assert_eq!(sol.discrepancy, 0.0);
    let one = LegendrianODE::new(|_, _, _| c64(1.0, 0.0), 0.0, 10.0);
    let sol = integrate_over_domain(&one, &rect, w0, &[]).unwrap();
    let lin = LegendrianODE::new(|_, w, _| w, 1.0, 10.0);
    let sol_lin = integrate_over_domain(&lin, &rect, w0, &[]).unwrap();
    for i in 0..=4 {
        for j in 0..=3 {
            let dz = rect.point(i, j) - rect.origin;
            assert!((sol.at(i, j) - (w0 + dz)).norm() < 1e-13);
            assert!((sol_lin.at(i, j) - w0 * dz.exp()).norm() < 1e-9);
        }
    }
    assert!(sol_lin.discrepancy <= 1e-9);
}

#[test]
fn non_holomorphic_field_fails_commutativity() {
    let rect = Rect { origin: zero(), width: 0.5, height: 0.5, nx: 2, ny: 2 };
    let ode = LegendrianODE::new(|z: C64, _, _| z.conj(), 0.0, 10.0);
    assert!(matches!(integrate_over_domain(&ode, &rect, zero(), &[]), Err(OdeError::CommutativityFailure { .. })));
}

#[test]
fn gronwall_bound_cases() {
    assert_eq!(gronwall_bound(3.0, 2.0, 0.0, 5.0), 0.0);
    assert_eq!(gronwall_bound(0.0, 2.0, 0.5, 5.0), 1.0);
    let ode = LegendrianODE::new(|_, w, _| w, 1.0, 10.0);
    let curve = segment(zero(), c64(1.0, 0.0), 32);
    let a = integrate_along_curve(&ode, &curve, c64(0.0, 0.0), &[]).unwrap();
    let b = integrate_along_curve(&ode, &curve, c64(1e-3, 0.0), &[]).unwrap();
    for k in 0..a.s.len() {
        let div = (a.fiber[k][0] - b.fiber[k][0]).norm();
        let bound = gronwall_bound(1.0, 1.0, 1e-3, (a.z[k] - a.z[0]).norm());
        assert!(div <= bound * (1.0 + 1e-9));
    }
    let tight = (a.terminal() - b.terminal()).norm();
    assert!((tight - 1e-3 * EULER).abs() < 1e-12);
}

#[test]
fn lipschitz_estimate_includes_the_safety_factor() {
    let pts = [c64(0.0, 0.0), c64(0.5, 0.5)];
    let ode = LegendrianODE::new(|_, w, _| w * 2.0, 0.0, 1.0).estimate_lipschitz(&pts, &[], 3);
    assert!((ode.lipschitz_c - 3.0).abs() < 1e-12);
    assert!(ode.lipschitz_verified(&pts, &[], 6));
}

#[test]
fn period_map_on_the_annulus_core() {
    let core = circle(256);
    let spray = build_spray(std::slice::from_ref(&core), &[zero()], &SprayConfig::default()).unwrap();
    let ode = LegendrianODE::from_form(Arc::new(ContactForm::standard(1)), Arc::new(spray), 10.0).with_t_radius(0.2);
    let zero_t = period_map(&ode, std::slice::from_ref(&core), &[zero()]).unwrap();
    assert_eq!(zero_t.values, vec![zero()]);
    let t = [c64(0.07, -0.03)];
    let pv = period_map(&ode, std::slice::from_ref(&core), &t).unwrap();
    assert!(pv.identity_defect() < 1e-10);
    assert!(matches!(period_map(&ode, &[core], &[c64(1.0, 0.0)]), Err(PeriodMapError { .. })));
}

#[test]
fn lifted_sample_is_isotropic() {
    let core = circle(128);
    let spray = build_spray(std::slice::from_ref(&core), &[zero()], &SprayConfig::default()).unwrap();
    let form = Arc::new(ContactForm::new(1, 1.0, &["-y", "1", "0.05*w"]).unwrap());
    let ode = LegendrianODE::from_form(form.clone(), Arc::new(spray), 10.0);
    let sol = integrate_along_curve(&ode, &core, zero(), &[c64(0.05, 0.0)]).unwrap();
    assert_eq!(sol.fiber[0].len(), 2);
    let res = crate::contact::isotropy_residual(&sol, form.as_ref()).unwrap();
    assert!(res < 1e-12, "{res:e}");
}

#[test]
fn csv_has_header_and_columns() {
    let ode = LegendrianODE::new(|_, w, _| w, 1.0, 10.0);
    let sol = integrate_along_curve(&ode, &segment(zero(), c64(1.0, 0.0), 4), c64(1.0, 0.0), &[c64(0.1, 0.0)]).unwrap();
    let csv = sol.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# t=[0.1+0i] tol="));
    assert_eq!(lines[1], "s,re_z,im_z,re_w,im_w");
    assert_eq!(lines.len(), 2 + 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gronwall_containment(a_re in -1.0f64..1.0, a_im in -1.0f64..1.0, b in 0.0f64..0.5,
                            g in -1.0f64..1.0, d in 1e-4f64..1e-2, ang in 0.0f64..6.28) {
        let a = c64(a_re, a_im);
        let ode = LegendrianODE::new(move |z: C64, w: C64, _| a * w + w.sin() * b + z * g, 0.0, 4.0);
        let c = a.norm() + b * 1.0f64.cosh();
        let end = C64::from_polar(1.0, ang);
        let curve = segment(zero(), end, 24);
        let w0 = c64(0.1, 0.0);
        let w1 = w0 + C64::from_polar(d, ang * 0.5);
        let s0 = integrate_along_curve(&ode, &curve, w0, &[]).unwrap();
        let s1 = integrate_along_curve(&ode, &curve, w1, &[]).unwrap();
        for k in 0..s0.s.len() {
            let div = (s0.fiber[k][0] - s1.fiber[k][0]).norm();
            // |Im w| stays below 1 here, so |cos w| ≤ cosh 1.
            prop_assume!(s0.fiber[k][0].im.abs() < 1.0 && s1.fiber[k][0].im.abs() < 1.0);
            prop_assert!(div <= gronwall_bound(c, 1.0, d, (s0.z[k] - s0.z[0]).norm()) + 1e-12);
        }
    }
}
