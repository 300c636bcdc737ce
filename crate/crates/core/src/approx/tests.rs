use super::*;
use crate::fixtures;
use crate::geometry::{sample_curve, PiecewiseCurve};
use proptest::prelude::*;

fn circle(c: C64, r: f64, n: usize) -> CurveSamples {
    sample_curve(&PiecewiseCurve::circle(c, r), n).unwrap()
}

fn kernel(a: C64) -> impl Fn(C64) -> C64 {
    move |z| 1.0 / (c64(0.0, 2.0 * PI) * (z - a))
}

#[test]
fn residue_on_unit_circle() {
    let c = circle(c64(0.0, 0.0), 1.0, 256);
    let r = contour_integral(kernel(c64(0.0, 0.0)), &c, &[c64(0.0, 0.0)]).unwrap();
    assert!((r.value - 1.0).norm() < 1e-10);
    let r = contour_integral(|z| z, &c, &[]).unwrap();
    assert!(r.value.norm() < 1e-13);
    let r = contour_integral(kernel(c64(3.0, 0.0)), &c, &[c64(3.0, 0.0)]).unwrap();
    assert!(r.value.norm() < 1e-13);
}

#[test]
fn pole_on_path_detected() {
    let c = circle(c64(0.0, 0.0), 1.0, 64);
    let err = contour_integral(kernel(c64(1.0, 0.0)), &c, &[c64(1.0, 0.0)]).unwrap_err();
    assert!(matches!(err, ApproxError::PoleOnPath { .. }));
}

#[test]
fn error_estimate_bounds_actual_error() {
    // Pole close to the path makes the coarse rule visibly worse.
    let c = circle(c64(0.0, 0.0), 1.0, 64);
    let a = c64(0.9, 0.0);
    let r = contour_integral(kernel(a), &c, &[a]).unwrap();
    assert!((r.value - 1.0).norm() <= r.error.max(1e-14));
}

#[test]
fn fits_identity_on_disc() {
    let s = sample_set(&fixtures::disc(), 128, 20);
    let fit = holomorphic_approximate(&s.fit_samples(|z| z, true), &[], &FitConfig::default()).unwrap();
    assert!(fit.sup_residual <= 1e-12, "{}", fit.sup_residual);
    assert!(fit.derivative_residual <= 1e-9, "{}", fit.derivative_residual);
}

#[test]
fn conj_is_reciprocal_on_unit_circle() {
    let c = circle(c64(0.0, 0.0), 1.0, 256);
    let samples = FitSamples::from_fn(&c.points, |z| z.conj());
    let fit = holomorphic_approximate(&samples, &[c64(0.0, 0.0)], &FitConfig::default()).unwrap();
    assert!(fit.sup_residual <= 1e-10, "{}", fit.sup_residual);
    let z = c64(0.3, 0.4);
    assert!((fit.function.eval(z) - 1.0 / z).norm() < 1e-8);
}

#[test]
fn ill_conditioned_basis_reported() {
    // A tiny sample cluster cannot separate degree-40 monomials.
    let pts: Vec<C64> = (0..50).map(|k| c64(k as f64 * 1e-3, 0.0)).collect();
    let samples = FitSamples::from_fn(&pts, |z| z);
    let cfg = FitConfig {
        degree: 40,
        ..FitConfig::default()
    };
    assert!(matches!(
        holomorphic_approximate(&samples, &[], &cfg),
        Err(ApproxError::IllConditioned { .. })
    ));
}

#[test]
fn bump_on_fig1_matches_refined_fit() {
    let set = fixtures::fig1();
    let f = |z: C64| 1.0 / (z - c64(0.0, 4.0)) + 0.05 * (z * 0.5).exp();
    let cfg = FitConfig {
        degree: 16,
        max_pole_order: 4,
        ..FitConfig::default()
    };
    let anchors = complement_anchors(&set);
    let coarse = sample_set(&set, 96, 12);
    let fit = holomorphic_approximate(&coarse.fit_samples(f, true), &anchors, &cfg).unwrap();
    let fine_cfg = FitConfig {
        degree: 20,
        max_pole_order: 6,
        ..cfg
    };
    let fine = sample_set(&set, 192, 24);
    let oracle = holomorphic_approximate(&fine.fit_samples(f, true), &anchors, &fine_cfg).unwrap();
    // Off-sample check against the target.
    let probe: Vec<C64> = fine.all_points();
    let err = probe.iter().map(|&z| (fit.function.eval(z) - f(z)).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-5, "fit error {err}");
    assert!(oracle.sup_residual <= fit.sup_residual * 10.0 + 1e-12);
}

#[test]
fn annulus_spray_is_cauchy_kernel() {
    let c = circle(c64(0.0, 0.0), 1.25, 2048);
    let spray = build_spray(&[c], &[c64(0.0, 0.0)], &SprayConfig::default()).unwrap();
    assert!(spray.defect <= 1e-12);
    let z = c64(0.7, -0.2);
    assert!((spray.xi[0].eval(z) - kernel(c64(0.0, 0.0))(z)).norm() < 1e-13);
}

#[test]
fn separated_holes_give_diagonal_periods() {
    let a = [c64(-1.5, 0.0), c64(1.5, 0.0)];
    let cs = vec![circle(a[0], 0.9, 1024), circle(a[1], 0.9, 1024)];
    let spray = build_spray(&cs, &a, &SprayConfig::default()).unwrap();
    assert!(spray.defect <= 1e-10);
    for j in 0..2 {
        let z = c64(0.1, 0.3);
        assert!((spray.xi[j].eval(z) - kernel(a[j])(z)).norm() < 1e-12);
    }
}

#[test]
fn overlapping_winding_inverts_winding_matrix() {
    let a = [c64(-1.5, 0.0), c64(1.5, 0.0)];
    let big = circle(c64(0.0, 0.0), 2.6, 2048);
    let right = circle(a[1], 0.9, 1024);
    let members = [big, right];
    // Winding oracle.
    let w: Vec<Vec<f64>> = members
        .iter()
        .map(|m| a.iter().map(|&p| contour_integral(kernel(p), m, &[p]).unwrap().value.re.round()).collect())
        .collect();
    assert_eq!(w, vec![vec![1.0, 1.0], vec![0.0, 1.0]]);
    let spray = build_spray(&members, &a, &SprayConfig::default()).unwrap();
    assert!(spray.defect <= 1e-10, "{}", spray.defect);
    // W⁻¹ = [[1, −1], [0, 1]]: ξ₁ = k(a₀), ξ₂ = k(a₁) − k(a₀).
    let z = c64(0.2, 0.1);
    assert!((spray.xi[0].eval(z) - kernel(a[0])(z)).norm() < 1e-12);
    assert!((spray.xi[1].eval(z) - (kernel(a[1])(z) - kernel(a[0])(z))).norm() < 1e-12);
}

#[test]
fn missing_anchor_reported() {
    let c = circle(c64(5.0, 0.0), 1.0, 256);
    assert!(matches!(
        build_spray(&[c], &[c64(0.0, 0.0)], &SprayConfig::default()),
        Err(ApproxError::MissingAnchor(_))
    ));
}

#[test]
fn indistinguishable_cycles_are_singular() {
    let a = c64(0.0, 0.0);
    let cs = vec![circle(a, 1.0, 256), circle(a, 1.5, 256)];
    assert!(matches!(
        build_spray(&cs, &[a], &SprayConfig::default()),
        Err(ApproxError::SingularPeriodMatrix { .. })
    ));
}

#[test]
fn open_arc_functional_is_terminal_value() {
    let arc = sample_curve(&PiecewiseCurve::segment(c64(1.0, 0.0), c64(2.0, 0.5)).unwrap(), 64).unwrap();
    let cyc = circle(c64(0.0, 0.0), 1.25, 1024);
    let spray = build_spray(&[cyc, arc], &[c64(0.0, 0.0)], &SprayConfig::default()).unwrap();
    assert!(spray.defect <= 1e-10, "{}", spray.defect);
}

#[test]
fn pants_cycles_wind_integrally() {
    let anchors = fixtures::pair_of_pants_anchors();
    let set = fixtures::pair_of_pants();
    let found = complement_anchors(&set);
    assert_eq!(found.len(), 2);
    for (f, a) in found.iter().zip(&anchors) {
        assert!((f - a).norm() < 1e-9);
    }
    for r in [0.7, 2.8] {
        let c = circle(c64(0.0, 0.0), r, 512);
        for &a in &anchors {
            let w = contour_integral(kernel(a), &c, &[a]).unwrap().value;
            assert!((w - w.re.round()).norm() <= 1e-8);
        }
    }
}

#[test]
fn rational_json_shape() {
    let f = RationalFunction::cauchy_kernel(c64(0.5, 0.0));
    let v: serde_json::Value = serde_json::to_value(&f).unwrap();
    assert!(v.get("poly").is_some());
    assert_eq!(v["poles"][0]["anchor"], serde_json::json!([0.5, 0.0]));
    let back: RationalFunction = serde_json::from_value(v).unwrap();
    assert_eq!(back, f);
}

proptest! {
    #[test]
    fn spray_is_linear(t1 in (-1.0f64..1.0, -1.0f64..1.0), t2 in (-1.0f64..1.0, -1.0f64..1.0), s in -3.0f64..3.0,
                       zr in 0.6f64..1.9, th in 0.0f64..6.28) {
        let spray = Spray {
            xi: vec![RationalFunction::cauchy_kernel(c64(0.0, 0.0)), RationalFunction::constant(c64(0.5, 1.0))],
            period_matrix: vec![],
            defect: 0.0,
            raw_cond: 1.0,
            quadrature_error: 0.0,
        };
        let z = C64::from_polar(zr, th);
        let a = [c64(t1.0, t1.1), c64(0.0, 0.0)];
        let b = [c64(t2.0, t2.1), c64(0.3, 0.0)];
        let sum = [a[0] + b[0], a[1] + b[1]];
        prop_assert!((spray.eval(z, &[a[0] * s, a[1] * s]) - spray.eval(z, &a) * s).norm() <= 1e-14 * (1.0 + spray.eval(z, &a).norm() * s.abs()));
        prop_assert!((spray.eval(z, &sum) - spray.eval(z, &a) - spray.eval(z, &b)).norm() <= 1e-15 * (1.0 + spray.eval(z, &sum).norm()));
    }

    #[test]
    fn rational_derivative_matches_difference(re in -0.5f64..0.5, im in -0.5f64..0.5) {
        let f = RationalFunction {
            poly: vec![c64(1.0, 0.0), c64(0.0, 2.0), c64(-1.0, 0.5)],
            poles: vec![PoleGroup { anchor: c64(2.0, 0.0), coeffs: vec![c64(1.0, 0.0), c64(0.3, 0.1)], radius: 0.5 }],
            center: c64(0.1, 0.0),
            scale: 2.0,
        };
        let z = c64(re, im);
        let h = 1e-5;
        let fd = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        prop_assert!((fd - f.deriv(z)).norm() < 1e-8);
    }
}
