use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::fixtures;
use crate::geometry::{AdmissibleSet, Island};

fn unit_grid(n: usize) -> SampleGrid {
    let base = (0..5).map(|k| C64::from_polar(0.7, k as f64)).collect();
    SampleGrid::ball(base, n, 0.5, 12, 3)
}

#[test]
fn standard_forms_have_unit_contact_value() {
    for n in 1..=3 {
        let f = ContactForm::standard(n);
        let g = unit_grid(n);
        for &p in &g.base {
            for z in &g.fiber {
                assert_eq!(contact_value(&f, p, z).norm(), 1.0);
            }
        }
        assert_eq!(contact_check(&f, &g, CONTACT_THRESHOLD).unwrap(), 1.0);
    }
}

#[test]
fn dw_alone_is_not_contact() {
    let f = ContactForm::new(1, 1.0, &["0", "1", "0"]).unwrap();
    let err = contact_check(&f, &unit_grid(1), CONTACT_THRESHOLD).unwrap_err();
    assert!(matches!(err, ContactError::NotContact { min, .. } if min == 0.0));
}

#[test]
fn perturbed_form_contact_value_matches_hand_expansion() {
    // η = −y dz + dw + 0.1 w dy gives η∧dη = (−1 − 0.1 y) dz∧dw∧dy.
    let f = ContactForm::new(1, 1.0, &["-y", "1", "0.1*w"]).unwrap();
    let g = SampleGrid::ball(vec![c64(0.3, -0.2), c64(-1.0, 0.5)], 1, 0.5, 200, 11);
    for &p in &g.base {
        for z in &g.fiber {
            let expect = -1.0 - 0.1 * z[1];
            assert!((contact_value(&f, p, z) - expect).norm() < 1e-15);
        }
    }
    let min = contact_check(&f, &g, CONTACT_THRESHOLD).unwrap();
    assert!(min >= 0.95 - 1e-12 && min <= 1.05);
}

#[test]
fn json_round_trip_and_unknown_keys() {
    let src = r#"{"n": 1, "rho": 0.8, "coeffs": {"dz": "-y", "dw": "1", "dy": "0.05*w"}}"#;
    let f = ContactForm::from_json_str(src).unwrap();
    assert_eq!(f.rho, 0.8);
    let back = ContactForm::from_json(&f.to_json()).unwrap();
    assert_eq!(back.sources(), f.sources());
    let bad = r#"{"n": 1, "rho": 1, "coeffs": {"dq": "1"}}"#;
    assert!(ContactForm::from_json_str(bad).is_err());
    let oob = ContactForm::new(1, 1.0, &["zeta3", "1", "0"]);
    assert!(matches!(oob, Err(ContactError::InvalidForm(_))));
}

#[test]
fn fiber_cauchy_riemann_residual() {
    let f = ContactForm::new(1, 1.0, &["-y", "1+w*w", "exp(w)"]).unwrap();
    assert!(f.fiber_cr_residual(&unit_grid(1)) <= 1e-8);
    let g = ContactForm::new(1, 1.0, &["-y", "1", "0.1*conj(w)"]).unwrap();
    assert!(g.fiber_cr_residual(&unit_grid(1)) > 0.05);
}

fn segment_sample(w: impl Fn(C64) -> (C64, C64), y: impl Fn(C64) -> (C64, C64)) -> LegendrianSample {
    let mut f = LegendrianSample::default();
    for k in 0..=50 {
        let s = k as f64 / 50.0;
        let z = c64(s, 0.0);
        let (wv, wd) = w(z);
        let (yv, yd) = y(z);
        f.s.push(s);
        f.z.push(z);
        f.dz.push(c64(1.0, 0.0));
        f.fiber.push(vec![wv, yv]);
        f.dfiber.push(vec![wd, yd]);
    }
    f
}

#[test]
fn isotropy_examples() {
    let alpha = ContactForm::standard(1);
    let zero = |_: C64| (C64::default(), C64::default());
    assert_eq!(isotropy_residual(&segment_sample(zero, zero), &alpha).unwrap(), 0.0);
    let exact = segment_sample(|z| (z * z / 2.0, z), |z| (z, c64(1.0, 0.0)));
    assert!(isotropy_residual(&exact, &alpha).unwrap() < 1e-15);
    let bad = segment_sample(|z| (z, c64(1.0, 0.0)), zero);
    assert!((isotropy_residual(&bad, &alpha).unwrap() - 1.0).abs() < 1e-15);
    let mut missing = bad.clone();
    missing.dfiber.clear();
    assert_eq!(isotropy_residual(&missing, &alpha), Err(ContactError::MissingTangents));
}

#[test]
fn isotropy_is_stable_under_resampling() {
    let alpha = ContactForm::standard(1);
    let sample = |m: usize| {
        let mut f = LegendrianSample::default();
        for k in 0..m {
            let th = 2.0 * PI * k as f64 / m as f64;
            let z = C64::from_polar(1.0, th);
            let dz = z * c64(0.0, 1.0);
            f.s.push(th);
            f.z.push(z);
            f.dz.push(dz);
            // Slightly off-Legendrian: w = z²/2 + 1e-3 z.
            f.fiber.push(vec![z * z / 2.0 + z * 1e-3, z]);
            f.dfiber.push(vec![(z + 1e-3) * dz, dz]);
        }
        f
    };
    let a = isotropy_residual(&sample(64), &alpha).unwrap();
    let b = isotropy_residual(&sample(128), &alpha).unwrap();
    assert!((a - 1e-3).abs() < 1e-12);
    assert!((a - b).abs() <= 1e-3 / (64.0 * 64.0));
}

fn rows(v: &[Vec<C64>]) -> Vec<DMatrix<C64>> {
    v.iter().map(|r| DMatrix::from_row_slice(1, r.len(), r)).collect()
}

fn target(m: usize, p: usize) -> DMatrix<C64> {
    DMatrix::from_fn(m, p, |i, j| if i == j { c64(1.0, 0.0) } else { C64::default() })
}

#[test]
fn completion_of_constant_row_is_identity() {
    let a = rows(&vec![vec![c64(1.0, 0.0), C64::default()]; 5]);
    let pos: Vec<C64> = (0..5).map(|k| c64(k as f64, 0.0)).collect();
    let fc = matrix_completion(&a, &pos, &CompletionConfig::default()).unwrap();
    for b in &fc.b {
        assert!((b - DMatrix::<C64>::identity(2, 2)).norm() < 1e-15);
    }
}

#[test]
fn completion_on_circle() {
    let m = 200;
    let th: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let a = rows(&th.iter().map(|t| vec![c64(t.cos(), 0.0), c64(t.sin(), 0.0)]).collect::<Vec<_>>());
    let pos: Vec<C64> = th.iter().map(|&t| C64::from_polar(1.0, t)).collect();
    let cfg = CompletionConfig {
        closed: true,
        ..CompletionConfig::default()
    };
    let fc = matrix_completion(&a, &pos, &cfg).unwrap();
    for (k, b) in fc.b.iter().enumerate() {
        assert!((&a[k] * b - target(1, 2)).norm() <= 1e-10);
        assert!((b[(0, 0)] - th[k].cos()).norm() < 1e-12);
        assert!((b[(1, 0)] - th[k].sin()).norm() < 1e-12);
        assert!((b * &fc.inverse[k] - DMatrix::<C64>::identity(2, 2)).norm() < 1e-12);
    }
}

#[test]
fn completion_repairs_full_loop_holonomy() {
    // Rows along a latitude of the sphere: parallel transport of the kernel
    // frame turns by the enclosed solid angle.
    let m = 400;
    let alpha = PI / 3.0;
    let th: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let a = rows(
        &th.iter()
            .map(|t| {
                vec![
                    c64(alpha.sin() * t.cos(), 0.0),
                    c64(alpha.sin() * t.sin(), 0.0),
                    c64(alpha.cos(), 0.0),
                ]
            })
            .collect::<Vec<_>>(),
    );
    let pos: Vec<C64> = th.iter().map(|&t| C64::from_polar(1.0, t)).collect();
    let cfg = CompletionConfig {
        closed: true,
        ..CompletionConfig::default()
    };
    let fc = matrix_completion(&a, &pos, &cfg).unwrap();
    assert!(fc.repaired);
    assert!(fc.holonomy > 0.5);
    assert!((fc.repair_bound - PI).abs() < 0.05);
    assert!(fc.repair_change <= fc.repair_bound + 1e-12);
    assert!(fc.identity_residual <= 1e-10);
    for k in 0..m {
        let j = (k + 1) % m;
        let step = (&fc.b[j] - &fc.b[k]).norm();
        assert!(step <= 0.1, "jump {step} at {k}");
    }
}

#[test]
fn completion_rank_drop() {
    let a = rows(&[vec![c64(1.0, 0.0), C64::default()], vec![C64::default(), C64::default()]]);
    let err = matrix_completion(&a, &[c64(0.0, 0.0), c64(1.0, 0.0)], &CompletionConfig::default()).unwrap_err();
    assert!(matches!(err, ContactError::RankDrop { sample: 1, .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn completion_of_random_smooth_loop(c in proptest::collection::vec(-1.0f64..1.0, 16)) {
        let m = 256;
        let row = |t: f64| -> Vec<C64> {
            (0..4).map(|j| {
                let base = if j == 0 { 2.0 } else { 0.0 };
                c64(base + c[4 * j] * t.cos() + c[4 * j + 1] * (2.0 * t).sin(), c[4 * j + 2] * t.sin() + c[4 * j + 3] * (3.0 * t).cos())
            }).collect()
        };
        let th: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
        let a = rows(&th.iter().map(|&t| row(t)).collect::<Vec<_>>());
        let pos: Vec<C64> = th.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let fc = matrix_completion(&a, &pos, &CompletionConfig { closed: true, ..CompletionConfig::default() }).unwrap();
        prop_assert!(fc.identity_residual <= 1e-10);
        for k in 0..m {
            prop_assert!((&a[k] * &fc.b[k] - target(1, 4)).norm() <= 1e-10);
            let j = (k + 1) % m;
            let d = (pos[j] - pos[k]).norm();
            prop_assert!((&fc.b[j] - &fc.b[k]).norm() <= fc.lipschitz * d * 2.0 + 1e-12);
        }
        prop_assert!(fc.repair_change <= fc.repair_bound + 1e-12);
    }
}

fn f(e: impl Fn(C64) -> C64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(e)
}

fn shifted_annulus() -> AdmissibleSet {
    let c = c64(0.3, 0.2);
    let outer = crate::geometry::PiecewiseCurve::circle(c, 0.75);
    let hole = crate::geometry::PiecewiseCurve::circle(c, 0.5);
    AdmissibleSet::islands_only(vec![Island::new(outer, vec![hole], c + 0.6).unwrap()]).unwrap()
}

#[test]
fn arens_constant_solutions() {
    let set = fixtures::annulus();
    let cfg = ArensConfig::default();
    let one = arens_identity(vec![f(|_| c64(1.0, 0.0))], &set, &cfg).unwrap();
    assert!(one.constant);
    assert!((one.eval(0, c64(0.7, 0.1)) - 1.0).norm() < 1e-14);
    let two = arens_identity(vec![f(|z| z), f(|z| 1.0 - z)], &set, &cfg).unwrap();
    assert!(two.constant);
    for i in 0..2 {
        assert!((two.eval(i, c64(1.1, -0.3)) - 1.0).norm() < 1e-12);
    }
}

#[test]
fn arens_on_shifted_annulus() {
    let set = shifted_annulus();
    let sol = arens_identity(vec![f(|z| z), f(|z| z - 1.0)], &set, &ArensConfig::default()).unwrap();
    assert!(sol.residual <= 1e-8);
    // A pair with no constant solution goes through approximation.
    let sol = arens_identity(vec![f(|z| z * z), f(|z| z - 1.0)], &set, &ArensConfig::default()).unwrap();
    assert!(!sol.constant);
    let fine = crate::approx::sample_set(&set, 400, 30).all_points();
    for z in fine {
        let s = z * z * sol.eval(0, z) + (z - 1.0) * sol.eval(1, z);
        assert!((s - 1.0).norm() <= 1e-8);
    }
}

#[test]
fn arens_common_zero() {
    let err = arens_identity(vec![f(|z| z), f(|z| z * z)], &fixtures::disc(), &ArensConfig::default()).unwrap_err();
    assert!(matches!(err, ContactError::CommonZero { .. }));
}

#[test]
fn tube_extension_of_axis_line() {
    let xs: Vec<f64> = (0..20).map(|k| k as f64 / 19.0).collect();
    let fpts: Vec<Vec<C64>> = xs.iter().map(|&x| vec![c64(x, 0.0), C64::default(), C64::default()]).collect();
    let tan = vec![vec![c64(1.0, 0.0), C64::default(), C64::default()]; 20];
    let pos: Vec<C64> = xs.iter().map(|&x| c64(x, 0.0)).collect();
    let ext = tube_extension(&fpts, &tan, &pos, &CompletionConfig::default()).unwrap();
    let zeta = [c64(0.1, 0.2), c64(-0.3, 0.0)];
    for k in 0..20 {
        assert_eq!(ext.eval(k, &[C64::default(), C64::default()]), fpts[k]);
        let v = ext.eval(k, &zeta);
        assert!((v[0] - fpts[k][0]).norm() < 1e-15);
        assert!((v[1] - zeta[0]).norm() < 1e-15 && (v[2] - zeta[1]).norm() < 1e-15);
    }
}

#[test]
fn tube_extension_of_legendrian_circle_has_full_rank() {
    let m = 128;
    let mut fpts = Vec::new();
    let mut tan = Vec::new();
    let mut pos = Vec::new();
    for k in 0..m {
        let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
        let dz = z * c64(0.0, 1.0);
        fpts.push(vec![z, z * z / 2.0, z]);
        tan.push(vec![dz, z * dz, dz]);
        pos.push(z);
    }
    let ext = tube_extension(
        &fpts,
        &tan,
        &pos,
        &CompletionConfig {
            closed: true,
            ..CompletionConfig::default()
        },
    )
    .unwrap();
    for k in 0..m {
        let sv = ext.jacobian(k).svd(false, false).singular_values;
        assert!(sv.min() > 0.1 * sv.max());
    }
    assert!(ext.radius > 0.0);
}

#[test]
fn normal_form_of_standard_form_is_trivial() {
    let nf = normal_form(&ContactForm::standard(1), &fixtures::annulus(), &NormalFormConfig::default()).unwrap();
    assert!(nf.constant_change);
    assert!((nf.reduced.change_matrix(c64(1.0, 0.0)) - DMatrix::<C64>::identity(2, 2)).norm() == 0.0);
    assert_eq!((nf.h_min, nf.h_max), (1.0, 1.0));
    assert!(nf.residual_terms.is_empty());
}

#[test]
fn normal_form_divides_by_h() {
    let form = ContactForm::new(1, 1.0, &["-2*y", "2", "0"]).unwrap();
    let nf = normal_form(&form, &fixtures::annulus(), &NormalFormConfig::default()).unwrap();
    assert!(nf.constant_change);
    assert!((nf.reduced.change_matrix(c64(1.0, 0.0)) - DMatrix::<C64>::identity(2, 2)).norm() == 0.0);
    assert_eq!((nf.h_min, nf.h_max), (2.0, 2.0));
    let c = nf.reduced.coeffs(c64(1.2, 0.3), &[c64(0.1, 0.0), c64(0.2, 0.1)]);
    assert!((c[0] + c64(0.2, 0.1)).norm() < 1e-15 && (c[1] - 1.0).norm() < 1e-15);
}

#[test]
fn normal_form_of_perturbed_form() {
    let form = ContactForm::new(1, 1.0, &["-y", "1", "0.05*w"]).unwrap();
    let set = fixtures::annulus();
    let nf = normal_form(&form, &set, &NormalFormConfig::default()).unwrap();
    assert!(nf.axis_residual <= 1e-9);
    assert!(nf.linear_residual <= 1e-9);
    let wdy = nf
        .residual_terms
        .iter()
        .find(|t| t.class == TermClass::ZetaDy && t.variable == Some(0))
        .unwrap();
    assert!((wdy.max_abs - 0.05).abs() < 1e-12);
    assert_eq!(nf.smoothness_out + 2, nf.smoothness_in);
    // Oracle: the reduced form is the input form itself.
    for &(p, ref m) in &nf.change_samples[..10] {
        assert!((m - DMatrix::<C64>::identity(2, 2)).norm() == 0.0);
        let zh = [c64(0.2, -0.1), c64(0.1, 0.3)];
        let c = nf.reduced.coeffs(p, &zh);
        assert!((c[2] - zh[0] * 0.05).norm() < 1e-15);
    }
}

#[test]
fn normal_form_with_bezout_completion() {
    // Both fibre coefficients vanish somewhere on the disc; the contact value is 2.
    let form = ContactForm::new(1, 1.0, &["y - w", "z", "1 - z"]).unwrap();
    let set = AdmissibleSet::islands_only(vec![Island::disc(c64(0.5, 0.0), 1.0)]).unwrap();
    let nf = normal_form(&form, &set, &NormalFormConfig::default()).unwrap();
    assert!(nf.step1.starts_with("Bezout"));
    assert!(nf.axis_residual <= 1e-9, "{}", nf.axis_residual);
    assert!(nf.linear_residual <= 1e-8, "{}", nf.linear_residual);
    // Invariants on a twice finer grid.
    let fine = crate::approx::sample_set(&set, 96, 16).all_points();
    for p in fine {
        let (axis, lin) = normal::axis_defects(&nf.reduced, p);
        assert!(axis <= 1e-9 && lin <= 1e-8, "{p}: {axis} {lin}");
    }
    let grid = SampleGrid::ball(vec![c64(0.2, 0.3)], 1, 0.3, 6, 1);
    assert!(contact_check(&nf.reduced, &grid, CONTACT_THRESHOLD).is_ok());
}

#[test]
fn normal_form_rejects_non_legendrian_axis() {
    let form = ContactForm::new(1, 1.0, &["1 - y", "1", "0"]).unwrap();
    let err = normal_form(&form, &fixtures::disc(), &NormalFormConfig::default()).unwrap_err();
    assert!(matches!(err, ContactError::NotLegendrianAxis { .. }));
}
