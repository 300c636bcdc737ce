use super::*;
use crate::c64;
use proptest::prelude::*;

type R = Result<Vec<C64>, String>;

fn identity(t: &[C64]) -> R {
    Ok(t.to_vec())
}

#[test]
fn boundary_samples_lie_on_the_boundary() {
    for l in 1..=3 {
        let spec = PolydiscSpec::grid(0.1, l, 8, 1);
        assert!(spec.on_boundary(1e-15));
        assert_eq!(spec.boundary_samples.len(), l * 8 * 7usize.pow(l as u32 - 1));
    }
    assert!(PolydiscSpec::random(0.3, 2, 10, 1).on_boundary(1e-15));
}

#[test]
fn identity_is_certified_with_full_margin() {
    for l in 1..=2 {
        let c = degree_certificate(&identity, &PolydiscSpec::new(0.2, l)).unwrap();
        assert!(c.passed);
        assert_eq!(c.margin, 0.2);
        assert_eq!(c.guard, 0.0);
    }
}

#[test]
fn small_defect_passes_and_negation_fails() {
    let delta = 0.1;
    // ‖P − id‖ = 0.3δ exactly on the boundary.
    let p = move |t: &[C64]| -> R { Ok(t.iter().map(|x| x + 0.3 * delta * (x / delta).powi(2)).collect()) };
    let spec = PolydiscSpec::new(delta, 1);
    let c = degree_certificate(&p, &spec).unwrap();
    assert!(c.passed);
    assert!((c.sup_defect - 0.3 * delta).abs() < 1e-15);
    let fine = PolydiscSpec::grid(delta, 1, 2 * DEFAULT_PER_DIM, 2 * DEFAULT_RINGS);
    assert!(homotopy_min(&p, &fine, 16).unwrap() >= 0.7 * delta - 1e-15);
    let neg = |t: &[C64]| -> R { Ok(t.iter().map(|x| -x).collect()) };
    let c = degree_certificate(&neg, &spec).unwrap();
    assert!(!c.passed);
    assert!((c.sup_defect - 2.0 * delta).abs() < 1e-15);
}

#[test]
fn coarse_sampling_is_reported() {
    let delta = 0.1;
    let p = move |t: &[C64]| -> R { Ok(t.iter().map(|x| x + 0.9 * delta * (x / delta).powi(8)).collect()) };
    let spec = PolydiscSpec::grid(delta, 1, 6, 1);
    assert!(matches!(degree_certificate(&p, &spec), Err(SolveError::InsufficientSampling { .. })));
}

#[test]
fn solver_examples() {
    let cfg = SolveConfig::default();
    let r = solve_periods(&identity, 2, 0.1, &cfg).unwrap();
    assert_eq!(r.t0, vec![c64(0.0, 0.0); 2]);
    assert!(r.iterations <= 1);

    let c = [c64(0.02, -0.01), c64(-0.015, 0.03)];
    let shift = move |t: &[C64]| -> R { Ok(t.iter().zip(&c).map(|(a, b)| a + b).collect()) };
    let r = solve_periods(&shift, 2, 0.1, &cfg).unwrap();
    for (a, b) in r.t0.iter().zip(&c) {
        assert!((a + b).norm() < 1e-15);
    }

    let neg = |t: &[C64]| -> R { Ok(t.iter().map(|x| -x).collect()) };
    assert!(matches!(solve_with_schedule(&neg, 1, &cfg), Err(SolveError::CertificateFailed { .. })));
}

/// `P(t) = t + c + Q(t, t)` with the reference root from Newton's method on
/// the closed form with an analytic Jacobian.
fn quadratic_case(c: [C64; 2], q: [[C64; 3]; 2]) -> (impl Fn(&[C64]) -> R + Sync, Vec<C64>) {
    let p = move |t: &[C64]| -> R {
        Ok((0..2)
            .map(|i| t[i] + c[i] + q[i][0] * t[0] * t[0] + q[i][1] * t[0] * t[1] + q[i][2] * t[1] * t[1])
            .collect())
    };
    let mut t = [C64::new(0.0, 0.0); 2];
    for _ in 0..50 {
        let f: Vec<C64> = (0..2)
            .map(|i| t[i] + c[i] + q[i][0] * t[0] * t[0] + q[i][1] * t[0] * t[1] + q[i][2] * t[1] * t[1])
            .collect();
        let j = |i: usize, k: usize| {
            let id = if i == k { 1.0 } else { 0.0 };
            if k == 0 {
                id + 2.0 * q[i][0] * t[0] + q[i][1] * t[1]
            } else {
                id + q[i][1] * t[0] + 2.0 * q[i][2] * t[1]
            }
        };
        let det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
        let d0 = (j(1, 1) * f[0] - j(0, 1) * f[1]) / det;
        let d1 = (-j(1, 0) * f[0] + j(0, 0) * f[1]) / det;
        t[0] -= d0;
        t[1] -= d1;
    }
    (p, t.to_vec())
}

#[test]
fn quadratic_map_is_solved_to_target() {
    let c = [c64(0.01, 0.005), c64(-0.008, 0.002)];
    let q = [[c64(0.5, 0.1), c64(-0.3, 0.0), c64(0.2, 0.2)], [c64(0.1, -0.4), c64(0.6, 0.0), c64(-0.2, 0.1)]];
    let (p, reference) = quadratic_case(c, q);
    let r = solve_with_schedule(&p, 2, &SolveConfig::default()).unwrap();
    assert!(r.residual <= 1e-10);
    assert!(r.certificate.passed);
    for (a, b) in r.t0.iter().zip(&reference) {
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn report_serialises() {
    let r = solve_periods(&identity, 1, 0.1, &SolveConfig::default()).unwrap();
    let s = serde_json::to_string(&r).unwrap();
    let back: SolveReport = serde_json::from_str(&s).unwrap();
    assert_eq!(back, r);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn certificate_is_sound_on_a_finer_grid(a in -1.0f64..1.0, b in -1.0f64..1.0, k in 2i32..4, scale in 0.0f64..0.8) {
        let delta = 0.1;
        let coef = c64(a, b) * scale;
        let p = move |t: &[C64]| -> R {
            Ok(vec![t[0] + coef * delta * (t[0] / delta).powi(k), t[1] + coef.conj() * t[0] * t[1] / delta])
        };
        let spec = PolydiscSpec::grid(delta, 2, 16, 2);
        if let Ok(c) = degree_certificate(&p, &spec) {
            if c.passed {
                let fine = PolydiscSpec::grid(delta, 2, 32, 4);
                let h = homotopy_min(&p, &fine, 8).unwrap();
                prop_assert!(h >= c.guard / 2.0);
                prop_assert!(h >= c.margin - c.guard);
            }
        }
    }

    #[test]
    fn solved_residual_meets_target(c0 in -0.02f64..0.02, c1 in -0.02f64..0.02, q in -0.5f64..0.5) {
        let p = move |t: &[C64]| -> R { Ok(vec![t[0] + c64(c0, c1) + q * t[0] * t[0]]) };
        let r = solve_with_schedule(&p, 1, &SolveConfig::default()).unwrap();
        let check = p(&r.t0).unwrap();
        prop_assert!(check[0].norm() <= 1e-10);
        prop_assert!(r.t0[0].norm() <= r.delta_used + 1e-15);
    }
}

#[test]
fn budgeted_grid_respects_the_cap() {
    assert_eq!(PolydiscSpec::grid_size(2, 32, 2), 2 * 32 * 19);
    let s = PolydiscSpec::budgeted(0.1, 5, 32, 2, 4096);
    assert!(s.boundary_samples.len() <= 4096);
    assert_eq!(s.boundary_samples.len(), 5 * 32);
    assert!((s.spacing - 0.1).abs() < 1e-15);
    assert!(s.on_boundary(1e-14));
    let s = PolydiscSpec::budgeted(0.1, 1, 32, 2, 4096);
    assert_eq!(s.boundary_samples.len(), 32);
}
