use super::*;
use crate::fixtures;

#[test]
fn disc_is_valid_and_connected() {
    let s = fixtures::disc();
    assert!(s.connected);
    assert_eq!(s.islands[0].holes.len(), 0);
    assert_eq!(s.euler_characteristic(), 1);
}

#[test]
fn annulus_records_its_hole_with_negative_orientation() {
    let s = fixtures::annulus();
    assert_eq!(s.islands[0].holes.len(), 1);
    assert_eq!(s.islands[0].outer.orientation(), 1);
    assert_eq!(s.islands[0].holes[0].orientation(), -1);
    assert!(s.contains(c64(1.0, 0.0)));
    assert!(!s.contains(c64(0.1, 0.0)));
}

#[test]
fn fig1_three_bridges_valid() {
    let s = fixtures::fig1();
    assert!(s.connected);
    assert_eq!(s.arcs.len(), 3);
    assert_eq!(s.euler_characteristic(), -1);
}

#[test]
fn crossing_arcs_rejected() {
    let isl = vec![Island::disc(c64(-2.0, 0.0), 1.0), Island::disc(c64(2.0, 0.0), 1.0)];
    let a = PiecewiseCurve::segment(c64(-1.0, 0.0), c64(1.0, 0.0)).unwrap();
    let b = PiecewiseCurve::segment(c64(0.0, -1.0), c64(0.0, 1.0)).unwrap();
    let ends = vec![
        AttachSpec::Attached { island: 0, boundary: 0 },
        AttachSpec::Attached { island: 1, boundary: 0 },
    ];
    let err = build_admissible_set(isl, vec![(a, ends), (b, vec![AttachSpec::Free, AttachSpec::Free])], Tolerances::default())
        .unwrap_err();
    assert!(matches!(err, GeometryError::DisjointnessViolation(_)), "{err}");
}

#[test]
fn overlapping_islands_rejected() {
    let err = AdmissibleSet::islands_only(vec![Island::disc(c64(0.0, 0.0), 1.0), Island::disc(c64(1.5, 0.0), 1.0)])
        .unwrap_err();
    assert!(matches!(err, GeometryError::DisjointnessViolation(_)));
}

#[test]
fn tangent_attachment_rejected() {
    // Leaves the unit circle at 1 along the tangent direction.
    let arc = PiecewiseCurve::new(
        vec![Piece::Hermite {
            p0: c64(1.0, 0.0),
            p1: c64(2.0, 2.0),
            t0: c64(0.0, 1.0),
            t1: c64(1.0, 1.0),
        }],
        false,
    )
    .unwrap();
    let err = build_admissible_set(
        vec![Island::disc(c64(0.0, 0.0), 1.0)],
        vec![(arc, vec![AttachSpec::Attached { island: 0, boundary: 0 }, AttachSpec::Free])],
        Tolerances::default(),
    )
    .unwrap_err();
    assert!(matches!(err, GeometryError::TangencyViolation { .. }), "{err}");
}

#[test]
fn dangling_attachment_rejected() {
    let arc = PiecewiseCurve::segment(c64(1.1, 0.0), c64(2.0, 0.0)).unwrap();
    let err = build_admissible_set(
        vec![Island::disc(c64(0.0, 0.0), 1.0)],
        vec![(arc, vec![AttachSpec::Attached { island: 0, boundary: 0 }, AttachSpec::Free])],
        Tolerances::default(),
    )
    .unwrap_err();
    assert!(matches!(err, GeometryError::DanglingAttachment { .. }), "{err}");
}

#[test]
fn circle_samples_are_roots_of_unity() {
    let c = PiecewiseCurve::circle(c64(0.0, 0.0), 1.0);
    let s = sample_curve(&c, 32).unwrap();
    for (j, p) in s.points.iter().enumerate() {
        let exact = C64::from_polar(1.0, 2.0 * PI * j as f64 / 32.0);
        assert!((p - exact).norm() < 1e-14);
    }
    assert!(s.closure_defect() <= CLOSURE_TOL);
}

#[test]
fn segment_two_samples() {
    let c = PiecewiseCurve::segment(c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
    let s = sample_curve(&c, 2).unwrap();
    assert_eq!(s.points, vec![c64(0.0, 0.0), c64(1.0, 0.0)]);
    assert_eq!(s.dz, vec![c64(1.0, 0.0)]);
}

#[test]
fn undersampling_rejected() {
    let c = PiecewiseCurve::circle(c64(0.0, 0.0), 1.0);
    assert!(matches!(sample_curve(&c, 7), Err(GeometryError::UnderSampled { needed: 8, got: 7 })));
}

#[test]
fn hermite_arclength_matches_fine_chord_sum() {
    let s = fixtures::fig1();
    for a in &s.arcs {
        let fine: f64 = {
            let m = 200_000;
            (0..m)
                .map(|k| {
                    let (u0, u1) = (k as f64 / m as f64, (k + 1) as f64 / m as f64);
                    (a.curve.pieces()[0].eval(u1) - a.curve.pieces()[0].eval(u0)).norm()
                })
                .sum()
        };
        assert!((a.curve.length() - fine).abs() < 1e-8, "{} vs {fine}", a.curve.length());
        let samples = sample_curve(&a.curve, 64).unwrap();
        assert_eq!(samples.start(), a.curve.start());
        assert_eq!(samples.end(), a.curve.end());
    }
}

#[test]
fn disc_neighbourhood_membership() {
    let s = fixtures::disc();
    let nb = regular_neighborhood(&s, 0.1).unwrap();
    assert!(nb.contains(c64(1.05, 0.0)));
    assert!(!nb.contains(c64(1.2, 0.0)));
}

#[test]
fn merging_neighbourhoods_rejected() {
    let s = fixtures::two_discs_apart();
    assert!(matches!(regular_neighborhood(&s, 0.6), Err(GeometryError::EpsilonTooLarge { .. })));
}

#[test]
fn json_round_trip_preserves_structure() {
    let s = fixtures::fig1();
    let text = serde_json::to_string(&s.to_json()).unwrap();
    let back = AdmissibleSet::from_json_str(&text, Tolerances::default()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn json_points_piece_loads() {
    let src = r#"{"islands": [{"outer": {"pieces": [{"points": [[1,0],[0,1],[-1,0],[0,-1],[1,0]]}], "closed": true},
                  "holes": [], "vertex": [0, 0]}], "arcs": []}"#;
    let s = AdmissibleSet::from_json_str(src, Tolerances::default()).unwrap();
    assert_eq!(s.islands[0].outer.pieces().len(), 4);
    assert!(s.contains(c64(0.2, 0.2)));
}

#[test]
fn sub_curve_wraps_on_closed_curves() {
    let c = PiecewiseCurve::circle(c64(0.0, 0.0), 1.0);
    let sub = c.sub_curve(0.75, 0.25).unwrap();
    assert!((sub.length() - PI).abs() < 1e-12);
    assert!((sub.start() - c64(0.0, -1.0)).norm() < 1e-12);
    assert!((sub.end() - c64(0.0, 1.0)).norm() < 1e-12);
}

#[test]
fn anchors_avoid_attachments() {
    let s = fixtures::fig1();
    for (i, isl) in s.islands.iter().enumerate() {
        let (a, b) = isl.anchors[0];
        assert!((a - b).abs() > 1e-3);
        for arc in &s.arcs {
            for e in &arc.ends {
                if let End::Attached { island, s: t, .. } = *e {
                    if island == i {
                        let d = (b - t).rem_euclid(1.0);
                        assert!(d.min(1.0 - d) >= 0.02);
                    }
                }
            }
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn closed_curves_close(r in 0.1f64..5.0, cx in -3.0f64..3.0, n in 8usize..300) {
            let c = PiecewiseCurve::circle(c64(cx, 0.0), r);
            let s = sample_curve(&c, n).unwrap();
            prop_assert!(s.closure_defect() <= CLOSURE_TOL);
        }

        #[test]
        fn closed_splines_close(pts in proptest::collection::vec((0.0f64..1.0, 0.5f64..1.5), 5..9), n in 80usize..200) {
            let m = pts.len();
            let points: Vec<C64> = pts.iter().enumerate()
                .map(|(k, &(jit, r))| C64::from_polar(r, 2.0 * PI * (k as f64 + 0.3 * jit) / m as f64))
                .collect();
            let c = PiecewiseCurve::spline(&points, true).unwrap();
            let s = sample_curve(&c, n).unwrap();
            prop_assert!(s.closure_defect() <= CLOSURE_TOL);
        }

        #[test]
        fn construction_is_deterministic(seed in 0u8..4) {
            let _ = seed;
            prop_assert_eq!(fixtures::fig1(), fixtures::fig1());
        }
    }
}

#[test]
fn chord_length_converges_quadratically() {
    let c = PiecewiseCurve::circle(c64(0.0, 0.0), 1.0);
    let exact = 2.0 * PI;
    let ns = [64usize, 128, 256, 512, 1024];
    let errs: Vec<f64> = ns.iter().map(|&n| (exact - sample_curve(&c, n).unwrap().chord_length()).abs()).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 5.0;
    let my = ys.iter().sum::<f64>() / 5.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(slope <= -1.9, "slope {slope}");
}
