use super::*;
use crate::fixtures;
use crate::geometry::{build_admissible_set, AttachSpec, Tolerances};

fn winding(curve: &PiecewiseCurve, z: C64) -> i64 {
    let pts = curve.polyline_points(512);
    let mut total = 0.0;
    let n = pts.len();
    for k in 0..n {
        let a = pts[k] - z;
        let b = pts[(k + 1) % n] - z;
        total += (b / a).arg();
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

fn check_basis(set: &AdmissibleSet) -> HomologyBasis {
    let basis = build_homology_basis(set).unwrap();
    assert_eq!(basis.rank() as i64, 1 - set.euler_characteristic());
    assert!(basis.runge_certified);
    for c in &basis.cycles {
        assert!(c.is_closed());
        // Set distance uses a polygonal approximation of curved arcs.
        assert!(set.distance(c.point_at(0.37)) < 1e-3);
        assert!((c.start() - basis.base_point).norm() < 1e-9);
    }
    basis
}

#[test]
fn disc_has_empty_basis() {
    let b = check_basis(&fixtures::disc());
    assert_eq!(b.rank(), 0);
}

#[test]
fn annulus_cycle_winds_once_around_the_hole() {
    let b = check_basis(&fixtures::annulus());
    assert_eq!(b.rank(), 1);
    assert_eq!(winding(&b.cycles[0], c64(0.0, 0.0)).abs(), 1);
}

#[test]
fn pants_cycles_separate_the_holes() {
    let set = fixtures::pair_of_pants();
    let b = check_basis(&set);
    assert_eq!(b.rank(), 2);
    let holes = fixtures::pair_of_pants_anchors();
    let m: Vec<Vec<i64>> = b
        .cycles
        .iter()
        .map(|c| holes.iter().map(|&h| winding(c, h)).collect())
        .collect();
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    assert_eq!(det.abs(), 1);
}

#[test]
fn fig1_colouring_and_rank() {
    let set = fixtures::fig1();
    let col = classify_bridges(&set).unwrap();
    assert_eq!(col.black, vec![0]);
    assert_eq!(col.red, vec![1, 2]);
    let b = check_basis(&set);
    assert_eq!(b.rank(), 2);
    assert!(b.kinds.iter().all(|k| matches!(k, CycleKind::RedBridge { .. })));
}

#[test]
fn triangle_chain_has_one_cycle() {
    let set = fixtures::triangle_chain();
    let col = classify_bridges(&set).unwrap();
    assert_eq!(col.black.len(), 2);
    assert_eq!(col.red.len(), 1);
    check_basis(&set);
}

#[test]
fn loop_arc_gives_a_cycle() {
    let b = check_basis(&fixtures::disc_with_loop());
    assert_eq!(b.kinds, vec![CycleKind::Loop { arc: 0 }]);
}

#[test]
fn closed_curve_without_islands() {
    let b = check_basis(&fixtures::unit_circle());
    assert_eq!(b.rank(), 1);
}

#[test]
fn disconnected_set_is_rejected() {
    let set = fixtures::two_discs_apart();
    assert_eq!(classify_bridges(&set), Err(HomologyError::DisconnectedSet));
    assert!(matches!(build_homology_basis(&set), Err(HomologyError::DisconnectedSet)));
}

#[test]
fn private_arcs_stay_clear_of_other_cycles() {
    for set in [fixtures::pair_of_pants(), fixtures::fig1()] {
        let b = build_homology_basis(&set).unwrap();
        assert!(b.private_clearance > 1e-3);
        for (i, p) in b.private_arcs.iter().enumerate() {
            let pp = Polyline::from_curve(p, 64);
            assert!(b.cycles[i].project(p.point_at(0.5)).1 < 1e-8);
            for (j, c) in b.cycles.iter().enumerate() {
                if j != i {
                    assert!(pp.min_distance_to(&Polyline::from_curve(c, 256)) > 1e-3);
                }
            }
        }
    }
}

#[test]
fn runge_check_on_core_and_small_circles() {
    let ann = fixtures::annulus();
    let core = Polyline::from_curve(&PiecewiseCurve::circle(c64(0.0, 0.0), 1.0), 256);
    assert!(runge_check(&ann, &[core], &RungeConfig::default()).unwrap());
    let disc = fixtures::disc();
    let small = Polyline::from_curve(&PiecewiseCurve::circle(c64(0.0, 0.0), 0.5), 256);
    assert!(!runge_check(&disc, &[small], &RungeConfig::default()).unwrap());
}

#[test]
fn runge_check_agrees_across_resolutions() {
    for set in [fixtures::annulus(), fixtures::pair_of_pants(), fixtures::fig1()] {
        let b = build_homology_basis(&set).unwrap();
        let polys = b.polylines();
        let fine = RungeConfig { cells: 800, eps: None };
        assert!(runge_check(&set, &polys, &fine).unwrap());
    }
}

#[test]
fn coarse_raster_is_reported() {
    let ann = fixtures::annulus();
    let cfg = RungeConfig { cells: 10, eps: Some(0.05) };
    assert!(matches!(runge_check(&ann, &[], &cfg), Err(HomologyError::ResolutionTooCoarse { .. })));
}

#[test]
fn annulus_family_splits_at_an_extra_point() {
    let set = fixtures::annulus();
    let basis = build_homology_basis(&set).unwrap();
    let z = basis.cycles[0].point_at(0.5);
    let fam = curve_family_with_interpolation(&set, &basis, &[basis.base_point, z]).unwrap();
    assert!(fam.connected);
    assert!(fam.runge_certified);
    assert!(fam.members.iter().all(|m| !m.is_closed()));
    let total: f64 = fam.members.iter().map(PiecewiseCurve::length).sum();
    assert!(total >= basis.cycles[0].length() - 1e-9);
}

#[test]
fn fig1_family_connects_interior_points() {
    let set = fixtures::fig1();
    let basis = build_homology_basis(&set).unwrap();
    let pts = [c64(-2.3, 0.4), c64(2.2, -0.5)];
    let fam = curve_family_with_interpolation(&set, &basis, &pts).unwrap();
    assert!(fam.connected);
    assert!(fam.runge_certified);
    for &p in &pts {
        assert!(fam.members.iter().any(|m| !curve_hits(m, p, ON_CURVE_TOL).is_empty()));
    }
}

#[test]
fn dangling_arc_joins_the_family() {
    let isl = crate::geometry::Island::disc(c64(0.0, 0.0), 1.0);
    let tail = PiecewiseCurve::segment(c64(1.0, 0.0), c64(2.0, 0.0)).unwrap();
    let set = build_admissible_set(
        vec![isl],
        vec![(tail, vec![AttachSpec::Attached { island: 0, boundary: 0 }, AttachSpec::Free])],
        Tolerances::default(),
    )
    .unwrap();
    let basis = build_homology_basis(&set).unwrap();
    assert_eq!(basis.rank(), 0);
    let fam = curve_family_with_interpolation(&set, &basis, &[]).unwrap();
    assert!(fam.connected);
    assert!(fam.members.iter().any(|m| !curve_hits(m, c64(2.0, 0.0), ON_CURVE_TOL).is_empty()));
}

#[test]
fn basis_json_shape() {
    let b = build_homology_basis(&fixtures::pair_of_pants()).unwrap();
    let j = b.to_json(128);
    assert_eq!(j.cycles.len(), 2);
    for (c, r) in j.cycles.iter().zip(&j.private_arcs) {
        assert!(r[0] < r[1] && r[1] < c.len());
    }
    let text = serde_json::to_string(&j).unwrap();
    let back: BasisJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back, j);
}
