//! Reference admissible sets used by examples, tests and the CLI demos.

use std::f64::consts::PI;

use crate::geometry::{
    build_admissible_set, AdmissibleSet, AttachSpec, Island, Piece, PiecewiseCurve, Tolerances,
};
use crate::{c64, C64};

/// Closed unit disc.
pub fn disc() -> AdmissibleSet {
    AdmissibleSet::islands_only(vec![Island::disc(c64(0.0, 0.0), 1.0)]).expect("disc fixture")
}

/// Annulus `{r_in ≤ |z| ≤ r_out}` with vertex on the positive real axis.
pub fn annulus_with(r_in: f64, r_out: f64) -> AdmissibleSet {
    let outer = PiecewiseCurve::circle(c64(0.0, 0.0), r_out);
    let hole = PiecewiseCurve::circle(c64(0.0, 0.0), r_in);
    let isl = Island::new(outer, vec![hole], c64(0.5 * (r_in + r_out), 0.0)).expect("annulus fixture");
    AdmissibleSet::islands_only(vec![isl]).expect("annulus fixture")
}

/// `{½ ≤ |z| ≤ 2}`.
pub fn annulus() -> AdmissibleSet {
    annulus_with(0.5, 2.0)
}

/// Disc of radius 3 with two holes of radius ½ centred at ±3/2.
pub fn pair_of_pants() -> AdmissibleSet {
    let outer = PiecewiseCurve::circle(c64(0.0, 0.0), 3.0);
    let holes = vec![
        PiecewiseCurve::circle(c64(-1.5, 0.0), 0.5),
        PiecewiseCurve::circle(c64(1.5, 0.0), 0.5),
    ];
    let isl = Island::new(outer, holes, c64(0.0, 0.5)).expect("pants fixture");
    AdmissibleSet::islands_only(vec![isl]).expect("pants fixture")
}

/// Hole anchors for [`pair_of_pants`].
pub fn pair_of_pants_anchors() -> Vec<C64> {
    vec![c64(-1.5, 0.0), c64(1.5, 0.0)]
}

/// Radial Hermite bridge between two circles of radius `r`, leaving the
/// first at angle `a0` and entering the second at angle `a1`.
pub fn radial_bridge(c0: C64, a0: f64, c1: C64, a1: f64, r: f64, speed: f64) -> PiecewiseCurve {
    let d0 = C64::from_polar(1.0, a0);
    let d1 = C64::from_polar(1.0, a1);
    PiecewiseCurve::new(
        vec![Piece::Hermite {
            p0: c0 + d0 * r,
            p1: c1 + d1 * r,
            t0: d0 * speed,
            t1: -d1 * speed,
        }],
        false,
    )
    .expect("bridge is immersed")
}

/// Two unit discs at ±2 joined by three disjoint transverse bridges: the
/// real segment `[−1, 1]` and two arcs above and below it.
pub fn fig1() -> AdmissibleSet {
    let left = Island::disc(c64(-2.0, 0.0), 1.0);
    let right = Island::disc(c64(2.0, 0.0), 1.0);
    let (cl, cr) = (c64(-2.0, 0.0), c64(2.0, 0.0));
    let mid = PiecewiseCurve::segment(c64(-1.0, 0.0), c64(1.0, 0.0)).unwrap();
    let upper = radial_bridge(cl, PI / 4.0, cr, 3.0 * PI / 4.0, 1.0, 3.0);
    let lower = radial_bridge(cl, -PI / 4.0, cr, -3.0 * PI / 4.0, 1.0, 3.0);
    let ends = || {
        vec![
            AttachSpec::Attached { island: 0, boundary: 0 },
            AttachSpec::Attached { island: 1, boundary: 0 },
        ]
    };
    build_admissible_set(
        vec![left, right],
        vec![(mid, ends()), (upper, ends()), (lower, ends())],
        Tolerances::default(),
    )
    .expect("fig1 fixture")
}

/// Three unit discs at the corners of a near-equilateral triangle, joined
/// pairwise along the centre lines; one bridge closes a cycle.
pub fn triangle_chain() -> AdmissibleSet {
    let centres = [c64(0.0, 0.0), c64(4.0, 0.0), c64(2.0, 3.46)];
    let islands = centres.iter().map(|&c| Island::disc(c, 1.0)).collect();
    let mut arcs = Vec::new();
    for (i, j) in [(0usize, 1usize), (1, 2), (0, 2)] {
        let d = (centres[j] - centres[i]) / (centres[j] - centres[i]).norm();
        let seg = PiecewiseCurve::segment(centres[i] + d, centres[j] - d).unwrap();
        arcs.push((
            seg,
            vec![
                AttachSpec::Attached { island: i, boundary: 0 },
                AttachSpec::Attached { island: j, boundary: 0 },
            ],
        ));
    }
    build_admissible_set(islands, arcs, Tolerances::default()).expect("triangle fixture")
}

/// One disc with a loop arc whose ends both land on it.
pub fn disc_with_loop() -> AdmissibleSet {
    let c = c64(0.0, 0.0);
    let arc = radial_bridge(c, PI / 6.0, c, -PI / 6.0, 1.0, 6.0);
    build_admissible_set(
        vec![Island::disc(c, 1.0)],
        vec![(
            arc,
            vec![
                AttachSpec::Attached { island: 0, boundary: 0 },
                AttachSpec::Attached { island: 0, boundary: 0 },
            ],
        )],
        Tolerances::default(),
    )
    .expect("loop fixture")
}

/// The unit circle as a set with no islands.
pub fn unit_circle() -> AdmissibleSet {
    build_admissible_set(vec![], vec![(PiecewiseCurve::circle(c64(0.0, 0.0), 1.0), vec![])], Tolerances::default())
        .expect("circle fixture")
}

/// Two unit discs at distance 1 from each other.
pub fn two_discs_apart() -> AdmissibleSet {
    AdmissibleSet::islands_only(vec![Island::disc(c64(0.0, 0.0), 1.0), Island::disc(c64(3.0, 0.0), 1.0)])
        .expect("two discs")
}

/// Named fixture lookup used by the CLI.
pub fn by_name(name: &str) -> Option<AdmissibleSet> {
    Some(match name {
        "disc" => disc(),
        "annulus" => annulus(),
        "pants" | "pair-of-pants" => pair_of_pants(),
        "fig1" => fig1(),
        "triangle" => triangle_chain(),
        "loop" => disc_with_loop(),
        "circle" => unit_circle(),
        _ => return None,
    })
}
