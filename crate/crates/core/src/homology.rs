//! Connected Runge homology bases of admissible sets, bridge colouring, the
//! interpolation curve family and the raster Runge certificate.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    sample_curve_at_least, AdmissibleSet, End, GeometryError, Island, Piece, PiecewiseCurve, Polyline, POLY_DENSITY,
};
use crate::raster::{self, Grid};
use crate::{c64, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomologyError {
    #[error("admissible set is not connected")]
    DisconnectedSet,
    #[error("routing failed: {0}")]
    RoutingFailure(String),
    #[error("raster too coarse: cell {h:e} against neighbourhood width {eps:e}")]
    ResolutionTooCoarse { eps: f64, h: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How an arc of `E` meets the islands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcCase {
    /// At most one end on an island.
    Dangling,
    /// Both ends on the same island.
    Loop,
    /// Ends on different islands.
    Bridge,
    /// A closed curve with no islands at all.
    FreeCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeColoring {
    pub black: Vec<usize>,
    pub red: Vec<usize>,
    pub cases: Vec<ArcCase>,
}

pub fn arc_case(set: &AdmissibleSet, k: usize) -> ArcCase {
    let a = &set.arcs[k];
    if a.curve.is_closed() {
        return ArcCase::FreeCycle;
    }
    let isl = a.attached_islands();
    match isl.as_slice() {
        [x, y] if x == y => ArcCase::Loop,
        [_, _] => ArcCase::Bridge,
        _ => ArcCase::Dangling,
    }
}

/// Black bridges form the lexicographically first spanning tree of the
/// island–bridge multigraph (Kruskal in arc order); the other bridges are red.
pub fn classify_bridges(set: &AdmissibleSet) -> Result<BridgeColoring, HomologyError> {
    if !set.connected {
        return Err(HomologyError::DisconnectedSet);
    }
    let cases: Vec<ArcCase> = (0..set.arcs.len()).map(|k| arc_case(set, k)).collect();
    let m = set.islands.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let (mut black, mut red) = (Vec::new(), Vec::new());
    for (k, case) in cases.iter().enumerate() {
        if *case != ArcCase::Bridge {
            continue;
        }
        let ends = set.arcs[k].attached_islands();
        let (x, y) = (find(&mut parent, ends[0]), find(&mut parent, ends[1]));
        if x != y {
            parent[x] = y;
            black.push(k);
        } else {
            red.push(k);
        }
    }
    let roots: BTreeSet<usize> = (0..m).map(|i| find(&mut parent, i)).collect();
    if roots.len() > 1 {
        return Err(HomologyError::DisconnectedSet);
    }
    Ok(BridgeColoring { black, red, cases })
}

/// Where a basis cycle comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleKind {
    Hole { island: usize, hole: usize },
    Loop { arc: usize },
    RedBridge { arc: usize },
    Free { arc: usize },
}

/// Raster configuration for the Runge certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RungeConfig {
    /// Cells across the larger extent of the set.
    pub cells: usize,
    /// Neighbourhood radius; `None` uses half the feature size.
    pub eps: Option<f64>,
}

impl Default for RungeConfig {
    fn default() -> Self {
        Self { cells: 400, eps: None }
    }
}

impl RungeConfig {
    pub fn eps_for(&self, set: &AdmissibleSet) -> f64 {
        self.eps.unwrap_or_else(|| {
            let f = set.feature_size;
            if f.is_finite() {
                0.5 * f
            } else {
                let (lo, hi) = set.bounding_box();
                0.05 * (hi - lo).norm()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologyBasis {
    pub cycles: Vec<PiecewiseCurve>,
    pub kinds: Vec<CycleKind>,
    #[serde(with = "crate::complex_serde")]
    pub base_point: C64,
    /// Per cycle, a sub-arc disjoint from every other cycle.
    pub private_arcs: Vec<PiecewiseCurve>,
    /// Arclength fractions of the private arcs on their cycles.
    pub private_ranges: Vec<(f64, f64)>,
    pub runge_certified: bool,
    /// Smallest distance between a private arc and the other cycles.
    pub private_clearance: f64,
    /// Connector arcs `A_{i,j}` from vertices to boundary anchors.
    pub connectors: Vec<Vec<PiecewiseCurve>>,
}

impl HomologyBasis {
    pub fn rank(&self) -> usize {
        self.cycles.len()
    }

    /// Union of all cycles as polylines.
    pub fn polylines(&self) -> Vec<Polyline> {
        self.cycles.iter().map(|c| Polyline::from_curve(c, POLY_DENSITY)).collect()
    }

    /// Samples every cycle with at least `n` points.
    pub fn samples(&self, n: usize) -> Vec<crate::geometry::CurveSamples> {
        self.cycles.iter().map(|c| sample_curve_at_least(c, n)).collect()
    }

    pub fn to_json(&self, n: usize) -> BasisJson {
        let samples = self.samples(n);
        let cycles = samples.iter().map(|s| s.points.iter().map(|z| [z.re, z.im]).collect()).collect();
        let private_arcs = samples
            .iter()
            .zip(&self.private_ranges)
            .map(|(s, &(a, b))| {
                let first = s.params.iter().position(|&p| p >= a).unwrap_or(0);
                let last = s.params.iter().rposition(|&p| p <= b).unwrap_or(s.params.len() - 1);
                [first, last]
            })
            .collect();
        BasisJson {
            cycles,
            base_point: [self.base_point.re, self.base_point.im],
            private_arcs,
            runge_certified: self.runge_certified,
        }
    }
}

/// Export shape of a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisJson {
    pub cycles: Vec<Vec<[f64; 2]>>,
    pub base_point: [f64; 2],
    /// Inclusive sample-index ranges of the private arcs.
    pub private_arcs: Vec<[usize; 2]>,
    pub runge_certified: bool,
}

/// Largest gap tolerated when joining legs that meet at attachment points.
const JOIN_GAP: f64 = 1e-5;

struct Builder<'a> {
    set: &'a AdmissibleSet,
    connectors: Vec<Vec<PiecewiseCurve>>,
    coloring: BridgeColoring,
}

impl<'a> Builder<'a> {
    fn new(set: &'a AdmissibleSet) -> Result<Self, HomologyError> {
        let coloring = classify_bridges(set)?;
        let connectors = set
            .islands
            .iter()
            .map(build_connectors)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            set,
            connectors,
            coloring,
        })
    }

    fn island(&self, i: usize) -> &Island {
        &self.set.islands[i]
    }

    /// Boundary arc of component `j` of island `i` from `s0` to `s1` that
    /// avoids the anchor `b`.
    fn gamma(&self, i: usize, j: usize, s0: f64, s1: f64) -> Result<Option<PiecewiseCurve>, HomologyError> {
        let isl = self.island(i);
        let c = isl.boundary(j);
        let b = isl.anchors[j].1;
        let d = (s1 - s0).rem_euclid(1.0);
        if d.min(1.0 - d) < 1e-12 {
            return Ok(None);
        }
        let forward_has_b = (b - s0).rem_euclid(1.0) < d;
        let arc = if !forward_has_b {
            c.sub_curve(s0, s1)?
        } else {
            c.sub_curve(s1, s0)?.reversed()
        };
        Ok(Some(arc))
    }

    /// Legs from the boundary point at `s` of component `j` to the vertex.
    fn to_vertex(&self, i: usize, j: usize, s: f64) -> Result<Vec<PiecewiseCurve>, HomologyError> {
        let a = self.island(i).anchors[j].0;
        let mut legs = Vec::new();
        if let Some(g) = self.gamma(i, j, s, a)? {
            legs.push(g);
        }
        legs.push(self.connectors[i][j].reversed());
        Ok(legs)
    }

    fn from_vertex(&self, i: usize, j: usize, s: f64) -> Result<Vec<PiecewiseCurve>, HomologyError> {
        let legs = self.to_vertex(i, j, s)?;
        Ok(legs.iter().rev().map(PiecewiseCurve::reversed).collect())
    }

    /// Arc `k` traversed from the end on island `from` (its own direction when
    /// `forward`), wrapped by the connections to both vertices.
    fn through_arc(&self, k: usize, forward: bool) -> Result<Vec<PiecewiseCurve>, HomologyError> {
        let arc = &self.set.arcs[k];
        let (e0, e1) = if forward { (arc.ends[0], arc.ends[1]) } else { (arc.ends[1], arc.ends[0]) };
        let mut legs = Vec::new();
        if let End::Attached { island, boundary, s } = e0 {
            legs.extend(self.from_vertex(island, boundary, s)?);
        }
        legs.push(if forward { arc.curve.clone() } else { arc.curve.reversed() });
        if let End::Attached { island, boundary, s } = e1 {
            legs.extend(self.to_vertex(island, boundary, s)?);
        }
        Ok(legs)
    }

    /// Path between vertices along black bridges only.
    fn tree_path(&self, from: usize, to: usize) -> Result<Vec<PiecewiseCurve>, HomologyError> {
        if from == to {
            return Ok(vec![]);
        }
        let m = self.set.islands.len();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; m];
        let mut seen = vec![false; m];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &k in &self.coloring.black {
                let ends = self.set.arcs[k].attached_islands();
                let y = if ends[0] == x {
                    ends[1]
                } else if ends[1] == x {
                    ends[0]
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, k));
                    queue.push_back(y);
                }
            }
        }
        let mut hops = Vec::new();
        let mut y = to;
        while y != from {
            let (x, k) = prev[y].ok_or(HomologyError::DisconnectedSet)?;
            hops.push((x, k));
            y = x;
        }
        hops.reverse();
        let mut legs = Vec::new();
        for (x, k) in hops {
            let forward = self.set.arcs[k].ends[0].island() == Some(x);
            legs.extend(self.through_arc(k, forward)?);
        }
        Ok(legs)
    }
}

/// Straight connector from the vertex to each boundary anchor when it stays
/// clear, otherwise a raster shortest path.
fn build_connectors(isl: &Island) -> Result<Vec<PiecewiseCurve>, HomologyError> {
    let q = isl.vertex;
    let mut placed: Vec<PiecewiseCurve> = Vec::new();
    let (lo, hi) = bbox(&isl.boundary_poly(0).points);
    let extent = (hi.re - lo.re).max(hi.im - lo.im);
    let h = extent / 240.0;
    for j in 0..isl.n_boundaries() {
        let (a, _) = isl.anchor_points(j);
        let seg = PiecewiseCurve::segment(q, a)?;
        let curve = if straight_ok(isl, j, q, a, &placed, 3.0 * h) {
            seg
        } else {
            route_inside(isl, j, q, a, &placed, h)?
        };
        placed.push(curve);
    }
    Ok(placed)
}

fn bbox(pts: &[C64]) -> (C64, C64) {
    pts.iter().fold(
        (c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), z| (c64(lo.re.min(z.re), lo.im.min(z.im)), c64(hi.re.max(z.re), hi.im.max(z.im))),
    )
}

fn straight_ok(isl: &Island, j: usize, q: C64, a: C64, placed: &[PiecewiseCurve], clearance: f64) -> bool {
    let m = 200;
    let len = (a - q).norm();
    for k in 1..m {
        let z = q + (a - q) * (k as f64 / m as f64);
        if !isl.contains(z) {
            return false;
        }
        // Stay off all other boundary components.
        for jj in 0..isl.n_boundaries() {
            if jj != j && isl.boundary_poly(jj).distance(z) < clearance {
                return false;
            }
        }
        if isl.boundary_poly(j).distance(z) < clearance.min(0.5 * len) * (1.0 - k as f64 / m as f64) {
            return false;
        }
        let near_q = (z - q).norm() < 2.0 * clearance;
        if !near_q {
            for p in placed {
                if Polyline::from_curve(p, 32).distance(z) < clearance {
                    return false;
                }
            }
        }
    }
    true
}

fn route_inside(
    isl: &Island,
    j: usize,
    q: C64,
    a: C64,
    placed: &[PiecewiseCurve],
    h: f64,
) -> Result<PiecewiseCurve, HomologyError> {
    let (lo, hi) = bbox(&isl.boundary_poly(0).points);
    let grid = Grid::covering(lo, hi, 4.0 * h, h);
    let mut inside = vec![false; grid.len()];
    raster::fill_island(&grid, isl, &mut inside);
    let mut walls = vec![false; grid.len()];
    for jj in 0..isl.n_boundaries() {
        raster::rasterize_polyline(&grid, isl.boundary_poly(jj), &mut walls);
    }
    let wall_dist = raster::distance_transform(&grid, &walls);
    let mut prior = vec![false; grid.len()];
    for p in placed {
        raster::rasterize_polyline(&grid, &Polyline::from_curve(p, 64), &mut prior);
    }
    let prior_dist = raster::distance_transform(&grid, &prior);
    // Inward target three cells off the boundary.
    let c = isl.boundary(j);
    let (s, _) = c.project(a);
    let t = c.tangent_at(s);
    let mut normal = c64(-t.im, t.re) / t.norm();
    if !isl.contains(a + normal * (3.0 * h)) {
        normal = -normal;
    }
    let target = a + normal * (3.0 * h);
    let passable: Vec<bool> = (0..grid.len())
        .map(|k| {
            let z = grid.center_of(k);
            inside[k]
                && wall_dist[k] >= 2.0 * h
                && (prior_dist[k] >= 3.0 * h || (z - q).norm() <= 4.0 * h)
        })
        .collect();
    let path = raster::shortest_path(&grid, &passable, q, target)
        .ok_or_else(|| HomologyError::RoutingFailure(format!("no interior path to boundary component {j}")))?;
    let mut pts = raster::simplify_path(&path, 0.5 * h);
    pts.push(a);
    Ok(PiecewiseCurve::polyline(&pts, false)?)
}

/// Lemma-style construction: hole cycles, loop-arc cycles and red-bridge
/// cycles, each rerouted through the first vertex, then certified.
pub fn build_homology_basis(set: &AdmissibleSet) -> Result<HomologyBasis, HomologyError> {
    build_homology_basis_with(set, &RungeConfig::default())
}

pub fn build_homology_basis_with(set: &AdmissibleSet, runge: &RungeConfig) -> Result<HomologyBasis, HomologyError> {
    if !set.connected {
        return Err(HomologyError::DisconnectedSet);
    }
    if set.islands.is_empty() {
        return free_basis(set, runge);
    }
    let b = Builder::new(set)?;
    let mut raw: Vec<(Vec<PiecewiseCurve>, PiecewiseCurve, CycleKind, usize)> = Vec::new();

    for (i, isl) in set.islands.iter().enumerate() {
        for h in 0..isl.holes.len() {
            let j = h + 1;
            let comp = isl.boundary(j);
            let (a, bb) = isl.anchors[j];
            // Hole boundaries are stored clockwise; walk them counterclockwise.
            let ccw = comp.loop_from(a)?.reversed();
            let legs = vec![b.connectors[i][j].clone(), ccw, b.connectors[i][j].reversed()];
            let (g0, g1) = gap_around(set, i, j, bb);
            let third = (g1 - g0) / 3.0;
            let private = comp.sub_curve((g0 + third).rem_euclid(1.0), (g1 - third).rem_euclid(1.0))?;
            raw.push((legs, private, CycleKind::Hole { island: i, hole: h }, i));
        }
    }
    for k in 0..set.arcs.len() {
        let kind = match b.coloring.cases[k] {
            ArcCase::Loop => CycleKind::Loop { arc: k },
            ArcCase::Bridge if b.coloring.red.contains(&k) => CycleKind::RedBridge { arc: k },
            _ => continue,
        };
        let arc = &set.arcs[k];
        let start = arc.ends[0].island().unwrap();
        let end = arc.ends[1].island().unwrap();
        let mut legs = b.through_arc(k, true)?;
        legs.extend(b.tree_path(end, start)?);
        let private = arc.curve.sub_curve(0.25, 0.75)?;
        raw.push((legs, private, kind, start));
    }

    let base = 0usize;
    let mut cycles = Vec::new();
    let mut kinds = Vec::new();
    let mut privates = Vec::new();
    for (legs, private, kind, home) in raw {
        let lead = b.tree_path(base, home)?;
        let back: Vec<PiecewiseCurve> = lead.iter().rev().map(PiecewiseCurve::reversed).collect();
        let all: Vec<PiecewiseCurve> = lead.into_iter().chain(legs).chain(back).collect();
        let cycle = PiecewiseCurve::join(&all, JOIN_GAP)?;
        if !cycle.is_closed() {
            return Err(HomologyError::RoutingFailure(format!("cycle for {kind:?} does not close")));
        }
        cycles.push(cycle);
        kinds.push(kind);
        privates.push(private);
    }
    finish(set, cycles, kinds, privates, set.islands[base].vertex, b.connectors, runge)
}

/// Interval `(g0, g1)` of arclength fractions around `b` free of anchors and
/// attachments on component `j` of island `i`.
fn gap_around(set: &AdmissibleSet, i: usize, j: usize, b: f64) -> (f64, f64) {
    let isl = &set.islands[i];
    let mut marks = vec![isl.anchors[j].0];
    for arc in &set.arcs {
        for e in &arc.ends {
            if let End::Attached { island, boundary, s } = *e {
                if island == i && boundary == j {
                    marks.push(s);
                }
            }
        }
    }
    let before = marks
        .iter()
        .map(|&m| (b - m).rem_euclid(1.0))
        .fold(f64::INFINITY, f64::min);
    let after = marks
        .iter()
        .map(|&m| (m - b).rem_euclid(1.0))
        .fold(f64::INFINITY, f64::min);
    let before = if before == 0.0 { 1.0 } else { before };
    let after = if after == 0.0 { 1.0 } else { after };
    (b - before, b + after)
}

fn free_basis(set: &AdmissibleSet, runge: &RungeConfig) -> Result<HomologyBasis, HomologyError> {
    let mut cycles = Vec::new();
    let mut kinds = Vec::new();
    let mut privates = Vec::new();
    for (k, a) in set.arcs.iter().enumerate() {
        if a.curve.is_closed() {
            cycles.push(a.curve.clone());
            kinds.push(CycleKind::Free { arc: k });
            privates.push(a.curve.sub_curve(0.25, 0.75)?);
        }
    }
    let base = set.arcs.first().map(|a| a.curve.start()).unwrap_or_default();
    finish(set, cycles, kinds, privates, base, vec![], runge)
}

fn finish(
    set: &AdmissibleSet,
    cycles: Vec<PiecewiseCurve>,
    kinds: Vec<CycleKind>,
    private_arcs: Vec<PiecewiseCurve>,
    base_point: C64,
    connectors: Vec<Vec<PiecewiseCurve>>,
    runge: &RungeConfig,
) -> Result<HomologyBasis, HomologyError> {
    let polys: Vec<Polyline> = cycles.iter().map(|c| Polyline::from_curve(c, POLY_DENSITY)).collect();
    let mut clearance = f64::INFINITY;
    let mut private_ranges = Vec::new();
    for (i, p) in private_arcs.iter().enumerate() {
        let pp = Polyline::from_curve(p, POLY_DENSITY);
        for (j, other) in polys.iter().enumerate() {
            if j != i {
                clearance = clearance.min(pp.min_distance_to(other));
            }
        }
        let (s0, _) = cycles[i].project(p.start());
        let (s1, _) = cycles[i].project(p.end());
        private_ranges.push(if s0 <= s1 { (s0, s1) } else { (s1, s0) });
    }
    let (lo, hi) = set.bounding_box();
    let h = (hi.re - lo.re).max(hi.im - lo.im) / runge.cells as f64;
    if cycles.len() > 1 && clearance <= 3.0 * h {
        return Err(HomologyError::RoutingFailure(format!(
            "private arcs come within {clearance:e} of other cycles"
        )));
    }
    let runge_certified = runge_check(set, &polys, runge)?;
    Ok(HomologyBasis {
        cycles,
        kinds,
        base_point,
        private_arcs,
        private_ranges,
        runge_certified,
        private_clearance: clearance,
        connectors,
    })
}

/// Trapped cells closer than this many cells to `C` are ignored.
pub const SLIVER_CELLS: f64 = 3.0;

/// Rasterised Runge test: every cell of `S_ε \ C` must be reachable from
/// cells bordering the outside of `S_ε`.
pub fn runge_check(set: &AdmissibleSet, curves: &[Polyline], cfg: &RungeConfig) -> Result<bool, HomologyError> {
    let eps = cfg.eps_for(set);
    let (lo, hi) = set.bounding_box();
    let extent = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
    let h = extent / cfg.cells as f64;
    if eps < 2.0 * h {
        return Err(HomologyError::ResolutionTooCoarse { eps, h });
    }
    let grid = Grid::covering(lo, hi, eps + 4.0 * h, h);
    let s_mask = raster::set_mask(&grid, set);
    let s_dist = raster::distance_transform(&grid, &s_mask);
    let nbhd: Vec<bool> = s_dist.iter().map(|&d| d < eps).collect();
    let mut c_mask = vec![false; grid.len()];
    for p in curves {
        raster::rasterize_polyline(&grid, p, &mut c_mask);
    }
    let c_dist = raster::distance_transform(&grid, &c_mask);
    let free: Vec<bool> = (0..grid.len()).map(|k| nbhd[k] && c_dist[k] > 1.0001 * h).collect();
    let seeds: Vec<usize> = (0..grid.len())
        .filter(|&k| free[k] && (grid.on_border(k) || grid.neighbors4(k).any(|n| !nbhd[n])))
        .collect();
    let reached = raster::flood_fill(&grid, &free, seeds);
    // Slivers at acute junctions of C are raster artefacts.
    Ok((0..grid.len()).all(|k| !free[k] || reached[k] || c_dist[k] < SLIVER_CELLS * h))
}

/// Family of arcs and closed curves split at the interpolation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub members: Vec<PiecewiseCurve>,
    #[serde(with = "crate::complex_serde::vec")]
    pub interp_points: Vec<C64>,
    pub connected: bool,
    pub runge_certified: bool,
    #[serde(with = "crate::complex_serde")]
    pub base_point: C64,
}

impl CurveFamily {
    pub fn samples(&self, n: usize) -> Vec<crate::geometry::CurveSamples> {
        self.members.iter().map(|c| sample_curve_at_least(c, n)).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Tolerance for a point of `A` to count as lying on a curve.
pub const ON_CURVE_TOL: f64 = 1e-7;

/// Arclength fractions where `curve` passes within `tol` of `z`.
pub fn curve_hits(curve: &PiecewiseCurve, z: C64, tol: f64) -> Vec<f64> {
    let mut hits: Vec<f64> = Vec::new();
    for (i, p) in curve.pieces().iter().enumerate() {
        let m = 64;
        let d: Vec<f64> = (0..=m).map(|k| (p.eval(k as f64 / m as f64) - z).norm()).collect();
        for k in 0..=m {
            let left = if k > 0 { d[k - 1] } else { f64::INFINITY };
            let right = if k < m { d[k + 1] } else { f64::INFINITY };
            if d[k] <= left && d[k] <= right {
                let u = refine_min(p, z, (k.saturating_sub(1)) as f64 / m as f64, ((k + 1).min(m)) as f64 / m as f64);
                if (p.eval(u) - z).norm() <= tol {
                    let s = curve.param_of(i, u);
                    if !hits.iter().any(|h| (h - s).abs() < 1e-9) {
                        hits.push(s);
                    }
                }
            }
        }
    }
    hits.sort_by(f64::total_cmp);
    hits
}

fn refine_min(p: &Piece, z: C64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |u: f64| (p.eval(u) - z).norm();
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Splits basis cycles at the enlarged interpolation set, routes unused arcs
/// to vertices and joins leftover points by arcs to their vertices.
pub fn curve_family_with_interpolation(
    set: &AdmissibleSet,
    basis: &HomologyBasis,
    points: &[C64],
) -> Result<CurveFamily, HomologyError> {
    for &p in points {
        if set.distance(p) > 1e-9 {
            return Err(HomologyError::RoutingFailure(format!("interpolation point {p} is not in S")));
        }
    }
    let mut interp: Vec<C64> = Vec::new();
    let add = |z: C64, v: &mut Vec<C64>| {
        if !v.iter().any(|w| (w - z).norm() < ON_CURVE_TOL) {
            v.push(z);
        }
    };
    for &p in points {
        add(p, &mut interp);
    }
    for (k, a) in set.arcs.iter().enumerate() {
        if !a.curve.is_closed() {
            for e in 0..2 {
                let z = set.attachment_point(k, e).unwrap_or(if e == 0 { a.curve.start() } else { a.curve.end() });
                add(z, &mut interp);
            }
        }
    }
    for isl in &set.islands {
        add(isl.vertex, &mut interp);
        for j in 0..isl.n_boundaries() {
            add(isl.anchor_points(j).0, &mut interp);
        }
    }

    // Nothing beyond the base point to connect.
    let only_base = interp.len() == 1 && basis.cycles.is_empty();
    if only_base && set.arcs.is_empty() {
        return Ok(CurveFamily {
            members: vec![],
            interp_points: interp,
            connected: true,
            runge_certified: true,
            base_point: basis.base_point,
        });
    }

    let mut members: Vec<PiecewiseCurve> = Vec::new();
    let push_split = |curve: &PiecewiseCurve, members: &mut Vec<PiecewiseCurve>, interp: &[C64]| -> Result<(), HomologyError> {
        let mut cuts: Vec<f64> = Vec::new();
        for &z in interp {
            for s in curve_hits(curve, z, ON_CURVE_TOL) {
                cuts.push(s);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let closed = curve.is_closed();
        let interior: Vec<f64> = cuts.iter().copied().filter(|&s| s > 1e-9 && s < 1.0 - 1e-9).collect();
        let pieces: Vec<PiecewiseCurve> = if closed && interior.is_empty() {
            vec![curve.clone()]
        } else {
            let mut bounds = vec![0.0];
            bounds.extend(interior);
            bounds.push(1.0);
            bounds
                .windows(2)
                .map(|w| curve.sub_curve(w[0], w[1]))
                .collect::<Result<Vec<_>, _>>()?
        };
        for p in pieces {
            if !members.iter().any(|m| same_route(m, &p)) {
                members.push(p);
            }
        }
        Ok(())
    };

    for c in &basis.cycles {
        push_split(c, &mut members, &interp)?;
    }
    // Arcs not yet covered: connect their attached ends to the vertices.
    if !set.islands.is_empty() {
        let b = Builder::new(set)?;
        for arc in &set.arcs {
            let covered = members.iter().any(|m| {
                let mid = arc.curve.point_at(0.5);
                Polyline::from_curve(m, 64).distance(mid) < 1e-6
            });
            if covered {
                continue;
            }
            let mut legs = Vec::new();
            if let End::Attached { island, boundary, s } = arc.ends[0] {
                legs.extend(b.from_vertex(island, boundary, s)?);
            }
            legs.push(arc.curve.clone());
            if let End::Attached { island, boundary, s } = arc.ends[1] {
                legs.extend(b.to_vertex(island, boundary, s)?);
            }
            let joined = PiecewiseCurve::join(&legs, JOIN_GAP)?;
            push_split(&joined, &mut members, &interp)?;
        }
        // Leftover points join their vertex.
        let on_member = |z: C64, members: &[PiecewiseCurve]| {
            members.iter().any(|m| !curve_hits(m, z, ON_CURVE_TOL).is_empty())
        };
        for &z in &interp {
            if on_member(z, &members) {
                continue;
            }
            let i = set
                .islands
                .iter()
                .position(|isl| isl.contains(z) || isl.boundary_distance(z) < 1e-9)
                .ok_or_else(|| HomologyError::RoutingFailure(format!("point {z} lies on no island")))?;
            let isl = &set.islands[i];
            if (z - isl.vertex).norm() < ON_CURVE_TOL {
                continue;
            }
            let lam = lambda_arc(isl, z, &members)?;
            members.push(lam);
        }
    }

    let connected = members_connected(&members);
    let polys: Vec<Polyline> = members.iter().map(|m| Polyline::from_curve(m, POLY_DENSITY)).collect();
    let runge_certified = runge_check(set, &polys, &RungeConfig::default())?;
    Ok(CurveFamily {
        members,
        interp_points: interp,
        connected,
        runge_certified,
        base_point: basis.base_point,
    })
}

/// Two curves trace the same route, possibly in opposite directions.
fn same_route(a: &PiecewiseCurve, b: &PiecewiseCurve) -> bool {
    if (a.length() - b.length()).abs() > 1e-9 * (1.0 + a.length()) {
        return false;
    }
    let fwd = (0..=8).all(|k| {
        let s = k as f64 / 8.0;
        (a.point_at(s) - b.point_at(s)).norm() < 1e-7
    });
    let bwd = (0..=8).all(|k| {
        let s = k as f64 / 8.0;
        (a.point_at(s) - b.point_at(1.0 - s)).norm() < 1e-7
    });
    fwd || bwd
}

fn members_connected(members: &[PiecewiseCurve]) -> bool {
    if members.is_empty() {
        return true;
    }
    let polys: Vec<Polyline> = members.iter().map(|m| Polyline::from_curve(m, 64)).collect();
    let n = members.len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if !seen[j] {
                let touch = [members[j].start(), members[j].end()].iter().any(|&z| polys[i].distance(z) < 1e-7)
                    || [members[i].start(), members[i].end()].iter().any(|&z| polys[j].distance(z) < 1e-7);
                if touch {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Arc from a point of `A` to the island vertex avoiding family members.
fn lambda_arc(isl: &Island, z: C64, members: &[PiecewiseCurve]) -> Result<PiecewiseCurve, HomologyError> {
    let q = isl.vertex;
    let polys: Vec<Polyline> = members.iter().map(|m| Polyline::from_curve(m, 64)).collect();
    let clear_seg = |a: C64, b: C64| {
        (1..200).all(|k| {
            let p = a + (b - a) * (k as f64 / 200.0);
            let near_q = (p - q).norm() < 1e-3;
            isl.contains(p) && (near_q || polys.iter().all(|pl| pl.distance(p) > 1e-3))
        })
    };
    if clear_seg(z, q) {
        return Ok(PiecewiseCurve::segment(z, q)?);
    }
    let (lo, hi) = bbox(&isl.boundary_poly(0).points);
    let h = (hi.re - lo.re).max(hi.im - lo.im) / 240.0;
    let grid = Grid::covering(lo, hi, 4.0 * h, h);
    let mut inside = vec![false; grid.len()];
    raster::fill_island(&grid, isl, &mut inside);
    let mut prior = vec![false; grid.len()];
    for p in &polys {
        raster::rasterize_polyline(&grid, p, &mut prior);
    }
    let prior_dist = raster::distance_transform(&grid, &prior);
    let passable: Vec<bool> = (0..grid.len())
        .map(|k| {
            let c = grid.center_of(k);
            inside[k] && (prior_dist[k] >= 2.0 * h || (c - q).norm() <= 4.0 * h || (c - z).norm() <= 2.0 * h)
        })
        .collect();
    let path = raster::shortest_path(&grid, &passable, z, q)
        .ok_or_else(|| HomologyError::RoutingFailure(format!("no arc from {z} to the vertex")))?;
    let pts = raster::simplify_path(&path, 0.5 * h);
    Ok(PiecewiseCurve::polyline(&pts, false)?)
}

#[cfg(test)]
mod tests;
