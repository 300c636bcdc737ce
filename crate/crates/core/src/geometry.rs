//! Planar admissible sets: islands with piecewise-smooth boundary, attached
//! arcs, sampled discretisations and regular neighbourhoods.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::gl16;
use crate::{c64, C64};

mod json;
pub use json::{AdmissibleSetJson, ArcEntryJson, CurveJson, EndJson, IslandJson, PieceJson};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curve has no pieces")]
    EmptyCurve,
    #[error("pieces {piece} and {next} do not share an endpoint (gap {gap:e})")]
    Gap { piece: usize, next: usize, gap: f64 },
    #[error("closed curve does not return to its start (gap {gap:e})")]
    NotClosed { gap: f64 },
    #[error("piece {piece} is not an immersion (speed {speed:e})")]
    NotImmersed { piece: usize, speed: f64 },
    #[error("under-sampled: {got} samples given, at least {needed} required")]
    UnderSampled { needed: usize, got: usize },
    #[error("disjointness violated: {0}")]
    DisjointnessViolation(String),
    #[error("arc {arc} end {end} meets the boundary at {angle_deg:.2}° (minimum {min_deg}°)")]
    TangencyViolation {
        arc: usize,
        end: usize,
        angle_deg: f64,
        min_deg: f64,
    },
    #[error("arc {arc} end {end} is {distance:e} away from island {island} boundary {boundary}")]
    DanglingAttachment {
        arc: usize,
        end: usize,
        island: usize,
        boundary: usize,
        distance: f64,
    },
    #[error("epsilon {eps} exceeds the feature size {feature_size}")]
    EpsilonTooLarge { eps: f64, feature_size: f64 },
    #[error("invalid island {island}: {reason}")]
    InvalidIsland { island: usize, reason: String },
    #[error("invalid admissible set: {0}")]
    Invalid(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// One smooth parametric piece `[0, 1] → ℂ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Line {
        #[serde(with = "crate::complex_serde")]
        a: C64,
        #[serde(with = "crate::complex_serde")]
        b: C64,
    },
    Arc {
        #[serde(with = "crate::complex_serde")]
        center: C64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
    /// Cubic Hermite segment from endpoint samples and tangents.
    Hermite {
        #[serde(with = "crate::complex_serde")]
        p0: C64,
        #[serde(with = "crate::complex_serde")]
        p1: C64,
        #[serde(with = "crate::complex_serde")]
        t0: C64,
        #[serde(with = "crate::complex_serde")]
        t1: C64,
    },
}

impl Piece {
    pub fn eval(&self, u: f64) -> C64 {
        match *self {
            Piece::Line { a, b } => a + (b - a) * u,
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + C64::from_polar(radius, start + sweep * u),
            Piece::Hermite { p0, p1, t0, t1 } => {
                let u2 = u * u;
                let u3 = u2 * u;
                p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
                    + t0 * (u3 - 2.0 * u2 + u)
                    + p1 * (-2.0 * u3 + 3.0 * u2)
                    + t1 * (u3 - u2)
            }
        }
    }

    pub fn deriv(&self, u: f64) -> C64 {
        match *self {
            Piece::Line { a, b } => b - a,
            Piece::Arc {
                radius,
                start,
                sweep,
                ..
            } => c64(0.0, sweep) * C64::from_polar(radius, start + sweep * u),
            Piece::Hermite { p0, p1, t0, t1 } => {
                let u2 = u * u;
                p0 * (6.0 * u2 - 6.0 * u)
                    + t0 * (3.0 * u2 - 4.0 * u + 1.0)
                    + p1 * (-6.0 * u2 + 6.0 * u)
                    + t1 * (3.0 * u2 - 2.0 * u)
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.eval(0.0)
    }

    pub fn end(&self) -> C64 {
        self.eval(1.0)
    }

    pub fn is_straight(&self) -> bool {
        matches!(self, Piece::Line { .. })
    }

    /// Arclength from `u = 0` to `u`.
    pub fn arclength_to(&self, u: f64) -> f64 {
        match *self {
            Piece::Line { a, b } => (b - a).norm() * u,
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs() * u,
            Piece::Hermite { .. } => {
                let (x, w) = gl16();
                let sub = 4;
                let h = u / sub as f64;
                let mut acc = 0.0;
                for k in 0..sub {
                    let a = k as f64 * h;
                    for (xi, wi) in x.iter().zip(w) {
                        acc += wi * h * self.deriv(a + xi * h).norm();
                    }
                }
                acc
            }
        }
    }

    pub fn length(&self) -> f64 {
        self.arclength_to(1.0)
    }

    /// Local parameter at which the arclength from the start equals `l`.
    pub fn u_at_arclength(&self, l: f64) -> f64 {
        let len = self.length();
        if len == 0.0 {
            return 0.0;
        }
        let target = l.clamp(0.0, len);
        match self {
            Piece::Line { .. } | Piece::Arc { .. } => target / len,
            Piece::Hermite { .. } => {
                let mut u = target / len;
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..60 {
                    let f = self.arclength_to(u) - target;
                    if f.abs() <= 1e-15 * len.max(1.0) {
                        break;
                    }
                    if f > 0.0 {
                        hi = u;
                    } else {
                        lo = u;
                    }
                    let speed = self.deriv(u).norm();
                    let next = u - f / speed;
                    u = if speed > 0.0 && next > lo && next < hi {
                        next
                    } else {
                        0.5 * (lo + hi)
                    };
                }
                u
            }
        }
    }

    pub fn reversed(&self) -> Piece {
        match *self {
            Piece::Line { a, b } => Piece::Line { a: b, b: a },
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => Piece::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
            Piece::Hermite { p0, p1, t0, t1 } => Piece::Hermite {
                p0: p1,
                p1: p0,
                t0: -t1,
                t1: -t0,
            },
        }
    }

    /// Restriction to `[u0, u1]`, reparameterised to `[0, 1]`.
    pub fn restrict(&self, u0: f64, u1: f64) -> Piece {
        match *self {
            Piece::Line { .. } => Piece::Line {
                a: self.eval(u0),
                b: self.eval(u1),
            },
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => Piece::Arc {
                center,
                radius,
                start: start + sweep * u0,
                sweep: sweep * (u1 - u0),
            },
            Piece::Hermite { .. } => Piece::Hermite {
                p0: self.eval(u0),
                p1: self.eval(u1),
                t0: self.deriv(u0) * (u1 - u0),
                t1: self.deriv(u1) * (u1 - u0),
            },
        }
    }

    fn min_speed(&self) -> f64 {
        (0..=16)
            .map(|k| self.deriv(k as f64 / 16.0).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Tolerance on shared endpoints between adjacent pieces.
pub const GAP_TOL: f64 = 1e-9;
/// Lower bound on `|dz/du|` for every piece.
pub const SPEED_FLOOR: f64 = 1e-10;

/// Ordered chain of smooth pieces, optionally closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseCurve {
    pieces: Vec<Piece>,
    closed: bool,
    lengths: Vec<f64>,
    min_speed: f64,
}

impl PiecewiseCurve {
    pub fn new(pieces: Vec<Piece>, closed: bool) -> Result<Self, GeometryError> {
        if pieces.is_empty() {
            return Err(GeometryError::EmptyCurve);
        }
        for (i, w) in pieces.windows(2).enumerate() {
            let gap = (w[0].end() - w[1].start()).norm();
            if gap > GAP_TOL {
                return Err(GeometryError::Gap {
                    piece: i,
                    next: i + 1,
                    gap,
                });
            }
        }
        if closed {
            let gap = (pieces[pieces.len() - 1].end() - pieces[0].start()).norm();
            if gap > GAP_TOL {
                return Err(GeometryError::NotClosed { gap });
            }
        }
        let mut min_speed = f64::INFINITY;
        for (i, p) in pieces.iter().enumerate() {
            let s = p.min_speed();
            if s < SPEED_FLOOR {
                return Err(GeometryError::NotImmersed { piece: i, speed: s });
            }
            min_speed = min_speed.min(s);
        }
        let lengths = pieces.iter().map(Piece::length).collect();
        Ok(Self {
            pieces,
            closed,
            lengths,
            min_speed,
        })
    }

    /// Positively oriented circle as a single arc piece starting at angle 0.
    pub fn circle(center: C64, radius: f64) -> Self {
        Self::circle_from(center, radius, 0.0)
    }

    pub fn circle_from(center: C64, radius: f64, start: f64) -> Self {
        Self::new(
            vec![Piece::Arc {
                center,
                radius,
                start,
                sweep: 2.0 * PI,
            }],
            true,
        )
        .expect("circle is a valid curve")
    }

    pub fn segment(a: C64, b: C64) -> Result<Self, GeometryError> {
        Self::new(vec![Piece::Line { a, b }], false)
    }

    /// Straight-line polyline through `points`.
    pub fn polyline(points: &[C64], closed: bool) -> Result<Self, GeometryError> {
        let mut pieces: Vec<Piece> = points
            .windows(2)
            .map(|w| Piece::Line { a: w[0], b: w[1] })
            .collect();
        if closed && points.len() > 1 && (points[0] - points[points.len() - 1]).norm() > GAP_TOL {
            pieces.push(Piece::Line {
                a: points[points.len() - 1],
                b: points[0],
            });
        }
        Self::new(pieces, closed)
    }

    /// C¹ cubic Hermite spline through `points` with centred-difference
    /// (Catmull–Rom) tangents. For closed curves the first point must not be
    /// repeated at the end.
    pub fn spline(points: &[C64], closed: bool) -> Result<Self, GeometryError> {
        let n = points.len();
        if n < 2 {
            return Err(GeometryError::EmptyCurve);
        }
        let tangent = |k: usize| -> C64 {
            if closed {
                (points[(k + 1) % n] - points[(k + n - 1) % n]) * 0.5
            } else if k == 0 {
                points[1] - points[0]
            } else if k == n - 1 {
                points[n - 1] - points[n - 2]
            } else {
                (points[k + 1] - points[k - 1]) * 0.5
            }
        };
        let segs = if closed { n } else { n - 1 };
        let pieces = (0..segs)
            .map(|k| {
                let j = (k + 1) % n;
                Piece::Hermite {
                    p0: points[k],
                    p1: points[j],
                    t0: tangent(k),
                    t1: tangent(j),
                }
            })
            .collect();
        Self::new(pieces, closed)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn piece_lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn min_speed(&self) -> f64 {
        self.min_speed
    }

    pub fn length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn start(&self) -> C64 {
        self.pieces[0].start()
    }

    pub fn end(&self) -> C64 {
        self.pieces[self.pieces.len() - 1].end()
    }

    /// Piece index and local parameter of the point at arclength fraction `s`.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let total = self.length();
        let mut target = s.clamp(0.0, 1.0) * total;
        for (i, &l) in self.lengths.iter().enumerate() {
            if target <= l || i + 1 == self.lengths.len() {
                return (i, self.pieces[i].u_at_arclength(target));
            }
            target -= l;
        }
        unreachable!()
    }

    /// Arclength fraction of local position `(piece, u)`.
    pub fn param_of(&self, piece: usize, u: f64) -> f64 {
        let before: f64 = self.lengths[..piece].iter().sum();
        (before + self.pieces[piece].arclength_to(u)) / self.length()
    }

    pub fn point_at(&self, s: f64) -> C64 {
        let (i, u) = self.locate(s);
        self.pieces[i].eval(u)
    }

    /// `dz/ds` with respect to the global arclength fraction `s`.
    pub fn tangent_at(&self, s: f64) -> C64 {
        let (i, u) = self.locate(s);
        let d = self.pieces[i].deriv(u);
        d / d.norm() * self.length()
    }

    /// Twice the signed area is `Im ∮ z̄ dz`; positive for counterclockwise curves.
    pub fn signed_area(&self) -> f64 {
        let (x, w) = gl16();
        let mut acc = 0.0;
        for p in &self.pieces {
            for (xi, wi) in x.iter().zip(w) {
                acc += wi * (p.eval(*xi).conj() * p.deriv(*xi)).im;
            }
        }
        0.5 * acc
    }

    /// +1 for counterclockwise closed curves, −1 for clockwise, 0 when open.
    pub fn orientation(&self) -> i8 {
        if !self.closed {
            0
        } else if self.signed_area() >= 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn reversed(&self) -> Self {
        let pieces = self.pieces.iter().rev().map(Piece::reversed).collect();
        Self::new(pieces, self.closed).expect("reversal preserves validity")
    }

    /// Open sub-curve between arclength fractions `s0` and `s1`. For closed
    /// curves `s1 < s0` wraps through the start point.
    pub fn sub_curve(&self, s0: f64, s1: f64) -> Result<Self, GeometryError> {
        if self.closed && s1 < s0 {
            let mut a = self.sub_curve(s0, 1.0).ok();
            let b = self.sub_curve(0.0, s1).ok();
            return match (a.take(), b) {
                (Some(a), Some(b)) => Self::concat(&[a, b]),
                (Some(a), None) => Ok(a),
                (None, Some(b)) => Ok(b),
                (None, None) => Err(GeometryError::EmptyCurve),
            };
        }
        let (i0, u0) = self.locate(s0);
        let (i1, u1) = self.locate(s1);
        let mut pieces = Vec::new();
        for i in i0..=i1 {
            let a = if i == i0 { u0 } else { 0.0 };
            let b = if i == i1 { u1 } else { 1.0 };
            if b - a > 1e-12 {
                pieces.push(self.pieces[i].restrict(a, b));
            }
        }
        Self::new(pieces, false)
    }

    /// Joins open curves end to end.
    pub fn concat(parts: &[PiecewiseCurve]) -> Result<Self, GeometryError> {
        let pieces: Vec<Piece> = parts.iter().flat_map(|c| c.pieces.iter().cloned()).collect();
        let closed = !pieces.is_empty()
            && (pieces[0].start() - pieces[pieces.len() - 1].end()).norm() <= GAP_TOL
            && parts.iter().map(|c| c.length()).sum::<f64>() > 0.0;
        Self::new(pieces, closed)
    }

    /// Same as [`concat`](Self::concat) but keeps the result open.
    pub fn concat_open(parts: &[PiecewiseCurve]) -> Result<Self, GeometryError> {
        let pieces: Vec<Piece> = parts.iter().flat_map(|c| c.pieces.iter().cloned()).collect();
        Self::new(pieces, false)
    }

    /// The closed curve re-started at arclength fraction `s` (open result).
    pub fn loop_from(&self, s: f64) -> Result<Self, GeometryError> {
        let s = s.rem_euclid(1.0);
        if s < 1e-14 || s > 1.0 - 1e-14 {
            return Self::new(self.pieces.clone(), false);
        }
        Self::concat_open(&[self.sub_curve(s, 1.0)?, self.sub_curve(0.0, s)?])
    }

    /// Joins open legs end to end, skipping empty legs and bridging residual
    /// gaps up to `max_gap` with short segments.
    pub fn join(legs: &[PiecewiseCurve], max_gap: f64) -> Result<Self, GeometryError> {
        let mut pieces: Vec<Piece> = Vec::new();
        for (k, leg) in legs.iter().enumerate() {
            if let Some(last) = pieces.last() {
                let gap = (last.end() - leg.start()).norm();
                if gap > max_gap {
                    return Err(GeometryError::Gap { piece: k - 1, next: k, gap });
                }
                if gap > GAP_TOL {
                    pieces.push(Piece::Line { a: last.end(), b: leg.start() });
                }
            }
            pieces.extend(leg.pieces.iter().cloned());
        }
        let closed = !pieces.is_empty() && (pieces[0].start() - pieces[pieces.len() - 1].end()).norm() <= GAP_TOL;
        Self::new(pieces, closed)
    }

    /// Fewest samples [`sample_curve`] accepts for this curve.
    pub fn min_samples(&self) -> usize {
        let intervals: usize = self
            .pieces
            .iter()
            .map(|p| if p.is_straight() { 1 } else { MIN_SAMPLES_PER_PIECE })
            .sum();
        if self.closed {
            intervals
        } else {
            intervals + 1
        }
    }

    /// Dense polygonal approximation used by geometric predicates.
    pub fn polyline_points(&self, per_curved_piece: usize) -> Vec<C64> {
        let mut pts = Vec::new();
        for p in &self.pieces {
            let m = if p.is_straight() { 1 } else { per_curved_piece.max(2) };
            for k in 0..m {
                pts.push(p.eval(k as f64 / m as f64));
            }
        }
        if !self.closed {
            pts.push(self.end());
        }
        pts
    }

    /// Closest point on the curve: `(s, distance)`.
    pub fn project(&self, z: C64) -> (f64, f64) {
        let total = self.length();
        let mut best = (0usize, 0.0f64, f64::INFINITY);
        for (i, p) in self.pieces.iter().enumerate() {
            let m = if p.is_straight() { 1 } else { 64 };
            for k in 0..=m {
                let u = k as f64 / m as f64;
                let d = (p.eval(u) - z).norm();
                if d < best.2 {
                    best = (i, u, d);
                }
            }
        }
        // Newton refinement on the squared distance along the piece.
        let (i, mut u, _) = best;
        let p = &self.pieces[i];
        for _ in 0..30 {
            let r = p.eval(u) - z;
            let d1 = p.deriv(u);
            let h = 1e-6;
            let d2 = (p.deriv((u + h).min(1.0)) - p.deriv((u - h).max(0.0))) / (2.0 * h);
            let g = (r.conj() * d1).re;
            let hess = d1.norm_sqr() + (r.conj() * d2).re;
            if hess <= 0.0 {
                break;
            }
            let next = (u - g / hess).clamp(0.0, 1.0);
            if (next - u).abs() < 1e-15 {
                u = next;
                break;
            }
            u = next;
        }
        let before: f64 = self.lengths[..i].iter().sum();
        let s = (before + p.arclength_to(u)) / total;
        (s, (p.eval(u) - z).norm())
    }
}

/// Polygon used for fast membership and distance queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    #[serde(with = "crate::complex_serde::vec")]
    pub points: Vec<C64>,
    pub closed: bool,
}

impl Polyline {
    pub fn from_curve(c: &PiecewiseCurve, density: usize) -> Self {
        Self {
            points: c.polyline_points(density),
            closed: c.is_closed(),
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let n = self.points.len();
        let m = if self.closed { n } else { n.saturating_sub(1) };
        (0..m).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn distance(&self, z: C64) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(z, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Even–odd rule; only meaningful for closed polylines.
    pub fn contains(&self, z: C64) -> bool {
        let mut inside = false;
        for (a, b) in self.segments() {
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if z.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn min_distance_to(&self, other: &Polyline) -> f64 {
        let mut best = f64::INFINITY;
        for (a, b) in self.segments() {
            for (c, d) in other.segments() {
                best = best.min(segment_distance(a, b, c, d));
            }
        }
        best
    }

    pub fn intersects(&self, other: &Polyline) -> bool {
        self.segments()
            .any(|(a, b)| other.segments().any(|(c, d)| segments_intersect(a, b, c, d)))
    }
}

pub fn point_segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sqr();
    if l2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / l2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

pub fn segments_intersect(a: C64, b: C64, c: C64, d: C64) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

pub fn segment_distance(a: C64, b: C64, c: C64, d: C64) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// One sample interval, described in the local parameter of its piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleInterval {
    pub piece: usize,
    pub u0: f64,
    pub u1: f64,
}

/// Discretisation carrier for quadrature and ODE stepping.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub points: Vec<C64>,
    /// Global arclength fraction of each sample.
    pub params: Vec<f64>,
    /// `dz/ds` at each sample.
    pub tangents: Vec<C64>,
    /// `z_{k+1} − z_k` per interval; closed curves include the wrap interval.
    pub dz: Vec<C64>,
    pub intervals: Vec<SampleInterval>,
    pub closed: bool,
    pub curve: Arc<PiecewiseCurve>,
}

/// Closure tolerance for `Σ dz` over closed curves.
pub const CLOSURE_TOL: f64 = 1e-12;

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn closure_defect(&self) -> f64 {
        self.dz.iter().sum::<C64>().norm()
    }

    /// Discrete (chord) arclength.
    pub fn chord_length(&self) -> f64 {
        self.dz.iter().map(|d| d.norm()).sum()
    }

    pub fn start(&self) -> C64 {
        self.points[0]
    }

    pub fn end(&self) -> C64 {
        if self.closed {
            self.points[0]
        } else {
            self.points[self.points.len() - 1]
        }
    }
}

/// Minimum intervals per curved piece.
pub const MIN_SAMPLES_PER_PIECE: usize = 8;

/// Samples a curve at `n` points, distributed across pieces proportionally to
/// arclength and uniformly in arclength within each piece. Straight pieces need
/// only one interval; curved pieces need at least
/// [`MIN_SAMPLES_PER_PIECE`].
pub fn sample_curve(curve: &PiecewiseCurve, n: usize) -> Result<CurveSamples, GeometryError> {
    sample_curve_arc(Arc::new(curve.clone()), n)
}

/// [`sample_curve`] with `n` raised to the curve's minimum when needed.
pub fn sample_curve_at_least(curve: &PiecewiseCurve, n: usize) -> CurveSamples {
    sample_curve(curve, n.max(curve.min_samples())).expect("sample count meets the minimum")
}

pub fn sample_curve_arc(curve: Arc<PiecewiseCurve>, n: usize) -> Result<CurveSamples, GeometryError> {
    let pieces = curve.pieces();
    let total_intervals = if curve.is_closed() { n } else { n.saturating_sub(1) };
    let mins: Vec<usize> = pieces
        .iter()
        .map(|p| if p.is_straight() { 1 } else { MIN_SAMPLES_PER_PIECE })
        .collect();
    let needed: usize = mins.iter().sum();
    if total_intervals < needed {
        let needed_points = if curve.is_closed() { needed } else { needed + 1 };
        return Err(GeometryError::UnderSampled {
            needed: needed_points,
            got: n,
        });
    }
    let counts = allocate(curve.piece_lengths(), &mins, total_intervals);

    let total_len = curve.length();
    let mut points = Vec::with_capacity(n);
    let mut params = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut intervals = Vec::with_capacity(total_intervals);
    let mut before = 0.0;
    for (i, (p, &m)) in pieces.iter().zip(&counts).enumerate() {
        let len = curve.piece_lengths()[i];
        let mut us = Vec::with_capacity(m + 1);
        for k in 0..=m {
            us.push(if k == m { 1.0 } else { p.u_at_arclength(len * k as f64 / m as f64) });
        }
        for k in 0..m {
            let u = us[k];
            points.push(p.eval(u));
            params.push((before + len * k as f64 / m as f64) / total_len);
            let d = p.deriv(u);
            tangents.push(d / d.norm() * total_len);
            intervals.push(SampleInterval {
                piece: i,
                u0: u,
                u1: us[k + 1],
            });
        }
        before += len;
    }
    if !curve.is_closed() {
        let last = &pieces[pieces.len() - 1];
        points.push(last.end());
        params.push(1.0);
        let d = last.deriv(1.0);
        tangents.push(d / d.norm() * total_len);
    }
    let np = points.len();
    let dz = (0..intervals.len())
        .map(|k| points[(k + 1) % np] - points[k])
        .collect();
    Ok(CurveSamples {
        points,
        params,
        tangents,
        dz,
        intervals,
        closed: curve.is_closed(),
        curve,
    })
}

/// Largest-remainder allocation of `total` units, respecting per-piece minima.
fn allocate(lengths: &[f64], mins: &[usize], total: usize) -> Vec<usize> {
    let mut counts = mins.to_vec();
    let spare = total - mins.iter().sum::<usize>();
    let len_sum: f64 = lengths.iter().sum();
    if spare == 0 || len_sum == 0.0 {
        return counts;
    }
    // Target counts proportional to length, then hand out what is left above
    // the minima by largest shortfall.
    let targets: Vec<f64> = lengths.iter().map(|l| l / len_sum * total as f64).collect();
    let mut remaining = spare;
    let mut extra: Vec<usize> = targets
        .iter()
        .zip(&counts)
        .map(|(t, &c)| (t.floor() as usize).saturating_sub(c))
        .collect();
    let mut assigned: usize = extra.iter().sum();
    while assigned > remaining {
        let i = (0..extra.len()).max_by_key(|&i| extra[i]).unwrap();
        extra[i] -= 1;
        assigned -= 1;
    }
    for (c, e) in counts.iter_mut().zip(&extra) {
        *c += e;
    }
    remaining -= assigned;
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let da = targets[a] - counts[a] as f64;
        let db = targets[b] - counts[b] as f64;
        db.partial_cmp(&da).unwrap().then(a.cmp(&b))
    });
    let mut k = 0;
    while remaining > 0 {
        counts[order[k % order.len()]] += 1;
        remaining -= 1;
        k += 1;
    }
    counts
}

/// Endpoint of an attached arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum End {
    Free,
    /// Attached to boundary component `boundary` (0 = outer, k = hole k − 1)
    /// of `island` at arclength fraction `s` of that component.
    Attached { island: usize, boundary: usize, s: f64 },
}

impl End {
    pub fn island(&self) -> Option<usize> {
        match self {
            End::Free => None,
            End::Attached { island, .. } => Some(*island),
        }
    }
}

/// A compact domain with piecewise-smooth boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub outer: PiecewiseCurve,
    pub holes: Vec<PiecewiseCurve>,
    #[serde(with = "crate::complex_serde")]
    pub vertex: C64,
    /// Per boundary component, the arclength fractions `(a, b)` of the anchor
    /// pair: connectors reach the component at `a`, and `b` is kept free of
    /// attachments.
    pub anchors: Vec<(f64, f64)>,
    outer_poly: Polyline,
    hole_polys: Vec<Polyline>,
}

/// Polygon density used for island and arc predicates.
pub const POLY_DENSITY: usize = 256;

impl Island {
    /// Validates the island. Boundary orientations are normalised: outer
    /// counterclockwise, holes clockwise.
    pub fn new(outer: PiecewiseCurve, holes: Vec<PiecewiseCurve>, vertex: C64) -> Result<Self, GeometryError> {
        let bad = |reason: String| GeometryError::InvalidIsland { island: usize::MAX, reason };
        if !outer.is_closed() || holes.iter().any(|h| !h.is_closed()) {
            return Err(bad("boundary components must be closed".into()));
        }
        let outer = if outer.orientation() < 0 { outer.reversed() } else { outer };
        let holes: Vec<PiecewiseCurve> = holes
            .into_iter()
            .map(|h| if h.orientation() > 0 { h.reversed() } else { h })
            .collect();
        let outer_poly = Polyline::from_curve(&outer, POLY_DENSITY);
        let hole_polys: Vec<Polyline> = holes.iter().map(|h| Polyline::from_curve(h, POLY_DENSITY)).collect();
        for (k, hp) in hole_polys.iter().enumerate() {
            if hp.intersects(&outer_poly) || !hp.points.iter().all(|&p| outer_poly.contains(p)) {
                return Err(bad(format!("hole {k} is not strictly inside the outer boundary")));
            }
            for (j, other) in hole_polys.iter().enumerate().skip(k + 1) {
                if hp.intersects(other) || other.contains(hp.points[0]) || hp.contains(other.points[0]) {
                    return Err(bad(format!("holes {k} and {j} overlap or are nested")));
                }
            }
        }
        let island = Self {
            anchors: vec![(0.0, 0.5); holes.len() + 1],
            outer,
            holes,
            vertex,
            outer_poly,
            hole_polys,
        };
        if !island.contains(vertex) || island.boundary_distance(vertex) < 1e-9 {
            return Err(bad("vertex is not an interior point".into()));
        }
        Ok(island)
    }

    pub fn disc(center: C64, radius: f64) -> Self {
        Self::new(PiecewiseCurve::circle(center, radius), vec![], center).expect("disc is valid")
    }

    /// Boundary component `j` (0 = outer).
    pub fn boundary(&self, j: usize) -> &PiecewiseCurve {
        if j == 0 {
            &self.outer
        } else {
            &self.holes[j - 1]
        }
    }

    pub fn boundary_poly(&self, j: usize) -> &Polyline {
        if j == 0 {
            &self.outer_poly
        } else {
            &self.hole_polys[j - 1]
        }
    }

    pub fn n_boundaries(&self) -> usize {
        1 + self.holes.len()
    }

    pub fn contains(&self, z: C64) -> bool {
        self.outer_poly.contains(z) && !self.hole_polys.iter().any(|h| h.contains(z))
    }

    pub fn boundary_distance(&self, z: C64) -> f64 {
        self.hole_polys
            .iter()
            .map(|h| h.distance(z))
            .fold(self.outer_poly.distance(z), f64::min)
    }

    /// Distance from `z` to the island (0 inside).
    pub fn distance(&self, z: C64) -> f64 {
        if self.contains(z) {
            0.0
        } else {
            self.boundary_distance(z)
        }
    }

    /// Anchor points `(a, b)` of boundary component `j`.
    pub fn anchor_points(&self, j: usize) -> (C64, C64) {
        let (a, b) = self.anchors[j];
        let c = self.boundary(j);
        (c.point_at(a), c.point_at(b))
    }
}

/// Arc component of `E` with its endpoint attachments. Closed free curves
/// carry no ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcComponent {
    pub curve: PiecewiseCurve,
    pub ends: Vec<End>,
    poly: Polyline,
}

impl ArcComponent {
    pub fn poly(&self) -> &Polyline {
        &self.poly
    }

    /// Islands touched, in end order.
    pub fn attached_islands(&self) -> Vec<usize> {
        self.ends.iter().filter_map(End::island).collect()
    }
}

/// Requested attachment of an arc end; the parameter on the boundary is
/// found by projection during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttachSpec {
    Free,
    Attached { island: usize, boundary: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum distance between an arc endpoint and its boundary.
    pub attach_tol: f64,
    /// Minimum angle between arc and boundary tangents at attachments.
    pub min_angle_deg: f64,
    /// Minimum spacing of `b` anchors from attachments, as arclength fraction.
    pub anchor_clearance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            attach_tol: 1e-6,
            min_angle_deg: 15.0,
            anchor_clearance: 0.02,
        }
    }
}

/// Validated admissible set `S = K ∪ E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSet {
    pub islands: Vec<Island>,
    pub arcs: Vec<ArcComponent>,
    pub connected: bool,
    pub tolerances: Tolerances,
    /// Half the minimum separation of non-incident components, capped by
    /// the inradius of bounded complementary regions.
    pub feature_size: f64,
}

impl AdmissibleSet {
    pub fn islands_only(islands: Vec<Island>) -> Result<Self, GeometryError> {
        build_admissible_set(islands, vec![], Tolerances::default())
    }

    pub fn from_json_str(src: &str, tol: Tolerances) -> Result<Self, GeometryError> {
        let doc: AdmissibleSetJson = serde_json::from_str(src).map_err(|e| GeometryError::Json(e.to_string()))?;
        doc.build(tol)
    }

    pub fn to_json(&self) -> AdmissibleSetJson {
        AdmissibleSetJson::from_set(self)
    }

    /// Euler characteristic from the cell structure.
    pub fn euler_characteristic(&self) -> i64 {
        let islands: i64 = self.islands.iter().map(|i| 1 - i.holes.len() as i64).sum();
        let arcs: i64 = self
            .arcs
            .iter()
            .map(|a| {
                if a.curve.is_closed() {
                    0
                } else {
                    let attached = a.ends.iter().filter(|e| e.island().is_some()).count();
                    1 - attached as i64
                }
            })
            .sum();
        islands + arcs
    }

    pub fn contains(&self, z: C64) -> bool {
        self.distance(z) == 0.0
    }

    /// Euclidean distance to `S` (polygonal approximation of curved boundaries).
    pub fn distance(&self, z: C64) -> f64 {
        let mut d = f64::INFINITY;
        for isl in &self.islands {
            d = d.min(isl.distance(z));
            if d == 0.0 {
                return 0.0;
            }
        }
        for a in &self.arcs {
            d = d.min(a.poly.distance(z));
        }
        d
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (C64, C64) {
        let mut lo = c64(f64::INFINITY, f64::INFINITY);
        let mut hi = c64(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut add = |p: &C64| {
            lo.re = lo.re.min(p.re);
            lo.im = lo.im.min(p.im);
            hi.re = hi.re.max(p.re);
            hi.im = hi.im.max(p.im);
        };
        for isl in &self.islands {
            isl.outer_poly.points.iter().for_each(&mut add);
        }
        for a in &self.arcs {
            a.poly.points.iter().for_each(&mut add);
        }
        (lo, hi)
    }

    /// All closed boundary components and arcs as polylines.
    pub fn polylines(&self) -> Vec<&Polyline> {
        let mut out = Vec::new();
        for isl in &self.islands {
            out.push(&isl.outer_poly);
            out.extend(isl.hole_polys.iter());
        }
        out.extend(self.arcs.iter().map(|a| &a.poly));
        out
    }

    /// Point of attachment of arc `k`, end `e`.
    pub fn attachment_point(&self, k: usize, e: usize) -> Option<C64> {
        match self.arcs[k].ends.get(e)? {
            End::Free => None,
            End::Attached { island, boundary, s } => Some(self.islands[*island].boundary(*boundary).point_at(*s)),
        }
    }
}

/// Validates islands and arcs and assembles an [`AdmissibleSet`].
pub fn build_admissible_set(
    islands: Vec<Island>,
    arcs: Vec<(PiecewiseCurve, Vec<AttachSpec>)>,
    tol: Tolerances,
) -> Result<AdmissibleSet, GeometryError> {
    let mut islands = islands;
    // Islands pairwise disjoint.
    for i in 0..islands.len() {
        for j in (i + 1)..islands.len() {
            let (a, b) = (&islands[i], &islands[j]);
            if a.outer_poly.intersects(&b.outer_poly) || a.contains(b.vertex) || b.contains(a.vertex)
                || a.outer_poly.contains(b.outer_poly.points[0]) && !a.hole_polys.iter().any(|h| h.contains(b.outer_poly.points[0]))
                || b.outer_poly.contains(a.outer_poly.points[0]) && !b.hole_polys.iter().any(|h| h.contains(a.outer_poly.points[0]))
            {
                return Err(GeometryError::DisjointnessViolation(format!("islands {i} and {j} intersect")));
            }
        }
    }

    let mut comps = Vec::with_capacity(arcs.len());
    for (k, (curve, specs)) in arcs.into_iter().enumerate() {
        let expected = if curve.is_closed() { 0 } else { 2 };
        if specs.len() != expected {
            return Err(GeometryError::Invalid(format!(
                "arc {k} has {} end specs, expected {expected}",
                specs.len()
            )));
        }
        let mut ends = Vec::new();
        for (e, spec) in specs.iter().enumerate() {
            match *spec {
                AttachSpec::Free => ends.push(End::Free),
                AttachSpec::Attached { island, boundary } => {
                    let isl = islands.get(island).ok_or_else(|| {
                        GeometryError::Invalid(format!("arc {k} attaches to missing island {island}"))
                    })?;
                    if boundary >= isl.n_boundaries() {
                        return Err(GeometryError::Invalid(format!(
                            "arc {k} attaches to missing boundary {boundary} of island {island}"
                        )));
                    }
                    let p = if e == 0 { curve.start() } else { curve.end() };
                    let bcurve = isl.boundary(boundary);
                    let (s, dist) = bcurve.project(p);
                    if dist > tol.attach_tol {
                        return Err(GeometryError::DanglingAttachment {
                            arc: k,
                            end: e,
                            island,
                            boundary,
                            distance: dist,
                        });
                    }
                    let at = if e == 0 { curve.tangent_at(0.0) } else { curve.tangent_at(1.0) };
                    let bt = bcurve.tangent_at(s);
                    let sin = ((at.conj() * bt).im / (at.norm() * bt.norm())).abs().min(1.0);
                    let angle = sin.asin().to_degrees();
                    if angle < tol.min_angle_deg {
                        return Err(GeometryError::TangencyViolation {
                            arc: k,
                            end: e,
                            angle_deg: angle,
                            min_deg: tol.min_angle_deg,
                        });
                    }
                    ends.push(End::Attached { island, boundary, s });
                }
            }
        }
        let poly = Polyline::from_curve(&curve, POLY_DENSITY);
        comps.push(ArcComponent { curve, ends, poly });
    }

    // Arcs meet islands only at attached endpoints; arcs pairwise disjoint.
    for (k, a) in comps.iter().enumerate() {
        let interior = trimmed_polyline(&a.curve, 0.01);
        for (i, isl) in islands.iter().enumerate() {
            let hits = (0..isl.n_boundaries()).any(|j| interior.intersects(isl.boundary_poly(j)))
                || interior.points.iter().any(|&p| isl.contains(p));
            if hits {
                return Err(GeometryError::DisjointnessViolation(format!("arc {k} crosses island {i}")));
            }
        }
        for (e, end) in a.ends.iter().enumerate() {
            if *end == End::Free {
                let p = if e == 0 { a.curve.start() } else { a.curve.end() };
                if islands.iter().any(|isl| isl.contains(p)) {
                    return Err(GeometryError::DisjointnessViolation(format!(
                        "free end {e} of arc {k} lies in an island"
                    )));
                }
            }
        }
        for (j, b) in comps.iter().enumerate().skip(k + 1) {
            let other = trimmed_polyline(&b.curve, 0.0);
            if interior.intersects(&other) || a.poly.min_distance_to(&b.poly) < 1e-9 {
                return Err(GeometryError::DisjointnessViolation(format!("arcs {k} and {j} intersect")));
            }
        }
    }

    // Connectivity by union–find over islands and arcs.
    let m = islands.len();
    let mut parent: Vec<usize> = (0..m + comps.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for (k, a) in comps.iter().enumerate() {
        for isl in a.attached_islands() {
            let (x, y) = (find(&mut parent, m + k), find(&mut parent, isl));
            parent[x] = y;
        }
    }
    let roots: std::collections::BTreeSet<usize> = (0..parent.len()).map(|x| find(&mut parent, x)).collect();
    let connected = roots.len() == 1;

    choose_anchors(&mut islands, &comps, &tol);

    let mut set = AdmissibleSet {
        islands,
        arcs: comps,
        connected,
        tolerances: tol,
        feature_size: f64::INFINITY,
    };
    set.feature_size = compute_feature_size(&set);
    Ok(set)
}

fn trimmed_polyline(c: &PiecewiseCurve, frac: f64) -> Polyline {
    if frac <= 0.0 || c.is_closed() {
        return Polyline::from_curve(c, POLY_DENSITY);
    }
    let m = 512;
    let points = (0..=m)
        .map(|k| c.point_at(frac + (1.0 - 2.0 * frac) * k as f64 / m as f64))
        .collect();
    Polyline { points, closed: false }
}

/// Picks `(a, b)` per boundary component: `a` is the boundary point closest
/// to the vertex that keeps clear of attachments, `b` sits mid-way in the
/// widest gap between attachments and `a`.
fn choose_anchors(islands: &mut [Island], arcs: &[ArcComponent], tol: &Tolerances) {
    for (i, isl) in islands.iter_mut().enumerate() {
        let mut anchors = Vec::with_capacity(isl.n_boundaries());
        for j in 0..isl.n_boundaries() {
            let attach: Vec<f64> = arcs
                .iter()
                .flat_map(|a| a.ends.iter())
                .filter_map(|e| match *e {
                    End::Attached { island, boundary, s } if island == i && boundary == j => Some(s),
                    _ => None,
                })
                .collect();
            let circ = |x: f64, y: f64| {
                let d = (x - y).rem_euclid(1.0);
                d.min(1.0 - d)
            };
            let curve = isl.boundary(j);
            let (s_near, _) = curve.project(isl.vertex);
            let clear = |s: f64| attach.iter().all(|&t| circ(s, t) >= tol.anchor_clearance);
            let mut a = s_near;
            if !clear(a) {
                // Walk outward from the nearest point until clear.
                let mut found = None;
                for k in 1..=1000 {
                    let d = k as f64 * 1e-3;
                    for cand in [s_near + d, s_near - d] {
                        let c = cand.rem_euclid(1.0);
                        if clear(c) {
                            found = Some(c);
                            break;
                        }
                    }
                    if found.is_some() {
                        break;
                    }
                }
                a = found.unwrap_or(s_near);
            }
            let mut marks: Vec<f64> = attach.clone();
            marks.push(a);
            marks.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut best = (0.0, a + 0.5);
            for k in 0..marks.len() {
                let lo = marks[k];
                let hi = if k + 1 < marks.len() { marks[k + 1] } else { marks[0] + 1.0 };
                if hi - lo > best.0 {
                    best = (hi - lo, 0.5 * (lo + hi));
                }
            }
            anchors.push((a.rem_euclid(1.0), best.1.rem_euclid(1.0)));
        }
        isl.anchors = anchors;
    }
}

fn compute_feature_size(set: &AdmissibleSet) -> f64 {
    let mut sep = f64::INFINITY;
    let n_isl = set.islands.len();
    for i in 0..n_isl {
        for j in (i + 1)..n_isl {
            sep = sep.min(set.islands[i].outer_poly.min_distance_to(&set.islands[j].outer_poly));
        }
    }
    for (k, a) in set.arcs.iter().enumerate() {
        let attached = a.attached_islands();
        for (i, isl) in set.islands.iter().enumerate() {
            if !attached.contains(&i) {
                for j in 0..isl.n_boundaries() {
                    sep = sep.min(a.poly.min_distance_to(isl.boundary_poly(j)));
                }
            }
        }
        for b in set.arcs.iter().skip(k + 1) {
            sep = sep.min(a.poly.min_distance_to(&b.poly));
        }
    }
    let mut feature = 0.5 * sep;
    if let Some(inr) = crate::raster::min_complement_inradius(set) {
        feature = feature.min(inr);
    }
    feature
}

/// Point-membership test for the regular neighbourhood `S_ε`.
#[derive(Debug, Clone)]
pub struct RegularNeighborhood<'a> {
    pub set: &'a AdmissibleSet,
    pub eps: f64,
}

impl RegularNeighborhood<'_> {
    pub fn contains(&self, z: C64) -> bool {
        self.set.distance(z) < self.eps
    }
}

/// `S_ε = {p : dist(p, S) < ε}`; `ε` must stay below the feature size so the
/// neighbourhood retracts onto `S`.
pub fn regular_neighborhood(set: &AdmissibleSet, eps: f64) -> Result<RegularNeighborhood<'_>, GeometryError> {
    if !(eps > 0.0) || eps >= set.feature_size {
        return Err(GeometryError::EpsilonTooLarge {
            eps,
            feature_size: set.feature_size,
        });
    }
    Ok(RegularNeighborhood { set, eps })
}

#[cfg(test)]
mod tests;
