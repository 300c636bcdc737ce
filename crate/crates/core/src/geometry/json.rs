//! JSON document shapes for admissible sets.

use serde::{Deserialize, Serialize};

use super::{
    build_admissible_set, AdmissibleSet, AttachSpec, End, GeometryError, Island, Piece, PiecewiseCurve, Tolerances,
};
use crate::C64;

fn pt(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn arr(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcPieceJson {
    pub center: [f64; 2],
    pub radius: f64,
    pub start: f64,
    pub sweep: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitePieceJson {
    pub points: [[f64; 2]; 2],
    pub tangents: [[f64; 2]; 2],
}

/// One entry of `"pieces"`. A `points` list of two points is a straight
/// segment; longer lists are interpolated by a C¹ cubic spline unless
/// `smooth` is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PieceJson {
    Points {
        points: Vec<[f64; 2]>,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        smooth: bool,
    },
    Arc {
        arc: ArcPieceJson,
    },
    Hermite {
        hermite: HermitePieceJson,
    },
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveJson {
    pub pieces: Vec<PieceJson>,
    #[serde(default)]
    pub closed: bool,
}

impl CurveJson {
    pub fn build(&self) -> Result<PiecewiseCurve, GeometryError> {
        let mut pieces = Vec::new();
        let single = self.pieces.len() == 1;
        for p in &self.pieces {
            match p {
                PieceJson::Points { points, smooth } => {
                    let pts: Vec<C64> = points.iter().copied().map(pt).collect();
                    if pts.len() < 2 {
                        return Err(GeometryError::Json("a points piece needs at least two points".into()));
                    }
                    let wrap = self.closed && single && (pts[0] - pts[pts.len() - 1]).norm() <= super::GAP_TOL;
                    let sub = if pts.len() == 2 || !smooth {
                        PiecewiseCurve::polyline(&pts, false)?
                    } else if wrap {
                        PiecewiseCurve::spline(&pts[..pts.len() - 1], true)?
                    } else if self.closed && single {
                        PiecewiseCurve::spline(&pts, true)?
                    } else {
                        PiecewiseCurve::spline(&pts, false)?
                    };
                    pieces.extend(sub.pieces().iter().cloned());
                }
                PieceJson::Arc { arc } => pieces.push(Piece::Arc {
                    center: pt(arc.center),
                    radius: arc.radius,
                    start: arc.start,
                    sweep: arc.sweep,
                }),
                PieceJson::Hermite { hermite } => pieces.push(Piece::Hermite {
                    p0: pt(hermite.points[0]),
                    p1: pt(hermite.points[1]),
                    t0: pt(hermite.tangents[0]),
                    t1: pt(hermite.tangents[1]),
                }),
            }
        }
        PiecewiseCurve::new(pieces, self.closed)
    }

    pub fn from_curve(c: &PiecewiseCurve) -> Self {
        let pieces = c
            .pieces()
            .iter()
            .map(|p| match *p {
                Piece::Line { a, b } => PieceJson::Points {
                    points: vec![arr(a), arr(b)],
                    smooth: true,
                },
                Piece::Arc {
                    center,
                    radius,
                    start,
                    sweep,
                } => PieceJson::Arc {
                    arc: ArcPieceJson {
                        center: arr(center),
                        radius,
                        start,
                        sweep,
                    },
                },
                Piece::Hermite { p0, p1, t0, t1 } => PieceJson::Hermite {
                    hermite: HermitePieceJson {
                        points: [arr(p0), arr(p1)],
                        tangents: [arr(t0), arr(t1)],
                    },
                },
            })
            .collect();
        Self {
            pieces,
            closed: c.is_closed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandJson {
    pub outer: CurveJson,
    #[serde(default)]
    pub holes: Vec<CurveJson>,
    pub vertex: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EndJson {
    Tag(FreeTag),
    Attached { island: usize, boundary: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreeTag {
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcEntryJson {
    pub curve: CurveJson,
    #[serde(default)]
    pub ends: Vec<EndJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSetJson {
    #[serde(default)]
    pub islands: Vec<IslandJson>,
    #[serde(default)]
    pub arcs: Vec<ArcEntryJson>,
}

impl AdmissibleSetJson {
    pub fn build(&self, tol: Tolerances) -> Result<AdmissibleSet, GeometryError> {
        let mut islands = Vec::with_capacity(self.islands.len());
        for (i, isl) in self.islands.iter().enumerate() {
            let outer = isl.outer.build()?;
            let holes = isl.holes.iter().map(CurveJson::build).collect::<Result<Vec<_>, _>>()?;
            let island = Island::new(outer, holes, pt(isl.vertex)).map_err(|e| match e {
                GeometryError::InvalidIsland { reason, .. } => GeometryError::InvalidIsland { island: i, reason },
                other => other,
            })?;
            islands.push(island);
        }
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            let curve = a.curve.build()?;
            let ends = if a.ends.is_empty() && !curve.is_closed() {
                vec![AttachSpec::Free, AttachSpec::Free]
            } else {
                a.ends
                    .iter()
                    .map(|e| match *e {
                        EndJson::Tag(FreeTag::Free) => AttachSpec::Free,
                        EndJson::Attached { island, boundary } => AttachSpec::Attached { island, boundary },
                    })
                    .collect()
            };
            arcs.push((curve, ends));
        }
        build_admissible_set(islands, arcs, tol)
    }

    pub fn from_set(set: &AdmissibleSet) -> Self {
        let islands = set
            .islands
            .iter()
            .map(|isl| IslandJson {
                outer: CurveJson::from_curve(&isl.outer),
                holes: isl.holes.iter().map(CurveJson::from_curve).collect(),
                vertex: arr(isl.vertex),
            })
            .collect();
        let arcs = set
            .arcs
            .iter()
            .map(|a| ArcEntryJson {
                curve: CurveJson::from_curve(&a.curve),
                ends: a
                    .ends
                    .iter()
                    .map(|e| match *e {
                        End::Free => EndJson::Tag(FreeTag::Free),
                        End::Attached { island, boundary, .. } => EndJson::Attached { island, boundary },
                    })
                    .collect(),
            })
            .collect();
        Self { islands, arcs }
    }
}
