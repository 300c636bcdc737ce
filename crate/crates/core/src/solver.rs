//! Identity-proximity degree certificate and the period solve on a polydisc.

use std::fmt::Display;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no δ down to {floor:e} passed the degree certificate (last sup‖P − id‖ = {sup_defect:e} at δ = {delta:e})")]
    CertificateFailed { delta: f64, floor: f64, sup_defect: f64 },
    #[error("sampling too coarse: guard {guard:e} ≥ remaining margin {margin:e}")]
    InsufficientSampling { guard: f64, margin: f64 },
    #[error("no convergence after {iterations} iterations (best residual {best_residual:e})")]
    NoConvergence { iterations: usize, best_residual: f64, best_t: Vec<[f64; 2]> },
    #[error("period map evaluation failed: {0}")]
    Evaluation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A boundary point of `P_δ` on facet `|t_facet| = δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    #[serde(with = "crate::complex_serde::vec")]
    pub t: Vec<C64>,
    pub facet: usize,
}

/// The closed polydisc `P_δ ⊂ ℂ^l` and a sampling of its boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolydiscSpec {
    pub delta: f64,
    pub l: usize,
    pub boundary_samples: Vec<BoundarySample>,
    /// Sup-norm covering radius of the samples on the boundary.
    pub spacing: f64,
}

/// Default samples along each facet circle.
pub const DEFAULT_PER_DIM: usize = 32;
/// Default ring count of the disc grids on the remaining coordinates.
pub const DEFAULT_RINGS: usize = 2;

fn disc_points(delta: f64, rings: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0)];
    for r in 1..=rings {
        let rad = delta * r as f64 / rings as f64;
        let m = 6 * r;
        for k in 0..m {
            out.push(C64::from_polar(rad, std::f64::consts::TAU * k as f64 / m as f64));
        }
    }
    out
}

impl PolydiscSpec {
    /// Tensor grid: `per_dim` angles on the facet circle times a polar disc
    /// grid with `rings` rings on every other coordinate.
    pub fn grid(delta: f64, l: usize, per_dim: usize, rings: usize) -> Self {
        let circle: Vec<C64> = (0..per_dim)
            .map(|k| C64::from_polar(delta, std::f64::consts::TAU * k as f64 / per_dim as f64))
            .collect();
        let disc = disc_points(delta, rings);
        let mut samples = Vec::new();
        for facet in 0..l {
            let mut partial: Vec<Vec<C64>> = vec![vec![]];
            for i in 0..l {
                let choices = if i == facet { &circle } else { &disc };
                partial = partial
                    .iter()
                    .flat_map(|p| {
                        choices.iter().map(move |&c| {
                            let mut q = p.clone();
                            q.push(c);
                            q
                        })
                    })
                    .collect();
            }
            samples.extend(partial.into_iter().map(|t| BoundarySample { t, facet }));
        }
        let spacing = if l == 0 {
            0.0
        } else if l == 1 {
            delta * (std::f64::consts::PI / per_dim as f64)
        } else {
            delta * (std::f64::consts::PI / per_dim as f64).max(1.0 / rings.max(1) as f64)
        };
        Self {
            delta,
            l,
            boundary_samples: samples,
            spacing,
        }
    }

    /// Sample count of [`PolydiscSpec::grid`].
    pub fn grid_size(l: usize, per_dim: usize, rings: usize) -> usize {
        let disc = 1 + 3 * rings * (rings + 1);
        l.saturating_mul(per_dim).saturating_mul(disc.saturating_pow(l.saturating_sub(1) as u32))
    }

    /// Finest grid with at most `max_samples` points: rings are dropped
    /// first, then the facet circle is halved down to 8 angles.
    pub fn budgeted(delta: f64, l: usize, per_dim: usize, rings: usize, max_samples: usize) -> Self {
        let mut rings = rings;
        let mut per_dim = per_dim.max(8);
        while Self::grid_size(l, per_dim, rings) > max_samples {
            if rings > 0 {
                rings -= 1;
            } else if per_dim > 8 {
                per_dim /= 2;
            } else {
                break;
            }
        }
        Self::grid(delta, l, per_dim, rings)
    }

    pub fn new(delta: f64, l: usize) -> Self {
        Self::grid(delta, l, DEFAULT_PER_DIM, DEFAULT_RINGS)
    }

    /// Random boundary points, `count` per facet, for spot checks. No
    /// covering radius is claimed, so certificates on it never pass.
    pub fn random(delta: f64, l: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::new();
        for facet in 0..l {
            for _ in 0..count {
                let t = (0..l)
                    .map(|i| {
                        let th = rng.gen_range(0.0..std::f64::consts::TAU);
                        let r = if i == facet { delta } else { delta * rng.gen::<f64>().sqrt() };
                        C64::from_polar(r, th)
                    })
                    .collect();
                samples.push(BoundarySample { t, facet });
            }
        }
        Self {
            delta,
            l,
            boundary_samples: samples,
            spacing: f64::INFINITY,
        }
    }

    /// Every sample lies on `max |t_i| = δ`.
    pub fn on_boundary(&self, tol: f64) -> bool {
        self.boundary_samples.iter().all(|b| (sup(&b.t) - self.delta).abs() <= tol)
    }
}

fn sup(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn sup_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Outcome of the identity-proximity test on `bP_δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub passed: bool,
    /// `δ − sup ‖P(t) − t‖∞`: lower bound of the straight-line homotopy on samples.
    pub margin: f64,
    pub sup_defect: f64,
    /// Inter-sample allowance: Lipschitz estimate of `P − id` times spacing.
    pub guard: f64,
    pub lipschitz: f64,
    pub spacing: f64,
    pub samples: usize,
    pub delta: f64,
}

/// Safety factor on the sampled Lipschitz quotient of `P − id`.
pub const LIPSCHITZ_SAFETY: f64 = 1.5;

fn evaluate_all<P, E>(p: &P, ts: &[&[C64]]) -> Result<Vec<Vec<C64>>, SolveError>
where
    P: Fn(&[C64]) -> Result<Vec<C64>, E> + Sync,
    E: Display,
{
    ts.par_iter()
        .map(|t| p(t).map_err(|e| SolveError::Evaluation(e.to_string())))
        .collect()
}

/// Passes iff `sup ‖P(t) − t‖∞ + guard < δ` over the boundary samples. The
/// straight-line homotopy `(1 − s)t + sP(t)` then avoids `0` on `bP_δ`, so
/// `P` has degree one there.
pub fn degree_certificate<P, E>(p: &P, spec: &PolydiscSpec) -> Result<Certificate, SolveError>
where
    P: Fn(&[C64]) -> Result<Vec<C64>, E> + Sync,
    E: Display,
{
    let ts: Vec<&[C64]> = spec.boundary_samples.iter().map(|b| b.t.as_slice()).collect();
    let vals = evaluate_all(p, &ts)?;
    let q: Vec<Vec<C64>> = vals
        .iter()
        .zip(&ts)
        .map(|(v, t)| v.iter().zip(t.iter()).map(|(a, b)| a - b).collect())
        .collect();
    if q.iter().flatten().any(|x| !x.is_finite()) {
        return Err(SolveError::Evaluation("non-finite period value on the boundary".into()));
    }
    let sup_defect = q.iter().map(|v| sup(v)).fold(0.0, f64::max);
    let mut lip: f64 = 0.0;
    let reach = 3.0 * spec.spacing;
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let d = sup_diff(ts[i], ts[j]);
            if d > 0.0 && d <= reach {
                lip = lip.max(sup_diff(&q[i], &q[j]) / d);
            }
        }
    }
    let lipschitz = LIPSCHITZ_SAFETY * lip;
    let guard = lipschitz * spec.spacing;
    let margin = spec.delta - sup_defect;
    let cert = Certificate {
        passed: false,
        margin,
        sup_defect,
        guard,
        lipschitz,
        spacing: spec.spacing,
        samples: ts.len(),
        delta: spec.delta,
    };
    if margin <= 0.0 {
        return Ok(cert);
    }
    if guard >= margin {
        return Err(SolveError::InsufficientSampling { guard, margin });
    }
    Ok(Certificate { passed: true, ..cert })
}

/// Smallest `‖(1 − s)t + sP(t)‖∞` over the samples and `s ∈ {0, 1/k, …, 1}`.
pub fn homotopy_min<P, E>(p: &P, spec: &PolydiscSpec, steps: usize) -> Result<f64, SolveError>
where
    P: Fn(&[C64]) -> Result<Vec<C64>, E> + Sync,
    E: Display,
{
    let ts: Vec<&[C64]> = spec.boundary_samples.iter().map(|b| b.t.as_slice()).collect();
    let vals = evaluate_all(p, &ts)?;
    let mut best = f64::INFINITY;
    for (t, v) in ts.iter().zip(&vals) {
        for k in 0..=steps {
            let s = k as f64 / steps as f64;
            let h: Vec<C64> = t.iter().zip(v).map(|(a, b)| a * (1.0 - s) + b * s).collect();
            best = best.min(sup(&h));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub delta0: f64,
    pub delta_floor: f64,
    pub target: f64,
    pub max_iter: usize,
    pub per_dim: usize,
    pub rings: usize,
    /// Required residual reduction per fixed-point step before switching to Newton.
    pub contraction: f64,
    /// Cap on certificate samples per δ.
    pub max_samples: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            delta0: 0.1,
            delta_floor: 1e-4,
            target: 1e-10,
            max_iter: 60,
            per_dim: DEFAULT_PER_DIM,
            rings: DEFAULT_RINGS,
            contraction: 0.5,
            max_samples: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    #[serde(with = "crate::complex_serde::vec")]
    pub t0: Vec<C64>,
    /// `‖P(t⁰)‖∞`.
    pub residual: f64,
    pub target: f64,
    pub certificate: Certificate,
    pub iterations: usize,
    pub newton_steps: usize,
    pub delta_used: f64,
    /// `δ` values tried, largest first.
    pub deltas_tried: Vec<f64>,
}

fn project(t: &mut [C64], delta: f64) {
    for x in t.iter_mut() {
        let r = x.norm();
        if r > delta {
            *x *= delta / r;
        }
    }
}

/// Solves `P(t⁰) = 0` in `P_δ ⊂ ℂ^l`, certifying degree one at `δ` first.
/// Each iteration tries the fixed-point step `t ← t − P(t)`; if the residual
/// fails to contract it takes a finite-difference Newton step instead.
/// Iterates are projected back onto the closed polydisc.
pub fn solve_periods<P, E>(p: &P, l: usize, delta: f64, cfg: &SolveConfig) -> Result<SolveReport, SolveError>
where
    P: Fn(&[C64]) -> Result<Vec<C64>, E> + Sync,
    E: Display,
{
    let spec = PolydiscSpec::budgeted(delta, l, cfg.per_dim, cfg.rings, cfg.max_samples);
    let cert = degree_certificate(p, &spec)?;
    if !cert.passed {
        return Err(SolveError::CertificateFailed {
            delta,
            floor: delta,
            sup_defect: cert.sup_defect,
        });
    }
    iterate(p, l, cert, vec![delta], cfg)
}

/// [`solve_periods`] over the schedule `δ = delta0, delta0/2, …` down to
/// `delta_floor`, using the first `δ` whose certificate passes.
pub fn solve_with_schedule<P, E>(p: &P, l: usize, cfg: &SolveConfig) -> Result<SolveReport, SolveError>
where
    P: Fn(&[C64]) -> Result<Vec<C64>, E> + Sync,
    E: Display,
{
    if !(cfg.delta0 > 0.0 && cfg.delta_floor > 0.0 && cfg.target > 0.0) {
        return Err(SolveError::InvalidInput("δ schedule and target must be positive".into()));
    }
    let mut delta = cfg.delta0;
    let mut tried = Vec::new();
    let mut last_defect = f64::NAN;
    let mut last_eval = None;
    while delta >= cfg.delta_floor {
        tried.push(delta);
        let spec = PolydiscSpec::budgeted(delta, l, cfg.per_dim, cfg.rings, cfg.max_samples);
        match degree_certificate(p, &spec) {
            Ok(cert) if cert.passed => return iterate(p, l, cert, tried, cfg),
            Ok(cert) => last_defect = cert.sup_defect,
            Err(SolveError::InsufficientSampling { .. }) => {}
            // P is undefined somewhere on bP_δ (the solution left its domain).
            Err(e @ SolveError::Evaluation(_)) => last_eval = Some(e),
            Err(e) => return Err(e),
        }
        delta *= 0.5;
    }
    if let (true, Some(e)) = (last_defect.is_nan(), last_eval) {
        return Err(e);
    }
    Err(SolveError::CertificateFailed {
        delta: tried.last().copied().unwrap_or(cfg.delta0),
        floor: cfg.delta_floor,
        sup_defect: last_defect,
    })
}

fn iterate<P, E>(p: &P, l: usize, cert: Certificate, tried: Vec<f64>, cfg: &SolveConfig) -> Result<SolveReport, SolveError>
where
    P: Fn(&[C64]) -> Result<Vec<C64>, E> + Sync,
    E: Display,
{
    let delta = cert.delta;
    let eval = |t: &[C64]| -> Result<Vec<C64>, SolveError> {
        let v = p(t).map_err(|e| SolveError::Evaluation(e.to_string()))?;
        if v.len() != l || v.iter().any(|x| !x.is_finite()) {
            return Err(SolveError::Evaluation(format!("period map returned {} finite-checked entries for l = {l}", v.len())));
        }
        Ok(v)
    };
    let mut t = vec![C64::new(0.0, 0.0); l];
    let mut r = eval(&t)?;
    let mut best = (sup(&r), t.clone());
    let mut iterations = 0;
    let mut newton_steps = 0;
    let fd = 1e-5 * delta.min(1.0);
    while sup(&r) > cfg.target {
        if iterations >= cfg.max_iter {
            break;
        }
        iterations += 1;
        let rn = sup(&r);
        let mut cand: Vec<C64> = t.iter().zip(&r).map(|(a, b)| a - b).collect();
        project(&mut cand, delta);
        let rc = eval(&cand)?;
        if sup(&rc) <= cfg.contraction * rn {
            t = cand;
            r = rc;
        } else {
            // Finite-difference Newton step. P is holomorphic in t, so a real
            // difference quotient gives the complex Jacobian column.
            let cols: Vec<Vec<C64>> = (0..l)
                .into_par_iter()
                .map(|j| {
                    let mut tp = t.clone();
                    let mut tm = t.clone();
                    tp[j] += fd;
                    tm[j] -= fd;
                    let a = eval(&tp)?;
                    let b = eval(&tm)?;
                    Ok(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * fd)).collect())
                })
                .collect::<Result<_, SolveError>>()?;
            let jac = DMatrix::from_fn(l, l, |i, j| cols[j][i]);
            let rhs = DVector::from_iterator(l, r.iter().map(|x| -x));
            let Some(step) = jac.lu().solve(&rhs) else {
                break;
            };
            newton_steps += 1;
            let mut accepted = false;
            let mut lambda = 1.0;
            for _ in 0..8 {
                let mut cand: Vec<C64> = t.iter().zip(step.iter()).map(|(a, d)| a + d * lambda).collect();
                project(&mut cand, delta);
                let rc = eval(&cand)?;
                if sup(&rc) < rn {
                    t = cand;
                    r = rc;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if sup(&r) < best.0 {
            best = (sup(&r), t.clone());
        }
    }
    let residual = sup(&r);
    if residual > cfg.target {
        return Err(SolveError::NoConvergence {
            iterations,
            best_residual: best.0,
            best_t: best.1.iter().map(|x| [x.re, x.im]).collect(),
        });
    }
    Ok(SolveReport {
        t0: t,
        residual,
        target: cfg.target,
        certificate: cert,
        iterations,
        newton_steps,
        delta_used: delta,
        deltas_tried: tried,
    })
}

#[cfg(test)]
mod tests;
