//! Contour integrals, rational least-squares approximation with poles off the
//! set, and the period-normalised spray.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{AdmissibleSet, CurveSamples};
use crate::quad::{gl4, gl8};
use crate::{c64, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("integrand pole {pole} lies within {radius:e} of the path (at {z})")]
    PoleOnPath { pole: C64, z: C64, radius: f64 },
    #[error("least-squares system is ill conditioned (condition {cond:e}, cap {cap:e})")]
    IllConditioned { cond: f64, cap: f64 },
    #[error("period matrix is singular (condition {cond:e}, cap {cap:e})")]
    SingularPeriodMatrix { cond: f64, cap: f64 },
    #[error("missing anchor: {0}")]
    MissingAnchor(String),
    #[error("integrand is not finite at {0}")]
    NonFinite(C64),
    #[error("no samples to fit")]
    NoSamples,
}

/// Group of pole terms `Σ_k c_k (r/(z − a))^k`, `k = 1..`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleGroup {
    #[serde(with = "crate::complex_serde")]
    pub anchor: C64,
    #[serde(with = "crate::complex_serde::vec")]
    pub coeffs: Vec<C64>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub radius: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

fn is_zero(z: &C64) -> bool {
    *z == C64::new(0.0, 0.0)
}

/// `Σ_k p_k ((z − c)/R)^k + Σ_j Σ_k c_{j,k} (r_j/(z − a_j))^k`. With the default
/// `c = 0`, `R = r_j = 1` the coefficients are the plain ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    #[serde(with = "crate::complex_serde::vec")]
    pub poly: Vec<C64>,
    #[serde(default)]
    pub poles: Vec<PoleGroup>,
    #[serde(default, with = "crate::complex_serde", skip_serializing_if = "is_zero")]
    pub center: C64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
}

impl RationalFunction {
    pub fn zero() -> Self {
        Self {
            poly: vec![],
            poles: vec![],
            center: C64::new(0.0, 0.0),
            scale: 1.0,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self {
            poly: vec![c],
            ..Self::zero()
        }
    }

    /// `1/(2πi(z − a))`.
    pub fn cauchy_kernel(a: C64) -> Self {
        Self {
            poles: vec![PoleGroup {
                anchor: a,
                coeffs: vec![C64::new(0.0, -1.0 / (2.0 * PI))],
                radius: 1.0,
            }],
            ..Self::zero()
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let u = (z - self.center) / self.scale;
        for c in self.poly.iter().rev() {
            acc = acc * u + c;
        }
        for g in &self.poles {
            let v = g.radius / (z - g.anchor);
            let mut s = C64::new(0.0, 0.0);
            for c in g.coeffs.iter().rev() {
                s = (s + c) * v;
            }
            acc += s;
        }
        acc
    }

    pub fn deriv(&self, z: C64) -> C64 {
        let u = (z - self.center) / self.scale;
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in self.poly.iter().enumerate().skip(1).rev() {
            acc = acc * u + c * k as f64;
        }
        acc /= self.scale;
        for g in &self.poles {
            let v = g.radius / (z - g.anchor);
            // d/dz v^k = −k v^{k+1} / r
            let mut s = C64::new(0.0, 0.0);
            for (k, c) in g.coeffs.iter().enumerate().rev() {
                s = (s + c * (k + 1) as f64) * v;
            }
            acc -= s * v / g.radius;
        }
        acc
    }

    pub fn pole_anchors(&self) -> Vec<C64> {
        self.poles.iter().filter(|g| g.coeffs.iter().any(|c| c.norm() > 0.0)).map(|g| g.anchor).collect()
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.poly.iter_mut().for_each(|c| *c *= s);
        out.poles.iter_mut().for_each(|g| g.coeffs.iter_mut().for_each(|c| *c *= s));
        out
    }

    /// Coefficient-wise sum; both operands must share centre and scale, and
    /// pole groups are matched by anchor and radius.
    pub fn add(&self, other: &Self) -> Self {
        assert!(
            self.poly.is_empty() || other.poly.is_empty() || (self.center == other.center && self.scale == other.scale),
            "polynomial parts use different centres"
        );
        let mut out = if self.poly.is_empty() {
            Self {
                center: other.center,
                scale: other.scale,
                ..self.clone()
            }
        } else {
            self.clone()
        };
        if out.poly.len() < other.poly.len() {
            out.poly.resize(other.poly.len(), C64::new(0.0, 0.0));
        }
        for (a, b) in out.poly.iter_mut().zip(&other.poly) {
            *a += b;
        }
        for g in &other.poles {
            match out.poles.iter_mut().find(|h| h.anchor == g.anchor && h.radius == g.radius) {
                Some(h) => {
                    if h.coeffs.len() < g.coeffs.len() {
                        h.coeffs.resize(g.coeffs.len(), C64::new(0.0, 0.0));
                    }
                    for (a, b) in h.coeffs.iter_mut().zip(&g.coeffs) {
                        *a += b;
                    }
                }
                None => out.poles.push(g.clone()),
            }
        }
        out
    }

    /// `Σ_i t_i f_i` by coefficient arithmetic.
    pub fn linear_combination(t: &[C64], fs: &[RationalFunction]) -> Self {
        t.iter().zip(fs).fold(Self::zero(), |acc, (ti, f)| acc.add(&f.scaled(*ti)))
    }
}

/// Quadrature value with error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    #[serde(with = "crate::complex_serde")]
    pub value: C64,
    pub error: f64,
}

/// Exclusion radius around declared poles.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// `∫ f dz` along the sampled curve: composite 8-point Gauss–Legendre per
/// sample interval on the exact piece geometry. The error estimate is the
/// difference against the embedded 4-point composite rule.
pub fn contour_integral<F: Fn(C64) -> C64>(
    f: F,
    curve: &CurveSamples,
    poles: &[C64],
) -> Result<Integral, ApproxError> {
    let (x8, w8) = gl8();
    let (x4, w4) = gl4();
    let pieces = curve.curve.pieces();
    for &z in &curve.points {
        for &a in poles {
            if (z - a).norm() < POLE_EXCLUSION {
                return Err(ApproxError::PoleOnPath {
                    pole: a,
                    z,
                    radius: POLE_EXCLUSION,
                });
            }
        }
    }
    let mut fine = C64::new(0.0, 0.0);
    let mut coarse = C64::new(0.0, 0.0);
    for iv in &curve.intervals {
        let p = &pieces[iv.piece];
        let du = iv.u1 - iv.u0;
        let rule = |x: &[f64], w: &[f64], acc: &mut C64| -> Result<(), ApproxError> {
            for (xi, wi) in x.iter().zip(w) {
                let u = iv.u0 + du * xi;
                let z = p.eval(u);
                for &a in poles {
                    if (z - a).norm() < POLE_EXCLUSION {
                        return Err(ApproxError::PoleOnPath {
                            pole: a,
                            z,
                            radius: POLE_EXCLUSION,
                        });
                    }
                }
                let v = f(z);
                if !v.is_finite() {
                    return Err(ApproxError::NonFinite(z));
                }
                *acc += v * p.deriv(u) * (wi * du);
            }
            Ok(())
        };
        rule(x8, w8, &mut fine)?;
        rule(x4, w4, &mut coarse)?;
    }
    Ok(Integral {
        value: fine,
        error: (fine - coarse).norm(),
    })
}

/// Holomorphic fitting configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub degree: usize,
    pub max_pole_order: usize,
    pub cond_cap: f64,
    /// Fit tangential first derivatives alongside values.
    pub fit_derivatives: bool,
    pub derivative_weight: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            degree: 24,
            max_pole_order: 12,
            cond_cap: 1e13,
            fit_derivatives: true,
            derivative_weight: 1.0,
        }
    }
}

/// Values (and optionally tangential derivatives `df/ds` along unit
/// tangents) of a function on sample points of `S`.
#[derive(Debug, Clone, Default)]
pub struct FitSamples {
    pub points: Vec<C64>,
    pub values: Vec<C64>,
    /// `(point, unit tangent, df/ds)` rows.
    pub derivatives: Vec<(C64, C64, C64)>,
}

impl FitSamples {
    pub fn from_fn<F: Fn(C64) -> C64>(points: &[C64], f: F) -> Self {
        Self {
            points: points.to_vec(),
            values: points.iter().map(|&z| f(z)).collect(),
            derivatives: vec![],
        }
    }

    /// Adds tangential derivative rows at curve samples, by central differences
    /// of `f` along the tangent.
    pub fn with_tangential<F: Fn(C64) -> C64>(mut self, curve: &CurveSamples, f: F) -> Self {
        for (z, t) in curve.points.iter().zip(&curve.tangents) {
            let tau = t / t.norm();
            let h = 1e-5;
            let d = (f(z + tau * h) - f(z - tau * h)) / (2.0 * h);
            self.derivatives.push((*z, tau, d));
        }
        self
    }
}

/// Outcome of [`holomorphic_approximate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub function: RationalFunction,
    /// Sup of value residuals on the samples.
    pub sup_residual: f64,
    /// Sup of tangential-derivative residuals.
    pub derivative_residual: f64,
    pub cond: f64,
}

/// Least-squares fit by `{((z − c)/R)^k} ∪ {(r_j/(z − a_j))^k}` over value and
/// tangential-derivative rows, solved by SVD of the column-equilibrated
/// system. The achieved residuals are reported, never asserted.
pub fn holomorphic_approximate(samples: &FitSamples, anchors: &[C64], config: &FitConfig) -> Result<Fit, ApproxError> {
    if samples.points.is_empty() {
        return Err(ApproxError::NoSamples);
    }
    let all: Vec<C64> = samples
        .points
        .iter()
        .copied()
        .chain(samples.derivatives.iter().map(|d| d.0))
        .collect();
    let (lo, hi) = all.iter().fold(
        (c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), z| (c64(lo.re.min(z.re), lo.im.min(z.im)), c64(hi.re.max(z.re), hi.im.max(z.im))),
    );
    let center = (lo + hi) * 0.5;
    let scale = all.iter().map(|z| (z - center).norm()).fold(0.0, f64::max).max(1e-12);
    let radii: Vec<f64> = anchors
        .iter()
        .map(|&a| all.iter().map(|z| (z - a).norm()).fold(f64::INFINITY, f64::min))
        .collect();
    for (a, &r) in anchors.iter().zip(&radii) {
        if r < POLE_EXCLUSION {
            return Err(ApproxError::PoleOnPath {
                pole: *a,
                z: *a,
                radius: POLE_EXCLUSION,
            });
        }
    }
    let n_poly = config.degree + 1;
    let n_cols = n_poly + anchors.len() * config.max_pole_order;
    let use_d = config.fit_derivatives && !samples.derivatives.is_empty();
    let n_rows = samples.points.len() + if use_d { samples.derivatives.len() } else { 0 };
    let dweight = config.derivative_weight * scale / config.degree.max(config.max_pole_order).max(1) as f64;

    let value_row = |z: C64, row: &mut Vec<C64>| {
        row.clear();
        let u = (z - center) / scale;
        let mut p = C64::new(1.0, 0.0);
        for _ in 0..n_poly {
            row.push(p);
            p *= u;
        }
        for (a, r) in anchors.iter().zip(&radii) {
            let v = r / (z - a);
            let mut q = v;
            for _ in 0..config.max_pole_order {
                row.push(q);
                q *= v;
            }
        }
    };
    let deriv_row = |z: C64, row: &mut Vec<C64>| {
        row.clear();
        let u = (z - center) / scale;
        row.push(C64::new(0.0, 0.0));
        let mut p = C64::new(1.0, 0.0);
        for k in 1..n_poly {
            row.push(p * (k as f64 / scale));
            p *= u;
        }
        for (a, r) in anchors.iter().zip(&radii) {
            let v = r / (z - a);
            let mut q = v * v;
            for k in 1..=config.max_pole_order {
                row.push(-q * (k as f64 / r));
                q *= v;
            }
        }
    };

    let mut m = DMatrix::<C64>::zeros(n_rows, n_cols);
    let mut b = DVector::<C64>::zeros(n_rows);
    let mut row = Vec::with_capacity(n_cols);
    for (i, (&z, &f)) in samples.points.iter().zip(&samples.values).enumerate() {
        value_row(z, &mut row);
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = *v;
        }
        b[i] = f;
    }
    if use_d {
        let off = samples.points.len();
        for (i, &(z, tau, d)) in samples.derivatives.iter().enumerate() {
            deriv_row(z, &mut row);
            for (j, v) in row.iter().enumerate() {
                m[(off + i, j)] = *v * tau * dweight;
            }
            b[off + i] = d * dweight;
        }
    }
    let norms: Vec<f64> = (0..n_cols).map(|j| m.column(j).norm().max(1e-300)).collect();
    for (j, nj) in norms.iter().enumerate() {
        m.column_mut(j).unscale_mut(*nj);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if cond > config.cond_cap {
        return Err(ApproxError::IllConditioned {
            cond,
            cap: config.cond_cap,
        });
    }
    let x = svd.solve(&b, 0.0).map_err(|_| ApproxError::IllConditioned {
        cond,
        cap: config.cond_cap,
    })?;
    let coeffs: Vec<C64> = x.iter().zip(&norms).map(|(c, n)| c / n).collect();
    let mut function = RationalFunction {
        poly: coeffs[..n_poly].to_vec(),
        poles: vec![],
        center,
        scale,
    };
    for (j, (a, r)) in anchors.iter().zip(&radii).enumerate() {
        let s = n_poly + j * config.max_pole_order;
        function.poles.push(PoleGroup {
            anchor: *a,
            coeffs: coeffs[s..s + config.max_pole_order].to_vec(),
            radius: *r,
        });
    }
    let sup_residual = samples
        .points
        .iter()
        .zip(&samples.values)
        .map(|(&z, &f)| (function.eval(z) - f).norm())
        .fold(0.0, f64::max);
    let derivative_residual = samples
        .derivatives
        .iter()
        .map(|&(z, tau, d)| (function.deriv(z) * tau - d).norm())
        .fold(0.0, f64::max);
    Ok(Fit {
        function,
        sup_residual,
        derivative_residual,
        cond,
    })
}

/// One point inside every bounded component of `ℂ \ S`: hole centroids where
/// they lie inside the hole, raster-deepest points otherwise.
pub fn complement_anchors(set: &AdmissibleSet) -> Vec<C64> {
    let mut anchors = Vec::new();
    for isl in &set.islands {
        for h in &isl.holes {
            let poly = crate::geometry::Polyline::from_curve(h, crate::geometry::POLY_DENSITY);
            let n = poly.points.len() as f64;
            let c = poly.points.iter().sum::<C64>() / n;
            let deep = poly.contains(c) && poly.distance(c) > 0.2 * poly_inradius_guess(&poly);
            anchors.push(if deep { c } else { deepest_inside(&poly) });
        }
    }
    for comp in crate::raster::bounded_complement_components(set, crate::raster::FEATURE_RASTER) {
        let covered = set.islands.iter().any(|isl| {
            isl.holes.iter().any(|h| {
                crate::geometry::Polyline::from_curve(h, crate::geometry::POLY_DENSITY).contains(comp.anchor)
            })
        });
        if !covered {
            anchors.push(comp.anchor);
        }
    }
    anchors
}

fn poly_inradius_guess(p: &crate::geometry::Polyline) -> f64 {
    let (mut lo, mut hi) = (c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for z in &p.points {
        lo = c64(lo.re.min(z.re), lo.im.min(z.im));
        hi = c64(hi.re.max(z.re), hi.im.max(z.im));
    }
    0.5 * (hi.re - lo.re).min(hi.im - lo.im)
}

fn deepest_inside(p: &crate::geometry::Polyline) -> C64 {
    let (mut lo, mut hi) = (c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for z in &p.points {
        lo = c64(lo.re.min(z.re), lo.im.min(z.im));
        hi = c64(hi.re.max(z.re), hi.im.max(z.im));
    }
    let m = 64;
    let mut best = (p.points[0], -1.0);
    for i in 0..m {
        for j in 0..m {
            let z = lo + c64((hi.re - lo.re) * (i as f64 + 0.5) / m as f64, (hi.im - lo.im) * (j as f64 + 0.5) / m as f64);
            if p.contains(z) {
                let d = p.distance(z);
                if d > best.1 {
                    best = (z, d);
                }
            }
        }
    }
    best.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SprayConfig {
    pub max_pole_order: usize,
    pub poly_degree: usize,
    pub cond_cap: f64,
}

impl Default for SprayConfig {
    fn default() -> Self {
        Self {
            max_pole_order: 12,
            poly_degree: 24,
            cond_cap: 1e10,
        }
    }
}

/// Rational functions `ξ_1, …, ξ_l` with `∫_{C_i} ξ_j dz = δ_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spray {
    pub xi: Vec<RationalFunction>,
    /// Measured `∫_{C_i} ξ_j dz`, row `i`, column `j`.
    pub period_matrix: Vec<Vec<[f64; 2]>>,
    /// `‖P − I‖∞` of the measured matrix.
    pub defect: f64,
    /// Condition number of the selected raw matrix.
    pub raw_cond: f64,
    /// Largest quadrature error estimate among the measured entries.
    pub quadrature_error: f64,
}

impl Spray {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// `y(p, t) = Σ t_i ξ_i(p)`.
    pub fn eval(&self, z: C64, t: &[C64]) -> C64 {
        self.xi.iter().zip(t).map(|(f, ti)| f.eval(z) * ti).sum()
    }

    /// `∂y/∂p (p, t)`.
    pub fn deriv(&self, z: C64, t: &[C64]) -> C64 {
        self.xi.iter().zip(t).map(|(f, ti)| f.deriv(z) * ti).sum()
    }

    pub fn anchors(&self) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for f in &self.xi {
            for a in f.pole_anchors() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    pub fn period_entry(&self, i: usize, j: usize) -> C64 {
        let [re, im] = self.period_matrix[i][j];
        C64::new(re, im)
    }
}

/// Measures `∫_{C_i} ξ_j dz` for every member and function.
pub fn measure_periods(
    members: &[CurveSamples],
    xi: &[RationalFunction],
) -> Result<(DMatrix<C64>, f64), ApproxError> {
    let l = members.len();
    let mut p = DMatrix::<C64>::zeros(l, xi.len());
    let mut err: f64 = 0.0;
    for (i, c) in members.iter().enumerate() {
        for (j, f) in xi.iter().enumerate() {
            let r = contour_integral(|z| f.eval(z), c, &f.pole_anchors())?;
            p[(i, j)] = r.value;
            err = err.max(r.error);
        }
    }
    Ok((p, err))
}

/// Builds the spray for `members` (closed cycles, or open family arcs whose
/// functional is the integral along the arc). Candidates are, in order,
/// `1/(2πi(z − a_j))`, scaled monomials and higher pole orders; `l` of them are
/// chosen by greedy column pivoting on the raw period matrix, and their
/// combination uses the inverse of the selected raw matrix.
pub fn build_spray(members: &[CurveSamples], anchors: &[C64], config: &SprayConfig) -> Result<Spray, ApproxError> {
    let l = members.len();
    if l == 0 {
        return Ok(Spray {
            xi: vec![],
            period_matrix: vec![],
            defect: 0.0,
            raw_cond: 1.0,
            quadrature_error: 0.0,
        });
    }
    let pts: Vec<C64> = members.iter().flat_map(|m| m.points.iter().copied()).collect();
    let (lo, hi) = pts.iter().fold(
        (c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), z| (c64(lo.re.min(z.re), lo.im.min(z.im)), c64(hi.re.max(z.re), hi.im.max(z.im))),
    );
    let center = (lo + hi) * 0.5;
    let scale = pts.iter().map(|z| (z - center).norm()).fold(0.0, f64::max).max(1e-12);

    // Closed members need some anchor they wind around.
    for (i, m) in members.iter().enumerate() {
        if m.closed {
            let winds = anchors.iter().any(|&a| {
                contour_integral(|z| 1.0 / (c64(0.0, 2.0 * PI) * (z - a)), m, &[a])
                    .map(|r| r.value.norm() > 0.5)
                    .unwrap_or(false)
            });
            if !winds {
                return Err(ApproxError::MissingAnchor(format!("cycle {i} winds around no anchor")));
            }
        }
    }

    let mut candidates: Vec<RationalFunction> = anchors.iter().map(|&a| RationalFunction::cauchy_kernel(a)).collect();
    if members.iter().any(|m| !m.closed) {
        for k in 0..=config.poly_degree {
            let mut poly = vec![C64::new(0.0, 0.0); k + 1];
            poly[k] = C64::new(1.0, 0.0);
            candidates.push(RationalFunction {
                poly,
                poles: vec![],
                center,
                scale,
            });
        }
        for &a in anchors {
            let r = pts.iter().map(|z| (z - a).norm()).fold(f64::INFINITY, f64::min);
            for k in 2..=config.max_pole_order {
                let mut coeffs = vec![C64::new(0.0, 0.0); k];
                coeffs[k - 1] = C64::new(1.0, 0.0);
                candidates.push(RationalFunction {
                    poles: vec![PoleGroup { anchor: a, coeffs, radius: r }],
                    ..RationalFunction::zero()
                });
            }
        }
    }
    let (raw, _) = measure_periods(members, &candidates)?;

    // Greedy column pivoting (modified Gram–Schmidt).
    let mut work = raw.clone();
    let mut chosen = Vec::with_capacity(l);
    let mut q: Vec<DVector<C64>> = Vec::with_capacity(l);
    let col_scale = (0..work.ncols()).map(|j| work.column(j).norm()).fold(0.0, f64::max).max(1e-300);
    for _ in 0..l {
        let (best, norm) = (0..work.ncols())
            .filter(|j| !chosen.contains(j))
            .map(|j| (j, work.column(j).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap_or((0, 0.0));
        if norm <= 1e-12 * col_scale {
            return Err(ApproxError::SingularPeriodMatrix {
                cond: f64::INFINITY,
                cap: config.cond_cap,
            });
        }
        let v: DVector<C64> = work.column(best).unscale(norm);
        for j in 0..work.ncols() {
            let proj = v.dotc(&work.column(j));
            let upd = &v * proj;
            let mut col = work.column_mut(j);
            col -= upd;
        }
        q.push(v);
        chosen.push(best);
    }
    chosen.sort_unstable();
    let sel = DMatrix::from_fn(l, l, |i, k| raw[(i, chosen[k])]);
    let sv = sel.clone().svd(false, false).singular_values;
    let raw_cond = sv.max() / sv.min();
    if !(raw_cond <= config.cond_cap) {
        return Err(ApproxError::SingularPeriodMatrix {
            cond: raw_cond,
            cap: config.cond_cap,
        });
    }
    let inv = sel.try_inverse().ok_or(ApproxError::SingularPeriodMatrix {
        cond: f64::INFINITY,
        cap: config.cond_cap,
    })?;
    let xi: Vec<RationalFunction> = (0..l)
        .map(|j| {
            let coeffs: Vec<C64> = (0..l).map(|k| inv[(k, j)]).collect();
            let picked: Vec<RationalFunction> = chosen.iter().map(|&c| candidates[c].clone()).collect();
            RationalFunction::linear_combination(&coeffs, &picked)
        })
        .collect();
    let (measured, quadrature_error) = measure_periods(members, &xi)?;
    let mut defect: f64 = 0.0;
    for i in 0..l {
        for j in 0..l {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((measured[(i, j)] - target).norm());
        }
    }
    let period_matrix = (0..l)
        .map(|i| (0..l).map(|j| [measured[(i, j)].re, measured[(i, j)].im]).collect())
        .collect();
    Ok(Spray {
        xi,
        period_matrix,
        defect,
        raw_cond,
        quadrature_error,
    })
}

#[cfg(test)]
mod tests;

/// Sample points covering `S`: boundary and arc samples (with tangents)
/// plus an interior grid of each island.
#[derive(Debug, Clone)]
pub struct SetSamples {
    pub interior: Vec<C64>,
    pub curves: Vec<CurveSamples>,
}

impl SetSamples {
    pub fn all_points(&self) -> Vec<C64> {
        self.interior
            .iter()
            .copied()
            .chain(self.curves.iter().flat_map(|c| c.points.iter().copied()))
            .collect()
    }

    /// Values of `f` at every point, plus tangential derivatives along curves.
    pub fn fit_samples<F: Fn(C64) -> C64>(&self, f: F, derivatives: bool) -> FitSamples {
        let mut s = FitSamples::from_fn(&self.all_points(), &f);
        if derivatives {
            for c in &self.curves {
                s = s.with_tangential(c, &f);
            }
        }
        s
    }
}

/// Samples `S` with `per_curve` points on every boundary component and arc
/// and an `grid × grid` lattice over each island's bounding box.
pub fn sample_set(set: &AdmissibleSet, per_curve: usize, grid: usize) -> SetSamples {
    let mut curves = Vec::new();
    let mut interior = Vec::new();
    for isl in &set.islands {
        for j in 0..isl.n_boundaries() {
            if let Ok(s) = crate::geometry::sample_curve(isl.boundary(j), per_curve) {
                curves.push(s);
            }
        }
        let poly = isl.boundary_poly(0);
        let (mut lo, mut hi) = (c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for z in &poly.points {
            lo = c64(lo.re.min(z.re), lo.im.min(z.im));
            hi = c64(hi.re.max(z.re), hi.im.max(z.im));
        }
        for i in 0..grid {
            for k in 0..grid {
                let z = lo
                    + c64(
                        (hi.re - lo.re) * (i as f64 + 0.5) / grid as f64,
                        (hi.im - lo.im) * (k as f64 + 0.5) / grid as f64,
                    );
                if isl.contains(z) {
                    interior.push(z);
                }
            }
        }
    }
    for a in &set.arcs {
        if let Ok(s) = crate::geometry::sample_curve(&a.curve, per_curve) {
            curves.push(s);
        }
    }
    SetSamples { interior, curves }
}
