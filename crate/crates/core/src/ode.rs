//! Integration of `dw = V(p, w, t) dz` along curves and over rectangles.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::Spray;
use crate::contact::Form;
use crate::geometry::CurveSamples;
use crate::{c64, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("solution leaves the w-disc of radius {radius} at s = {s:.6} (|w| = {w:e})")]
    Escape { s: f64, w: f64, radius: f64 },
    #[error("step size underflow at s = {s:.6} (h = {h:e})")]
    StepUnderflow { s: f64, h: f64 },
    #[error("integration orders disagree by {discrepancy:e} (tolerance {tol:e})")]
    CommutativityFailure { discrepancy: f64, tol: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// `V(p, w, t)`.
pub type RhsFn = Arc<dyn Fn(C64, C64, &[C64]) -> C64 + Send + Sync>;
/// `(y, ζ₃, …)` and their `p`-derivatives along the axis lift, given `(p, t)`.
pub type LiftFn = Arc<dyn Fn(C64, &[C64]) -> (Vec<C64>, Vec<C64>) + Send + Sync>;

/// Default global error budget per unit of `s`.
pub const DEFAULT_TOL: f64 = 1e-11;

/// Safety factor applied to sampled Lipschitz quotients.
pub const LIPSCHITZ_SAFETY: f64 = 1.5;

/// The equation `dw = V(p, w, t) dz` with its working box.
#[derive(Clone)]
pub struct LegendrianODE {
    rhs: RhsFn,
    lift: Option<LiftFn>,
    /// Bound on `|∂V/∂w|` over the box.
    pub lipschitz_c: f64,
    /// Radius of the w-disc `Δ`.
    pub w_radius: f64,
    /// Radius of the t-polydisc.
    pub t_radius: f64,
    /// Global error budget per unit of arclength fraction.
    pub tol: f64,
}

impl fmt::Debug for LegendrianODE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LegendrianODE")
            .field("lipschitz_c", &self.lipschitz_c)
            .field("w_radius", &self.w_radius)
            .field("t_radius", &self.t_radius)
            .field("tol", &self.tol)
            .field("lift", &self.lift.is_some())
            .finish()
    }
}

impl LegendrianODE {
    pub fn new<F>(rhs: F, lipschitz_c: f64, w_radius: f64) -> Self
    where
        F: Fn(C64, C64, &[C64]) -> C64 + Send + Sync + 'static,
    {
        Self {
            rhs: Arc::new(rhs),
            lift: None,
            lipschitz_c,
            w_radius,
            t_radius: f64::INFINITY,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_t_radius(mut self, r: f64) -> Self {
        self.t_radius = r;
        self
    }

    pub fn with_lift(mut self, lift: LiftFn) -> Self {
        self.lift = Some(lift);
        self
    }

    /// The equation obtained from a reduced form by inserting `y = y(p, t)`
    /// from the spray and `ζ′ = 0`:
    /// `V = −(c_z + c_y ∂_p y) / c_w` evaluated at `(p, w, y, 0)`.
    pub fn from_form(form: Arc<dyn Form>, spray: Arc<Spray>, w_radius: f64) -> Self {
        let n = form.n();
        let sp = spray.clone();
        let rhs = move |p: C64, w: C64, t: &[C64]| {
            let y = sp.eval(p, t);
            let dy = sp.deriv(p, t);
            let mut fiber = vec![C64::new(0.0, 0.0); 2 * n];
            fiber[0] = w;
            fiber[1] = y;
            let c = form.coeffs(p, &fiber);
            -(c[0] + c[2] * dy) / c[1]
        };
        let lift: LiftFn = Arc::new(move |p: C64, t: &[C64]| {
            let mut vals = vec![C64::new(0.0, 0.0); 2 * n - 1];
            let mut ders = vals.clone();
            vals[0] = spray.eval(p, t);
            ders[0] = spray.deriv(p, t);
            (vals, ders)
        });
        Self::new(rhs, 0.0, w_radius).with_lift(lift)
    }

    pub fn rhs(&self, p: C64, w: C64, t: &[C64]) -> C64 {
        (self.rhs)(p, w, t)
    }

    /// Largest `|V(p, w₁) − V(p, w₂)| / |w₁ − w₂|` over pairs of a polar
    /// grid in the w-disc at each base point.
    pub fn lipschitz_quotient(&self, points: &[C64], t: &[C64], rings: usize) -> f64 {
        let ws = disc_grid(self.w_radius, rings);
        points
            .par_iter()
            .map(|&p| {
                let vs: Vec<C64> = ws.iter().map(|&w| self.rhs(p, w, t)).collect();
                let mut q: f64 = 0.0;
                for i in 0..ws.len() {
                    for j in i + 1..ws.len() {
                        let d = (ws[i] - ws[j]).norm();
                        if d > 0.0 {
                            q = q.max((vs[i] - vs[j]).norm() / d);
                        }
                    }
                }
                q
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Sets `lipschitz_c` to the sampled quotient times [`LIPSCHITZ_SAFETY`].
    pub fn estimate_lipschitz(mut self, points: &[C64], t: &[C64], rings: usize) -> Self {
        self.lipschitz_c = LIPSCHITZ_SAFETY * self.lipschitz_quotient(points, t, rings);
        self
    }

    /// Whether `lipschitz_c` bounds the sampled quotient.
    pub fn lipschitz_verified(&self, points: &[C64], t: &[C64], rings: usize) -> bool {
        self.lipschitz_quotient(points, t, rings) <= self.lipschitz_c
    }

    fn check_t(&self, t: &[C64]) -> Result<(), OdeError> {
        let tn = t.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if tn > self.t_radius * (1.0 + 1e-12) {
            return Err(OdeError::InvalidInput(format!("|t|∞ = {tn} exceeds the polydisc radius {}", self.t_radius)));
        }
        if !(self.tol > 0.0) {
            return Err(OdeError::InvalidInput(format!("tolerance {} is not positive", self.tol)));
        }
        Ok(())
    }
}

fn disc_grid(radius: f64, rings: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0)];
    let rings = rings.max(1);
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        let m = 6 * r;
        for k in 0..m {
            out.push(C64::from_polar(rad, 2.0 * std::f64::consts::PI * k as f64 / m as f64));
        }
    }
    out
}

/// Stepping statistics of one integration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepReport {
    pub steps: usize,
    pub rejected: usize,
    /// Sum of the embedded local error estimates.
    pub local_error_sum: f64,
    /// Largest ratio of a step's error estimate to its budget.
    pub max_budget_ratio: f64,
    pub tol: f64,
}

impl StepReport {
    fn merge(&mut self, o: &StepReport) {
        self.steps += o.steps;
        self.rejected += o.rejected;
        self.local_error_sum += o.local_error_sum;
        self.max_budget_ratio = self.max_budget_ratio.max(o.max_budget_ratio);
    }
}

/// A sampled curve `p ↦ (w, y, ζ′)` with base and fibre tangents.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LegendrianSample {
    pub s: Vec<f64>,
    #[serde(with = "crate::complex_serde::vec")]
    pub z: Vec<C64>,
    /// `dz/ds`.
    #[serde(with = "crate::complex_serde::vec")]
    pub dz: Vec<C64>,
    /// Fibre coordinates `(w, y, ζ₃, …)` per sample.
    pub fiber: Vec<Vec<C64>>,
    /// Their `s`-derivatives.
    pub dfiber: Vec<Vec<C64>>,
    #[serde(with = "crate::complex_serde::vec")]
    pub t: Vec<C64>,
    pub report: StepReport,
    /// Propagated error bound for the terminal value.
    pub estimated_error: f64,
}

impl LegendrianSample {
    pub fn w(&self) -> Vec<C64> {
        self.fiber.iter().map(|f| f[0]).collect()
    }

    pub fn terminal(&self) -> C64 {
        self.fiber.last().map(|f| f[0]).unwrap_or_default()
    }

    /// CSV dump: a header row with `t` and the tolerance, then columns
    /// `s, Re z, Im z, Re w, Im w, Re y, Im y, …`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let ts: Vec<String> = self.t.iter().map(|x| format!("{}{:+}i", x.re, x.im)).collect();
        out.push_str(&format!("# t=[{}] tol={:e} estimated_error={:e}\n", ts.join(" "), self.report.tol, self.estimated_error));
        let dim = self.fiber.first().map(Vec::len).unwrap_or(1);
        let mut cols = vec!["s".to_string(), "re_z".into(), "im_z".into()];
        for j in 0..dim {
            let name = crate::contact::differential_name(j + 1);
            let name = &name[1..];
            cols.push(format!("re_{name}"));
            cols.push(format!("im_{name}"));
        }
        out.push_str(&cols.join(","));
        out.push('\n');
        for k in 0..self.s.len() {
            let mut row = vec![format!("{}", self.s[k]), format!("{}", self.z[k].re), format!("{}", self.z[k].im)];
            for v in &self.fiber[k] {
                row.push(format!("{}", v.re));
                row.push(format!("{}", v.im));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

// Dormand–Prince 5(4).
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MIN_STEP: f64 = 1e-14;

/// Integrates `y′ = f(τ, y)` from `a` to `b > a` with per-step budget
/// `rate · h`. `h` carries the proposed step in and out. `guard` sees each
/// accepted point.
fn dopri<F, G>(f: F, a: f64, b: f64, y0: C64, rate: f64, h: &mut f64, stats: &mut StepReport, guard: G) -> Result<C64, OdeError>
where
    F: Fn(f64, C64) -> C64,
    G: Fn(f64, C64) -> Result<(), OdeError>,
{
    let span = b - a;
    if span <= 0.0 {
        return Ok(y0);
    }
    let mut t = a;
    let mut y = y0;
    let mut k = [C64::new(0.0, 0.0); 7];
    k[0] = f(t, y);
    let mut hp = h.min(span).max(MIN_STEP * span);
    loop {
        let last = t + hp >= b - 1e-15 * span;
        let step = if last { b - t } else { hp };
        for i in 1..7 {
            let mut acc = y;
            for j in 0..i {
                acc += k[j] * (A[i][j] * step);
            }
            k[i] = f(t + C[i] * step, acc);
        }
        let mut y5 = y;
        for j in 0..6 {
            y5 += k[j] * (A[6][j] * step);
        }
        let mut e = C64::new(0.0, 0.0);
        for j in 0..7 {
            e += k[j] * E[j];
        }
        let err = (e * step).norm();
        let budget = rate * step;
        if err.is_finite() && y5.is_finite() && err <= budget {
            stats.steps += 1;
            stats.local_error_sum += err;
            stats.max_budget_ratio = stats.max_budget_ratio.max(err / budget);
            t = if last { b } else { t + step };
            y = y5;
            k[0] = k[6];
            guard(t, y)?;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * (budget / err).powf(0.25)).clamp(0.2, 5.0) };
            if !last {
                hp = step * fac;
            } else {
                *h = hp.max(step * fac);
                return Ok(y);
            }
        } else {
            stats.rejected += 1;
            let fac = if err.is_finite() && err > 0.0 { (0.9 * (budget / err).powf(0.25)).clamp(0.2, 0.9) } else { 0.2 };
            hp = step * fac;
            if hp < MIN_STEP * span.max(1.0) {
                return Err(OdeError::StepUnderflow { s: t, h: hp });
            }
        }
    }
}

/// Solves `dw/ds = V(z(s), w, t) dz/ds`, `w(0) = w0`, along the sampled
/// curve, stepping each sample interval in its piece's own parameter.
/// Closed curves get a final sample at `s = 1`.
pub fn integrate_along_curve(ode: &LegendrianODE, curve: &CurveSamples, w0: C64, t: &[C64]) -> Result<LegendrianSample, OdeError> {
    ode.check_t(t)?;
    if w0.norm() > ode.w_radius {
        return Err(OdeError::Escape { s: 0.0, w: w0.norm(), radius: ode.w_radius });
    }
    let pieces = curve.curve.pieces();
    let np = curve.points.len();
    let mut out = LegendrianSample {
        t: t.to_vec(),
        report: StepReport { tol: ode.tol, ..Default::default() },
        ..Default::default()
    };
    let push = |out: &mut LegendrianSample, s: f64, z: C64, dz: C64, w: C64| {
        let v = ode.rhs(z, w, t);
        let mut fib = vec![w];
        let mut dfib = vec![v * dz];
        if let Some(lift) = &ode.lift {
            let (vals, ders) = lift(z, t);
            fib.extend(vals);
            dfib.extend(ders.into_iter().map(|d| d * dz));
        }
        out.s.push(s);
        out.z.push(z);
        out.dz.push(dz);
        out.fiber.push(fib);
        out.dfiber.push(dfib);
    };
    let mut w = w0;
    push(&mut out, curve.params[0], curve.points[0], curve.tangents[0], w);
    let mut h_s = 1.0 / curve.intervals.len().max(1) as f64;
    let mut stats = StepReport::default();
    for (k, iv) in curve.intervals.iter().enumerate() {
        let s0 = curve.params[k];
        let s1 = if k + 1 < np { curve.params[k + 1] } else { 1.0 };
        let ds = s1 - s0;
        let du = iv.u1 - iv.u0;
        if ds <= 0.0 || du <= 0.0 {
            continue;
        }
        let piece = &pieces[iv.piece];
        let scale = du / ds;
        let rate = ode.tol / scale;
        let mut h_u = h_s * scale;
        let radius = ode.w_radius;
        let guard = |u: f64, y: C64| {
            if y.norm() > radius {
                Err(OdeError::Escape { s: s0 + (u - iv.u0) / scale, w: y.norm(), radius })
            } else {
                Ok(())
            }
        };
        w = dopri(|u, y| ode.rhs(piece.eval(u), y, t) * piece.deriv(u), iv.u0, iv.u1, w, rate, &mut h_u, &mut stats, guard)
            .map_err(|e| match e {
                OdeError::StepUnderflow { s, h } => OdeError::StepUnderflow { s: s0 + (s - iv.u0) / scale, h: h / scale },
                e => e,
            })?;
        h_s = h_u / scale;
        let (z, dz) = if k + 1 < np { (curve.points[k + 1], curve.tangents[k + 1]) } else { (curve.points[0], curve.tangents[0]) };
        push(&mut out, s1, z, dz, w);
    }
    out.report.merge(&stats);
    let length = curve.curve.length();
    out.estimated_error = stats.local_error_sum * (ode.lipschitz_c * length).exp();
    Ok(out)
}

/// Axis-parallel rectangle `z₀ + [0, width] × i[0, height]` with an
/// `nx × ny` cell grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    #[serde(with = "crate::complex_serde")]
    pub origin: C64,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Rect {
    pub fn point(&self, i: usize, j: usize) -> C64 {
        self.origin + c64(self.width * i as f64 / self.nx as f64, self.height * j as f64 / self.ny as f64)
    }
}

/// Gridded solution over a rectangle, `w[i][j]` at [`Rect::point`]`(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSolution {
    pub rect: Rect,
    pub w: Vec<Vec<[f64; 2]>>,
    /// `max |w_xy − w_yx|` over the grid.
    pub discrepancy: f64,
    pub tolerance: f64,
    pub report: StepReport,
}

impl DomainSolution {
    pub fn at(&self, i: usize, j: usize) -> C64 {
        let [re, im] = self.w[i][j];
        c64(re, im)
    }
}

/// Solves on a rectangle by the two real flows `∂w/∂x = V`, `∂w/∂y = iV`,
/// once x-then-y and once y-then-x. The orders must agree within ten times
/// the global budget.
pub fn integrate_over_domain(ode: &LegendrianODE, rect: &Rect, w0: C64, t: &[C64]) -> Result<DomainSolution, OdeError> {
    ode.check_t(t)?;
    if rect.nx == 0 || rect.ny == 0 || !(rect.width > 0.0) || !(rect.height > 0.0) {
        return Err(OdeError::InvalidInput("degenerate rectangle".into()));
    }
    let span = rect.width + rect.height;
    let rate = ode.tol / span;
    let radius = ode.w_radius;
    let mut stats = StepReport { tol: ode.tol, ..Default::default() };
    let guard = |x: f64, y: C64| {
        if y.norm() > radius {
            Err(OdeError::Escape { s: x / span, w: y.norm(), radius })
        } else {
            Ok(())
        }
    };
    let xs: Vec<f64> = (0..=rect.nx).map(|i| rect.width * i as f64 / rect.nx as f64).collect();
    let ys: Vec<f64> = (0..=rect.ny).map(|j| rect.height * j as f64 / rect.ny as f64).collect();
    let i_unit = c64(0.0, 1.0);

    // x-flow along a row at height y, then y-flow up each column.
    let x_run = |y: f64, w: C64, stats: &mut StepReport| -> Result<Vec<C64>, OdeError> {
        let mut out = vec![w];
        let mut cur = w;
        let mut h = rect.width / rect.nx as f64;
        for i in 0..rect.nx {
            cur = dopri(|x, v| ode.rhs(rect.origin + c64(x, y), v, t), xs[i], xs[i + 1], cur, rate, &mut h, stats, guard)?;
            out.push(cur);
        }
        Ok(out)
    };
    let y_run = |x: f64, w: C64, stats: &mut StepReport| -> Result<Vec<C64>, OdeError> {
        let mut out = vec![w];
        let mut cur = w;
        let mut h = rect.height / rect.ny as f64;
        for j in 0..rect.ny {
            cur = dopri(|y, v| i_unit * ode.rhs(rect.origin + c64(x, y), v, t), ys[j], ys[j + 1], cur, rate, &mut h, stats, guard)?;
            out.push(cur);
        }
        Ok(out)
    };

    let bottom = x_run(0.0, w0, &mut stats)?;
    let mut xy = Vec::with_capacity(rect.nx + 1);
    for i in 0..=rect.nx {
        xy.push(y_run(xs[i], bottom[i], &mut stats)?);
    }
    let left = y_run(0.0, w0, &mut stats)?;
    let mut yx = vec![vec![C64::new(0.0, 0.0); rect.ny + 1]; rect.nx + 1];
    for j in 0..=rect.ny {
        let row = x_run(ys[j], left[j], &mut stats)?;
        for i in 0..=rect.nx {
            yx[i][j] = row[i];
        }
    }
    let mut discrepancy: f64 = 0.0;
    for i in 0..=rect.nx {
        for j in 0..=rect.ny {
            discrepancy = discrepancy.max((xy[i][j] - yx[i][j]).norm());
        }
    }
    let tolerance = 10.0 * ode.tol;
    if !(discrepancy <= tolerance) {
        return Err(OdeError::CommutativityFailure { discrepancy, tol: tolerance });
    }
    Ok(DomainSolution {
        rect: *rect,
        w: xy.iter().map(|col| col.iter().map(|v| [v.re, v.im]).collect()).collect(),
        discrepancy,
        tolerance,
        report: stats,
    })
}

/// Period value with its error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period {
    #[serde(with = "crate::complex_serde")]
    pub value: C64,
    pub estimated_error: f64,
}

/// `w(1) − w(0)` along a closed cycle starting at its base point.
pub fn period(ode: &LegendrianODE, cycle: &CurveSamples, w0: C64, t: &[C64]) -> Result<Period, OdeError> {
    if !cycle.closed {
        return Err(OdeError::InvalidInput("period needs a closed cycle".into()));
    }
    let sol = integrate_along_curve(ode, cycle, w0, t)?;
    Ok(Period {
        value: sol.terminal() - w0,
        estimated_error: sol.estimated_error,
    })
}

/// Period map entries for a basis or family, each integrated from `w = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodVector {
    #[serde(with = "crate::complex_serde::vec")]
    pub values: Vec<C64>,
    pub cycle_ids: Vec<usize>,
    #[serde(with = "crate::complex_serde::vec")]
    pub t: Vec<C64>,
    pub estimated_error: Vec<f64>,
}

impl PeriodVector {
    /// `‖𝒫(t) − t‖∞`.
    pub fn identity_defect(&self) -> f64 {
        self.values.iter().zip(&self.t).map(|(p, t)| (p - t).norm()).fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("period map failed on members {}", failures.iter().map(|(i, e)| format!("{i} ({e})")).collect::<Vec<_>>().join(", "))]
pub struct PeriodMapError {
    pub failures: Vec<(usize, OdeError)>,
}

/// Evaluates every member independently (in parallel). A closed member gives
/// its period, an arc its terminal value; both start from `w = 0`.
pub fn period_map(ode: &LegendrianODE, members: &[CurveSamples], t: &[C64]) -> Result<PeriodVector, PeriodMapError> {
    let results: Vec<Result<LegendrianSample, OdeError>> = members
        .par_iter()
        .map(|m| integrate_along_curve(ode, m, C64::new(0.0, 0.0), t))
        .collect();
    let mut values = Vec::with_capacity(members.len());
    let mut errs = Vec::with_capacity(members.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(sol) => {
                values.push(sol.terminal());
                errs.push(sol.estimated_error);
            }
            Err(e) => failures.push((i, e)),
        }
    }
    if !failures.is_empty() {
        return Err(PeriodMapError { failures });
    }
    Ok(PeriodVector {
        values,
        cycle_ids: (0..members.len()).collect(),
        t: t.to_vec(),
        estimated_error: errs,
    })
}

/// `c₀ · |w₀ − w₁| · e^{c |z − z₀|}`.
pub fn gronwall_bound(c: f64, c0: f64, dw0: f64, dist: f64) -> f64 {
    debug_assert!(c >= 0.0 && c0 >= 1.0 && dw0 >= 0.0 && dist >= 0.0);
    if dw0 == 0.0 {
        return 0.0;
    }
    c0 * dw0 * (c * dist).exp()
}

#[cfg(test)]
mod tests;
