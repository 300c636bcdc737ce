//! Two-step partial normal form `β/h = dw − y dz + Σ c_jk ζ_k dζ_j + β̃`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::arens::arens_identity_on;
use super::{contact_check, ArensConfig, ArensSolution, ContactError, ContactForm, Form, SampleGrid, ScalarFn};
use crate::approx::{complement_anchors, sample_set};
use crate::geometry::{AdmissibleSet, Island};
use crate::{c64, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormConfig {
    pub per_curve: usize,
    pub grid: usize,
    /// Relative floor for a coordinate pivot; below it the Arens identity is used.
    pub pivot_floor: f64,
    pub axis_tol: f64,
    pub contact_threshold: f64,
    /// Fibre radius of the check grid as a fraction of `ρ`.
    pub fiber_fraction: f64,
    pub random_fiber: usize,
    pub seed: u64,
    /// Step of the base-derivative stencils.
    pub stencil: f64,
    pub arens: ArensConfig,
}

impl Default for NormalFormConfig {
    fn default() -> Self {
        Self {
            per_curve: 48,
            grid: 8,
            pivot_floor: 1e-3,
            axis_tol: 1e-9,
            contact_threshold: super::CONTACT_THRESHOLD,
            fiber_fraction: 0.5,
            random_fiber: 8,
            seed: 7,
            stencil: 1e-3,
            arens: ArensConfig::default(),
        }
    }
}

/// How a row `r(p)` is completed to an invertible matrix.
#[derive(Clone)]
enum Completion {
    /// Coordinate `j` with `r_j` nonvanishing on `S`.
    Pivot(usize),
    /// Arens multipliers `g` with `r·g = 1`; coordinate `pivot` is dropped
    /// from the kernel columns.
    Arens { sol: Arc<ArensSolution>, pivot: usize },
}

impl Completion {
    /// First column `u` with `r·u = r_j` (step one) or `r·u = −1` (step two);
    /// the remaining columns span the kernel of `r`.
    fn matrix(&self, p: C64, r: &[C64], second: bool) -> DMatrix<C64> {
        let d = r.len();
        let mut m = DMatrix::<C64>::zeros(d, d);
        match self {
            Completion::Pivot(j) => {
                let j = *j;
                m[(j, 0)] = if second { -1.0 / r[j] } else { c64(1.0, 0.0) };
                let mut col = 1;
                for k in (0..d).filter(|&k| k != j) {
                    m[(k, col)] = c64(1.0, 0.0);
                    m[(j, col)] = -r[k] / r[j];
                    col += 1;
                }
            }
            Completion::Arens { sol, pivot } => {
                let g = sol.eval_all(p);
                let s = if second { -1.0 } else { 1.0 };
                for i in 0..d {
                    m[(i, 0)] = g[i] * s;
                }
                let mut col = 1;
                for k in (0..d).filter(|k| k != pivot) {
                    m[(k, col)] = c64(1.0, 0.0);
                    for i in 0..d {
                        m[(i, col)] -= g[i] * r[k];
                    }
                    col += 1;
                }
            }
        }
        m
    }

    fn describe(&self, names: &[String]) -> String {
        match self {
            Completion::Pivot(j) => format!("pivot on {}", names[*j]),
            Completion::Arens { sol, pivot } => format!(
                "Bezout multipliers{} dropping {}",
                if sol.constant { " (constant)" } else { "" },
                names[*pivot]
            ),
        }
    }
}

fn stencil<F: Fn(C64) -> DMatrix<C64>>(f: F, p: C64, h: f64) -> DMatrix<C64> {
    let d = c64(h, 0.0);
    let eight = c64(8.0, 0.0);
    (f(p - d * 2.0) - f(p - d) * eight + f(p + d) * eight - f(p + d * 2.0)) / c64(12.0 * h, 0.0)
}

/// Fibre-linear coordinate change `ζ = M(p) ζ̂` with `M = B·D`.
struct Change {
    form: Arc<dyn Form>,
    dim: usize,
    step1: Completion,
    step2: Option<Completion>,
    delta: f64,
    constant: Option<(DMatrix<C64>, DMatrix<C64>)>,
}

impl Change {
    fn axis_row(&self, p: C64) -> Vec<C64> {
        let c = self.form.coeffs(p, &vec![C64::default(); self.dim]);
        c[1..].to_vec()
    }

    fn b(&self, p: C64) -> DMatrix<C64> {
        self.step1.matrix(p, &self.axis_row(p), false)
    }

    /// Linear coefficients `b_j` of the `dz`-coefficient of `β/h` after step one.
    fn b_linear(&self, p: C64) -> Vec<C64> {
        let zero = vec![C64::default(); self.dim];
        let a = self.axis_row(p);
        let bm = self.step1.matrix(p, &a, false);
        let db = stencil(|q| self.b(q), p, self.delta);
        let jac = self.form.jacobian(p, &zero);
        let kappa: C64 = (0..self.dim).map(|i| a[i] * bm[(i, 0)]).sum();
        (0..self.dim)
            .map(|j| {
                let mut v = C64::default();
                for i in 0..self.dim {
                    v += jac[0][1 + i] * bm[(i, j)] + a[i] * db[(i, j)];
                }
                v / kappa
            })
            .collect()
    }

    fn bm(&self, p: C64) -> (DMatrix<C64>, DMatrix<C64>) {
        if let Some((b, m)) = &self.constant {
            return (b.clone(), m.clone());
        }
        let b = self.b(p);
        let Some(step2) = &self.step2 else {
            return (b.clone(), b);
        };
        let lin = self.b_linear(p);
        let c = step2.matrix(p, &lin[1..], true);
        let mut d = DMatrix::<C64>::zeros(self.dim, self.dim);
        d[(0, 0)] = c64(1.0, 0.0);
        for i in 1..self.dim {
            d[(i, 0)] = lin[0] * c[(i - 1, 0)];
            for k in 1..self.dim {
                d[(i, k)] = c[(i - 1, k - 1)];
            }
        }
        let m = &b * d;
        (b, m)
    }

    fn full(&self, p: C64) -> (DMatrix<C64>, DMatrix<C64>, DMatrix<C64>) {
        let (b, m) = self.bm(p);
        let dm = if self.constant.is_some() {
            DMatrix::zeros(self.dim, self.dim)
        } else {
            stencil(|q| self.bm(q).1, p, self.delta)
        };
        (b, m, dm)
    }
}

/// The reduced form `γ = (1/h)·M^*β` in the coordinates `ζ̂`.
#[derive(Clone)]
pub struct ReducedForm {
    change: Arc<Change>,
    smoothness: u32,
}

impl std::fmt::Debug for ReducedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReducedForm")
            .field("n", &self.n())
            .field("constant_change", &self.change.constant.is_some())
            .finish()
    }
}

struct Parts {
    coeffs: Vec<C64>,
    orig: Vec<C64>,
    b: DMatrix<C64>,
    m: DMatrix<C64>,
    dm: DMatrix<C64>,
    zeta: Vec<C64>,
    h: C64,
}

impl ReducedForm {
    fn parts(&self, p: C64, zh: &[C64]) -> Parts {
        let ch = &self.change;
        let (b, m, dm) = ch.full(p);
        let zv = DVector::from_column_slice(zh);
        let zeta: Vec<C64> = (&m * &zv).iter().copied().collect();
        let orig = ch.form.coeffs(p, &zeta);
        let h: C64 = (0..ch.dim).map(|i| orig[1 + i] * b[(i, 0)]).sum();
        let dmz = &dm * &zv;
        let mut coeffs = vec![C64::default(); ch.dim + 1];
        let mut cz = orig[0];
        for i in 0..ch.dim {
            cz += orig[1 + i] * dmz[i];
        }
        coeffs[0] = cz / h;
        for k in 0..ch.dim {
            let mut v = C64::default();
            for i in 0..ch.dim {
                v += orig[1 + i] * m[(i, k)];
            }
            coeffs[1 + k] = v / h;
        }
        Parts {
            coeffs,
            orig,
            b,
            m,
            dm,
            zeta,
            h,
        }
    }

    /// The divisor `h`: the `dw`-coefficient after the first change.
    pub fn h(&self, p: C64, zh: &[C64]) -> C64 {
        self.parts(p, zh).h
    }

    /// `M(p)`.
    pub fn change_matrix(&self, p: C64) -> DMatrix<C64> {
        self.change.bm(p).1
    }

    /// `∂M/∂z (p)`.
    pub fn change_derivative(&self, p: C64) -> DMatrix<C64> {
        self.change.full(p).2
    }

    pub fn is_constant_change(&self) -> bool {
        self.change.constant.is_some()
    }

    /// Original fibre coordinates `ζ = M(p) ζ̂`.
    pub fn to_original(&self, p: C64, zh: &[C64]) -> Vec<C64> {
        self.parts(p, zh).zeta
    }

    /// Original fibre tangent `dζ/ds = (∂M/∂z)ζ̂ ż + M dζ̂/ds`.
    pub fn original_tangent(&self, p: C64, dz: C64, zh: &[C64], dzh: &[C64]) -> Vec<C64> {
        let (_, m, dm) = self.change.full(p);
        let a = &dm * DVector::from_column_slice(zh) * dz + &m * DVector::from_column_slice(dzh);
        a.iter().copied().collect()
    }

    pub fn original(&self) -> &Arc<dyn Form> {
        &self.change.form
    }
}

impl Form for ReducedForm {
    fn n(&self) -> usize {
        self.change.dim / 2
    }

    fn rho(&self) -> f64 {
        self.change.form.rho()
    }

    fn smoothness(&self) -> u32 {
        self.smoothness
    }

    fn coeffs(&self, p: C64, zeta: &[C64]) -> Vec<C64> {
        self.parts(p, zeta).coeffs
    }

    fn jacobian(&self, p: C64, zeta: &[C64]) -> Vec<Vec<C64>> {
        let dim = self.change.dim;
        let pt = self.parts(p, zeta);
        let oj = self.change.form.jacobian(p, &pt.zeta);
        let dmz = &pt.dm * DVector::from_column_slice(zeta);
        // ∂c_i/∂ζ̂_m = Σ_l ∂c_i/∂ζ_l · M_lm.
        let dc = |i: usize, mm: usize| -> C64 { (0..dim).map(|l| oj[i][1 + l] * pt.m[(l, mm)]).sum() };
        let mut jac = vec![vec![C64::default(); dim + 1]; dim + 1];
        for mm in 0..dim {
            let dh: C64 = (0..dim).map(|i| dc(1 + i, mm) * pt.b[(i, 0)]).sum();
            let mut dnz = dc(0, mm);
            for i in 0..dim {
                dnz += dc(1 + i, mm) * dmz[i] + pt.orig[1 + i] * pt.dm[(i, mm)];
            }
            jac[0][1 + mm] = (dnz - pt.coeffs[0] * dh) / pt.h;
            for k in 0..dim {
                let dn: C64 = (0..dim).map(|i| dc(1 + i, mm) * pt.m[(i, k)]).sum();
                jac[1 + k][1 + mm] = (dn - pt.coeffs[1 + k] * dh) / pt.h;
            }
        }
        let delta = self.change.delta;
        let base = stencil(
            |q| DMatrix::from_column_slice(dim + 1, 1, &self.coeffs(q, zeta)),
            p,
            delta,
        );
        for k in 0..=dim {
            jac[k][0] = base[(k, 0)];
        }
        jac
    }
}

/// Term classes of the remainder `β̃`, bucketed by leading monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermClass {
    /// `y dζ_j`, `j ≥ 3`.
    YDzeta,
    /// `ζ_k dy`, `k ≠ y` (including `w dy`).
    ZetaDy,
    /// `O(|ζ|) dw`.
    Dw,
    /// `O(|ζ|²) dz`.
    DzQuadratic,
    /// `c_jk ζ_k dζ_j` for `j ≥ 3`, `k ≠ y`.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualTerm {
    pub class: TermClass,
    /// Index of the differential (`0 = dz`, `1 = dw`, `2 = dy`, …).
    pub differential: usize,
    /// Fibre variable of a linear term (`0 = w`, `1 = y`, …).
    pub variable: Option<usize>,
    /// Largest modulus on the construction grid.
    pub max_abs: f64,
}

impl ResidualTerm {
    /// Coefficient function: the linear coefficient at `(p, 0)` for linear
    /// classes, the remainder `γ_w − 1` or `γ_z + y` otherwise.
    pub fn eval(&self, form: &ReducedForm, p: C64, zh: &[C64]) -> C64 {
        match (self.class, self.variable) {
            (TermClass::Dw, _) => form.coeffs(p, zh)[1] - 1.0,
            (TermClass::DzQuadratic, _) => form.coeffs(p, zh)[0] + zh[1],
            (_, Some(v)) => form.jacobian(p, &vec![C64::default(); zh.len()])[self.differential][1 + v],
            _ => C64::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormalFormResult {
    pub reduced: ReducedForm,
    pub step1: String,
    pub step2: String,
    pub constant_change: bool,
    /// Largest deviation of `γ` from `dw` on `ζ̂ = 0` over the construction samples.
    pub axis_residual: f64,
    /// Largest deviation of `∂γ_z/∂ζ̂` from `−dy`-selection at `ζ̂ = 0`.
    pub linear_residual: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub contact_min: f64,
    pub residual_terms: Vec<ResidualTerm>,
    /// `(p, M(p))` over the construction samples.
    pub change_samples: Vec<(C64, DMatrix<C64>)>,
    pub smoothness_in: u32,
    pub smoothness_out: u32,
}

/// Axis residuals `(|γ − dw| on ζ̂ = 0, |∂γ_z/∂ζ̂ + e_y|)` at `p`.
pub fn axis_defects(form: &dyn Form, p: C64) -> (f64, f64) {
    let dim = form.dim() - 1;
    let zero = vec![C64::default(); dim];
    let c = form.coeffs(p, &zero);
    let mut axis = (c[1] - 1.0).norm().max(c[0].norm());
    for v in &c[2..] {
        axis = axis.max(v.norm());
    }
    let jac = form.jacobian(p, &zero);
    let mut lin = 0.0f64;
    for j in 0..dim {
        let expect = if j == 1 { -1.0 } else { 0.0 };
        lin = lin.max((jac[0][1 + j] - expect).norm());
    }
    (axis, lin)
}

/// Zeros of `f` inside the island counted by the argument principle on its
/// positively oriented boundary; `None` if `f` nearly vanishes there.
pub fn island_zero_count(f: &dyn Fn(C64) -> C64, isl: &Island) -> Option<i64> {
    let mut total = 0.0;
    for j in 0..isl.n_boundaries() {
        let c = isl.boundary(j);
        let mut m = 512;
        loop {
            let vals: Vec<C64> = (0..=m).map(|k| f(c.point_at(k as f64 / m as f64))).collect();
            if vals.iter().any(|v| v.norm() == 0.0 || !v.norm().is_finite()) {
                return None;
            }
            let steps: Vec<f64> = vals.windows(2).map(|w| (w[1] / w[0]).arg()).collect();
            if steps.iter().all(|d| d.abs() < 0.5) || m >= 1 << 15 {
                total += steps.iter().sum::<f64>();
                break;
            }
            m *= 4;
        }
    }
    Some((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

fn zero_free(f: &dyn Fn(C64) -> C64, set: &AdmissibleSet) -> bool {
    set.islands.iter().all(|isl| island_zero_count(f, isl) == Some(0))
}

/// Coordinate `j` usable as a pivot: bounded away from zero on the samples
/// and without zeros inside any island. Coordinate 0 is preferred.
fn choose_pivot(rows: &[Vec<C64>], floor: f64, f: &dyn Fn(C64, usize) -> C64, set: &AdmissibleSet) -> Option<usize> {
    let d = rows.first()?.len();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter().map(|x| x.norm()))
        .fold(0.0, f64::max);
    let mins: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j].norm()).fold(f64::INFINITY, f64::min))
        .collect();
    let mut order: Vec<usize> = (1..d).collect();
    order.sort_by(|&a, &b| mins[b].total_cmp(&mins[a]));
    order.insert(0, 0);
    order
        .into_iter()
        .find(|&j| mins[j] >= floor * scale && zero_free(&|p| f(p, j), set))
}

fn common_zero(rows: &[Vec<C64>], pts: &[C64], floor: f64) -> Result<(), ContactError> {
    for (r, &p) in rows.iter().zip(pts) {
        let v: f64 = r.iter().map(|x| x.norm_sqr()).sum();
        if !(v >= floor) {
            return Err(ContactError::CommonZero { at: p, value: v });
        }
    }
    Ok(())
}

fn arens_completion(
    fs: Vec<ScalarFn>,
    samples: &crate::approx::SetSamples,
    anchors: &[C64],
    cfg: &ArensConfig,
    set: &AdmissibleSet,
) -> Result<Completion, ContactError> {
    let sol = arens_identity_on(fs, samples, anchors, cfg, Some(set))?;
    let pts = samples.all_points();
    let d = sol.len();
    let mins: Vec<f64> = (0..d)
        .map(|j| pts.iter().map(|&p| sol.eval(j, p).norm()).fold(f64::INFINITY, f64::min))
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| mins[b].total_cmp(&mins[a]));
    let pivot = order
        .into_iter()
        .find(|&j| mins[j] > cfg.floor && zero_free(&|p| sol.eval(j, p), set))
        .ok_or(ContactError::RankDrop {
            sample: 0,
            sigma: mins.iter().copied().fold(0.0, f64::max),
        })?;
    Ok(Completion::Arens {
        sol: Arc::new(sol),
        pivot,
    })
}

/// Expression-form entry point.
pub fn normal_form(form: &ContactForm, set: &AdmissibleSet, cfg: &NormalFormConfig) -> Result<NormalFormResult, ContactError> {
    normal_form_dyn(Arc::new(form.clone()), set, cfg)
}

/// Step one makes `β = κ·dw` along `S × 0` by a pivot or Bezout completion of
/// the fibre part of `β`; after division by the `dw`-coefficient `h`, step
/// two completes the linear part of the `dz`-coefficient so that it becomes
/// `−y`.
pub fn normal_form_dyn(
    form: Arc<dyn Form>,
    set: &AdmissibleSet,
    cfg: &NormalFormConfig,
) -> Result<NormalFormResult, ContactError> {
    let n = form.n();
    let dim = 2 * n;
    let samples = sample_set(set, cfg.per_curve, cfg.grid);
    let anchors = complement_anchors(set);
    let pts = samples.all_points();
    let grid = SampleGrid::ball(pts.clone(), n, form.rho() * cfg.fiber_fraction, cfg.random_fiber, cfg.seed);
    let contact_min = contact_check(form.as_ref(), &grid, cfg.contact_threshold)?;

    let zero = vec![C64::default(); dim];
    let mut worst = (0.0, C64::default());
    for &p in &pts {
        let v = form.coeffs(p, &zero)[0].norm();
        if v > worst.0 {
            worst = (v, p);
        }
    }
    if worst.0 > cfg.axis_tol {
        return Err(ContactError::NotLegendrianAxis { at: worst.1, value: worst.0 });
    }

    let names: Vec<String> = (1..=dim).map(super::differential_name).map(|s| s[1..].to_string()).collect();
    let rows: Vec<Vec<C64>> = pts.iter().map(|&p| form.coeffs(p, &zero)[1..].to_vec()).collect();
    common_zero(&rows, &pts, cfg.arens.floor)?;
    let axis_fn = |p: C64, j: usize| form.coeffs(p, &zero)[1 + j];
    let step1 = match choose_pivot(&rows, cfg.pivot_floor, &axis_fn, set) {
        Some(j) => Completion::Pivot(j),
        None => {
            let fs: Vec<ScalarFn> = (0..dim)
                .map(|j| {
                    let f = form.clone();
                    let z = zero.clone();
                    Arc::new(move |p: C64| f.coeffs(p, &z)[1 + j]) as ScalarFn
                })
                .collect();
            arens_completion(fs, &samples, &anchors, &cfg.arens, set)?
        }
    };

    let stage1 = Arc::new(Change {
        form: form.clone(),
        dim,
        step1: step1.clone(),
        step2: None,
        delta: cfg.stencil,
        constant: None,
    });
    let lin_rows: Vec<Vec<C64>> = pts.iter().map(|&p| stage1.b_linear(p)[1..].to_vec()).collect();
    common_zero(&lin_rows, &pts, cfg.arens.floor)?;
    let lin_fn = |p: C64, j: usize| stage1.b_linear(p)[1 + j];
    let step2 = match choose_pivot(&lin_rows, cfg.pivot_floor, &lin_fn, set) {
        Some(j) => Completion::Pivot(j),
        None => {
            let fs: Vec<ScalarFn> = (0..dim - 1)
                .map(|j| {
                    let s = stage1.clone();
                    Arc::new(move |p: C64| s.b_linear(p)[1 + j]) as ScalarFn
                })
                .collect();
            arens_completion(fs, &samples, &anchors, &cfg.arens, set)?
        }
    };

    let mut change = Change {
        form: form.clone(),
        dim,
        step1,
        step2: Some(step2),
        delta: cfg.stencil,
        constant: None,
    };
    let change_samples: Vec<(C64, DMatrix<C64>)> = pts.iter().map(|&p| (p, change.bm(p).1)).collect();
    let (b0, m0) = change.bm(pts[0]);
    let constant = pts.iter().all(|&p| {
        let (b, m) = change.bm(p);
        (b - &b0).camax() <= 1e-13 && (m - &m0).camax() <= 1e-13
    });
    if constant {
        change.constant = Some((b0, m0));
    }
    let step1_desc = change.step1.describe(&names);
    let step2_desc = change.step2.as_ref().unwrap().describe(&names[1..]);
    let reduced = ReducedForm {
        change: Arc::new(change),
        smoothness: form.smoothness().saturating_sub(2),
    };

    let (mut h_min, mut h_max) = (f64::INFINITY, 0.0f64);
    for &p in &grid.base {
        for z in &grid.fiber {
            let h = reduced.h(p, z).norm();
            h_min = h_min.min(h);
            h_max = h_max.max(h);
        }
    }
    if !(h_min > cfg.arens.floor) {
        return Err(ContactError::CommonZero { at: pts[0], value: h_min });
    }

    let mut axis_residual = 0.0f64;
    let mut linear_residual = 0.0f64;
    let mut lin_max = vec![vec![0.0f64; dim]; dim + 1];
    for &p in &pts {
        let (a, l) = axis_defects(&reduced, p);
        axis_residual = axis_residual.max(a);
        linear_residual = linear_residual.max(l);
        let jac = reduced.jacobian(p, &zero);
        for k in 0..=dim {
            for v in 0..dim {
                lin_max[k][v] = lin_max[k][v].max(jac[k][1 + v].norm());
            }
        }
    }

    let mut residual_terms = Vec::new();
    let tiny = 1e-14;
    for k in 2..=dim {
        for v in 0..dim {
            let class = match (k, v) {
                (2, 1) => continue,
                (2, _) => TermClass::ZetaDy,
                (_, 1) => TermClass::YDzeta,
                _ => TermClass::Linear,
            };
            if lin_max[k][v] > tiny {
                residual_terms.push(ResidualTerm {
                    class,
                    differential: k,
                    variable: Some(v),
                    max_abs: lin_max[k][v],
                });
            }
        }
    }
    let (mut dw_max, mut dz_max) = (0.0f64, 0.0f64);
    for &p in &grid.base {
        for z in &grid.fiber {
            let c = reduced.coeffs(p, z);
            dw_max = dw_max.max((c[1] - 1.0).norm());
            dz_max = dz_max.max((c[0] + z[1]).norm());
        }
    }
    for (class, k, m) in [(TermClass::Dw, 1, dw_max), (TermClass::DzQuadratic, 0, dz_max)] {
        if m > tiny {
            residual_terms.push(ResidualTerm {
                class,
                differential: k,
                variable: None,
                max_abs: m,
            });
        }
    }

    Ok(NormalFormResult {
        reduced,
        step1: step1_desc,
        step2: step2_desc,
        constant_change: constant,
        axis_residual,
        linear_residual,
        h_min,
        h_max,
        contact_min,
        residual_terms,
        change_samples,
        smoothness_in: form.smoothness(),
        smoothness_out: form.smoothness().saturating_sub(2),
    })
}
