//! Contact forms on the tube `S × ρB^{2n}`: contact and isotropy checks,
//! matrix completion, the Arens identity, the flat tube extension and the
//! two-step partial normal form.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::ApproxError;
use crate::expr::{Expr, ExprError, Var};
use crate::ode::LegendrianSample;
use crate::{c64, C64};

mod arens;
mod completion;
pub mod normal;

pub use arens::{arens_identity, ArensConfig, ArensSolution, ScalarFn};
pub use completion::{matrix_completion, tube_extension, CompletionConfig, FrameCompletion, TubeExtension};
pub use normal::{normal_form, normal_form_dyn, NormalFormConfig, NormalFormResult, ReducedForm, ResidualTerm, TermClass};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error(transparent)]
    Parse(#[from] ExprError),
    #[error("invalid contact form: {0}")]
    InvalidForm(String),
    #[error("contact condition fails: min |η∧(dη)^n| = {min:e} at z = {at}")]
    NotContact { min: f64, at: C64, fiber: Vec<C64> },
    #[error("sample has no tangent data")]
    MissingTangents,
    #[error("rank drop at sample {sample}: smallest singular value {sigma:e}")]
    RankDrop { sample: usize, sigma: f64 },
    #[error("closed-loop frame holonomy {defect:e} could not be repaired")]
    HolonomyMismatch { defect: f64 },
    #[error("functions have a common zero near z = {at} (Σ|f|² = {value:e})")]
    CommonZero { at: C64, value: f64 },
    #[error("approximate Bezout sum nearly vanishes: min |h| = {min_h:e}")]
    ApproximationFailure { min_h: f64 },
    #[error("S × 0 is not Legendrian: |dz-coefficient| = {value:e} at z = {at}")]
    NotLegendrianAxis { at: C64, value: f64 },
    #[error(transparent)]
    Approx(#[from] ApproxError),
}

/// A 1-form `c_z dz + c_w dw + c_y dy + Σ c_j dζ_j` on the tube, evaluable
/// with holomorphic partial derivatives.
pub trait Form: Send + Sync {
    /// Fibre half-dimension.
    fn n(&self) -> usize;
    fn rho(&self) -> f64;
    fn smoothness(&self) -> u32;
    /// Coefficients in the order `(dz, dw, dy, dζ₃, …)`.
    fn coeffs(&self, p: C64, zeta: &[C64]) -> Vec<C64>;
    /// `J[k][j] = ∂c_k/∂x_j` with `x₀ = z` and `x_j = ζ_j`.
    fn jacobian(&self, p: C64, zeta: &[C64]) -> Vec<Vec<C64>>;

    fn dim(&self) -> usize {
        2 * self.n() + 1
    }
}

/// Contact form given by expressions in `z, w, y, zeta3, …`.
#[derive(Debug, Clone)]
pub struct ContactForm {
    pub n: usize,
    pub rho: f64,
    pub smoothness: u32,
    sources: Vec<String>,
    coeffs: Vec<Expr>,
    grad: Vec<Vec<Expr>>,
    anti: Vec<Vec<Expr>>,
    /// Minimum contact value recorded by [`ContactForm::certify`].
    pub certificate: Option<f64>,
}

/// Name of the `k`-th differential: `dz`, `dw`, `dy`, `dzeta3`, ….
pub fn differential_name(k: usize) -> String {
    match k {
        0 => "dz".into(),
        1 => "dw".into(),
        2 => "dy".into(),
        _ => format!("dzeta{k}"),
    }
}

/// JSON shape `{"n": 1, "rho": 1.0, "coeffs": {"dz": "-y", "dw": "1"}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactFormJson {
    pub n: usize,
    pub rho: f64,
    pub coeffs: BTreeMap<String, String>,
    #[serde(default = "default_smoothness")]
    pub smoothness: u32,
}

fn default_smoothness() -> u32 {
    4
}

impl ContactForm {
    /// Builds a form from coefficient sources in the order `(dz, dw, dy, …)`;
    /// missing trailing entries are zero.
    pub fn new(n: usize, rho: f64, sources: &[&str]) -> Result<Self, ContactError> {
        if n == 0 {
            return Err(ContactError::InvalidForm("n must be at least 1".into()));
        }
        let dim = 2 * n + 1;
        if sources.len() > dim {
            return Err(ContactError::InvalidForm(format!("{} coefficients for dimension {dim}", sources.len())));
        }
        if !(rho > 0.0) {
            return Err(ContactError::InvalidForm("rho must be positive".into()));
        }
        let mut src: Vec<String> = sources.iter().map(|s| s.to_string()).collect();
        src.resize(dim, "0".into());
        let coeffs = src.iter().map(|s| Expr::parse(s)).collect::<Result<Vec<_>, _>>()?;
        for (k, e) in coeffs.iter().enumerate() {
            if let Some(j) = e.max_fiber_index() {
                if j >= 2 * n {
                    return Err(ContactError::InvalidForm(format!(
                        "coefficient of {} uses fibre coordinate {} beyond dimension {}",
                        differential_name(k),
                        j + 1,
                        2 * n
                    )));
                }
            }
        }
        let var = |j: usize| if j == 0 { Var::Base } else { Var::Fiber(j - 1) };
        let grad = coeffs
            .iter()
            .map(|c| (0..dim).map(|j| c.diff(var(j), false)).collect())
            .collect();
        let anti = coeffs
            .iter()
            .map(|c| (1..dim).map(|j| c.diff(var(j), true)).collect())
            .collect();
        Ok(Self {
            n,
            rho,
            smoothness: default_smoothness(),
            sources: src,
            coeffs,
            grad,
            anti,
            certificate: None,
        })
    }

    /// `dw − y dz − Σ_{j≥2} y_j dx_j` with `(x_j, y_j) = (ζ_{2j−1}, ζ_{2j})`.
    pub fn standard(n: usize) -> Self {
        let mut src = vec!["-y".to_string(), "1".into(), "0".into()];
        for j in 2..=n {
            src.push(format!("-zeta{}", 2 * j));
            src.push("0".into());
        }
        let refs: Vec<&str> = src.iter().map(String::as_str).collect();
        let mut f = Self::new(n.max(1), 1.0, &refs).expect("standard form parses");
        f.certificate = Some(1.0);
        f
    }

    pub fn from_json(j: &ContactFormJson) -> Result<Self, ContactError> {
        let dim = 2 * j.n + 1;
        let mut src = vec!["0".to_string(); dim];
        for (key, value) in &j.coeffs {
            let k = (0..dim)
                .find(|&k| differential_name(k) == *key || (k >= 3 && format!("dζ{k}") == *key))
                .ok_or_else(|| ContactError::InvalidForm(format!("unknown differential {key:?}")))?;
            src[k] = value.clone();
        }
        let refs: Vec<&str> = src.iter().map(String::as_str).collect();
        let mut f = Self::new(j.n, j.rho, &refs)?;
        f.smoothness = j.smoothness;
        Ok(f)
    }

    pub fn from_json_str(s: &str) -> Result<Self, ContactError> {
        let j: ContactFormJson =
            serde_json::from_str(s).map_err(|e| ContactError::InvalidForm(format!("json: {e}")))?;
        Self::from_json(&j)
    }

    pub fn to_json(&self) -> ContactFormJson {
        let coeffs = self
            .sources
            .iter()
            .enumerate()
            .filter(|(_, s)| s.trim() != "0")
            .map(|(k, s)| (differential_name(k), s.clone()))
            .collect();
        ContactFormJson {
            n: self.n,
            rho: self.rho,
            coeffs,
            smoothness: self.smoothness,
        }
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    /// Runs [`contact_check`] and stores the minimum on success.
    pub fn certify(&mut self, grid: &SampleGrid, threshold: f64) -> Result<f64, ContactError> {
        let m = contact_check(self, grid, threshold)?;
        self.certificate = Some(m);
        Ok(m)
    }

    /// Largest `|∂c_k/∂ζ̄_j|` on the grid.
    pub fn fiber_cr_residual(&self, grid: &SampleGrid) -> f64 {
        let mut worst = 0.0f64;
        for &p in &grid.base {
            for zeta in &grid.fiber {
                for row in &self.anti {
                    for e in row {
                        worst = worst.max(e.eval(p, zeta).norm());
                    }
                }
            }
        }
        worst
    }
}

impl Form for ContactForm {
    fn n(&self) -> usize {
        self.n
    }

    fn rho(&self) -> f64 {
        self.rho
    }

    fn smoothness(&self) -> u32 {
        self.smoothness
    }

    fn coeffs(&self, p: C64, zeta: &[C64]) -> Vec<C64> {
        self.coeffs.iter().map(|e| e.eval(p, zeta)).collect()
    }

    fn jacobian(&self, p: C64, zeta: &[C64]) -> Vec<Vec<C64>> {
        self.grad
            .iter()
            .map(|row| row.iter().map(|e| e.eval(p, zeta)).collect())
            .collect()
    }
}

/// Pfaffian of an antisymmetric matrix by expansion along the first row.
pub fn pfaffian(a: &[Vec<C64>]) -> C64 {
    let m = a.len();
    if m == 0 {
        return c64(1.0, 0.0);
    }
    if m % 2 == 1 {
        return C64::default();
    }
    let mut total = C64::default();
    for j in 1..m {
        if a[0][j] == C64::default() {
            continue;
        }
        let keep: Vec<usize> = (1..m).filter(|&k| k != j).collect();
        let minor: Vec<Vec<C64>> = keep.iter().map(|&r| keep.iter().map(|&c| a[r][c]).collect()).collect();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += a[0][j] * sign * pfaffian(&minor);
    }
    total
}

/// Coefficient of `η ∧ (dη)^n / n!` against `dz ∧ dw ∧ dy ∧ dζ₃ ∧ …`.
pub fn contact_value(form: &dyn Form, p: C64, zeta: &[C64]) -> C64 {
    let c = form.coeffs(p, zeta);
    let jac = form.jacobian(p, zeta);
    let dim = c.len();
    // Ω_{jk} = ∂_j c_k − ∂_k c_j.
    let omega: Vec<Vec<C64>> = (0..dim)
        .map(|j| (0..dim).map(|k| jac[k][j] - jac[j][k]).collect())
        .collect();
    let mut total = C64::default();
    for k in 0..dim {
        if c[k] == C64::default() {
            continue;
        }
        let keep: Vec<usize> = (0..dim).filter(|&i| i != k).collect();
        let minor: Vec<Vec<C64>> = keep.iter().map(|&r| keep.iter().map(|&s| omega[r][s]).collect()).collect();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += c[k] * sign * pfaffian(&minor);
    }
    total
}

/// Base points times fibre points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub base: Vec<C64>,
    pub fiber: Vec<Vec<C64>>,
}

/// Default acceptance threshold of [`contact_check`].
pub const CONTACT_THRESHOLD: f64 = 1e-6;

impl SampleGrid {
    /// Fibre points: the origin, `±radius` and `±i·radius` on every axis and
    /// `random` seeded points of the closed ball.
    pub fn ball(base: Vec<C64>, n: usize, radius: f64, random: usize, seed: u64) -> Self {
        let dim = 2 * n;
        let mut fiber = vec![vec![C64::default(); dim]];
        for j in 0..dim {
            for u in [c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0)] {
                let mut z = vec![C64::default(); dim];
                z[j] = u * radius;
                fiber.push(z);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..random {
            let v: Vec<C64> = (0..dim)
                .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
            let r = radius * rng.gen::<f64>().powf(1.0 / (2 * dim) as f64);
            fiber.push(v.iter().map(|z| z * (r / norm)).collect());
        }
        Self { base, fiber }
    }

    /// Only the zero section over `base`.
    pub fn axis(base: Vec<C64>, n: usize) -> Self {
        Self {
            base,
            fiber: vec![vec![C64::default(); 2 * n]],
        }
    }
}

/// Minimum modulus of the contact value over the grid with its location.
pub fn contact_min(form: &dyn Form, grid: &SampleGrid) -> (f64, C64, Vec<C64>) {
    let mut best = (f64::INFINITY, C64::default(), vec![]);
    for &p in &grid.base {
        for zeta in &grid.fiber {
            let v = contact_value(form, p, zeta).norm();
            if v < best.0 {
                best = (v, p, zeta.clone());
            }
        }
    }
    best
}

/// Minimum of `|η ∧ (dη)^n|` on the grid; `NotContact` below `threshold`.
pub fn contact_check(form: &dyn Form, grid: &SampleGrid, threshold: f64) -> Result<f64, ContactError> {
    let (min, at, fiber) = contact_min(form, grid);
    if !(min > threshold) {
        return Err(ContactError::NotContact { min, at, fiber });
    }
    Ok(min)
}

/// `max |β(f(p))(df·ṗ)| / |ṗ|` over the samples.
pub fn isotropy_residual(f: &LegendrianSample, form: &dyn Form) -> Result<f64, ContactError> {
    let m = f.z.len();
    if m == 0 || f.dz.len() != m || f.dfiber.len() != m || f.fiber.len() != m {
        return Err(ContactError::MissingTangents);
    }
    let mut worst = 0.0f64;
    for k in 0..m {
        let c = form.coeffs(f.z[k], &f.fiber[k]);
        let mut v = c[0] * f.dz[k];
        for (j, d) in f.dfiber[k].iter().enumerate() {
            v += c[j + 1] * d;
        }
        let speed = f.dz[k].norm();
        if speed == 0.0 {
            return Err(ContactError::MissingTangents);
        }
        worst = worst.max(v.norm() / speed);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
