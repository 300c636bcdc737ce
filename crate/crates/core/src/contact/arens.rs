//! Bezout identities `Σ f_i G_i = 1` with holomorphic `G_i`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::ContactError;
use crate::approx::{complement_anchors, holomorphic_approximate, sample_set, FitConfig, RationalFunction, SetSamples};
use crate::geometry::AdmissibleSet;
use crate::{c64, C64};

pub type ScalarFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArensConfig {
    /// Lower bound for `Σ|f_i|²` and `|h|` on the samples.
    pub floor: f64,
    pub per_curve: usize,
    pub grid: usize,
    pub fit: FitConfig,
    /// Residual below which constant multipliers are accepted.
    pub constant_tol: f64,
}

impl Default for ArensConfig {
    fn default() -> Self {
        Self {
            floor: 1e-8,
            per_curve: 96,
            grid: 12,
            fit: FitConfig {
                fit_derivatives: false,
                ..FitConfig::default()
            },
            constant_tol: 1e-12,
        }
    }
}

/// `G_i = g̃_i / h` with `h = Σ f_j g̃_j`, or constant multipliers when they
/// already solve the identity.
#[derive(Clone)]
pub struct ArensSolution {
    pub approximants: Vec<RationalFunction>,
    f: Vec<ScalarFn>,
    pub constant: bool,
    /// `max |Σ f_i G_i − 1|` on the samples.
    pub residual: f64,
    pub min_h: f64,
}

impl std::fmt::Debug for ArensSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArensSolution")
            .field("approximants", &self.approximants)
            .field("constant", &self.constant)
            .field("residual", &self.residual)
            .field("min_h", &self.min_h)
            .finish()
    }
}

impl ArensSolution {
    pub fn len(&self) -> usize {
        self.approximants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.approximants.is_empty()
    }

    pub fn h(&self, z: C64) -> C64 {
        if self.constant {
            return c64(1.0, 0.0);
        }
        self.f
            .iter()
            .zip(&self.approximants)
            .map(|(f, g)| f(z) * g.eval(z))
            .sum()
    }

    pub fn eval(&self, i: usize, z: C64) -> C64 {
        self.approximants[i].eval(z) / self.h(z)
    }

    pub fn eval_all(&self, z: C64) -> Vec<C64> {
        let h = self.h(z);
        self.approximants.iter().map(|g| g.eval(z) / h).collect()
    }

    /// `Σ f_i(z) G_i(z) − 1`.
    pub fn identity_defect(&self, z: C64) -> C64 {
        let g = self.eval_all(z);
        self.f.iter().zip(&g).map(|(f, g)| f(z) * g).sum::<C64>() - 1.0
    }
}

/// Samples `S` and solves the identity there.
pub fn arens_identity(fs: Vec<ScalarFn>, set: &AdmissibleSet, cfg: &ArensConfig) -> Result<ArensSolution, ContactError> {
    let samples = sample_set(set, cfg.per_curve, cfg.grid);
    arens_identity_on(fs, &samples, &complement_anchors(set), cfg, Some(set))
}

/// Local minimum of `g` over `S` by compass search from `start`.
pub fn refine_minimum(g: &dyn Fn(C64) -> f64, set: &AdmissibleSet, start: C64, step: f64) -> (f64, C64) {
    let mut best = (g(start), start);
    let mut h = step;
    let dirs = [c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0)];
    while h > 1e-12 * step.max(1.0) {
        let mut moved = false;
        for d in dirs {
            let z = best.1 + d * h;
            if set.contains(z) {
                let v = g(z);
                if v < best.0 {
                    best = (v, z);
                    moved = true;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best
}

pub fn arens_identity_on(
    fs: Vec<ScalarFn>,
    samples: &SetSamples,
    anchors: &[C64],
    cfg: &ArensConfig,
    set: Option<&AdmissibleSet>,
) -> Result<ArensSolution, ContactError> {
    let pts = samples.all_points();
    if pts.is_empty() || fs.is_empty() {
        return Err(ContactError::InvalidForm("no samples or no functions".into()));
    }
    let vals: Vec<Vec<C64>> = pts.iter().map(|&z| fs.iter().map(|f| f(z)).collect()).collect();
    let (mut worst, mut at) = vals
        .iter()
        .zip(&pts)
        .map(|(v, &z)| (v.iter().map(|x| x.norm_sqr()).sum::<f64>(), z))
        .fold((f64::INFINITY, C64::default()), |a, b| if b.0 < a.0 { b } else { a });
    if let Some(set) = set {
        let (lo, hi) = set.bounding_box();
        let sum = |z: C64| fs.iter().map(|f| f(z).norm_sqr()).sum::<f64>();
        (worst, at) = refine_minimum(&sum, set, at, 0.05 * (hi - lo).norm());
    }
    if worst < cfg.floor {
        return Err(ContactError::CommonZero { at, value: worst });
    }

    // Constant multipliers.
    let m = fs.len();
    let a = DMatrix::from_fn(pts.len(), m, |r, c| vals[r][c]);
    let rhs = DVector::from_element(pts.len(), c64(1.0, 0.0));
    if let Ok(x) = a.clone().svd(true, true).solve(&rhs, 1e-14) {
        let res = (&a * &x - &rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if res <= cfg.constant_tol {
            return Ok(ArensSolution {
                approximants: x.iter().map(|&c| RationalFunction::constant(c)).collect(),
                f: fs,
                constant: true,
                residual: res,
                min_h: 1.0,
            });
        }
    }

    let mut approximants = Vec::with_capacity(m);
    for i in 0..m {
        let target = |z: C64| {
            let v: Vec<C64> = fs.iter().map(|f| f(z)).collect();
            v[i].conj() / v.iter().map(|x| x.norm_sqr()).sum::<f64>()
        };
        let fit = holomorphic_approximate(&samples.fit_samples(target, false), anchors, &cfg.fit)?;
        approximants.push(fit.function);
    }
    let mut sol = ArensSolution {
        approximants,
        f: fs,
        constant: false,
        residual: 0.0,
        min_h: 0.0,
    };
    sol.min_h = pts.iter().map(|&z| sol.h(z).norm()).fold(f64::INFINITY, f64::min);
    if !(sol.min_h >= cfg.floor) {
        return Err(ContactError::ApproximationFailure { min_h: sol.min_h });
    }
    sol.residual = pts
        .iter()
        .map(|&z| sol.identity_defect(z).norm())
        .fold(0.0, f64::max);
    Ok(sol)
}
