//! Holomorphic fit of the reduced coefficients on the slice `ζ′ = 0`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{complement_anchors, holomorphic_approximate, sample_set, ApproxError, FitConfig, FitSamples, RationalFunction};
use crate::contact::Form;
use crate::geometry::AdmissibleSet;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberFitConfig {
    /// Total degree of the fibre Taylor expansion in `(w, y)`.
    pub degree: usize,
    /// Torus nodes per fibre variable for the Cauchy coefficients.
    pub torus: usize,
    /// Torus radius as a fraction of `ρ`.
    pub radius_fraction: f64,
    pub per_curve: usize,
    pub grid: usize,
    pub fit: FitConfig,
}

impl Default for FiberFitConfig {
    fn default() -> Self {
        Self {
            degree: 3,
            torus: 12,
            radius_fraction: 0.25,
            per_curve: 64,
            grid: 8,
            fit: FitConfig::default(),
        }
    }
}

/// Achieved residuals of one fitted Taylor coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFit {
    pub name: String,
    pub sup_residual: f64,
    pub derivative_residual: f64,
    pub cond: f64,
}

/// The approximated form `γ`: the `dz`, `dw`, `dy` coefficients are
/// polynomials in `(w, y)` with rational coefficients in `p`, fitted on the
/// slice `ζ′ = 0`; coefficients of `dζ₃, …` come from the reference form.
#[derive(Clone)]
pub struct FittedForm {
    n: usize,
    rho: f64,
    smoothness: u32,
    monomials: Vec<(u32, u32)>,
    fits: Vec<Vec<RationalFunction>>,
    reference: Arc<dyn Form>,
}

impl std::fmt::Debug for FittedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FittedForm")
            .field("n", &self.n)
            .field("monomials", &self.monomials.len())
            .finish()
    }
}

const NAMES: [&str; 3] = ["dz", "dw", "dy"];

impl FittedForm {
    pub fn monomials(&self) -> &[(u32, u32)] {
        &self.monomials
    }

    /// `(γ_z, γ_w, γ_y)` at `(p, w, y, 0)`.
    pub fn slice(&self, p: C64, w: C64, y: C64) -> [C64; 3] {
        let mut out = [C64::new(0.0, 0.0); 3];
        for (m, &(i, j)) in self.monomials.iter().enumerate() {
            let mono = w.powu(i) * y.powu(j);
            for (k, o) in out.iter_mut().enumerate() {
                let f = &self.fits[k][m];
                if !f.poly.is_empty() || !f.poles.is_empty() {
                    *o += f.eval(p) * mono;
                }
            }
        }
        out
    }
}

impl Form for FittedForm {
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
        let s = self.slice(p, zeta[0], zeta[1]);
        let mut out = if self.n > 1 { self.reference.coeffs(p, zeta) } else { vec![C64::new(0.0, 0.0); 3] };
        out[..3].copy_from_slice(&s);
        out
    }

    fn jacobian(&self, p: C64, zeta: &[C64]) -> Vec<Vec<C64>> {
        let dim = 2 * self.n;
        let h = 1e-6;
        let mut jac = vec![vec![C64::new(0.0, 0.0); dim + 1]; dim + 1];
        for x in 0..=dim {
            let (mut zp, mut zm) = (zeta.to_vec(), zeta.to_vec());
            let (pp, pm) = if x == 0 {
                (p + h, p - h)
            } else {
                zp[x - 1] += h;
                zm[x - 1] -= h;
                (p, p)
            };
            let a = self.coeffs(pp, &zp);
            let b = self.coeffs(pm, &zm);
            for k in 0..=dim {
                jac[k][x] = (a[k] - b[k]) / (2.0 * h);
            }
        }
        jac
    }
}

/// Cauchy coefficients `a_{k,ij}(p)` of `c_k(p, w, y, 0) = Σ a_{k,ij} wⁱ yʲ`
/// on the torus `|w| = |y| = r`, for `k ∈ {z, w, y}`.
fn taylor(form: &dyn Form, p: C64, monomials: &[(u32, u32)], m: usize, r: f64) -> Vec<C64> {
    let dim = 2 * form.n();
    let mut acc = vec![C64::new(0.0, 0.0); 3 * monomials.len()];
    let roots: Vec<C64> = (0..m).map(|a| C64::from_polar(1.0, std::f64::consts::TAU * a as f64 / m as f64)).collect();
    let mut zeta = vec![C64::new(0.0, 0.0); dim];
    for a in 0..m {
        for b in 0..m {
            zeta[0] = roots[a] * r;
            zeta[1] = roots[b] * r;
            let c = form.coeffs(p, &zeta);
            for (q, &(i, j)) in monomials.iter().enumerate() {
                let phase = roots[(a * i as usize + b * j as usize) % m].conj();
                for k in 0..3 {
                    acc[k * monomials.len() + q] += c[k] * phase;
                }
            }
        }
    }
    let norm = (m * m) as f64;
    for (q, &(i, j)) in monomials.iter().enumerate() {
        let scale = norm * r.powi((i + j) as i32);
        for k in 0..3 {
            acc[k * monomials.len() + q] /= scale;
        }
    }
    acc
}

/// Fits every fibre Taylor coefficient of the `dz`, `dw`, `dy` coefficients
/// of `reference` holomorphically on `S` (values plus tangential derivatives
/// along boundaries and arcs).
pub fn fit_reduced(
    reference: Arc<dyn Form>,
    set: &AdmissibleSet,
    cfg: &FiberFitConfig,
) -> Result<(FittedForm, Vec<CoefficientFit>), ApproxError> {
    let monomials: Vec<(u32, u32)> = (0..=cfg.degree as u32)
        .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
        .collect();
    let m = cfg.torus.max(cfg.degree + 2);
    let r = reference.rho() * cfg.radius_fraction;
    let samples = sample_set(set, cfg.per_curve, cfg.grid);
    let points = samples.all_points();
    let values: Vec<Vec<C64>> = points.par_iter().map(|&p| taylor(reference.as_ref(), p, &monomials, m, r)).collect();
    let h = 1e-5;
    let mut drows: Vec<(C64, C64)> = Vec::new();
    for c in &samples.curves {
        for (z, t) in c.points.iter().zip(&c.tangents) {
            drows.push((*z, t / t.norm()));
        }
    }
    let dvals: Vec<Vec<C64>> = drows
        .par_iter()
        .map(|&(z, tau)| {
            let a = taylor(reference.as_ref(), z + tau * h, &monomials, m, r);
            let b = taylor(reference.as_ref(), z - tau * h, &monomials, m, r);
            a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        })
        .collect();
    let anchors = complement_anchors(set);
    let nm = monomials.len();
    let overall = values.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let jobs: Vec<usize> = (0..3 * nm).collect();
    let results: Vec<Result<(RationalFunction, CoefficientFit), ApproxError>> = jobs
        .par_iter()
        .map(|&q| {
            let (k, mi) = (q / nm, q % nm);
            let (i, j) = monomials[mi];
            let name = format!("{}[w^{i} y^{j}]", NAMES[k]);
            let vals: Vec<C64> = values.iter().map(|v| v[q]).collect();
            let size = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let dsize = dvals.iter().map(|v| v[q].norm()).fold(0.0, f64::max);
            if size.max(dsize) <= 1e-12 * overall {
                return Ok((RationalFunction::zero(), CoefficientFit { name, sup_residual: size, derivative_residual: dsize, cond: 1.0 }));
            }
            let fs = FitSamples {
                points: points.clone(),
                values: vals,
                derivatives: drows.iter().zip(&dvals).map(|(&(z, tau), d)| (z, tau, d[q])).collect(),
            };
            let fit = holomorphic_approximate(&fs, &anchors, &cfg.fit)?;
            Ok((
                fit.function,
                CoefficientFit {
                    name,
                    sup_residual: fit.sup_residual,
                    derivative_residual: fit.derivative_residual,
                    cond: fit.cond,
                },
            ))
        })
        .collect();
    let mut fits = vec![Vec::with_capacity(nm); 3];
    let mut report = Vec::with_capacity(3 * nm);
    for (q, r) in results.into_iter().enumerate() {
        let (f, c) = r?;
        fits[q / nm].push(f);
        report.push(c);
    }
    Ok((
        FittedForm {
            n: reference.n(),
            rho: reference.rho(),
            smoothness: reference.smoothness(),
            monomials,
            fits,
            reference,
        },
        report,
    ))
}
