//! Legendrian annuli around a loop on `S¹`, and the two-island demo.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{run_pipeline, scenarios, Checked, ErrorKind, PipelineConfig, PipelineError, PipelineReport, PipelineRun, Walker};
use crate::approx::{complement_anchors, holomorphic_approximate, FitSamples, RationalFunction};
use crate::contact::{isotropy_residual, ContactForm, Form};
use crate::geometry::{sample_curve, sample_curve_at_least, PiecewiseCurve};
use crate::ode::{integrate_along_curve, LegendrianSample};
use crate::{c64, fixtures, C64};

/// A loop `θ ↦ (e^{iθ}, w(θ), y(θ))` sampled at `θ_k = 2πk/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendrianLoop {
    #[serde(with = "crate::complex_serde::vec")]
    pub w: Vec<C64>,
    #[serde(with = "crate::complex_serde::vec")]
    pub y: Vec<C64>,
}

fn dft(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    (0..n)
        .map(|k| {
            f.iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, -TAU * (k * j % n) as f64 / n as f64))
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

fn signed(k: usize, n: usize) -> f64 {
    if 2 * k < n {
        k as f64
    } else if 2 * k > n {
        k as f64 - n as f64
    } else {
        0.0
    }
}

fn inverse_dft(c: &[C64]) -> Vec<C64> {
    let n = c.len();
    (0..n)
        .map(|j| {
            c.iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, TAU * (k * j % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Spectral `d/dθ` of a periodic sample vector.
pub fn spectral_derivative(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    let c: Vec<C64> = dft(f)
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * c64(0.0, signed(k, n)))
        .collect();
    inverse_dft(&c)
}

impl LegendrianLoop {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn theta(&self) -> Vec<f64> {
        (0..self.len()).map(|k| TAU * k as f64 / self.len() as f64).collect()
    }

    pub fn points(&self) -> Vec<C64> {
        self.theta().into_iter().map(|t| C64::from_polar(1.0, t)).collect()
    }

    /// Samples `z ↦ (w, y)` on the unit circle.
    pub fn from_fn(samples: usize, f: impl Fn(C64) -> (C64, C64)) -> Self {
        let (w, y) = (0..samples).map(|k| f(C64::from_polar(1.0, TAU * k as f64 / samples as f64))).unzip();
        Self { w, y }
    }

    /// `y(θ)` with `w` the mean-free spectral primitive of `y·dz/dθ`.
    pub fn from_y(samples: usize, y: impl Fn(f64) -> C64) -> Self {
        let th: Vec<f64> = (0..samples).map(|k| TAU * k as f64 / samples as f64).collect();
        let ys: Vec<C64> = th.iter().map(|&t| y(t)).collect();
        let g: Vec<C64> = th.iter().zip(&ys).map(|(&t, v)| v * C64::from_polar(1.0, t) * c64(0.0, 1.0)).collect();
        let c: Vec<C64> = dft(&g)
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                let m = signed(k, samples);
                if m == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    v / c64(0.0, m)
                }
            })
            .collect();
        Self {
            w: inverse_dft(&c),
            y: ys,
        }
    }

    /// `max_k |dw/dθ − y·dz/dθ|` with spectral derivatives.
    pub fn residual(&self) -> f64 {
        let dw = spectral_derivative(&self.w);
        self.points()
            .iter()
            .zip(dw.iter().zip(&self.y))
            .map(|(z, (d, y))| (d - y * z * c64(0.0, 1.0)).norm())
            .fold(0.0, f64::max)
    }
}

/// `dW + (w̃₀′ − ỹ₀ − Y) dz` in coordinates `W = w − w̃₀(z)`, `Y = y − ỹ₀(z)`.
#[derive(Debug, Clone)]
pub struct LoopForm {
    pub w0: RationalFunction,
    pub y0: RationalFunction,
}

impl LoopForm {
    fn defect(&self, p: C64) -> C64 {
        self.w0.deriv(p) - self.y0.eval(p)
    }

    /// Loop coordinates of a sample given in `(W, Y)`.
    pub fn to_loop(&self, s: &LegendrianSample) -> LegendrianSample {
        let mut out = s.clone();
        for k in 0..s.z.len() {
            let p = s.z[k];
            out.fiber[k][0] += self.w0.eval(p);
            out.fiber[k][1] += self.y0.eval(p);
            out.dfiber[k][0] += self.w0.deriv(p) * s.dz[k];
            out.dfiber[k][1] += self.y0.deriv(p) * s.dz[k];
        }
        out
    }
}

impl Form for LoopForm {
    fn n(&self) -> usize {
        1
    }

    fn rho(&self) -> f64 {
        1.0
    }

    fn smoothness(&self) -> u32 {
        4
    }

    fn coeffs(&self, p: C64, zeta: &[C64]) -> Vec<C64> {
        vec![self.defect(p) - zeta[1], c64(1.0, 0.0), C64::new(0.0, 0.0)]
    }

    fn jacobian(&self, p: C64, _zeta: &[C64]) -> Vec<Vec<C64>> {
        let h = 1e-6;
        let d = (self.defect(p + h) - self.defect(p - h)) / (2.0 * h);
        let z = C64::new(0.0, 0.0);
        vec![vec![d, z, c64(-1.0, 0.0)], vec![z; 3], vec![z; 3]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnulusDemoConfig {
    /// Isotropy tolerance on the input loop.
    pub input_tol: f64,
    /// First annulus parameter: `A_ρ = {1/(1+ρ) ≤ |z| ≤ 1+ρ}`.
    pub rho: f64,
    pub rho_floor: f64,
    /// Fibre radius the solution on `A_ρ` must stay inside.
    pub domain_radius: f64,
    pub pipeline: PipelineConfig,
}

impl Default for AnnulusDemoConfig {
    fn default() -> Self {
        Self {
            input_tol: 1e-8,
            rho: 0.5,
            rho_floor: 1.0 / 64.0,
            domain_radius: 0.5,
            pipeline: PipelineConfig {
                fixture: Some("circle".into()),
                form: Some(ContactForm::standard(1).to_json()),
                ..PipelineConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusDemoReport {
    pub input_residual: Checked,
    pub fit_residuals: [Checked; 2],
    pub rho: f64,
    pub rhos_tried: Vec<f64>,
    /// Largest fibre modulus on `A_ρ`, against `domain_radius`.
    pub domain: Checked,
    pub pipeline: PipelineReport,
    /// `dw − y dz` on the output over `S¹` and both boundary circles of `A_ρ`.
    pub isotropy_standard: Checked,
    pub closeness_c0: Checked,
    pub closeness_c1: Checked,
    /// Output on `S¹` at the input angles, in loop coordinates.
    pub loop_output: LegendrianSample,
    /// Output on `|z| = 1/(1+ρ)` and `|z| = 1+ρ`.
    pub annulus_output: Vec<LegendrianSample>,
}

/// Approximates a Legendrian loop on `S¹` by a holomorphic Legendrian map on
/// an annulus `A_ρ`, shrinking `ρ` until the solution stays in the domain.
pub fn annulus_demo(input: &LegendrianLoop, cfg: &AnnulusDemoConfig) -> Result<AnnulusDemoReport, PipelineError> {
    let n = input.len();
    if n < 8 || input.y.len() != n {
        return Err(PipelineError::Config("loop needs at least 8 samples of both w and y".into()));
    }
    let residual = input.residual();
    if !(residual <= cfg.input_tol) {
        return Err(PipelineError::NotLegendrianInput {
            residual,
            tol: cfg.input_tol,
        });
    }
    let tol = cfg.pipeline.tolerances;
    let set = fixtures::unit_circle();
    let anchors = complement_anchors(&set);
    let z = input.points();
    let tau: Vec<C64> = z.iter().map(|z| z * c64(0.0, 1.0)).collect();
    let dy = spectral_derivative(&input.y);
    let fit = |values: &[C64], ders: Vec<C64>| {
        let fs = FitSamples {
            points: z.clone(),
            values: values.to_vec(),
            derivatives: z.iter().zip(&tau).zip(ders).map(|((z, t), d)| (*z, *t, d)).collect(),
        };
        holomorphic_approximate(&fs, &anchors, &cfg.pipeline.fiber_fit.fit)
            .map_err(|e| PipelineError::Stage {
                stage: "approximation",
                kind: ErrorKind::Validation,
                message: e.to_string(),
            })
    };
    let fw = fit(&input.w, input.y.iter().zip(&tau).map(|(y, t)| y * t).collect())?;
    let fy = fit(&input.y, dy.clone())?;
    let fit_residuals = [
        Checked::at_most(fw.sup_residual.max(fw.derivative_residual), tol.fit_target),
        Checked::at_most(fy.sup_residual.max(fy.derivative_residual), tol.fit_target),
    ];
    let form = Arc::new(LoopForm {
        w0: fw.function,
        y0: fy.function,
    });
    let run = run_pipeline(&set, form.clone(), &cfg.pipeline)?;
    let walker = Walker::new(&set, &run.ode, &run.reduced, run.base_point, &run.t0, &cfg.pipeline)?;
    let w1 = walker.w_at(c64(1.0, 0.0))?;

    let to_loop = |s: LegendrianSample| -> LegendrianSample {
        let mut o = s.clone();
        for k in 0..s.z.len() {
            o.fiber[k] = run.reduced.to_original(s.z[k], &s.fiber[k]);
            o.dfiber[k] = run.reduced.original_tangent(s.z[k], s.dz[k], &s.fiber[k], &s.dfiber[k]);
        }
        form.to_loop(&o)
    };

    let circle = sample_curve(&PiecewiseCurve::circle_from(c64(0.0, 0.0), 1.0, 0.0), n)?;
    let on_s1 = to_loop(integrate_along_curve(&run.ode, &circle, w1, &run.t0)?);
    let mut c0: f64 = 0.0;
    let mut c1: f64 = 0.0;
    for k in 0..n {
        c0 = c0.max((on_s1.fiber[k][0] - input.w[k]).norm()).max((on_s1.fiber[k][1] - input.y[k]).norm());
        let speed = on_s1.dz[k];
        let dw_out = on_s1.dfiber[k][0] / speed;
        let dy_out = on_s1.dfiber[k][1] / speed;
        c1 = c1.max((dw_out - input.y[k]).norm()).max((dy_out - dy[k] / tau[k]).norm());
    }

    let standard = ContactForm::standard(1);
    let mut rho = cfg.rho;
    let mut tried = Vec::new();
    let mut last = None;
    while rho >= cfg.rho_floor {
        tried.push(rho);
        let mut outs = Vec::new();
        let mut ok = true;
        let mut sup: f64 = 0.0;
        for r in [1.0 / (1.0 + rho), 1.0 + rho] {
            let path = PiecewiseCurve::concat_open(&[
                PiecewiseCurve::segment(c64(1.0, 0.0), c64(r, 0.0))?,
                PiecewiseCurve::circle_from(c64(0.0, 0.0), r, 0.0),
            ])?;
            let samples = sample_curve_at_least(&path, 2 * cfg.pipeline.samples_per_curve);
            match integrate_along_curve(&run.ode, &samples, w1, &run.t0) {
                Ok(s) => {
                    let s = to_loop(s);
                    sup = sup.max(s.fiber.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max));
                    outs.push(s);
                }
                Err(_) => ok = false,
            }
        }
        if ok && sup < cfg.domain_radius {
            let mut iso = isotropy_residual(&on_s1, &standard)?;
            for s in &outs {
                iso = iso.max(isotropy_residual(s, &standard)?);
            }
            let closeness_c0 = Checked::at_most(c0, tol.closeness_target);
            let closeness_c1 = Checked::at_most(c1, tol.closeness_target);
            return Ok(AnnulusDemoReport {
                input_residual: Checked::at_most(residual, cfg.input_tol),
                fit_residuals,
                rho,
                rhos_tried: tried,
                domain: Checked::at_most(sup, cfg.domain_radius),
                pipeline: run.report,
                isotropy_standard: Checked::at_most(iso, tol.isotropy_target),
                closeness_c0,
                closeness_c1,
                loop_output: on_s1,
                annulus_output: outs,
            });
        }
        last = Some(sup);
        rho *= 0.5;
    }
    Err(PipelineError::Stage {
        stage: "annulus_demo",
        kind: ErrorKind::NoConvergence,
        message: format!(
            "solution leaves the fibre disc of radius {} for every ρ ≥ {} (last sup {:?})",
            cfg.domain_radius, cfg.rho_floor, last
        ),
    })
}

/// The pipeline on the two-island, three-bridge set with the perturbed form.
pub fn fig1_demo(cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    run_pipeline(&fixtures::fig1(), Arc::new(scenarios::perturbed(0.05)), cfg)
}
