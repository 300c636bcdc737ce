//! End-to-end pipeline: normal form, basis, spray, approximation, period
//! solve, integration and reporting.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{build_spray, complement_anchors, sample_set, ApproxError, Spray, SprayConfig};
use crate::contact::{isotropy_residual, normal_form_dyn, ContactError, ContactForm, ContactFormJson, Form, NormalFormConfig, ReducedForm, ResidualTerm, CONTACT_THRESHOLD};
use crate::geometry::{sample_curve_at_least, AdmissibleSet, CurveSamples, GeometryError, PiecewiseCurve, Tolerances};
use crate::homology::{build_homology_basis, curve_family_with_interpolation, HomologyError};
use crate::ode::{integrate_along_curve, period_map, LegendrianODE, LegendrianSample, OdeError, PeriodMapError};
use crate::raster::{self, Grid, PathTree};
use crate::solver::{solve_with_schedule, SolveConfig, SolveError, SolveReport};
use crate::{c64, fixtures, C64};

pub mod demo;
pub mod fitted;
pub mod scenarios;

pub use demo::{annulus_demo, fig1_demo, AnnulusDemoConfig, AnnulusDemoReport, LegendrianLoop};
pub use fitted::{fit_reduced, CoefficientFit, FiberFitConfig, FittedForm};

/// Exit-code class of a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorKind {
    Validation,
    Certificate,
    NoConvergence,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Certificate => 3,
            ErrorKind::NoConvergence => 4,
            ErrorKind::Io => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error("{stage}: {message}")]
    Stage {
        stage: &'static str,
        kind: ErrorKind,
        message: String,
    },
    #[error("tolerance budget exceeded: {name} = {value:e} > {target:e}")]
    ToleranceBudgetExceeded { name: String, value: f64, target: f64 },
    #[error("input loop is not Legendrian: residual {residual:e} > {tol:e}")]
    NotLegendrianInput { residual: f64, tol: f64 },
}

impl PipelineError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            PipelineError::Config(_) | PipelineError::NotLegendrianInput { .. } => ErrorKind::Validation,
            PipelineError::Io(_) => ErrorKind::Io,
            PipelineError::Stage { kind, .. } => *kind,
            PipelineError::ToleranceBudgetExceeded { .. } => ErrorKind::NoConvergence,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind().exit_code()
    }

    fn stage(stage: &'static str, kind: ErrorKind, e: impl std::fmt::Display) -> Self {
        PipelineError::Stage {
            stage,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<ContactError> for PipelineError {
    fn from(e: ContactError) -> Self {
        Self::stage("normal_form", ErrorKind::Validation, e)
    }
}

impl From<HomologyError> for PipelineError {
    fn from(e: HomologyError) -> Self {
        Self::stage("homology", ErrorKind::Validation, e)
    }
}

impl From<GeometryError> for PipelineError {
    fn from(e: GeometryError) -> Self {
        Self::stage("geometry", ErrorKind::Validation, e)
    }
}

impl From<OdeError> for PipelineError {
    fn from(e: OdeError) -> Self {
        Self::stage("integration", ErrorKind::NoConvergence, e)
    }
}

impl From<PeriodMapError> for PipelineError {
    fn from(e: PeriodMapError) -> Self {
        Self::stage("period_map", ErrorKind::NoConvergence, e)
    }
}

impl From<SolveError> for PipelineError {
    fn from(e: SolveError) -> Self {
        let kind = match e {
            SolveError::CertificateFailed { .. } | SolveError::InsufficientSampling { .. } => ErrorKind::Certificate,
            _ => ErrorKind::NoConvergence,
        };
        Self::stage("solve_periods", kind, e)
    }
}

fn approx_err(stage: &'static str) -> impl Fn(ApproxError) -> PipelineError {
    move |e| PipelineError::stage(stage, ErrorKind::Validation, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub contact_threshold: f64,
    pub ode_tol: f64,
    /// Target for the coefficient fit residuals (reported).
    pub fit_target: f64,
    pub period_target: f64,
    /// Bound on periods re-measured at twice the resolution.
    pub recheck_target: f64,
    pub isotropy_target: f64,
    pub closeness_target: f64,
    pub spray_target: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            contact_threshold: CONTACT_THRESHOLD,
            ode_tol: 1e-11,
            fit_target: 1e-8,
            period_target: 1e-10,
            recheck_target: 1e-8,
            isotropy_target: 1e-6,
            closeness_target: 1e-3,
            spray_target: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub const NAMES: [&'static str; 8] = [
        "contact_threshold",
        "ode_tol",
        "fit_target",
        "period_target",
        "recheck_target",
        "isotropy_target",
        "closeness_target",
        "spray_target",
    ];

    /// Sets a tolerance by name, as in `--tol ode_tol=1e-10`.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), PipelineError> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(PipelineError::Config(format!("tolerance {name} = {value} must be positive")));
        }
        let slot = match name {
            "contact_threshold" => &mut self.contact_threshold,
            "ode_tol" => &mut self.ode_tol,
            "fit_target" => &mut self.fit_target,
            "period_target" => &mut self.period_target,
            "recheck_target" => &mut self.recheck_target,
            "isotropy_target" => &mut self.isotropy_target,
            "closeness_target" => &mut self.closeness_target,
            "spray_target" => &mut self.spray_target,
            _ => {
                return Err(PipelineError::Config(format!(
                    "unknown tolerance {name:?} (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    fn all(&self) -> [(&'static str, f64); 8] {
        [
            ("contact_threshold", self.contact_threshold),
            ("ode_tol", self.ode_tol),
            ("fit_target", self.fit_target),
            ("period_target", self.period_target),
            ("recheck_target", self.recheck_target),
            ("isotropy_target", self.isotropy_target),
            ("closeness_target", self.closeness_target),
            ("spray_target", self.spray_target),
        ]
    }
}

/// Pipeline configuration (UTF-8 JSON). The set comes from `set_path` or a
/// named `fixture`; the form from `form_path` or inline `form`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub set_path: Option<PathBuf>,
    pub fixture: Option<String>,
    pub form_path: Option<PathBuf>,
    pub form: Option<ContactFormJson>,
    /// Interpolation points `A`.
    pub interpolation: Vec<[f64; 2]>,
    pub tolerances: ToleranceConfig,
    pub delta_start: f64,
    pub delta_floor: f64,
    /// Boundary samples per facet circle for the degree certificate.
    pub boundary_per_dim: usize,
    pub boundary_rings: usize,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub samples_per_curve: usize,
    /// Radius of the w-disc for the ODE.
    pub w_radius: f64,
    pub fiber_fit: FiberFitConfig,
    /// Raster cells across the set for output routing.
    pub route_cells: usize,
    /// Interior output points per island side.
    pub interior_grid: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            set_path: None,
            fixture: None,
            form_path: None,
            form: None,
            interpolation: vec![],
            tolerances: ToleranceConfig::default(),
            delta_start: 0.1,
            delta_floor: 1e-4,
            boundary_per_dim: crate::solver::DEFAULT_PER_DIM,
            boundary_rings: crate::solver::DEFAULT_RINGS,
            output_dir: None,
            seed: 7,
            samples_per_curve: 256,
            w_radius: 0.5,
            fiber_fit: FiberFitConfig::default(),
            route_cells: 200,
            interior_grid: 5,
        }
    }
}

impl PipelineConfig {
    /// Fixture set with an inline form.
    pub fn for_fixture(name: &str, form: &ContactForm) -> Self {
        Self {
            fixture: Some(name.to_string()),
            form: Some(form.to_json()),
            ..Self::default()
        }
    }

    /// Reads a config file; relative paths inside are resolved against the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.set_path, &mut cfg.form_path, &mut cfg.output_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        for (name, v) in self.tolerances.all() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(PipelineError::Config(format!("tolerance {name} = {v} must be positive")));
            }
        }
        if !(self.delta_start > 0.0 && self.delta_floor > 0.0 && self.delta_floor <= self.delta_start) {
            return Err(PipelineError::Config("δ schedule needs 0 < delta_floor ≤ delta_start".into()));
        }
        if !(self.w_radius > 0.0) {
            return Err(PipelineError::Config("w_radius must be positive".into()));
        }
        match (&self.set_path, &self.fixture) {
            (Some(_), Some(_)) => return Err(PipelineError::Config("give either set_path or fixture, not both".into())),
            (None, None) => return Err(PipelineError::Config("no admissible set given".into())),
            _ => {}
        }
        match (&self.form_path, &self.form) {
            (Some(_), Some(_)) => return Err(PipelineError::Config("give either form_path or form, not both".into())),
            (None, None) => return Err(PipelineError::Config("no contact form given".into())),
            _ => {}
        }
        for p in [&self.set_path, &self.form_path].into_iter().flatten() {
            if !p.exists() {
                return Err(PipelineError::Io(format!("{} does not exist", p.display())));
            }
        }
        self.load_set()?;
        self.load_form()?;
        Ok(())
    }

    pub fn load_set(&self) -> Result<AdmissibleSet, PipelineError> {
        if let Some(name) = &self.fixture {
            return fixtures::by_name(name).ok_or_else(|| PipelineError::Config(format!("unknown fixture {name:?}")));
        }
        let path = self.set_path.as_ref().ok_or_else(|| PipelineError::Config("no admissible set given".into()))?;
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
        Ok(AdmissibleSet::from_json_str(&text, Tolerances::default())?)
    }

    pub fn load_form(&self) -> Result<ContactForm, PipelineError> {
        if let Some(j) = &self.form {
            return ContactForm::from_json(j).map_err(|e| PipelineError::stage("form", ErrorKind::Validation, e));
        }
        let path = self.form_path.as_ref().ok_or_else(|| PipelineError::Config("no contact form given".into()))?;
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
        ContactForm::from_json_str(&text).map_err(|e| PipelineError::stage("form", ErrorKind::Validation, e))
    }

    pub fn interpolation_points(&self) -> Vec<C64> {
        self.interpolation.iter().map(|&[a, b]| c64(a, b)).collect()
    }

    fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            delta0: self.delta_start,
            delta_floor: self.delta_floor,
            target: self.tolerances.period_target,
            per_dim: self.boundary_per_dim,
            rings: self.boundary_rings,
            ..SolveConfig::default()
        }
    }
}

/// A measured quantity with the bound it was tested against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checked {
    pub value: f64,
    pub tolerance: f64,
    /// `true` when the tolerance is a lower bound.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub lower: bool,
    pub passed: bool,
}

impl Checked {
    pub fn at_most(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            lower: false,
            passed: value <= tolerance,
        }
    }

    pub fn at_least(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            lower: true,
            passed: value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormSummary {
    pub step1: String,
    pub step2: String,
    pub constant_change: bool,
    pub contact_min: Checked,
    pub axis_residual: Checked,
    pub linear_residual: Checked,
    pub h_min: f64,
    pub h_max: f64,
    pub residual_terms: Vec<ResidualTerm>,
    pub smoothness_in: u32,
    pub smoothness_out: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub name: String,
    pub residual: Checked,
    pub derivative_residual: Checked,
}

/// One output curve in reduced (`ζ̂`) and original (`ζ`) fibre coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputCurve {
    pub label: String,
    pub reduced: LegendrianSample,
    pub original: LegendrianSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub rank: usize,
    pub euler_characteristic: i64,
    pub family: bool,
    pub members: usize,
    pub spray_defect: Checked,
    pub normal_form: NormalFormSummary,
    pub fits: Vec<FitSummary>,
    pub lipschitz_estimate: f64,
    pub solve: Option<SolveReport>,
    pub t0: Vec<[f64; 2]>,
    /// `‖𝒫(t⁰)‖∞` re-measured with doubled samples and halved ODE tolerance.
    pub period_recheck: Checked,
    pub isotropy_gamma: Checked,
    pub isotropy_beta: Checked,
    pub closeness_c0: Checked,
    pub closeness_c1: Checked,
    pub interpolation_defects: Vec<Checked>,
    /// Smallest distance in `ℂ^{2n+1}` between output samples over distinct base points.
    pub min_self_distance: f64,
    pub output: Vec<OutputCurve>,
}

/// Everything the pipeline built, for callers that continue from it.
pub struct PipelineRun {
    pub report: PipelineReport,
    pub reduced: ReducedForm,
    pub gamma: Arc<FittedForm>,
    pub spray: Arc<Spray>,
    pub ode: LegendrianODE,
    pub members: Vec<CurveSamples>,
    pub t0: Vec<C64>,
    pub base_point: C64,
}

/// Runs the pipeline described by `cfg`.
pub fn mergelyan_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    cfg.validate()?;
    let set = cfg.load_set()?;
    let form = cfg.load_form()?;
    Ok(run_pipeline(&set, Arc::new(form), cfg)?.report)
}

/// Pipeline on an explicit set and form; `cfg` supplies tolerances,
/// interpolation points and sampling.
pub fn run_pipeline(set: &AdmissibleSet, form: Arc<dyn Form>, cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    let tol = cfg.tolerances;
    let points = cfg.interpolation_points();

    let nf_cfg = NormalFormConfig {
        contact_threshold: tol.contact_threshold,
        seed: cfg.seed,
        ..NormalFormConfig::default()
    };
    let nf = normal_form_dyn(form.clone(), set, &nf_cfg)?;
    let normal_summary = NormalFormSummary {
        step1: nf.step1.clone(),
        step2: nf.step2.clone(),
        constant_change: nf.constant_change,
        contact_min: Checked::at_least(nf.contact_min, tol.contact_threshold),
        axis_residual: Checked::at_most(nf.axis_residual, nf_cfg.axis_tol),
        linear_residual: Checked::at_most(nf.linear_residual, tol.fit_target),
        h_min: nf.h_min,
        h_max: nf.h_max,
        residual_terms: nf.residual_terms.clone(),
        smoothness_in: nf.smoothness_in,
        smoothness_out: nf.smoothness_out,
    };

    let basis = build_homology_basis(set)?;
    let (member_curves, base_point, family) = if points.is_empty() {
        (basis.cycles.clone(), basis.base_point, false)
    } else {
        let fam = curve_family_with_interpolation(set, &basis, &points)?;
        (fam.members.clone(), fam.base_point, true)
    };
    let members: Vec<CurveSamples> = member_curves.iter().map(|c| sample_curve_at_least(c, cfg.samples_per_curve)).collect();
    let l = members.len();

    let anchors = complement_anchors(set);
    let spray = Arc::new(build_spray(&members, &anchors, &SprayConfig::default()).map_err(approx_err("spray"))?);

    let (gamma, fit_report) = fit_reduced(Arc::new(nf.reduced.clone()), set, &cfg.fiber_fit).map_err(approx_err("approximation"))?;
    let gamma = Arc::new(gamma);
    let fits: Vec<FitSummary> = fit_report
        .iter()
        .map(|f| FitSummary {
            name: f.name.clone(),
            residual: Checked::at_most(f.sup_residual, tol.fit_target),
            derivative_residual: Checked::at_most(f.derivative_residual, tol.fit_target),
        })
        .collect();
    let fit_max = fit_report.iter().map(|f| f.sup_residual).fold(0.0, f64::max);

    let ode = LegendrianODE::from_form(gamma.clone(), spray.clone(), cfg.w_radius)
        .with_tol(tol.ode_tol)
        .with_t_radius(cfg.delta_start);
    let probe: Vec<C64> = members.iter().flat_map(|m| m.points.iter().step_by(8).copied()).collect();
    let ode = ode.estimate_lipschitz(&probe, &vec![C64::new(0.0, 0.0); l], 2);

    let (t0, solve) = if l == 0 {
        (vec![], None)
    } else {
        let p = |t: &[C64]| period_map(&ode, &members, t).map(|v| v.values);
        let rep = solve_with_schedule(&p, l, &cfg.solve_config())?;
        (rep.t0.clone(), Some(rep))
    };

    let recheck = if l == 0 {
        0.0
    } else {
        let fine: Vec<CurveSamples> = member_curves.iter().map(|c| sample_curve_at_least(c, 2 * cfg.samples_per_curve)).collect();
        let fine_ode = ode.clone().with_tol(0.5 * tol.ode_tol);
        period_map(&fine_ode, &fine, &t0)?.sup_norm()
    };

    let walker = Walker::new(set, &ode, &nf.reduced, base_point, &t0, cfg)?;
    let mut output = Vec::new();
    for (label, curve) in output_curves(set) {
        output.push(walker.curve(&label, &curve)?);
    }
    let interior = sample_set(set, 8, cfg.interior_grid).interior;
    for (k, &p) in interior.iter().enumerate() {
        output.push(walker.point(&format!("interior {k}"), p)?);
    }

    let mut iso_gamma: f64 = 0.0;
    let mut iso_beta: f64 = 0.0;
    let mut c0: f64 = 0.0;
    let mut c1: f64 = 0.0;
    for o in &output {
        iso_gamma = iso_gamma.max(isotropy_residual(&o.reduced, gamma.as_ref())?);
        iso_beta = iso_beta.max(isotropy_residual(&o.original, form.as_ref())?);
        for k in 0..o.original.s.len() {
            let speed = o.original.dz[k].norm();
            c0 = c0.max(o.original.fiber[k].iter().map(|v| v.norm()).fold(0.0, f64::max));
            c1 = c1.max(o.original.dfiber[k].iter().map(|v| v.norm()).fold(0.0, f64::max) / speed);
        }
    }
    let mut interpolation_defects = Vec::new();
    for &a in &points {
        let o = walker.point("interpolation", a)?;
        let v = o.original.fiber[0].iter().map(|v| v.norm()).fold(0.0, f64::max);
        interpolation_defects.push(Checked::at_most(v, tol.period_target));
    }
    let min_self_distance = min_self_distance(&output);

    let report = PipelineReport {
        rank: basis.rank(),
        euler_characteristic: set.euler_characteristic(),
        family,
        members: l,
        spray_defect: Checked::at_most(spray.defect, tol.spray_target),
        normal_form: normal_summary,
        fits,
        lipschitz_estimate: ode.lipschitz_c,
        solve,
        t0: t0.iter().map(|t| [t.re, t.im]).collect(),
        period_recheck: Checked::at_most(recheck, tol.recheck_target),
        isotropy_gamma: Checked::at_most(iso_gamma, tol.isotropy_target),
        isotropy_beta: Checked::at_most(iso_beta, tol.isotropy_target + 3.0 * nf.h_max * fit_max),
        closeness_c0: Checked::at_most(c0, tol.closeness_target),
        closeness_c1: Checked::at_most(c1, tol.closeness_target),
        interpolation_defects,
        min_self_distance,
        output,
    };
    for (name, c) in [("closeness_c0", report.closeness_c0), ("closeness_c1", report.closeness_c1)] {
        if !c.passed {
            return Err(PipelineError::ToleranceBudgetExceeded {
                name: name.into(),
                value: c.value,
                target: c.tolerance,
            });
        }
    }
    Ok(PipelineRun {
        report,
        reduced: nf.reduced,
        gamma,
        spray,
        ode,
        members,
        t0,
        base_point,
    })
}

/// Island boundaries and arcs of `S`, labelled.
pub fn output_curves(set: &AdmissibleSet) -> Vec<(String, PiecewiseCurve)> {
    let mut out = Vec::new();
    for (i, isl) in set.islands.iter().enumerate() {
        for j in 0..isl.n_boundaries() {
            out.push((format!("island {i} boundary {j}"), isl.boundary(j).clone()));
        }
    }
    for (k, a) in set.arcs.iter().enumerate() {
        out.push((format!("arc {k}"), a.curve.clone()));
    }
    out
}

/// Integrates the solution from the base point along raster routes inside `S`.
pub struct Walker<'a> {
    ode: &'a LegendrianODE,
    reduced: &'a ReducedForm,
    tree: PathTree,
    base_point: C64,
    t0: &'a [C64],
    samples: usize,
}

impl<'a> Walker<'a> {
    pub fn new(
        set: &AdmissibleSet,
        ode: &'a LegendrianODE,
        reduced: &'a ReducedForm,
        base_point: C64,
        t0: &'a [C64],
        cfg: &PipelineConfig,
    ) -> Result<Self, PipelineError> {
        let grid = Grid::for_set(set, cfg.route_cells, 0.05);
        let mask = raster::set_mask(&grid, set);
        let tree = PathTree::build(grid, &mask, base_point)
            .ok_or_else(|| PipelineError::stage("output", ErrorKind::Validation, "base point is off the raster of S"))?;
        Ok(Self {
            ode,
            reduced,
            tree,
            base_point,
            t0,
            samples: cfg.samples_per_curve,
        })
    }

    /// `w` at `z`, integrated from `w(base) = 0`.
    pub fn w_at(&self, z: C64) -> Result<C64, PipelineError> {
        if (z - self.base_point).norm() < 1e-12 {
            return Ok(C64::new(0.0, 0.0));
        }
        let path = self
            .tree
            .path_to(z)
            .ok_or_else(|| PipelineError::stage("output", ErrorKind::Validation, format!("no route to {z}")))?;
        let pts = raster::simplify_path(&path, 0.25 * self.tree.grid.h);
        let route = PiecewiseCurve::polyline(&pts, false)?;
        let s = sample_curve_at_least(&route, 2);
        Ok(integrate_along_curve(self.ode, &s, C64::new(0.0, 0.0), self.t0)?.terminal())
    }

    fn finish(&self, label: &str, reduced: LegendrianSample) -> OutputCurve {
        let mut original = reduced.clone();
        for k in 0..reduced.s.len() {
            let p = reduced.z[k];
            original.fiber[k] = self.reduced.to_original(p, &reduced.fiber[k]);
            original.dfiber[k] = self.reduced.original_tangent(p, reduced.dz[k], &reduced.fiber[k], &reduced.dfiber[k]);
        }
        OutputCurve {
            label: label.to_string(),
            reduced,
            original,
        }
    }

    pub fn curve(&self, label: &str, curve: &PiecewiseCurve) -> Result<OutputCurve, PipelineError> {
        let w0 = self.w_at(curve.start())?;
        let s = sample_curve_at_least(curve, self.samples);
        let sol = integrate_along_curve(self.ode, &s, w0, self.t0)?;
        Ok(self.finish(label, sol))
    }

    /// Single-sample output at `z`, with the tangent of the route's last leg.
    pub fn point(&self, label: &str, z: C64) -> Result<OutputCurve, PipelineError> {
        let w = self.w_at(z)?;
        let seg = PiecewiseCurve::segment(z, z + 1e-3)?;
        let s = sample_curve_at_least(&seg, 2);
        let mut sol = integrate_along_curve(self.ode, &s, w, self.t0)?;
        sol.s.truncate(1);
        sol.z.truncate(1);
        sol.dz.truncate(1);
        sol.fiber.truncate(1);
        sol.dfiber.truncate(1);
        Ok(self.finish(label, sol))
    }
}

fn min_self_distance(output: &[OutputCurve]) -> f64 {
    let pts: Vec<(C64, Vec<C64>)> = output
        .iter()
        .flat_map(|o| o.original.z.iter().zip(&o.original.fiber).map(|(z, f)| (*z, f.clone())))
        .collect();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dz = (pts[i].0 - pts[j].0).norm();
            if dz < 1e-9 {
                continue;
            }
            let df: f64 = pts[i].1.iter().zip(&pts[j].1).map(|(a, b)| (a - b).norm_sqr()).sum();
            best = best.min((dz * dz + df).sqrt());
        }
    }
    best
}

/// Writes `report.json` (and one CSV per output curve when asked) into `dir`.
pub fn write_outputs<T: Serialize>(report: &T, curves: &[OutputCurve], dir: &Path, emit_csv: bool) -> Result<PathBuf, PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join("report.json");
    let text = serde_json::to_string_pretty(report).map_err(|e| PipelineError::Io(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
    if emit_csv {
        for (k, c) in curves.iter().enumerate() {
            let p = dir.join(format!("curve_{k:03}.csv"));
            std::fs::write(&p, c.original.to_csv()).map_err(|e| PipelineError::Io(format!("{}: {e}", p.display())))?;
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests;
