use super::*;
use crate::contact::ContactForm;

fn cfg_for(name: &str, form: &ContactForm) -> PipelineConfig {
    PipelineConfig::for_fixture(name, form)
}

#[test]
fn disc_standard_is_trivial() {
    let cfg = cfg_for("disc", &ContactForm::standard(1));
    let report = mergelyan_pipeline(&cfg).unwrap();
    assert_eq!(report.members, 0);
    assert!(report.solve.is_none());
    assert!(report.closeness_c0.value <= 1e-9);
    assert!(report.isotropy_beta.value <= 1e-9);
}

#[test]
fn annulus_standard_has_zero_t0() {
    let cfg = cfg_for("annulus", &ContactForm::standard(1));
    let report = mergelyan_pipeline(&cfg).unwrap();
    assert_eq!(report.rank, 1);
    let t0 = report.t0[0];
    assert!(t0[0].hypot(t0[1]) <= 1e-10);
    assert!(report.isotropy_gamma.value <= 1e-8, "{:?}", report.isotropy_gamma);
    assert!(report.period_recheck.passed);
}

#[test]
fn annulus_perturbed() {
    let t = std::time::Instant::now();
    let cfg = cfg_for("annulus", &scenarios::perturbed(0.05));
    let report = mergelyan_pipeline(&cfg).unwrap();
    eprintln!("{:?}", t.elapsed());
    let s = report.solve.as_ref().unwrap();
    eprintln!("t0 {:?} res {:e} cert {:?}", report.t0, s.residual, s.certificate);
    eprintln!("recheck {:?} iso {:?} {:?} c0 {:?} c1 {:?}", report.period_recheck, report.isotropy_gamma, report.isotropy_beta, report.closeness_c0, report.closeness_c1);
    eprintln!("fits {:?}", report.fits.iter().map(|f| f.residual.value).fold(0.0, f64::max));
    assert!(s.certificate.passed);
    assert!(s.residual <= 1e-10);
    assert!(report.period_recheck.passed);
    assert!(report.isotropy_gamma.passed);
}

#[test]
fn annulus_demo_cos2() {
    let input = scenarios::cos2_loop(0.05, 128);
    let r = annulus_demo(&input, &AnnulusDemoConfig::default()).unwrap();
    eprintln!("rho {} c0 {:?} c1 {:?} iso {:?}", r.rho, r.closeness_c0, r.closeness_c1, r.isotropy_standard);
    for s in &r.annulus_output {
        for k in (0..s.z.len()).step_by(37) {
            let (w, y) = scenarios::cos2_laurent(0.05, s.z[k]);
            eprintln!("{} {:e} {:e}", s.z[k], (s.fiber[k][0] - w).norm(), (s.fiber[k][1] - y).norm());
        }
    }
}

#[test]
fn cos_loop_is_rejected() {
    let input = scenarios::cos_loop(0.05, 128);
    let err = annulus_demo(&input, &AnnulusDemoConfig::default()).unwrap_err();
    assert!(matches!(err, PipelineError::NotLegendrianInput { .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn cos2_loop_matches_laurent_data() {
    let eps = 0.05;
    let r = annulus_demo(&scenarios::cos2_loop(eps, 128), &AnnulusDemoConfig::default()).unwrap();
    let mut worst: f64 = 0.0;
    for s in r.annulus_output.iter().chain([&r.loop_output]) {
        for k in 0..s.z.len() {
            let (w, y) = scenarios::cos2_laurent(eps, s.z[k]);
            worst = worst.max((s.fiber[k][0] - w).norm()).max((s.fiber[k][1] - y).norm());
        }
    }
    assert!(worst <= 1e-6, "{worst:e}");
    assert!(r.isotropy_standard.passed);
}

#[test]
fn constant_loop_gives_axis() {
    let input = LegendrianLoop::from_fn(64, |_| (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    let r = annulus_demo(&input, &AnnulusDemoConfig::default()).unwrap();
    let sup = r
        .annulus_output
        .iter()
        .chain([&r.loop_output])
        .flat_map(|s| s.fiber.iter().flatten())
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    assert_eq!(sup, 0.0);
}

#[test]
fn generic_loop_is_isotropic_on_annulus() {
    let r = annulus_demo(&scenarios::generic_loop(128), &AnnulusDemoConfig::default()).unwrap();
    assert!(r.input_residual.passed);
    assert!(r.isotropy_standard.value <= 1e-6, "{:?}", r.isotropy_standard);
    assert!(r.closeness_c0.passed && r.closeness_c1.passed);
    assert!(r.domain.passed);
    assert_eq!(r.annulus_output.len(), 2);
}

#[test]
fn halving_tolerances_keeps_closeness() {
    let input = scenarios::generic_loop(128);
    let coarse = annulus_demo(&input, &AnnulusDemoConfig::default()).unwrap();
    let mut cfg = AnnulusDemoConfig::default();
    let t = &mut cfg.pipeline.tolerances;
    for (name, v) in t.all() {
        if name != "contact_threshold" {
            t.set(name, 0.5 * v).unwrap();
        }
    }
    let fine = annulus_demo(&input, &cfg).unwrap();
    let slack = 1e-12;
    assert!(fine.closeness_c0.value <= coarse.closeness_c0.value + slack);
    assert!(fine.closeness_c1.value <= coarse.closeness_c1.value + slack);
}

#[test]
fn interpolation_family_on_annulus() {
    let mut cfg = cfg_for("annulus", &scenarios::perturbed(0.05));
    cfg.interpolation = vec![[0.0, 1.0], [-1.2, 0.0]];
    let rep = mergelyan_pipeline(&cfg).unwrap();
    assert!(rep.family);
    assert!(rep.members > rep.rank);
    assert_eq!(rep.interpolation_defects.len(), 2);
    assert!(rep.interpolation_defects.iter().all(|c| c.passed));
    assert!(rep.solve.unwrap().certificate.passed);
}

#[test]
fn reports_are_deterministic() {
    let cfg = cfg_for("annulus", &scenarios::perturbed(0.05));
    let a = serde_json::to_string(&mergelyan_pipeline(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&mergelyan_pipeline(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn non_contact_form_is_a_validation_error() {
    let form = ContactForm::new(1, 1.0, &["0", "1"]).unwrap();
    let err = mergelyan_pipeline(&cfg_for("disc", &form)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("contact"), "{err}");
}

#[test]
fn config_validation() {
    let mut cfg = PipelineConfig::default();
    assert!(matches!(cfg.validate(), Err(PipelineError::Config(_))));
    cfg.fixture = Some("disc".into());
    cfg.form = Some(ContactForm::standard(1).to_json());
    cfg.validate().unwrap();
    cfg.tolerances.ode_tol = -1.0;
    assert!(cfg.validate().is_err());
    let mut t = ToleranceConfig::default();
    assert!(t.set("nonsense", 1e-3).is_err());
    assert!(t.set("ode_tol", 0.0).is_err());
    t.set("ode_tol", 1e-9).unwrap();
    assert_eq!(t.ode_tol, 1e-9);
    cfg.tolerances = ToleranceConfig::default();
    cfg.fixture = None;
    cfg.set_path = Some("/nonexistent/set.json".into());
    assert_eq!(cfg.validate().unwrap_err().exit_code(), 5);
}

#[test]
fn config_file_paths_are_relative_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let set = fixtures::annulus();
    std::fs::write(dir.path().join("set.json"), serde_json::to_string(&set.to_json()).unwrap()).unwrap();
    std::fs::write(dir.path().join("form.json"), serde_json::to_string(&ContactForm::standard(1).to_json()).unwrap()).unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"set_path": "set.json", "form_path": "form.json", "tolerances": {"ode_tol": 1e-10}}"#,
    )
    .unwrap();
    let cfg = PipelineConfig::from_file(&dir.path().join("cfg.json")).unwrap();
    assert_eq!(cfg.set_path.as_deref(), Some(dir.path().join("set.json").as_path()));
    assert_eq!(cfg.tolerances.ode_tol, 1e-10);
    assert_eq!(cfg.tolerances.period_target, 1e-10);
    cfg.validate().unwrap();
    assert_eq!(cfg.load_set().unwrap().euler_characteristic(), 0);
}

#[test]
fn outputs_are_written() {
    let cfg = cfg_for("annulus", &ContactForm::standard(1));
    let rep = mergelyan_pipeline(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = write_outputs(&rep, &rep.output, dir.path(), true).unwrap();
    let back: PipelineReport = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(back.rank, 1);
    assert!(dir.path().join("curve_000.csv").exists());
}

#[test]
fn solve_errors_map_to_exit_codes() {
    let e: PipelineError = SolveError::CertificateFailed { delta: 1e-4, floor: 1e-4, sup_defect: 1.0 }.into();
    assert_eq!(e.exit_code(), 3);
    let e: PipelineError = SolveError::InsufficientSampling { guard: 1.0, margin: 0.5 }.into();
    assert_eq!(e.exit_code(), 3);
    let e: PipelineError = SolveError::NoConvergence { iterations: 1, best_residual: 1.0, best_t: vec![] }.into();
    assert_eq!(e.exit_code(), 4);
}
