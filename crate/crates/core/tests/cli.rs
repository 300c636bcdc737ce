use std::process::Command;

fn mergelyan(args: &[&str], out: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mergelyan"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn")
}

fn report(out: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn validate_fig1() {
    let dir = tempfile::tempdir().unwrap();
    let o = mergelyan(&["--fixture", "fig1", "--form", "perturbed", "validate"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["rank"], 2);
    assert_eq!(r["valid"], true);
}

#[test]
fn run_on_disc() {
    let dir = tempfile::tempdir().unwrap();
    let o = mergelyan(&["--fixture", "disc", "--form", "standard", "--emit-csv", "run"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["members"], 0);
    assert!(r["closeness_c0"]["value"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn spray_on_annulus() {
    let dir = tempfile::tempdir().unwrap();
    let o = mergelyan(&["--fixture", "annulus", "spray", "--samples", "512"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(report(dir.path())["defect"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn open_cos_loop_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = mergelyan(&["demo", "annulus", "--loop", "cos"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_tolerance_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = mergelyan(&["--fixture", "disc", "--form", "standard", "--tol", "bogus=1", "run"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_form_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = mergelyan(&["--fixture", "disc", "run"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
