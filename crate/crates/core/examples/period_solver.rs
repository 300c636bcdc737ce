//! Degree certificate and period solve for a holomorphic map close to the identity.

use mergelyan::solver::{degree_certificate, solve_with_schedule, PolydiscSpec, SolveConfig};
use mergelyan::{c64, C64};

fn main() {
    let shift = c64(0.01, -0.004);
    let p = |t: &[C64]| -> Result<Vec<C64>, String> { Ok(vec![t[0] + 0.3 * t[0] * t[1] - shift, t[1] + 0.2 * t[0] * t[0]]) };
    let cert = degree_certificate(&p, &PolydiscSpec::new(0.1, 2)).expect("certificate");
    println!("δ = 0.1: passed {}, margin {:.4}, guard {:.4}", cert.passed, cert.margin, cert.guard);
    let rep = solve_with_schedule(&p, 2, &SolveConfig::default()).expect("solve");
    println!(
        "t⁰ = [{:.6}, {:.6}], ‖P(t⁰)‖ = {:.1e}, {} iterations ({} Newton)",
        rep.t0[0], rep.t0[1], rep.residual, rep.iterations, rep.newton_steps
    );
    let neg = |t: &[C64]| -> Result<Vec<C64>, String> { Ok(t.iter().map(|x| -x).collect()) };
    println!("P = −id: {:?}", solve_with_schedule(&neg, 1, &SolveConfig::default()).unwrap_err());
}
