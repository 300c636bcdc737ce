use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use mergelyan::approx::{build_spray, complement_anchors, SprayConfig};
use mergelyan::contact::{normal_form_dyn, NormalFormConfig};
use mergelyan::geometry::sample_curve_at_least;
use mergelyan::homology::build_homology_basis;
use mergelyan::pipeline::{
    annulus_demo, fig1_demo, mergelyan_pipeline, scenarios, write_outputs, AnnulusDemoConfig, LegendrianLoop, PipelineConfig,
    PipelineError,
};

#[derive(Parser)]
#[command(name = "mergelyan", version, about = "Holomorphic Legendrian approximation on planar admissible sets")]
struct Cli {
    /// Pipeline configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named fixture set, instead of a set file.
    #[arg(long, global = true)]
    fixture: Option<String>,
    /// Named contact form, instead of a form file.
    #[arg(long, global = true)]
    form: Option<String>,
    /// Output directory for report.json and CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Override a tolerance, e.g. `--tol ode_tol=1e-10`.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write one CSV per output curve.
    #[arg(long, global = true)]
    emit_csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the set and the contact form.
    Validate,
    /// Emit the homology basis.
    Basis {
        #[arg(long, default_value_t = 128)]
        samples: usize,
    },
    /// Emit the spray and its measured period matrix.
    Spray {
        #[arg(long, default_value_t = 2048)]
        samples: usize,
    },
    /// Full pipeline.
    Run,
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Subcommand)]
enum Demo {
    /// Legendrian annulus around a loop on the unit circle.
    Annulus {
        /// `cos2`, `generic`, `zero` or `cos` (not closed, rejected).
        #[arg(long = "loop", default_value = "generic")]
        which: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 128)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
    },
    /// Two islands joined by three bridges, perturbed form.
    Fig1,
}

fn config(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(f) = &cli.fixture {
        cfg.fixture = Some(f.clone());
        cfg.set_path = None;
    }
    if let Some(name) = &cli.form {
        let form = scenarios::by_name(name).ok_or_else(|| PipelineError::Config(format!("unknown form {name:?}")))?;
        cfg.form = Some(form.to_json());
        cfg.form_path = None;
    }
    for kv in &cli.tol {
        let (name, value) = kv
            .split_once('=')
            .ok_or_else(|| PipelineError::Config(format!("--tol expects NAME=VALUE, got {kv:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|e| PipelineError::Config(format!("--tol {name}: {e}")))?;
        cfg.tolerances.set(name.trim(), value)?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn write<T: Serialize>(cli: &Cli, report: &T) -> Result<(), PipelineError> {
    let path = write_outputs(report, &[], &cli.out, false)?;
    println!("{}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    rank: usize,
    euler_characteristic: i64,
    connected: bool,
    contact_min: f64,
    axis_residual: f64,
    step1: String,
    step2: String,
}

#[derive(Serialize)]
struct SprayReport {
    rank: usize,
    samples_per_cycle: usize,
    defect: f64,
    period_matrix: Vec<Vec<[f64; 2]>>,
    raw_cond: f64,
    quadrature_error: f64,
    anchors: Vec<[f64; 2]>,
}

fn execute(cli: &Cli) -> Result<(), PipelineError> {
    match &cli.command {
        Command::Validate => {
            let cfg = config(cli)?;
            cfg.validate()?;
            let set = cfg.load_set()?;
            let form = Arc::new(cfg.load_form()?);
            let nf = normal_form_dyn(
                form,
                &set,
                &NormalFormConfig {
                    contact_threshold: cfg.tolerances.contact_threshold,
                    seed: cfg.seed,
                    ..NormalFormConfig::default()
                },
            )?;
            let basis = build_homology_basis(&set)?;
            eprintln!("valid: l = {}, min contact value {:e}", basis.rank(), nf.contact_min);
            write(
                cli,
                &ValidateReport {
                    valid: true,
                    rank: basis.rank(),
                    euler_characteristic: set.euler_characteristic(),
                    connected: set.connected,
                    contact_min: nf.contact_min,
                    axis_residual: nf.axis_residual,
                    step1: nf.step1,
                    step2: nf.step2,
                },
            )
        }
        Command::Basis { samples } => {
            let set = config(cli)?.load_set()?;
            let basis = build_homology_basis(&set)?;
            eprintln!("l = {}, Runge certified: {}", basis.rank(), basis.runge_certified);
            write(cli, &basis.to_json(*samples))
        }
        Command::Spray { samples } => {
            let set = config(cli)?.load_set()?;
            let basis = build_homology_basis(&set)?;
            let members: Vec<_> = basis.cycles.iter().map(|c| sample_curve_at_least(c, *samples)).collect();
            let anchors = complement_anchors(&set);
            let spray = build_spray(&members, &anchors, &SprayConfig::default()).map_err(|e| PipelineError::Stage {
                stage: "spray",
                kind: mergelyan::pipeline::ErrorKind::Validation,
                message: e.to_string(),
            })?;
            eprintln!("l = {}, ‖P − I‖∞ = {:e}", members.len(), spray.defect);
            write(
                cli,
                &SprayReport {
                    rank: members.len(),
                    samples_per_cycle: *samples,
                    defect: spray.defect,
                    period_matrix: spray.period_matrix.clone(),
                    raw_cond: spray.raw_cond,
                    quadrature_error: spray.quadrature_error,
                    anchors: anchors.iter().map(|a| [a.re, a.im]).collect(),
                },
            )
        }
        Command::Run => {
            let cfg = config(cli)?;
            let report = mergelyan_pipeline(&cfg)?;
            eprintln!(
                "l = {}, closeness {:e} / {:e}, isotropy {:e}",
                report.members, report.closeness_c0.value, report.closeness_c1.value, report.isotropy_gamma.value
            );
            let path = write_outputs(&report, &report.output, &cli.out, cli.emit_csv)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Demo(Demo::Annulus { which, eps, samples, rho }) => {
            let mut cfg = AnnulusDemoConfig {
                rho: *rho,
                ..AnnulusDemoConfig::default()
            };
            let base = config(cli)?;
            cfg.pipeline.tolerances = base.tolerances;
            cfg.pipeline.seed = base.seed;
            let input = match which.as_str() {
                "cos2" => scenarios::cos2_loop(*eps, *samples),
                "cos" => scenarios::cos_loop(*eps, *samples),
                "generic" => scenarios::generic_loop(*samples),
                "zero" => LegendrianLoop::from_fn(*samples, |_| Default::default()),
                other => return Err(PipelineError::Config(format!("unknown loop {other:?}"))),
            };
            let report = annulus_demo(&input, &cfg)?;
            eprintln!(
                "ρ = {}, closeness {:e} / {:e}, isotropy {:e}",
                report.rho, report.closeness_c0.value, report.closeness_c1.value, report.isotropy_standard.value
            );
            let mut curves = vec![];
            if cli.emit_csv {
                for (k, s) in std::iter::once(&report.loop_output).chain(&report.annulus_output).enumerate() {
                    curves.push(mergelyan::pipeline::OutputCurve {
                        label: format!("annulus {k}"),
                        reduced: s.clone(),
                        original: s.clone(),
                    });
                }
            }
            let path = write_outputs(&report, &curves, &cli.out, cli.emit_csv)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Demo(Demo::Fig1) => {
            let mut cfg = config(cli)?;
            cfg.fixture = Some("fig1".into());
            let run = fig1_demo(&cfg)?;
            eprintln!(
                "l = {}, t⁰ = {:?}, isotropy {:e}",
                run.report.members, run.report.t0, run.report.isotropy_gamma.value
            );
            let path = write_outputs(&run.report, &run.report.output, &cli.out, cli.emit_csv)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
