use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use lvspread::harness::{
    emit_plot, load_config, run_experiment, ExperimentConfig, ExperimentKind, PlotKind, RunRecord,
};
use lvspread::speeds::{DecayRates, ModelParams};
use lvspread::Error;

/// Spreading speeds of a two-species competition-diffusion system.
///
/// Exit status: 0 when every check passes, 1 when a check fails,
/// 2 on invalid input, 3 on numerical failure.
#[derive(Parser)]
#[command(name = "lvspread", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form speed predictions.
    Speeds(Common),
    /// Reaction-diffusion run with measured against predicted speeds.
    Simulate(Common),
    /// Measure the traveling-wave speeds that have no closed form.
    MeasureLlw(Common),
    /// Hamilton-Jacobi solve with the sandwich and zero-set checks.
    Hj(Common),
    /// Simulation with sigma1 = sigma2 (three zones).
    Tangfife(Common),
    /// Simulation of the mixed case a < 1 < b.
    Mixedcase(Common),
    /// Simulation with the built-in cone forcing.
    Forced(Common),
    /// Parameter sweep described in the config.
    Sweep(Common),
    /// Render a CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config. Without it the model flags are required.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report.json and the CSV/SVG artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the grid step.
    #[arg(long, allow_negative_numbers = true)]
    dx: Option<f64>,
    /// Override the final time.
    #[arg(long = "t-end", allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long = "lambda-u", allow_negative_numbers = true)]
    lambda_u: Option<f64>,
    #[arg(long = "lambda-v-plus", allow_negative_numbers = true)]
    lambda_v_plus: Option<f64>,
    #[arg(long = "lambda-v-minus", allow_negative_numbers = true)]
    lambda_v_minus: Option<f64>,
}

#[derive(Args)]
struct PlotArgs {
    /// Input CSV (snapshot, trace or sweep index).
    #[arg(long)]
    input: PathBuf,
    /// profile, front_trace or speed_curve.
    #[arg(long)]
    kind: String,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

fn required(name: &str, v: Option<f64>) -> Result<f64, Error> {
    v.ok_or_else(|| Error::InvalidParameter {
        field: name.to_string(),
        reason: "required without --config".into(),
    })
}

fn build_config(kind: ExperimentKind, c: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &c.config {
        Some(path) => {
            let mut cfg = load_config(path)?;
            if cfg.kind != kind {
                info!("config kind `{}` replaced by `{}`", cfg.kind.as_str(), kind.as_str());
                cfg.kind = kind;
            }
            cfg
        }
        None => {
            let params = ModelParams::new(
                required("d", c.d)?,
                required("r", c.r)?,
                required("a", c.a)?,
                required("b", c.b)?,
            )?;
            let decay = DecayRates::new(
                required("lambda_u", c.lambda_u)?,
                required("lambda_v_plus", c.lambda_v_plus)?,
                required("lambda_v_minus", c.lambda_v_minus)?,
            )?;
            ExperimentConfig::new(kind, params, decay)
        }
    };
    if c.config.is_some() {
        let p = &mut cfg.params;
        for (slot, v) in [(&mut p.d, c.d), (&mut p.r, c.r), (&mut p.a, c.a), (&mut p.b, c.b)] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        let q = &mut cfg.decay;
        for (slot, v) in [
            (&mut q.lambda_u, c.lambda_u),
            (&mut q.lambda_v_plus, c.lambda_v_plus),
            (&mut q.lambda_v_minus, c.lambda_v_minus),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
    }
    if let Some(dx) = c.dx {
        cfg.grid.dx = dx;
        if kind == ExperimentKind::Hj {
            cfg.hj.dx = dx;
        }
    }
    if let Some(t) = c.t_end {
        cfg.t_end = t;
        if kind == ExperimentKind::Hj {
            cfg.hj.t_end = t;
        }
    }
    if let Some(out) = &c.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_summary(rec: &RunRecord, out: Option<&Path>) {
    if let Some(r) = &rec.report {
        let c2 = r.c2.map_or("-".into(), |c| format!("{c:.6}"));
        let c3 = r.c3.map_or("-".into(), |c| format!("{c:.6}"));
        println!("regime {:?}: c1 = {:.6}, c2 = {c2}, c3 = {c3}", r.regime, r.c1);
        for w in &r.warnings {
            println!("warning: {w}");
        }
    }
    for m in &rec.measured {
        let pred = m.predicted.map_or("-".into(), |p| format!("{p:.6}"));
        println!("front {:<8} measured {:.6} predicted {pred}", m.name, m.measured);
    }
    if let Some(p) = &rec.profile {
        for z in &p.zones {
            println!(
                "zone {:?} x/t in ({:.3}, {:.3}): sup deviation {:.4} {}",
                z.state,
                z.speed_range.0,
                z.speed_range.1,
                z.sup_deviation,
                if z.pass { "ok" } else { "FAIL" }
            );
        }
    }
    if let Some(s) = &rec.sweep {
        println!("sweep: {} points, {} failed, {} errored", s.points, s.failed, s.errored);
    }
    for c in &rec.checks {
        println!(
            "{} {}: {:.6} (target {:.6}, tol {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.expected,
            c.tol
        );
    }
    match out {
        Some(dir) => println!("wrote {}", dir.join("report.json").display()),
        None => {
            if let Ok(s) = serde_json::to_string_pretty(rec) {
                println!("{s}");
            }
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_validation() {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::Speeds(c) => (ExperimentKind::Speeds, c),
        Command::Simulate(c) => (ExperimentKind::Simulate, c),
        Command::MeasureLlw(c) => (ExperimentKind::MeasureLlw, c),
        Command::Hj(c) => (ExperimentKind::Hj, c),
        Command::Tangfife(c) => (ExperimentKind::Tangfife, c),
        Command::Mixedcase(c) => (ExperimentKind::Mixedcase, c),
        Command::Forced(c) => (ExperimentKind::Forced, c),
        Command::Sweep(c) => (ExperimentKind::Sweep, c),
        Command::Plot(p) => {
            let res = PlotKind::parse(&p.kind).and_then(|k| emit_plot(&p.input, k, &p.out));
            return match res {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e),
            };
        }
    };
    let cfg = match build_config(kind, common) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match run_experiment(&cfg) {
        Ok(rec) => {
            print_summary(&rec, cfg.output_dir.as_deref());
            if rec.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}
