use std::path::{Path, PathBuf};

use log::{info, warn};

use super::config::{ExperimentConfig, ExperimentKind, LlwMode};
use super::plot::{emit_plot, PlotKind};
use super::record::{Check, HjSummary, LlwSummary, RunRecord};
use super::sweep::run_sweep;
use crate::error::{Error, Result};
use crate::hj::{
    hj_solve, sandwich_report, zero_set_speed, ExplicitSolution, HjGrid, PiecewiseHamiltonianSpec,
};
use crate::rd_sim::io::{write_snapshot_csv, write_trace_csv};
use crate::rd_sim::{
    build_initial_data, check_domain, default_traces, llw_grid, measure_c_llw, measure_hat_c_llw,
    measure_speeds, measure_tilde_c_llw, profile_check, run_from, Forcing, Grid1D,
    InitialDataSpec, LlwMeasurement, RunConfig, DOMAIN_MARGIN, MIN_CONE_OFFSET,
};
use crate::speeds::{
    assemble_speeds, hat_c_nlp, llw_bounds, sigma_set, CompetitionRegime, LlwInput, LlwProvenance,
    SpeedReport, SpreadingRegime,
};

/// Where artifacts go, if anywhere.
struct Sink<'a> {
    dir: Option<&'a Path>,
}

impl Sink<'_> {
    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.map(|d| d.join(name))
    }
}

/// Reaction-diffusion grid of `cfg`, sized from the predicted speeds where
/// the ends are not given.
pub fn rd_grid(cfg: &ExperimentConfig) -> Result<Grid1D> {
    let s = sigma_set(&cfg.params, &cfg.decay);
    let sdr = 2.0 * (cfg.params.d * cfg.params.r).sqrt();
    let t = cfg.t_end;
    let x_max = cfg
        .grid
        .x_max
        .unwrap_or(s.sigma1.max(sdr) * t + 2.0 * DOMAIN_MARGIN);
    let x_min = cfg.grid.x_min.unwrap_or(match s.sigma3 {
        Some(s3) => -(s3.max(sdr)) * t - 2.0 * DOMAIN_MARGIN,
        None => -2.0 * DOMAIN_MARGIN,
    });
    Grid1D::new(x_min, x_max, cfg.grid.dx)
}

fn llw_mode(cfg: &ExperimentConfig) -> LlwMode {
    cfg.llw.mode.unwrap_or(if cfg.kind.simulates() || cfg.kind == ExperimentKind::MeasureLlw {
        LlwMode::Measure
    } else {
        LlwMode::LowerBound
    })
}

fn measure_all(cfg: &ExperimentConfig) -> Result<Vec<LlwMeasurement>> {
    let p = &cfg.params;
    let t = cfg.llw.t_end.unwrap_or(cfg.t_end);
    let dx = cfg.llw.dx.unwrap_or(cfg.grid.dx);
    let grid = llw_grid(p, dx, t)?;
    info!("measuring traveling-wave speeds on {} cells to t = {t}", grid.n);
    match p.regime() {
        CompetitionRegime::WeakCompetition => {
            let (c, tilde) = rayon::join(
                || measure_c_llw(p, &grid, t),
                || measure_tilde_c_llw(p, &grid, t),
            );
            Ok(vec![c?, tilde?])
        }
        CompetitionRegime::MixedCase => Ok(vec![measure_hat_c_llw(p, &grid, t)?]),
        CompetitionRegime::Unsupported => Err(Error::invalid("b", "need a < 1 and b != 1")),
    }
}

/// Traveling-wave inputs for [`assemble_speeds`] according to the LLW mode.
fn llw_inputs(
    cfg: &ExperimentConfig,
    rec: &mut RunRecord,
) -> Result<(LlwInput, Option<LlwInput>)> {
    let bounds = llw_bounds(&cfg.params)?;
    let weak = cfg.params.regime() == CompetitionRegime::WeakCompetition;
    let inputs = match llw_mode(cfg) {
        LlwMode::Measure => {
            let ms = measure_all(cfg)?;
            for m in &ms {
                rec.llw.push(LlwSummary::from(m));
                rec.checks.push(Check::flag(
                    format!("{:?} within bounds", m.kind),
                    m.bounds.widened(crate::rd_sim::LLW_SLACK).contains(m.speed),
                ));
            }
            let c = LlwInput::measured(ms[0].speed);
            let tilde = ms.get(1).map(|m| LlwInput::measured(m.speed));
            (c, tilde)
        }
        LlwMode::LowerBound => (
            LlwInput::lower(&bounds.c_llw),
            weak.then(|| LlwInput::lower(&bounds.tilde_c_llw)),
        ),
        LlwMode::UpperBound => (
            LlwInput::upper(&bounds.c_llw),
            weak.then(|| LlwInput::upper(&bounds.tilde_c_llw)),
        ),
        LlwMode::Given => {
            let given = |v: f64| LlwInput {
                value: v,
                provenance: LlwProvenance::Given,
            };
            let c = cfg
                .llw
                .c_llw
                .ok_or_else(|| Error::invalid("llw.c_llw", "required when llw.mode is `given`"))?;
            let tilde = if weak {
                Some(given(cfg.llw.tilde_c_llw.ok_or_else(|| {
                    Error::invalid("llw.tilde_c_llw", "required in the weak competition case")
                })?))
            } else {
                None
            };
            (given(c), tilde)
        }
    };
    Ok(inputs)
}

fn predict(cfg: &ExperimentConfig, rec: &mut RunRecord) -> Result<SpeedReport> {
    let (c, tilde) = llw_inputs(cfg, rec)?;
    let report = assemble_speeds(&cfg.params, &cfg.decay, c, tilde)?;
    for w in &report.warnings {
        warn!("{w}");
    }
    Ok(report)
}

fn simulate(cfg: &ExperimentConfig, rec: &mut RunRecord, sink: &Sink) -> Result<()> {
    // Cheap input checks before the traveling-wave measurements.
    let grid = rd_grid(cfg)?;
    check_domain(&cfg.params, &cfg.decay, &grid, cfg.t_end)?;
    let initial = build_initial_data(&InitialDataSpec::new(cfg.decay), &grid)?;

    let mut report = predict(cfg, rec)?;
    match cfg.kind {
        ExperimentKind::Tangfife if report.regime != SpreadingRegime::TangFife => {
            return Err(Error::invalid(
                "decay",
                format!(
                    "kind `tangfife` needs sigma1 = sigma2, got {} and {}",
                    report.sigma.sigma1, report.sigma.sigma2
                ),
            ));
        }
        _ => {}
    }
    let forcing = (cfg.kind == ExperimentKind::Forced).then(|| cfg.forcing.unwrap_or_default());
    if let Some(f) = &forcing {
        if let Some(s2p) = report.sigma.sigma2_prime {
            if f.c0 >= s2p {
                report.warnings.push(format!(
                    "forcing cone speed {} is not below sigma2' = {s2p}",
                    f.c0
                ));
            }
        }
    }

    let run_cfg = RunConfig {
        t_end: cfg.t_end,
        sample_dt: cfg.grid.sample_dt,
        traces: default_traces(&cfg.params),
        snapshot_times: vec![cfg.t_end],
    };
    info!(
        "{} run on {} cells, x in [{}, {}], to t = {}",
        cfg.kind.as_str(),
        grid.n,
        grid.x_min,
        grid.x_max,
        cfg.t_end
    );
    let out = run_from(
        initial,
        &cfg.params,
        &grid,
        forcing.as_ref().map(|f| f as &dyn Forcing),
        &run_cfg,
    )?;
    let measured = measure_speeds(&out, &report)?;
    rec.missing_samples = out
        .traces
        .iter()
        .zip(&out.missing_samples)
        .map(|(t, &m)| (t.name.clone(), m))
        .collect();

    for m in &measured {
        let Some(pred) = m.predicted else { continue };
        let tol = match m.name.as_str() {
            "v_right" => cfg.tolerances.c1,
            "u_right" if cfg.kind != ExperimentKind::Forced => cfg.tolerances.c2,
            "v_left" if cfg.kind != ExperimentKind::Forced => cfg.tolerances.c3,
            _ => continue,
        };
        rec.checks
            .push(Check::relative(format!("speed {}", m.name), m.measured, pred, tol));
    }

    let snap = out.snapshots.last().unwrap_or(&out.final_state);
    if cfg.profile.enabled
        && cfg.kind != ExperimentKind::Forced
        && cfg.profile.eta * snap.t > MIN_CONE_OFFSET
    {
        rec.profile = Some(profile_check(
            snap,
            &grid,
            &report,
            cfg.profile.eta,
            cfg.profile.tol,
        )?);
    }

    for tr in &out.traces {
        let name = format!("trace_{}.csv", tr.name);
        if let Some(p) = sink.path(&name) {
            write_trace_csv(&p, tr)?;
            rec.artifacts.push(name);
            let svg = format!("trace_{}.svg", tr.name);
            emit_plot(&p, PlotKind::FrontTrace, &sink.path(&svg).unwrap())?;
            rec.artifacts.push(svg);
        }
    }
    let name = format!("snapshot_{}.csv", snap.t.round());
    if let Some(p) = sink.path(&name) {
        write_snapshot_csv(&p, snap, &grid)?;
        rec.artifacts.push(name);
        emit_plot(&p, PlotKind::Profile, &sink.path("profile.svg").unwrap())?;
        rec.artifacts.push("profile.svg".into());
    }

    rec.measured = measured;
    rec.report = Some(report);
    Ok(())
}

fn hj_experiment(cfg: &ExperimentConfig, rec: &mut RunRecord, sink: &Sink) -> Result<()> {
    let sigma1 = sigma_set(&cfg.params, &cfg.decay).sigma1;
    let lambda_u = cfg.decay.lambda_u;
    let a = cfg.params.a;
    let hs = &cfg.hj;
    let hj = HjGrid::for_u_equation(sigma1, lambda_u, hs.dx, hs.t_end, hs.x_max)?;
    let spec = PiecewiseHamiltonianSpec::u_equation(sigma1, a);
    let sol = hj_solve(&spec, &hj)?;
    let (t, w) = sol.at(hs.t_end);
    let speed = zero_set_speed(w, &hj.grid, t)?;
    let (predicted, _) = hat_c_nlp(sigma1, lambda_u, a);
    rec.checks
        .push(Check::relative("zero-set speed", speed, predicted, hs.zero_set_rtol));

    let sandwich = match ExplicitSolution::super_w2(sigma1, lambda_u, a) {
        Ok(upper) => {
            let lower = ExplicitSolution::sub_w2(lambda_u);
            let r = sandwich_report(
                &sol,
                (0.0, hs.t_end),
                (hj.grid.x_min, hs.x_max),
                &lower,
                &upper,
                2.0 * hs.dx.sqrt(),
            );
            rec.checks.push(Check::flag("sandwich", r.pass));
            Some(r)
        }
        Err(e) => {
            warn!("no explicit upper exponent: {e}");
            None
        }
    };
    let summary = HjSummary {
        sigma1,
        lambda_u,
        a,
        dx: hs.dx,
        steps: sol.times.len() - 1,
        zero_set_speed: speed,
        predicted_zero_set_speed: predicted,
        sandwich,
    };
    if let Some(p) = sink.path("hj_solution.csv") {
        let stride = (summary.steps / 100).max(1);
        std::fs::write(&p, sol.to_csv(stride)).map_err(|e| Error::io(&p, e))?;
        rec.artifacts.push("hj_solution.csv".into());
    }
    if let Some(p) = sink.path("hj_report.json") {
        std::fs::write(&p, serde_json::to_string_pretty(&summary)? + "\n")
            .map_err(|e| Error::io(&p, e))?;
        rec.artifacts.push("hj_report.json".into());
    }
    rec.hj = Some(summary);
    Ok(())
}

/// Runs one experiment. Artifacts and `report.json` go to
/// `cfg.output_dir` when it is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let mut rec = RunRecord::new(cfg)?;
    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let sink = Sink {
        dir: cfg.output_dir.as_deref(),
    };
    let ctx = format!("{} experiment", cfg.kind.as_str());
    let res = match cfg.kind {
        ExperimentKind::Speeds => predict(cfg, &mut rec).map(|r| rec.report = Some(r)),
        ExperimentKind::MeasureLlw => {
            let mut c = cfg.clone();
            c.llw.mode = Some(LlwMode::Measure);
            predict(&c, &mut rec).map(|r| rec.report = Some(r))
        }
        ExperimentKind::Simulate
        | ExperimentKind::Tangfife
        | ExperimentKind::Mixedcase
        | ExperimentKind::Forced => simulate(cfg, &mut rec, &sink),
        ExperimentKind::Hj => hj_experiment(cfg, &mut rec, &sink),
        ExperimentKind::Sweep => run_sweep(cfg, &mut rec, sink.dir),
    };
    res.map_err(|e| e.context(ctx))?;
    rec.finish();
    if let Some(p) = sink.path("report.json") {
        rec.write_json(&p)?;
    }
    Ok(rec)
}

