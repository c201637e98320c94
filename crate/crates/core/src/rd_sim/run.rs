use serde::{Deserialize, Serialize};

use super::front::{estimate_speed, front_location, crossing_index, Direction, FrontTrace, SpeedEstimate};
use super::grid::{build_initial_data, Grid1D, InitialDataSpec, SimState};
use super::scheme::{Forcing, Simulation, Stepper};
use crate::error::{Error, Result};
use crate::speeds::{
    coexistence_equilibrium, kpp_speed, sigma_set, CompetitionRegime, DecayRates, ModelParams,
    NlpCase, SpeedReport,
};

/// Minimum clearance between predicted fronts and the domain ends.
pub const DOMAIN_MARGIN: f64 = 50.0;
/// A front closer than this many cells to either end aborts the run.
pub const BOUNDARY_CELLS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    U,
    V,
}

/// Which level set to follow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSpec {
    pub name: String,
    pub species: Species,
    pub threshold: f64,
    pub direction: Direction,
}

impl TraceSpec {
    pub fn new(name: &str, species: Species, threshold: f64, direction: Direction) -> Self {
        TraceSpec {
            name: name.to_string(),
            species,
            threshold,
            direction,
        }
    }
}

/// `u` at `k1/2`, `v` rightwards at `1/2` and leftwards at `k2/2`. In the
/// mixed case both rightward fronts are tracked at `1/2`.
pub fn default_traces(params: &ModelParams) -> Vec<TraceSpec> {
    use Direction::*;
    match (params.regime(), coexistence_equilibrium(params)) {
        (CompetitionRegime::WeakCompetition, Ok((k1, k2))) => vec![
            TraceSpec::new("u_right", Species::U, 0.5 * k1, RightmostCrossing),
            TraceSpec::new("v_right", Species::V, 0.5, RightmostCrossing),
            TraceSpec::new("v_left", Species::V, 0.5 * k2, LeftmostCrossing),
        ],
        _ => vec![
            TraceSpec::new("u_right", Species::U, 0.5, RightmostCrossing),
            TraceSpec::new("v_right", Species::V, 0.5, RightmostCrossing),
        ],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t_end: f64,
    /// Interval between front samples.
    pub sample_dt: f64,
    pub traces: Vec<TraceSpec>,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub grid: Grid1D,
    pub dt: f64,
    pub final_state: SimState,
    pub traces: Vec<FrontTrace>,
    pub snapshots: Vec<SimState>,
    /// Per trace, number of sample times with no crossing.
    pub missing_samples: Vec<usize>,
}

impl RunOutput {
    pub fn trace(&self, name: &str) -> Option<&FrontTrace> {
        self.traces.iter().find(|t| t.name == name)
    }
}

/// Checks that fronts moving at the fastest admissible speeds stay
/// `DOMAIN_MARGIN` away from both ends until `t_end`.
pub fn check_domain(
    params: &ModelParams,
    decay: &DecayRates,
    grid: &Grid1D,
    t_end: f64,
) -> Result<()> {
    let s = sigma_set(params, decay);
    let sdr = 2.0 * (params.d * params.r).sqrt();
    let right = s.sigma1.max(sdr) * t_end + DOMAIN_MARGIN;
    let left = match s.sigma3 {
        Some(s3) => -(s3.max(sdr)) * t_end - DOMAIN_MARGIN,
        None => -DOMAIN_MARGIN,
    };
    if right >= grid.x_max {
        return Err(Error::DomainTooSmall(format!(
            "x_max = {} but the rightward front can reach {right} by t = {t_end}",
            grid.x_max
        )));
    }
    if left <= grid.x_min {
        return Err(Error::DomainTooSmall(format!(
            "x_min = {} but the leftward front can reach {left} by t = {t_end}",
            grid.x_min
        )));
    }
    Ok(())
}

/// Marches `initial` to `cfg.t_end`, recording front traces and snapshots.
pub fn run_from(
    initial: SimState,
    params: &ModelParams,
    grid: &Grid1D,
    forcing: Option<&dyn Forcing>,
    cfg: &RunConfig,
) -> Result<RunOutput> {
    if !(cfg.t_end > 0.0) {
        return Err(Error::invalid("t_end", format!("must be > 0, got {}", cfg.t_end)));
    }
    if !(cfg.sample_dt > 0.0) {
        return Err(Error::invalid("sample_dt", "must be > 0"));
    }
    let stepper = Stepper::new(*params, *grid, forcing)?;
    let dt = stepper.dt;
    let mut sim = Simulation::new(stepper, initial, forcing);
    let mut traces: Vec<FrontTrace> = cfg
        .traces
        .iter()
        .map(|s| FrontTrace::new(s.name.clone(), s.threshold, s.direction))
        .collect();
    let mut missing = vec![0; traces.len()];
    let mut snap_times = cfg.snapshot_times.clone();
    snap_times.sort_by(f64::total_cmp);
    let mut snaps = Vec::with_capacity(snap_times.len());
    let mut next_snap = 0;

    let n_samples = (cfg.t_end / cfg.sample_dt).round() as usize;
    for k in 0..=n_samples {
        let t_sample = (k as f64 * cfg.sample_dt).min(cfg.t_end);
        while next_snap < snap_times.len() && snap_times[next_snap] <= t_sample {
            sim.advance_to(snap_times[next_snap])?;
            snaps.push(sim.state.clone());
            next_snap += 1;
        }
        sim.advance_to(t_sample)?;
        let state = &sim.state;
        for (j, spec) in cfg.traces.iter().enumerate() {
            let field = match spec.species {
                Species::U => &state.u,
                Species::V => &state.v,
            };
            let Some(i) = crossing_index(field, spec.threshold, spec.direction) else {
                missing[j] += 1;
                continue;
            };
            if i < BOUNDARY_CELLS || i + 1 + BOUNDARY_CELLS >= grid.n {
                return Err(Error::DomainTooSmall(format!(
                    "front `{}` reached x = {} at t = {}",
                    spec.name,
                    grid.x(i),
                    state.t
                )));
            }
            let x = front_location(field, grid, spec.threshold, spec.direction)?;
            traces[j].push(state.t, x);
        }
    }
    while next_snap < snap_times.len() {
        sim.advance_to(snap_times[next_snap])?;
        snaps.push(sim.state.clone());
        next_snap += 1;
    }
    Ok(RunOutput {
        grid: *grid,
        dt,
        final_state: sim.state,
        traces,
        snapshots: snaps,
        missing_samples: missing,
    })
}

/// Builds initial data from `spec`, checks the domain, and runs with the
/// default traces sampled once per unit time.
pub fn run(
    spec: &InitialDataSpec,
    params: &ModelParams,
    grid: &Grid1D,
    t_end: f64,
    forcing: Option<&dyn Forcing>,
    snapshot_times: &[f64],
) -> Result<RunOutput> {
    check_domain(params, &spec.decay, grid, t_end)?;
    let initial = build_initial_data(spec, grid)?;
    let cfg = RunConfig {
        t_end,
        sample_dt: 1.0,
        traces: default_traces(params),
        snapshot_times: snapshot_times.to_vec(),
    };
    run_from(initial, params, grid, forcing, &cfg)
}

/// Whether the front named `name` is predicted to travel at a minimal
/// (linearly pulled) speed, where positions lag by `O(ln t)`.
///
/// Fronts whose speed is set by the decay of the initial tail converge
/// exponentially; fitting a log term there only trades bias for variance.
pub fn expects_log_lag(name: &str, report: &SpeedReport) -> bool {
    let p = &report.params;
    let dec = &report.decay;
    match name {
        "v_right" => dec.lambda_v_plus >= (p.r / p.d).sqrt(),
        "u_right" => match report.c2 {
            None => dec.lambda_v_plus >= (p.r / p.d).sqrt(),
            Some(c2) => {
                report.case_tag == Some(NlpCase::LocallyPulled)
                    || report.hat_c_nlp.is_some_and(|h| c2 > h)
            }
        },
        "v_left" => {
            let growth = p.r * (1.0 - p.b);
            let sigma3 = kpp_speed(p.d, growth, dec.lambda_v_minus);
            let tail = dec.lambda_v_minus < (growth / p.d).sqrt();
            let tilde = report.tilde_c_llw_input.map_or(0.0, |i| i.value);
            !tail || tilde >= sigma3
        }
        _ => true,
    }
}

/// A fitted speed next to its prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredSpeed {
    pub name: String,
    /// Signed speed: leftward fronts are reported negative.
    pub measured: f64,
    pub predicted: Option<f64>,
    pub relative_error: Option<f64>,
    pub fit: SpeedEstimate,
}

/// Fits every trace over the second half of the run and pairs it with the
/// prediction from `report`.
pub fn measure_speeds(out: &RunOutput, report: &SpeedReport) -> Result<Vec<MeasuredSpeed>> {
    out.traces
        .iter()
        .map(|tr| {
            let fit = estimate_speed(tr, None, expects_log_lag(&tr.name, report))
                .map_err(|e| e.context(format!("fitting trace `{}`", tr.name)))?;
            let predicted = match tr.name.as_str() {
                "v_right" => Some(report.c1),
                "u_right" => report.c2.or(Some(report.c1)),
                "v_left" => report.c3,
                _ => None,
            };
            Ok(MeasuredSpeed {
                name: tr.name.clone(),
                measured: fit.speed,
                predicted,
                relative_error: predicted.map(|p| (fit.speed - p).abs() / p.abs()),
                fit,
            })
        })
        .collect()
}
