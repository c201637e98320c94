//! Numerical values of the traveling-wave speeds that have no closed form.
//!
//! Each measurement runs on a half line `[x_min, x_max]` whose reflecting
//! left end stands in for the symmetry axis of an even initial bump, so the
//! front is tracked only on the right.

use serde::{Deserialize, Serialize};

use super::front::{estimate_speed, Direction, FrontTrace, SpeedEstimate};
use super::grid::{Grid1D, SimState};
use super::run::{run_from, RunConfig, Species, TraceSpec};
use crate::error::{Error, Result};
use crate::speeds::{coexistence_equilibrium, llw_bounds, CompetitionRegime, LlwBounds, ModelParams};

/// Half-width of the initial bump (full width 10 on the mirrored line).
pub const BUMP_HALF_WIDTH: f64 = 5.0;
/// Height of the bump; any value in `(0, 1)` is admissible.
pub const BUMP_AMPLITUDE: f64 = 0.5;
/// Relative slack allowed around the known bounds.
pub const LLW_SLACK: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlwKind {
    /// `(k1, k2)` invading `(0, 1)`: `u` bump on `v = 1`.
    CLlw,
    /// `(k1, k2)` invading `(1, 0)`: `v` bump on `u = 1`.
    TildeCLlw,
    /// Mixed case, `(1, 0)` invading `(0, 1)`: `u` bump on `v = 1`.
    HatCLlw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlwMeasurement {
    pub kind: LlwKind,
    pub speed: f64,
    pub bounds: LlwBounds,
    pub fit: SpeedEstimate,
    pub trace: FrontTrace,
}

/// Indicator of `[x_min, x_min + 5]` with a linear ramp two cells wide.
pub fn bump(grid: &Grid1D) -> Vec<f64> {
    let edge = grid.x_min + BUMP_HALF_WIDTH;
    (0..grid.n)
        .map(|i| {
            let s = (edge - grid.x(i)) / (2.0 * grid.dx) + 0.5;
            BUMP_AMPLITUDE * s.clamp(0.0, 1.0)
        })
        .collect()
}

pub fn measure_llw(
    kind: LlwKind,
    params: &ModelParams,
    grid: &Grid1D,
    t_end: f64,
) -> Result<LlwMeasurement> {
    let pair = llw_bounds(params)?;
    let regime = params.regime();
    let (bounds, species, threshold) = match kind {
        LlwKind::CLlw | LlwKind::TildeCLlw if regime != CompetitionRegime::WeakCompetition => {
            return Err(Error::invalid("b", "LLW speeds need a < 1 and b < 1"));
        }
        LlwKind::HatCLlw if regime != CompetitionRegime::MixedCase => {
            return Err(Error::invalid("b", "the mixed-case speed needs a < 1 < b"));
        }
        LlwKind::CLlw => (pair.c_llw, Species::U, 0.5 * coexistence_equilibrium(params)?.0),
        LlwKind::TildeCLlw => (
            pair.tilde_c_llw,
            Species::V,
            0.5 * coexistence_equilibrium(params)?.1,
        ),
        LlwKind::HatCLlw => (pair.c_llw, Species::U, 0.5 * BUMP_AMPLITUDE),
    };
    let reach = grid.x_min + BUMP_HALF_WIDTH + bounds.upper * (1.0 + LLW_SLACK) * t_end;
    if reach + super::run::DOMAIN_MARGIN >= grid.x_max {
        return Err(Error::DomainTooSmall(format!(
            "x_max = {} but the front can reach {reach} by t = {t_end}",
            grid.x_max
        )));
    }

    let b = bump(grid);
    let rest: Vec<f64> = b.iter().map(|x| 1.0 - x).collect();
    let initial = match species {
        Species::U => SimState { t: 0.0, u: b, v: rest },
        Species::V => SimState { t: 0.0, u: rest, v: b },
    };
    let cfg = RunConfig {
        t_end,
        sample_dt: 1.0,
        traces: vec![TraceSpec::new(
            "llw",
            species,
            threshold,
            Direction::RightmostCrossing,
        )],
        snapshot_times: vec![],
    };
    let out = run_from(initial, params, grid, None, &cfg)?;
    let trace = out.traces.into_iter().next().expect("one trace");
    let fit = estimate_speed(&trace, None, true)?;
    let wide = bounds.widened(LLW_SLACK);
    if !wide.contains(fit.speed) {
        return Err(Error::Numerical(format!(
            "{kind:?} measured {} outside [{}, {}]; refine dx or lengthen t_end",
            fit.speed, wide.lower, wide.upper
        )));
    }
    Ok(LlwMeasurement {
        kind,
        speed: fit.speed,
        bounds,
        fit,
        trace,
    })
}

/// Grid on `[0, L]` just long enough for `measure_llw` over `t_end`.
pub fn llw_grid(params: &ModelParams, dx: f64, t_end: f64) -> Result<Grid1D> {
    let upper = llw_bounds(params)?.c_llw.upper.max(2.0 * (params.d * params.r).sqrt());
    let len = BUMP_HALF_WIDTH + upper * (1.0 + LLW_SLACK) * t_end + 2.0 * super::run::DOMAIN_MARGIN;
    Grid1D::new(0.0, len, dx)
}

pub fn measure_c_llw(params: &ModelParams, grid: &Grid1D, t_end: f64) -> Result<LlwMeasurement> {
    measure_llw(LlwKind::CLlw, params, grid, t_end)
}

pub fn measure_tilde_c_llw(
    params: &ModelParams,
    grid: &Grid1D,
    t_end: f64,
) -> Result<LlwMeasurement> {
    measure_llw(LlwKind::TildeCLlw, params, grid, t_end)
}

pub fn measure_hat_c_llw(
    params: &ModelParams,
    grid: &Grid1D,
    t_end: f64,
) -> Result<LlwMeasurement> {
    measure_llw(LlwKind::HatCLlw, params, grid, t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        let g = Grid1D::new(0.0, 20.0, 0.1).unwrap();
        let b = bump(&g);
        assert_eq!(b[0], BUMP_AMPLITUDE);
        assert_eq!(b[g.index_of(4.0)], BUMP_AMPLITUDE);
        assert_eq!(b[g.index_of(6.0)], 0.0);
        assert!(b.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_wrong_regime() {
        let p = ModelParams::new(1.0, 1.0, 0.5, 1.5).unwrap();
        let g = Grid1D::new(0.0, 300.0, 0.2).unwrap();
        assert!(measure_c_llw(&p, &g, 50.0).is_err());
        let q = ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        assert!(measure_hat_c_llw(&q, &g, 50.0).is_err());
    }

    #[test]
    fn decoupled_speed_is_two() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let t_end = 120.0;
        let g = llw_grid(&p, 0.2, t_end).unwrap();
        let m = measure_c_llw(&p, &g, t_end).unwrap();
        assert!((m.speed - 2.0).abs() < 0.03 * 2.0, "{}", m.speed);
        let m = measure_tilde_c_llw(&p, &g, t_end).unwrap();
        assert!((m.speed - 2.0).abs() < 0.03 * 2.0, "{}", m.speed);
    }
}
