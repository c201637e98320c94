use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    RightmostCrossing,
    LeftmostCrossing,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::RightmostCrossing => "rightmost",
            Direction::LeftmostCrossing => "leftmost",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rightmost" => Ok(Direction::RightmostCrossing),
            "leftmost" => Ok(Direction::LeftmostCrossing),
            other => Err(Error::invalid("direction", format!("unknown value {other:?}"))),
        }
    }
}

/// Index `i` of the extreme pair `(i, i+1)` straddling `threshold`.
pub fn crossing_index(field: &[f64], threshold: f64, direction: Direction) -> Option<usize> {
    let straddles = |i: usize| (field[i] >= threshold) != (field[i + 1] >= threshold);
    let n = field.len();
    if n < 2 {
        return None;
    }
    match direction {
        Direction::RightmostCrossing => (0..n - 1).rev().find(|&i| straddles(i)),
        Direction::LeftmostCrossing => (0..n - 1).find(|&i| straddles(i)),
    }
}

/// Position of the level set `{field = threshold}` at its extreme crossing,
/// by linear interpolation between the two bracketing cells.
pub fn front_location(
    field: &[f64],
    grid: &Grid1D,
    threshold: f64,
    direction: Direction,
) -> Result<f64> {
    let i = crossing_index(field, threshold, direction).ok_or(Error::NoCrossing { threshold })?;
    let (f0, f1) = (field[i], field[i + 1]);
    Ok(grid.x(i) + (threshold - f0) / (f1 - f0) * grid.dx)
}

/// Time series of one level-set position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontTrace {
    pub name: String,
    pub threshold: f64,
    pub direction: Direction,
    pub samples: Vec<(f64, f64)>,
}

impl FrontTrace {
    pub fn new(name: impl Into<String>, threshold: f64, direction: Direction) -> Self {
        FrontTrace {
            name: name.into(),
            threshold,
            direction,
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, x: f64) {
        debug_assert!(self.samples.last().is_none_or(|&(t0, _)| t > t0));
        self.samples.push((t, x));
    }

    pub fn t_end(&self) -> Option<f64> {
        self.samples.last().map(|s| s.0)
    }
}

/// Least-squares fit of a front trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedEstimate {
    pub speed: f64,
    pub intercept: f64,
    /// `gamma` in `x = c t - gamma ln t + beta`.
    pub log_correction_coeff: Option<f64>,
    pub rms_residual: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Fits `x(t) = c t + beta`, or `x(t) = c t - gamma ln t + beta`, to the
/// samples with `t` in `window` (default: the second half of the trace).
pub fn estimate_speed(
    trace: &FrontTrace,
    window: Option<(f64, f64)>,
    with_log_correction: bool,
) -> Result<SpeedEstimate> {
    let window = match window {
        Some(w) => w,
        None => {
            let t_end = trace.t_end().ok_or(Error::InsufficientSamples {
                needed: MIN_FIT_SAMPLES,
                got: 0,
            })?;
            (0.5 * t_end, t_end)
        }
    };
    let pts: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            got: pts.len(),
        });
    }
    if with_log_correction && pts.iter().any(|&(t, _)| t <= 0.0) {
        return Err(Error::invalid("window", "log correction needs t > 0"));
    }
    // Centre and scale the time columns; the raw columns t, ln t, 1 are
    // nearly collinear over short windows.
    let n = pts.len();
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let ts = (pts.iter().map(|p| (p.0 - tm).powi(2)).sum::<f64>() / n as f64).sqrt();
    let ts = if ts > 0.0 { ts } else { 1.0 };
    let lm = if with_log_correction {
        pts.iter().map(|p| p.0.ln()).sum::<f64>() / n as f64
    } else {
        0.0
    };
    let cols = if with_log_correction { 3 } else { 2 };
    let mut a = DMatrix::<f64>::zeros(n, cols);
    let mut y = DVector::<f64>::zeros(n);
    for (row, &(t, x)) in pts.iter().enumerate() {
        a[(row, 0)] = (t - tm) / ts;
        a[(row, 1)] = 1.0;
        if with_log_correction {
            a[(row, 2)] = t.ln() - lm;
        }
        y[row] = x;
    }
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::Numerical(format!("least squares failed: {e}")))?;
    let resid = &a * &coef - &y;
    let rms = (resid.norm_squared() / n as f64).sqrt();
    let speed = coef[0] / ts;
    let (gamma, intercept) = if with_log_correction {
        // x = speed (t - tm) + c1 + c2 (ln t - lm)
        (Some(-coef[2]), coef[1] - speed * tm - coef[2] * lm)
    } else {
        (None, coef[1] - speed * tm)
    };
    Ok(SpeedEstimate {
        speed,
        intercept,
        log_correction_coeff: gamma,
        rms_residual: rms,
        window,
        samples: n,
    })
}
