use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::speeds::DecayRates;

/// Uniform cell-centred grid `x_i = x_min + i dx`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid1D {
    /// `x_max` is snapped to `x_min + (n-1) dx`.
    pub fn new(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::invalid("dx", format!("must be > 0, got {dx}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::invalid(
                "x_max",
                format!("need x_min < x_max, got [{x_min}, {x_max}]"),
            ));
        }
        let n = ((x_max - x_min) / dx).round() as usize + 1;
        if n < 16 {
            return Err(Error::invalid("dx", format!("grid has {n} cells, need >= 16")));
        }
        Ok(Grid1D {
            x_min,
            x_max: x_min + (n - 1) as f64 * dx,
            dx,
            n,
        })
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Index of the cell nearest to `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.dx).round();
        i.clamp(0.0, (self.n - 1) as f64) as usize
    }
}

/// Densities of both species at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl SimState {
    pub fn uniform(grid: &Grid1D, u: f64, v: f64) -> Self {
        SimState {
            t: 0.0,
            u: vec![u; grid.n],
            v: vec![v; grid.n],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSpec {
    /// Value of `u_0` on `x <= 0`.
    #[serde(default = "one")]
    pub theta0: f64,
    pub decay: DecayRates,
    /// Peak of `v_0`, attained at `x = 0`.
    #[serde(default = "one")]
    pub v_amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl InitialDataSpec {
    pub fn new(decay: DecayRates) -> Self {
        InitialDataSpec {
            theta0: 1.0,
            decay,
            v_amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.decay.validate()?;
        for (name, value) in [("theta0", self.theta0), ("v_amplitude", self.v_amplitude)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::invalid(name, format!("must lie in (0, 1], got {value}")));
            }
        }
        Ok(())
    }
}

/// Values below this are flushed to zero to keep the arithmetic out of the
/// subnormal range.
pub(crate) const FLUSH: f64 = 1e-300;

#[inline]
pub(crate) fn flush(x: f64) -> f64 {
    if x < FLUSH {
        0.0
    } else {
        x
    }
}

/// `u_0 = theta0 min(1, e^{-lambda_u x})` and
/// `v_0 = amp min(1, e^{-lambda_v^+ x_+} e^{lambda_v^- x_-})`.
pub fn build_initial_data(spec: &InitialDataSpec, grid: &Grid1D) -> Result<SimState> {
    spec.validate()?;
    if !(grid.x_min <= 0.0 && 0.0 <= grid.x_max) {
        return Err(Error::invalid("x_min", "grid must contain x = 0"));
    }
    let DecayRates {
        lambda_u,
        lambda_v_plus,
        lambda_v_minus,
    } = spec.decay;
    for (name, l) in [
        ("lambda_u", lambda_u),
        ("lambda_v_plus", lambda_v_plus),
        ("lambda_v_minus", lambda_v_minus),
    ] {
        if l * grid.dx > 1.0 {
            return Err(Error::invalid(
                name,
                format!("tail e^(-{l} x) is unresolved at dx = {}", grid.dx),
            ));
        }
    }
    let mut u = Vec::with_capacity(grid.n);
    let mut v = Vec::with_capacity(grid.n);
    for i in 0..grid.n {
        let x = grid.x(i);
        u.push(flush(spec.theta0 * (-lambda_u * x).exp().min(1.0)));
        let tail = (-lambda_v_plus * x.max(0.0) + lambda_v_minus * x.min(0.0)).exp();
        v.push(flush(spec.v_amplitude * tail.min(1.0)));
    }
    Ok(SimState { t: 0.0, u, v })
}
