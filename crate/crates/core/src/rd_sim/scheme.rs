use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::speeds::ModelParams;

use super::grid::{flush, Grid1D, SimState};

/// Fraction of the diffusive stability limit used by default.
pub const CFL_SAFETY: f64 = 0.4;

/// Bound on `dt` times the largest reaction slope. Together with the
/// diffusive bound this keeps every update coefficient nonnegative, which is
/// what makes the scheme monotone.
const REACTION_SAFETY: f64 = 0.5;

/// Extra death terms `h`, `k` in
/// `u_t = u_xx + u(1 - u - a v - h)`, `v_t = d v_xx + r v(1 - b u - v - k)`.
pub trait Forcing: Sync {
    fn h(&self, t: f64, x: f64) -> f64;
    fn k(&self, t: f64, x: f64) -> f64;
    /// Speed of the cone `x >= c0 t` outside which the forcing vanishes.
    fn cone_speed(&self) -> f64;
    /// Upper bound on `|h|` and `|k|`, used for the step-size limit.
    fn bound(&self) -> f64;

    /// Fills `h` and `k` on the grid at time `t`.
    fn fill(&self, t: f64, grid: &Grid1D, h: &mut [f64], k: &mut [f64]) {
        for i in 0..grid.n {
            let x = grid.x(i);
            h[i] = self.h(t, x);
            k[i] = self.k(t, x);
        }
    }
}

/// `H0 e^{-max(0, x - c0 t)} (1 - tanh(x - c0 t + sqrt(1 + t))) / 2` for both
/// `h` and `k`.
///
/// The exponential alone does not vanish on `x >= c0 t`; the tanh cutoff,
/// sliding back from the cone edge like `sqrt(1+t)`, makes the supremum over
/// the cone decay to zero while keeping the forcing nonnegative and smooth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeForcing {
    pub h0: f64,
    pub c0: f64,
}

impl Default for ConeForcing {
    fn default() -> Self {
        ConeForcing { h0: 0.2, c0: 1.0 }
    }
}

impl ConeForcing {
    #[inline]
    fn value(&self, t: f64, x: f64) -> f64 {
        let z = x - self.c0 * t;
        if z > 60.0 {
            return 0.0;
        }
        let cut = z + (1.0 + t).sqrt();
        if cut < -20.0 {
            return self.h0;
        }
        self.h0 * (-z.max(0.0)).exp() * 0.5 * (1.0 - cut.tanh())
    }
}

impl Forcing for ConeForcing {
    fn h(&self, t: f64, x: f64) -> f64 {
        self.value(t, x)
    }

    fn k(&self, t: f64, x: f64) -> f64 {
        self.value(t, x)
    }

    fn cone_speed(&self) -> f64 {
        self.c0
    }

    fn bound(&self) -> f64 {
        self.h0.abs()
    }

    fn fill(&self, t: f64, grid: &Grid1D, h: &mut [f64], k: &mut [f64]) {
        let edge = self.c0 * t - (1.0 + t).sqrt();
        // Indices outside [first, last) take the constant values h0 and 0.
        let first = grid.index_of(edge - 21.0);
        let last = (grid.index_of(self.c0 * t + 61.0) + 1).min(grid.n);
        h[..first].fill(self.h0);
        k[..first].fill(self.h0);
        for i in first..last {
            let val = self.value(t, grid.x(i));
            h[i] = val;
            k[i] = val;
        }
        h[last..].fill(0.0);
        k[last..].fill(0.0);
    }
}

/// Forward Euler with the three-point Laplacian and reflecting ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepper {
    pub params: ModelParams,
    pub grid: Grid1D,
    pub dt: f64,
}

impl Stepper {
    /// Largest admissible step for the given forcing bound.
    pub fn dt_limit(params: &ModelParams, grid: &Grid1D, forcing_bound: f64) -> f64 {
        let diffusive = CFL_SAFETY * grid.dx * grid.dx / (2.0 * params.d.max(1.0));
        let slope_u = 1.0 + params.a + forcing_bound;
        let slope_v = params.r * (1.0 + params.b + forcing_bound);
        diffusive.min(REACTION_SAFETY / slope_u.max(slope_v))
    }

    pub fn new(params: ModelParams, grid: Grid1D, forcing: Option<&dyn Forcing>) -> Result<Self> {
        let bound = forcing.map_or(0.0, |f| f.bound());
        Self::with_dt(params, grid, Self::dt_limit(&params, &grid, bound), forcing)
    }

    pub fn with_dt(
        params: ModelParams,
        grid: Grid1D,
        dt: f64,
        forcing: Option<&dyn Forcing>,
    ) -> Result<Self> {
        params.validate()?;
        let bound = forcing.map_or(0.0, |f| f.bound());
        let limit = Self::dt_limit(&params, &grid, bound);
        if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
            return Err(Error::CflViolation { dt, limit });
        }
        Ok(Stepper { params, grid, dt })
    }

    /// Advances `cur` by one step into `next`. `h`, `k` hold the forcing at
    /// `cur.t` (or are empty when unforced).
    pub fn step_into(&self, cur: &SimState, next: &mut SimState, h: &[f64], k: &[f64]) -> Result<()> {
        let n = self.grid.n;
        debug_assert_eq!(cur.u.len(), n);
        next.u.resize(n, 0.0);
        next.v.resize(n, 0.0);
        let ModelParams { d, r, a, b } = self.params;
        let dt = self.dt;
        let mu = dt / (self.grid.dx * self.grid.dx);
        let forced = !h.is_empty();
        let (u, v) = (&cur.u, &cur.v);

        let mut bad = false;
        for i in 0..n {
            let (ul, ur, vl, vr) = if i == 0 {
                (u[1], u[1], v[1], v[1])
            } else if i == n - 1 {
                (u[n - 2], u[n - 2], v[n - 2], v[n - 2])
            } else {
                (u[i - 1], u[i + 1], v[i - 1], v[i + 1])
            };
            let (ui, vi) = (u[i], v[i]);
            let (hi, ki) = if forced { (h[i], k[i]) } else { (0.0, 0.0) };
            let un = ui + mu * (ul - 2.0 * ui + ur) + dt * ui * (1.0 - ui - a * vi - hi);
            let vn = vi + d * mu * (vl - 2.0 * vi + vr) + dt * r * vi * (1.0 - b * ui - vi - ki);
            bad |= !(un.is_finite() && vn.is_finite());
            next.u[i] = flush(un);
            next.v[i] = flush(vn);
        }
        if bad {
            let index = next
                .u
                .iter()
                .zip(&next.v)
                .position(|(x, y)| !(x.is_finite() && y.is_finite()))
                .unwrap_or(0);
            let field = if next.u[index].is_finite() { "v" } else { "u" };
            return Err(Error::NonFinite { field, index });
        }
        next.t = cur.t + dt;
        Ok(())
    }
}

/// One step of the (optionally forced) system.
pub fn step(
    state: &SimState,
    params: &ModelParams,
    grid: &Grid1D,
    dt: f64,
    forcing: Option<&dyn Forcing>,
) -> Result<SimState> {
    let stepper = Stepper::with_dt(*params, *grid, dt, forcing)?;
    let mut next = SimState {
        t: state.t,
        u: vec![0.0; grid.n],
        v: vec![0.0; grid.n],
    };
    match forcing {
        Some(f) => {
            let mut h = vec![0.0; grid.n];
            let mut k = vec![0.0; grid.n];
            f.fill(state.t, grid, &mut h, &mut k);
            stepper.step_into(state, &mut next, &h, &k)?;
        }
        None => stepper.step_into(state, &mut next, &[], &[])?,
    }
    Ok(next)
}

/// Owns the state, scratch buffers and forcing of one run.
pub struct Simulation<'f> {
    pub stepper: Stepper,
    pub state: SimState,
    scratch: SimState,
    forcing: Option<&'f dyn Forcing>,
    h: Vec<f64>,
    k: Vec<f64>,
}

impl<'f> Simulation<'f> {
    pub fn new(stepper: Stepper, state: SimState, forcing: Option<&'f dyn Forcing>) -> Self {
        let n = stepper.grid.n;
        let (h, k) = if forcing.is_some() {
            (vec![0.0; n], vec![0.0; n])
        } else {
            (Vec::new(), Vec::new())
        };
        Simulation {
            scratch: state.clone(),
            stepper,
            state,
            forcing,
            h,
            k,
        }
    }

    pub fn step(&mut self) -> Result<()> {
        if let Some(f) = self.forcing {
            f.fill(self.state.t, &self.stepper.grid, &mut self.h, &mut self.k);
        }
        self.stepper
            .step_into(&self.state, &mut self.scratch, &self.h, &self.k)?;
        std::mem::swap(&mut self.state, &mut self.scratch);
        Ok(())
    }

    /// Steps until `t >= t_target - dt/2`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        let half = 0.5 * self.stepper.dt;
        while self.state.t < t_target - half {
            self.step()?;
        }
        Ok(())
    }
}
