//! Explicit finite-difference solver for the competition system
//!
//! ```text
//! u_t = u_xx + u (1 - u - a v - h)
//! v_t = d v_xx + r v (1 - b u - v - k)
//! ```
//!
//! with front tracking and least-squares speed fits.
//!
//! Forward Euler with the three-point Laplacian is monotone for
//! `dt <= 0.4 dx^2 / (2 max(1, d))`, so the discrete solution keeps values in
//! `[0, 1]` and preserves the competitive order `u1 <= u2, v1 >= v2`.

mod front;
mod grid;
pub mod io;
mod llw;
mod profile;
mod run;
mod scheme;

pub use front::{
    crossing_index, estimate_speed, front_location, Direction, FrontTrace, SpeedEstimate,
    MIN_FIT_SAMPLES,
};
pub use grid::{build_initial_data, Grid1D, InitialDataSpec, SimState};
pub use llw::{
    bump, llw_grid, measure_c_llw, measure_hat_c_llw, measure_llw, measure_tilde_c_llw, LlwKind,
    LlwMeasurement, BUMP_AMPLITUDE, BUMP_HALF_WIDTH, LLW_SLACK,
};
pub use profile::{profile_check, ProfileVerdict, ZoneVerdict, MIN_CONE_OFFSET};
pub use run::{
    check_domain, default_traces, expects_log_lag, measure_speeds, run, run_from, MeasuredSpeed,
    RunConfig, RunOutput, Species, TraceSpec, BOUNDARY_CELLS, DOMAIN_MARGIN,
};
pub use scheme::{step, ConeForcing, Forcing, Simulation, Stepper, CFL_SAFETY};
