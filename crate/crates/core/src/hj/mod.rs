//! Limiting Hamilton-Jacobi equations of the rescaled exponents.
//!
//! After the change of variables `w = -eps ln u` at `(eps t, eps x)`, the
//! exponents solve variational inequalities
//!
//! ```text
//! min{ w_t + q |w_x|^2 + base - dip chi(t, x), w } = 0
//! ```
//!
//! with `chi` the indicator of a cone. This module holds the explicit
//! solutions, a monotone Lax-Friedrichs solver with obstacle projection, and
//! the zero-set speed read-out.

mod explicit;
mod report;
mod solver;
mod zero_set;

pub use explicit::ExplicitSolution;
pub use report::{sandwich_report, BranchError, SandwichReport};
pub use solver::{
    default_alpha_floor, hj_solve, hj_solve_from, hj_step, HjGrid, HjSolution, InitialSlope,
    PiecewiseHamiltonianSpec, Region, HJ_CFL,
};
pub use zero_set::{wkb_transform, zero_set_speed, WkbField};
