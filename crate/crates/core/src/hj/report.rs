use serde::{Deserialize, Serialize};

use super::explicit::ExplicitSolution;
use super::solver::HjSolution;

/// Sup-norm gap between a discrete solution and one explicit formula on one
/// branch `lo < x/t < hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchError {
    pub speed_range: (f64, f64),
    pub sup_error: f64,
    pub points: usize,
}

/// Comparison of a discrete solution with a sub-solution below and a
/// super-solution above over a space-time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub lower: ExplicitSolution,
    pub upper: ExplicitSolution,
    pub slack: f64,
    /// `max(lower - w)`: how far the discrete solution dips below.
    pub below_lower: f64,
    /// `max(w - upper)`: how far the discrete solution rises above.
    pub above_upper: f64,
    /// `|w - upper|` on each branch of the upper formula at the last level.
    pub upper_branches: Vec<BranchError>,
    pub pass: bool,
}

/// Checks `lower - slack <= w <= upper + slack` at every stored level in
/// `t_range` and every cell in `x_range`.
pub fn sandwich_report(
    sol: &HjSolution,
    t_range: (f64, f64),
    x_range: (f64, f64),
    lower: &ExplicitSolution,
    upper: &ExplicitSolution,
    slack: f64,
) -> SandwichReport {
    let mut below_lower = f64::NEG_INFINITY;
    let mut above_upper = f64::NEG_INFINITY;
    for (&t, w) in sol.times.iter().zip(&sol.w) {
        if t < t_range.0 || t > t_range.1 + 1e-12 {
            continue;
        }
        for (i, &wi) in w.iter().enumerate() {
            let x = sol.grid.x(i);
            if x < x_range.0 || x > x_range.1 {
                continue;
            }
            below_lower = below_lower.max(lower.eval(t, x) - wi);
            above_upper = above_upper.max(wi - upper.eval(t, x));
        }
    }

    let (t, w) = sol.at(t_range.1);
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(upper.breakpoints());
    edges.push(f64::INFINITY);
    let mut branches: Vec<BranchError> = edges
        .windows(2)
        .map(|e| BranchError {
            speed_range: (e[0], e[1]),
            sup_error: 0.0,
            points: 0,
        })
        .collect();

    for (i, &wi) in w.iter().enumerate() {
        let x = sol.grid.x(i);
        if x < x_range.0 || x > x_range.1 {
            continue;
        }
        let hi = upper.eval(t, x);
        let z = if t > 0.0 { x / t } else { x.signum() * f64::INFINITY };
        if let Some(b) = branches
            .iter_mut()
            .find(|b| z > b.speed_range.0 && z <= b.speed_range.1)
        {
            b.sup_error = b.sup_error.max((wi - hi).abs());
            b.points += 1;
        }
    }
    // Outer edges are infinite; report the window instead.
    if t > 0.0 {
        if let Some(b) = branches.first_mut() {
            b.speed_range.0 = x_range.0 / t;
        }
        if let Some(b) = branches.last_mut() {
            b.speed_range.1 = x_range.1 / t;
        }
    }
    branches.retain(|b| b.points > 0);
    SandwichReport {
        t_range,
        x_range,
        lower: *lower,
        upper: *upper,
        slack,
        below_lower,
        above_upper,
        upper_branches: branches,
        pass: below_lower <= slack && above_upper <= slack,
    }
}
