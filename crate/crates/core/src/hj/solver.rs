use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rd_sim::Grid1D;

/// Set of `(t, x)` where the competition dip is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// `x < speed t`, or `x <= speed t` when inclusive.
    Below { speed: f64, inclusive: bool },
    /// `lo t < x < hi t`.
    Between { lo: f64, hi: f64 },
    /// `x > speed t`, or `x >= speed t` when inclusive.
    Above { speed: f64, inclusive: bool },
    Nowhere,
}

impl Region {
    #[inline]
    pub fn contains(&self, t: f64, x: f64) -> bool {
        match *self {
            Region::Below { speed, inclusive } => {
                if inclusive {
                    x <= speed * t
                } else {
                    x < speed * t
                }
            }
            Region::Between { lo, hi } => lo * t < x && x < hi * t,
            Region::Above { speed, inclusive } => {
                if inclusive {
                    x >= speed * t
                } else {
                    x > speed * t
                }
            }
            Region::Nowhere => false,
        }
    }
}

/// `H(t, x, p) = quad p^2 + base - dip chi_region(t, x)` in
/// `min{w_t + H, w} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseHamiltonianSpec {
    pub quad: f64,
    pub base: f64,
    pub dip: f64,
    pub region: Region,
}

impl PiecewiseHamiltonianSpec {
    /// Limit equation of the slower species: `|p|^2 + 1 - a chi{x < sigma1 t}`.
    pub fn u_equation(sigma1: f64, a: f64) -> Self {
        PiecewiseHamiltonianSpec {
            quad: 1.0,
            base: 1.0,
            dip: a,
            region: Region::Below {
                speed: sigma1,
                inclusive: false,
            },
        }
    }

    /// `|p|^2 + 1 - a chi{sigma2 t < x < sigma1 t}`.
    pub fn u_equation_band(sigma1: f64, sigma2: f64, a: f64) -> Self {
        PiecewiseHamiltonianSpec {
            quad: 1.0,
            base: 1.0,
            dip: a,
            region: Region::Between {
                lo: sigma2,
                hi: sigma1,
            },
        }
    }

    /// `d |p|^2 + r (1 - b chi{x <= sigma2 t})`.
    pub fn v_equation(d: f64, r: f64, b: f64, sigma2: f64) -> Self {
        PiecewiseHamiltonianSpec {
            quad: d,
            base: r,
            dip: r * b,
            region: Region::Below {
                speed: sigma2,
                inclusive: true,
            },
        }
    }

    /// No competition: `quad |p|^2 + base`.
    pub fn free(quad: f64, base: f64) -> Self {
        PiecewiseHamiltonianSpec {
            quad,
            base,
            dip: 0.0,
            region: Region::Nowhere,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("quad", self.quad), ("base", self.base), ("dip", self.dip)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(self.quad > 0.0) {
            return Err(Error::invalid("quad", "must be > 0"));
        }
        let finite = match self.region {
            Region::Below { speed, .. } | Region::Above { speed, .. } => speed.is_finite(),
            Region::Between { lo, hi } => lo.is_finite() && hi.is_finite(),
            Region::Nowhere => true,
        };
        if !finite {
            return Err(Error::invalid("region", "speeds must be finite"));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64, p: f64) -> f64 {
        let chi = if self.region.contains(t, x) { 1.0 } else { 0.0 };
        self.quad * p * p + self.base - self.dip * chi
    }
}

/// Initial datum `w(0, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSlope {
    /// `lambda max(x, 0)`.
    OneSided { lambda: f64 },
    /// `plus max(x, 0) + minus max(-x, 0)`.
    TwoSided { plus: f64, minus: f64 },
}

impl InitialSlope {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            InitialSlope::OneSided { lambda } => lambda * x.max(0.0),
            InitialSlope::TwoSided { plus, minus } => plus * x.max(0.0) + minus * (-x).max(0.0),
        }
    }

    /// Far-field slopes `(left, right)` of `w` in `x`.
    pub fn far_slopes(&self) -> (f64, f64) {
        match *self {
            InitialSlope::OneSided { lambda } => (0.0, lambda),
            InitialSlope::TwoSided { plus, minus } => (-minus, plus),
        }
    }

    pub fn max_abs_slope(&self) -> f64 {
        let (l, r) = self.far_slopes();
        l.abs().max(r.abs())
    }
}

/// Space-time grid and dissipation settings of one HJ run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HjGrid {
    pub grid: Grid1D,
    pub dt: f64,
    pub t_end: f64,
    pub initial: InitialSlope,
    /// Lower bound on the Lax-Friedrichs dissipation coefficient.
    pub alpha_floor: f64,
}

/// `2 quad max(lambdas)`: the largest `|H_p|` over slopes the scheme can
/// produce, since it never steepens beyond the initial Lipschitz bound.
///
/// Any extra dissipation widens the smeared corner at the zero-set edge,
/// which shifts the read-out speed by several percent at `dx = 0.05`.
pub fn default_alpha_floor(quad: f64, lambdas: &[f64]) -> f64 {
    2.0 * quad * lambdas.iter().copied().fold(0.0, f64::max)
}

/// Fraction of `dx / alpha` used for the time step.
pub const HJ_CFL: f64 = 0.5;

impl HjGrid {
    pub fn new(grid: Grid1D, t_end: f64, initial: InitialSlope, alpha_floor: f64) -> Result<Self> {
        if !(t_end > 0.0) {
            return Err(Error::invalid("t_end", format!("must be > 0, got {t_end}")));
        }
        if !(alpha_floor > 0.0) {
            return Err(Error::invalid("alpha_floor", "must be > 0"));
        }
        Ok(HjGrid {
            grid,
            dt: HJ_CFL * grid.dx / alpha_floor,
            t_end,
            initial,
            alpha_floor,
        })
    }

    /// `x in [-2, max(2 lambda_u, sigma1) t_end + 2]`, widened to `x_max_min`.
    pub fn for_u_equation(
        sigma1: f64,
        lambda_u: f64,
        dx: f64,
        t_end: f64,
        x_max_min: f64,
    ) -> Result<Self> {
        if !(lambda_u > 0.0 && lambda_u.is_finite()) {
            return Err(Error::invalid("lambda_u", format!("must be > 0, got {lambda_u}")));
        }
        let x_max = ((2.0 * lambda_u).max(sigma1) * t_end + 2.0).max(x_max_min);
        let grid = Grid1D::new(-2.0, x_max, dx)?;
        HjGrid::new(
            grid,
            t_end,
            InitialSlope::OneSided { lambda: lambda_u },
            default_alpha_floor(1.0, &[lambda_u]),
        )
    }
}

/// Discrete solution at every time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjSolution {
    pub grid: Grid1D,
    pub times: Vec<f64>,
    pub w: Vec<Vec<f64>>,
}

impl HjSolution {
    /// Index of the stored time level closest to `t`.
    pub fn level(&self, t: f64) -> usize {
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            0
        } else if k >= self.times.len() {
            self.times.len() - 1
        } else if (self.times[k] - t).abs() < (t - self.times[k - 1]).abs() {
            k
        } else {
            k - 1
        }
    }

    pub fn at(&self, t: f64) -> (f64, &[f64]) {
        let k = self.level(t);
        (self.times[k], &self.w[k])
    }

    /// CSV `t,x,w`, one row per stored cell, every `stride`-th time level.
    pub fn to_csv(&self, stride: usize) -> String {
        let mut s = String::from("t,x,w\n");
        for (k, (t, w)) in self.times.iter().zip(&self.w).enumerate() {
            if k % stride.max(1) != 0 && k + 1 != self.times.len() {
                continue;
            }
            for (i, wi) in w.iter().enumerate() {
                s.push_str(&format!("{t:.16e},{:.16e},{wi:.16e}\n", self.grid.x(i)));
            }
        }
        s
    }
}

/// One step of the obstacle scheme
/// `w* = w - dt H_LF`, `w_next = max(w*, 0)`, with
/// `H_LF = H((p- + p+)/2) - alpha (p+ - p-)/2`.
///
/// Ghost values extend the grid with the slopes `(left, right)`.
pub fn hj_step(
    spec: &PiecewiseHamiltonianSpec,
    grid: &Grid1D,
    t: f64,
    dt: f64,
    alpha: f64,
    slopes: (f64, f64),
    w: &[f64],
    out: &mut [f64],
) {
    let n = grid.n;
    let dx = grid.dx;
    let ghost_l = w[0] - slopes.0 * dx;
    let ghost_r = w[n - 1] + slopes.1 * dx;
    for i in 0..n {
        let wl = if i == 0 { ghost_l } else { w[i - 1] };
        let wr = if i + 1 == n { ghost_r } else { w[i + 1] };
        let pm = (w[i] - wl) / dx;
        let pp = (wr - w[i]) / dx;
        let h = spec.eval(t, grid.x(i), 0.5 * (pm + pp)) - 0.5 * alpha * (pp - pm);
        out[i] = (w[i] - dt * h).max(0.0);
    }
}

fn max_slope(w: &[f64], dx: f64, slopes: (f64, f64)) -> f64 {
    w.windows(2)
        .map(|p| ((p[1] - p[0]) / dx).abs())
        .fold(slopes.0.abs().max(slopes.1.abs()), f64::max)
}

/// Marches an arbitrary initial field; boundary ghosts use `slopes`.
pub fn hj_solve_from(
    spec: &PiecewiseHamiltonianSpec,
    hj: &HjGrid,
    w0: Vec<f64>,
    slopes: (f64, f64),
) -> Result<HjSolution> {
    spec.validate()?;
    let grid = hj.grid;
    if w0.len() != grid.n {
        return Err(Error::invalid("w0", format!("length {} != grid size {}", w0.len(), grid.n)));
    }
    let steps = (hj.t_end / hj.dt).ceil() as usize;
    let dt = hj.t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut levels = Vec::with_capacity(steps + 1);
    times.push(0.0);
    levels.push(w0);
    for k in 0..steps {
        let t = k as f64 * dt;
        let w = &levels[k];
        let alpha = hj
            .alpha_floor
            .max(2.0 * spec.quad * max_slope(w, grid.dx, slopes));
        if dt * alpha > grid.dx * (1.0 + 1e-12) {
            return Err(Error::CflViolation {
                dt,
                limit: grid.dx / alpha,
            });
        }
        let mut next = vec![0.0; grid.n];
        hj_step(spec, &grid, t, dt, alpha, slopes, w, &mut next);
        if let Some(index) = next.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { field: "w", index });
        }
        times.push((k + 1) as f64 * dt);
        levels.push(next);
    }
    Ok(HjSolution {
        grid,
        times,
        w: levels,
    })
}

/// Solves `min{w_t + H(t, x, w_x), w} = 0` from the datum in `hj.initial`.
pub fn hj_solve(spec: &PiecewiseHamiltonianSpec, hj: &HjGrid) -> Result<HjSolution> {
    let w0 = (0..hj.grid.n).map(|i| hj.initial.eval(hj.grid.x(i))).collect();
    hj_solve_from(spec, hj, w0, hj.initial.far_slopes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj::ExplicitSolution;

    #[test]
    fn region_membership() {
        let below = Region::Below {
            speed: 2.0,
            inclusive: false,
        };
        assert!(!below.contains(1.0, 2.0));
        assert!(below.contains(1.0, 1.9));
        let below_eq = Region::Below {
            speed: 2.0,
            inclusive: true,
        };
        assert!(below_eq.contains(1.0, 2.0));
        let band = Region::Between { lo: 1.0, hi: 2.0 };
        assert!(band.contains(1.0, 1.5) && !band.contains(1.0, 1.0));
        assert!(!Region::Nowhere.contains(1.0, 0.0));
    }

    #[test]
    fn zero_slope_stays_zero() {
        let spec = PiecewiseHamiltonianSpec::u_equation(2.5, 0.5);
        let grid = Grid1D::new(-2.0, 6.0, 0.05).unwrap();
        let hj = HjGrid::new(grid, 1.0, InitialSlope::OneSided { lambda: 0.0 }, 3.5).unwrap();
        let sol = hj_solve(&spec, &hj).unwrap();
        assert!(sol.w.iter().flatten().all(|&w| w == 0.0));
    }

    fn free_error(dx: f64) -> f64 {
        let lambda_u = 1.5;
        let hj = HjGrid::for_u_equation(2.0, lambda_u, dx, 1.0, 6.0).unwrap();
        let sol = hj_solve(&PiecewiseHamiltonianSpec::free(1.0, 1.0), &hj).unwrap();
        let exact = ExplicitSolution::sub_w2(lambda_u);
        let (t, w) = sol.at(1.0);
        (0..hj.grid.n)
            .filter(|&i| hj.grid.x(i) <= 4.5)
            .map(|i| (w[i] - exact.eval(t, hj.grid.x(i))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn free_equation_converges_to_formula() {
        let errs: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&dx| free_error(dx)).collect();
        for (e, dx) in errs.iter().zip([0.1f64, 0.05, 0.025]) {
            assert!(*e <= dx.sqrt(), "dx={dx} err={e}");
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn cfl_violation_detected() {
        let spec = PiecewiseHamiltonianSpec::free(1.0, 1.0);
        let grid = Grid1D::new(-2.0, 6.0, 0.05).unwrap();
        let mut hj = HjGrid::new(grid, 0.5, InitialSlope::OneSided { lambda: 1.0 }, 0.5).unwrap();
        hj.dt = grid.dx;
        assert!(matches!(hj_solve(&spec, &hj), Err(Error::CflViolation { .. })));
    }

    #[test]
    fn level_lookup() {
        let spec = PiecewiseHamiltonianSpec::free(1.0, 1.0);
        let hj = HjGrid::for_u_equation(2.0, 1.0, 0.1, 1.0, 6.0).unwrap();
        let sol = hj_solve(&spec, &hj).unwrap();
        assert_eq!(sol.at(1.0).0, *sol.times.last().unwrap());
        assert_eq!(sol.at(-1.0).0, 0.0);
        let csv = sol.to_csv(1000);
        assert!(csv.starts_with("t,x,w\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * hj.grid.n);
    }
}
