use serde::{Deserialize, Serialize};

use super::grid::{Grid1D, SimState};
use crate::error::{Error, Result};
use crate::speeds::{SpeedReport, SpreadingRegime};

/// Smallest `eta t` accepted: cones narrower than this say little about the
/// long-time limit.
pub const MIN_CONE_OFFSET: f64 = 20.0;

/// Sup of the deviation from one plateau over one cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneVerdict {
    /// The state `(u, v)` expected in the cone.
    pub state: (f64, f64),
    /// Cone edges in units of speed, `x / t`.
    pub speed_range: (f64, f64),
    /// Cone edges in space at the snapshot time, clipped to the grid.
    pub x_range: (f64, f64),
    pub sup_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileVerdict {
    pub t: f64,
    pub eta: f64,
    pub tol: f64,
    pub zones: Vec<ZoneVerdict>,
    /// Tang-Fife regime only: length of the longest interval where
    /// `|u| + |v - 1| < tol`, and whether it is shorter than `eta t`.
    pub longest_v_plateau: Option<f64>,
    pub pass: bool,
}

/// Checks that the snapshot sits within `tol` of the predicted plateau in
/// every cone `(c_{i+1} + eta) t < x < (c_i - eta) t`.
///
/// The outermost cones extend to the grid ends.
pub fn profile_check(
    state: &SimState,
    grid: &Grid1D,
    report: &SpeedReport,
    eta: f64,
    tol: f64,
) -> Result<ProfileVerdict> {
    let t = state.t;
    if !(eta > 0.0) || !(tol > 0.0) {
        return Err(Error::invalid("eta", "eta and tol must be > 0"));
    }
    if eta * t <= MIN_CONE_OFFSET {
        return Err(Error::invalid(
            "eta",
            format!("eta t = {} must exceed {MIN_CONE_OFFSET}", eta * t),
        ));
    }
    let inf = f64::INFINITY;
    // (lower speed, upper speed, plateau)
    let zones: Vec<(f64, f64, (f64, f64))> = match report.regime {
        SpreadingRegime::Separated => {
            let (k1, k2) = report.coexistence.expect("weak competition");
            let c2 = report.c2.expect("separated fronts");
            let c3 = report.c3.expect("weak competition");
            vec![
                (report.c1 + eta, inf, (0.0, 0.0)),
                (c2 + eta, report.c1 - eta, (0.0, 1.0)),
                (c3 + eta, c2 - eta, (k1, k2)),
                (-inf, c3 - eta, (1.0, 0.0)),
            ]
        }
        SpreadingRegime::TangFife => {
            let (k1, k2) = report.coexistence.expect("weak competition");
            let c3 = report.c3.expect("weak competition");
            vec![
                (report.c1 + eta, inf, (0.0, 0.0)),
                (c3 + eta, report.c1 - eta, (k1, k2)),
                (-inf, c3 - eta, (1.0, 0.0)),
            ]
        }
        SpreadingRegime::MixedCase => {
            let c2 = report.c2.expect("mixed case");
            vec![
                (report.c1 + eta, inf, (0.0, 0.0)),
                (c2 + eta, report.c1 - eta, (0.0, 1.0)),
                (-inf, c2 - eta, (1.0, 0.0)),
            ]
        }
    };

    let mut verdicts = Vec::with_capacity(zones.len());
    for (lo, hi, (pu, pv)) in zones {
        let x_lo = (lo * t).max(grid.x_min);
        let x_hi = (hi * t).min(grid.x_max);
        let mut sup = f64::NEG_INFINITY;
        for i in 0..grid.n {
            let x = grid.x(i);
            if x > x_lo && x < x_hi {
                sup = sup.max((state.u[i] - pu).abs() + (state.v[i] - pv).abs());
            }
        }
        if sup == f64::NEG_INFINITY {
            return Err(Error::DomainTooSmall(format!(
                "cone {lo} < x/t < {hi} holds no grid points at t = {t}"
            )));
        }
        verdicts.push(ZoneVerdict {
            state: (pu, pv),
            speed_range: (lo, hi),
            x_range: (x_lo, x_hi),
            sup_deviation: sup,
            pass: sup < tol,
        });
    }

    let longest_v_plateau = (report.regime == SpreadingRegime::TangFife).then(|| {
        let mut best = 0usize;
        let mut run = 0usize;
        for i in 0..grid.n {
            if state.u[i].abs() + (state.v[i] - 1.0).abs() < tol {
                run += 1;
                best = best.max(run);
            } else {
                run = 0;
            }
        }
        best as f64 * grid.dx
    });
    let plateau_ok = longest_v_plateau.is_none_or(|len| len < eta * t);
    let pass = plateau_ok && verdicts.iter().all(|z| z.pass);
    Ok(ProfileVerdict {
        t,
        eta,
        tol,
        zones: verdicts,
        longest_v_plateau,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speeds::{assemble_speeds, llw_bounds, DecayRates, LlwInput, ModelParams};

    fn reference_report() -> SpeedReport {
        let p = ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        let d = DecayRates::new(1.0, 0.5, 0.5).unwrap();
        let b = llw_bounds(&p).unwrap();
        assemble_speeds(&p, &d, LlwInput::lower(&b.c_llw), Some(LlwInput::lower(&b.tilde_c_llw)))
            .unwrap()
    }

    /// Exact step profile with plateaus switching at `c_i t`.
    fn ideal(grid: &Grid1D, t: f64, rep: &SpeedReport) -> SimState {
        let (k1, k2) = rep.coexistence.unwrap();
        let mut s = SimState::uniform(grid, 0.0, 0.0);
        s.t = t;
        for i in 0..grid.n {
            let x = grid.x(i) / t;
            let (u, v) = if x > rep.c1 {
                (0.0, 0.0)
            } else if x > rep.c2.unwrap() {
                (0.0, 1.0)
            } else if x > rep.c3.unwrap() {
                (k1, k2)
            } else {
                (1.0, 0.0)
            };
            s.u[i] = u;
            s.v[i] = v;
        }
        s
    }

    #[test]
    fn ideal_profile_passes() {
        let rep = reference_report();
        let g = Grid1D::new(-700.0, 1200.0, 0.5).unwrap();
        let s = ideal(&g, 300.0, &rep);
        let v = profile_check(&s, &g, &rep, 0.15, 0.05).unwrap();
        assert_eq!(v.zones.len(), 4);
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn misplaced_front_fails() {
        let rep = reference_report();
        let g = Grid1D::new(-700.0, 1200.0, 0.5).unwrap();
        let mut s = ideal(&g, 300.0, &rep);
        // Move the u front to 1.8 t.
        for i in 0..g.n {
            let x = g.x(i) / 300.0;
            if x > 1.5 && x < 1.8 {
                s.u[i] = 2.0 / 3.0;
                s.v[i] = 2.0 / 3.0;
            }
        }
        let v = profile_check(&s, &g, &rep, 0.15, 0.05).unwrap();
        assert!(!v.pass);
        assert!(!v.zones[1].pass);
        assert!(v.zones[2].pass);
    }

    #[test]
    fn small_eta_t_rejected() {
        let rep = reference_report();
        let g = Grid1D::new(-700.0, 1200.0, 0.5).unwrap();
        let s = ideal(&g, 100.0, &rep);
        assert!(profile_check(&s, &g, &rep, 0.15, 0.05).is_err());
    }
}
