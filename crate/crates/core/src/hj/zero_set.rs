use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rd_sim::Grid1D;

/// Cells beyond the first positive one used to estimate the slope.
const SLOPE_CELLS: usize = 10;

/// Speed `x*/t` of the right edge of `{w = 0}`.
///
/// The profile is assumed to vanish on the left and grow linearly past the
/// edge. A line is fitted to the cells where `w` lies in `[eps/4, eps]`,
/// `eps = 10 dx s` with `s` the local slope, and extrapolated to `w = 0`.
/// This keeps the estimate away from the smeared corner at the edge.
pub fn zero_set_speed(w: &[f64], grid: &Grid1D, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", format!("must be > 0, got {t}")));
    }
    if w.len() != grid.n {
        return Err(Error::invalid("w", "length does not match grid"));
    }
    if w[0] > 0.0 {
        return Err(Error::Degenerate("w > 0 at the left end: empty zero set".into()));
    }
    let j0 = w
        .iter()
        .position(|&v| v > 0.0)
        .ok_or_else(|| Error::Degenerate("w vanishes on the whole grid".into()))?;
    let j1 = (j0 + SLOPE_CELLS).min(grid.n - 1);
    if j1 == j0 {
        return Err(Error::DomainTooSmall("zero-set edge at the right end".into()));
    }
    let slope = (w[j1] - w[j0 - 1]) / ((j1 - j0 + 1) as f64 * grid.dx);
    if !(slope > 0.0) {
        return Err(Error::Numerical(format!("non-positive slope {slope} past the zero set")));
    }
    let eps = SLOPE_CELLS as f64 * grid.dx * slope;

    let mut pts = Vec::new();
    for (i, &v) in w.iter().enumerate().skip(j0) {
        if v > eps {
            break;
        }
        if v >= 0.25 * eps {
            pts.push((grid.x(i), v));
        }
    }
    if pts.len() < 2 {
        // Steep profile: interpolate between the last zero and first positive cell.
        let (x0, x1) = (grid.x(j0 - 1), grid.x(j0));
        let (w0, w1) = (w[j0 - 1], w[j0]);
        return Ok((x0 - w0 * (x1 - x0) / (w1 - w0)) / t);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mw = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxw: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - mw)).sum();
    let beta = sxw / sxx;
    if !(beta > 0.0) {
        return Err(Error::Numerical("fitted slope is not positive".into()));
    }
    Ok((mx - mw / beta) / t)
}

/// Rescaled logarithm `w = -eps ln(field)` at `(eps t, eps x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbField {
    pub t: f64,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

/// Fails on any non-positive entry, since its logarithm is undefined.
pub fn wkb_transform(field: &[f64], grid: &Grid1D, t_sim: f64, eps: f64) -> Result<WkbField> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", format!("must be > 0, got {eps}")));
    }
    if field.len() != grid.n {
        return Err(Error::invalid("field", "length does not match grid"));
    }
    if let Some(index) = field.iter().position(|&u| !(u > 0.0) || !u.is_finite()) {
        return Err(Error::invalid(
            "field",
            format!("entry {index} is {} and has no logarithm", field[index]),
        ));
    }
    Ok(WkbField {
        t: eps * t_sim,
        x: (0..grid.n).map(|i| eps * grid.x(i)).collect(),
        w: field.iter().map(|&u| -eps * u.ln()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj::ExplicitSolution;

    fn sample(w: &ExplicitSolution, grid: &Grid1D, t: f64) -> Vec<f64> {
        (0..grid.n).map(|i| w.eval(t, grid.x(i))).collect()
    }

    #[test]
    fn case_b_edge() {
        let w = ExplicitSolution::super_w2(2.5, 1.0, 0.5).unwrap();
        for dx in [0.1, 0.05, 0.02] {
            let g = Grid1D::new(-2.0, 6.0, dx).unwrap();
            let s = zero_set_speed(&sample(&w, &g, 1.0), &g, 1.0).unwrap();
            assert!((s - 1.5).abs() <= dx, "dx={dx} s={s}");
        }
    }

    #[test]
    fn super_w1_edge() {
        let w = ExplicitSolution::super_w1(0.5, 1.0, 1.0);
        let g = Grid1D::new(-2.0, 8.0, 0.05).unwrap();
        let s = zero_set_speed(&sample(&w, &g, 2.0), &g, 2.0).unwrap();
        assert!((s - 2.5).abs() <= 0.05, "{s}");
    }

    #[test]
    fn degenerate_profiles() {
        let g = Grid1D::new(-2.0, 6.0, 0.1).unwrap();
        assert!(zero_set_speed(&vec![0.0; g.n], &g, 1.0).is_err());
        assert!(zero_set_speed(&vec![1.0; g.n], &g, 1.0).is_err());
        assert!(zero_set_speed(&vec![0.0; g.n], &g, 0.0).is_err());
    }

    #[test]
    fn wkb_values() {
        let g = Grid1D::new(0.0, 20.0, 1.0).unwrap();
        let f: Vec<f64> = (0..g.n).map(|i| (-(i as f64)).exp()).collect();
        let out = wkb_transform(&f, &g, 100.0, 0.01).unwrap();
        assert_eq!(out.t, 1.0);
        for (i, w) in out.w.iter().enumerate() {
            assert!((w - 0.01 * i as f64).abs() < 1e-12);
        }
        let mut bad = f.clone();
        bad[3] = 0.0;
        assert!(wkb_transform(&bad, &g, 100.0, 0.01).is_err());
    }
}
