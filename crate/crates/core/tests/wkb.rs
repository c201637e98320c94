use lvspread::hj::{wkb_transform, ExplicitSolution};
use lvspread::rd_sim::{run, Grid1D, InitialDataSpec};
use lvspread::speeds::{DecayRates, ModelParams};

#[test]
fn rescaled_u_sits_in_the_sandwich() {
    let eps = 0.01;
    let t_sim = 1.0 / eps;
    let p = ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
    let d = DecayRates::new(1.0, 0.5, 0.5).unwrap();
    let g = Grid1D::new(-300.0, 400.0, 0.1).unwrap();
    let out = run(&InitialDataSpec::new(d), &p, &g, t_sim, None, &[t_sim]).unwrap();
    let snap = &out.snapshots[0];

    // Restrict to x_sim in [0, sigma1 / eps].
    let i0 = g.index_of(0.0);
    let i1 = g.index_of(2.5 / eps);
    let sub = Grid1D::new(g.x(i0), g.x(i1), g.dx).unwrap();
    let u = &snap.u[i0..i0 + sub.n];
    let w = wkb_transform(u, &sub, snap.t, eps).unwrap();

    let lower = ExplicitSolution::sub_w2(1.0);
    let upper = ExplicitSolution::super_w2(2.5, 1.0, 0.5).unwrap();
    let band = eps * eps.ln().abs();
    let mut below: f64 = 0.0;
    let mut above: f64 = 0.0;
    for (x, wi) in w.x.iter().zip(&w.w) {
        below = below.max(lower.eval(w.t, *x) - wi);
        above = above.max(wi - upper.eval(w.t, *x));
    }
    assert!(below <= band && above <= band, "band {band} below {below} above {above}");
}
