use lvspread::rd_sim::io::{read_snapshot_csv, write_snapshot_csv};
use lvspread::rd_sim::{step, ConeForcing, Forcing, Grid1D, SimState, Stepper};
use lvspread::speeds::ModelParams;
use proptest::prelude::*;

fn grid() -> Grid1D {
    Grid1D::new(-5.0, 5.0, 0.25).unwrap()
}

fn field(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..=1.0, n)
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.2f64..3.0, 0.2f64..3.0, 0.0f64..2.0, 0.0f64..2.0)
        .prop_map(|(d, r, a, b)| ModelParams::new(d, r, a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_square_is_invariant(p in params(), u in field(41), v in field(41)) {
        let g = grid();
        let stepper = Stepper::new(p, g, None).unwrap();
        let mut s = SimState { t: 0.0, u, v };
        let mut next = s.clone();
        for _ in 0..200 {
            stepper.step_into(&s, &mut next, &[], &[]).unwrap();
            std::mem::swap(&mut s, &mut next);
        }
        for (&u, &v) in s.u.iter().zip(&s.v) {
            prop_assert!((0.0..=1.0).contains(&u), "{u}");
            prop_assert!((0.0..=1.0).contains(&v), "{v}");
        }
    }

    #[test]
    fn competitive_order_is_preserved(p in params(), u1 in field(41), du in field(41),
                                      v2 in field(41), dv in field(41)) {
        let g = grid();
        let u2: Vec<f64> = u1.iter().zip(&du).map(|(a, b)| a + (1.0 - a) * b).collect();
        let v1: Vec<f64> = v2.iter().zip(&dv).map(|(a, b)| a + (1.0 - a) * b).collect();
        let stepper = Stepper::new(p, g, None).unwrap();
        let mut lo = SimState { t: 0.0, u: u1, v: v1 };
        let mut hi = SimState { t: 0.0, u: u2, v: v2 };
        let (mut a, mut b) = (lo.clone(), hi.clone());
        for _ in 0..200 {
            stepper.step_into(&lo, &mut a, &[], &[]).unwrap();
            stepper.step_into(&hi, &mut b, &[], &[]).unwrap();
            std::mem::swap(&mut lo, &mut a);
            std::mem::swap(&mut hi, &mut b);
            for i in 0..g.n {
                prop_assert!(lo.u[i] - hi.u[i] <= 1e-15);
                prop_assert!(hi.v[i] - lo.v[i] <= 1e-15);
            }
        }
    }

    #[test]
    fn uniform_state_follows_the_kinetics(p in params(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let g = grid();
        let dt = Stepper::dt_limit(&p, &g, 0.0);
        let s = SimState::uniform(&g, u, v);
        let next = step(&s, &p, &g, dt, None).unwrap();
        let eu = u + dt * u * (1.0 - u - p.a * v);
        let ev = v + dt * p.r * v * (1.0 - p.b * u - v);
        for i in 0..g.n {
            prop_assert!((next.u[i] - eu).abs() <= 1e-14);
            prop_assert!((next.v[i] - ev).abs() <= 1e-14);
        }
    }

    #[test]
    fn cone_forcing_is_bounded_and_vanishes_ahead(t in 0.0f64..200.0, z in -300.0f64..300.0) {
        let f = ConeForcing::default();
        let x = f.c0 * t + z;
        let h = f.h(t, x);
        prop_assert!((0.0..=f.h0).contains(&h));
        prop_assert_eq!(h, f.k(t, x));
        if z > 60.0 {
            prop_assert_eq!(h, 0.0);
        }
    }
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid();
    let s = SimState {
        t: 1.25,
        u: (0..g.n).map(|i| (i as f64 * 0.37).sin().abs()).collect(),
        v: (0..g.n).map(|i| 1.0 / (1.0 + i as f64)).collect(),
    };
    let path = dir.path().join("snap.csv");
    write_snapshot_csv(&path, &s, &g).unwrap();
    let (xs, back) = read_snapshot_csv(&path).unwrap();
    assert_eq!(xs, g.xs());
    assert_eq!(back, s);
}

#[test]
fn cfl_violation_is_reported() {
    let p = ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
    let g = grid();
    let limit = Stepper::dt_limit(&p, &g, 0.0);
    assert!(Stepper::with_dt(p, g, 2.0 * limit, None).is_err());
}
