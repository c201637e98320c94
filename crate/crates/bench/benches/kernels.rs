use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lvspread::hj::{hj_step, HjGrid, PiecewiseHamiltonianSpec};
use lvspread::rd_sim::{build_initial_data, Grid1D, InitialDataSpec, Stepper};
use lvspread::speeds::{
    assemble_speeds, hat_c_nlp, llw_bounds, DecayRates, LlwInput, ModelParams,
};

fn reference() -> (ModelParams, DecayRates) {
    (
        ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap(),
        DecayRates::new(1.0, 0.5, 0.5).unwrap(),
    )
}

fn rd_step(c: &mut Criterion) {
    let (params, decay) = reference();
    let mut group = c.benchmark_group("rd_step");
    for n in [2_000usize, 20_000] {
        let grid = Grid1D::new(-(n as f64) * 0.05, n as f64 * 0.05, 0.1).unwrap();
        let state = build_initial_data(&InitialDataSpec::new(decay), &grid).unwrap();
        let stepper = Stepper::new(params, grid, None).unwrap();
        let mut next = state.clone();
        group.bench_with_input(BenchmarkId::from_parameter(grid.n), &state, |b, s| {
            b.iter(|| stepper.step_into(black_box(s), &mut next, &[], &[]).unwrap())
        });
    }
    group.finish();
}

fn hj_step_bench(c: &mut Criterion) {
    let hj = HjGrid::for_u_equation(2.5, 1.0, 0.01, 1.0, 6.0).unwrap();
    let spec = PiecewiseHamiltonianSpec::u_equation(2.5, 0.5);
    let w: Vec<f64> = (0..hj.grid.n).map(|i| hj.grid.x(i).max(0.0)).collect();
    let mut out = vec![0.0; hj.grid.n];
    c.bench_function(&format!("hj_step/{}", hj.grid.n), |b| {
        b.iter(|| {
            hj_step(
                &spec,
                &hj.grid,
                0.5,
                hj.dt,
                hj.alpha_floor,
                (0.0, 1.0),
                black_box(&w),
                &mut out,
            )
        })
    });
}

fn speeds(c: &mut Criterion) {
    let (params, decay) = reference();
    let bounds = llw_bounds(&params).unwrap();
    c.bench_function("assemble_speeds", |b| {
        b.iter(|| {
            assemble_speeds(
                black_box(&params),
                black_box(&decay),
                LlwInput::lower(&bounds.c_llw),
                Some(LlwInput::lower(&bounds.tilde_c_llw)),
            )
            .unwrap()
        })
    });
    c.bench_function("hat_c_nlp", |b| {
        b.iter(|| hat_c_nlp(black_box(2.5), black_box(1.0), black_box(0.5)))
    });
}

criterion_group!(benches, rd_step, hj_step_bench, speeds);
criterion_main!(benches);
