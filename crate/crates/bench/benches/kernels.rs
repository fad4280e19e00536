use carleson_core::barriers::{lemma61_check, select_ctilde, sharpness_example};
use carleson_core::geometry::{reifenberg_delta, DomainSpec};
use carleson_core::harnack::harnack_integral_original;
use carleson_core::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use carleson_core::solver::{solve_dirichlet, Drift, EllipticityPair, GridField, Problem, SolverOptions};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn log_rnl(r: f64) -> RescaledNonlinearity {
    RescaledNonlinearity::new(Nonlinearity::log_model(1.0).unwrap(), r).unwrap()
}

fn integrals(c: &mut Criterion) {
    let nl = Nonlinearity::log_model(1.0).unwrap();
    c.bench_function("harnack_integral_log_model", |b| {
        b.iter(|| harnack_integral_original(black_box(1e-3), black_box(1e3), 0.5, &nl).unwrap())
    });
    c.bench_function("lemma_check_eps_0.1", |b| b.iter(|| lemma61_check(black_box(0.1)).unwrap()));
}

fn barriers(c: &mut Criterion) {
    let ell = EllipticityPair::new(1.0, 2.0).unwrap();
    let rnl = log_rnl(0.1);
    let mut g = c.benchmark_group("barriers");
    g.sample_size(10);
    g.bench_function("select_ctilde_log_model", |b| {
        b.iter(|| select_ctilde(1.0, 10.0, &rnl, &ell, [0.0, 2.0], [0.0, -1.0]).unwrap())
    });
    g.bench_function("sharpness_1e4", |b| b.iter(|| sharpness_example(black_box(1e4), 0.03).unwrap()));
    g.finish();
}

fn geometry(c: &mut Criterion) {
    let dom = DomainSpec::v_graph(0.1, 1.0).unwrap();
    c.bench_function("reifenberg_delta_graph", |b| b.iter(|| reifenberg_delta(&dom, [0.0, 0.0], black_box(0.5)).unwrap()));
}

fn solver(c: &mut Criterion) {
    let ell = EllipticityPair::new(1.0, 2.0).unwrap();
    let prob = Problem::pucci_minus(ell, Drift::Rescaled(log_rnl(0.5)));
    let dom = DomainSpec::half_space();
    let grid = GridField::over_box(&dom, [-1.0, 0.0], [1.0, 1.0], 1.0 / 32.0, |p| p[1] * (1.0 + 0.3 * p[0].sin())).unwrap();
    let opts = SolverOptions::default();
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    g.bench_function("pucci_minus_log_model_h32", |b| b.iter(|| solve_dirichlet(&prob, &grid, &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, integrals, barriers, geometry, solver);
criterion_main!(benches);
