use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use usol_core::dyadic_decomp::{build_pv_psi, BumpKit};
use usol_core::exponent_region::{vertex, Vertex};
use usol_core::multipliers::{resolvent_apply, resolvent_multiplier, SpectralParameter};
use usol_core::normest::{opnorm_lower, random_field, NormProbe};
use usol_core::quadrature::OscillatoryCubature;
use usol_core::surface_ops::{oscillatory_i, stationary_point};
use usol_core::{Grid, GraphChart, QuadraticForm};

fn fft(c: &mut Criterion) {
    let f = random_field(&Grid::cubic(3, 32, 8.0).unwrap(), 1);
    c.bench_function("fft 32^3", |b| b.iter(|| black_box(f.fourier().unwrap())));
}

fn resolvent(c: &mut Criterion) {
    let form = QuadraticForm::new(3, 1).unwrap();
    let f = random_field(&Grid::cubic(3, 32, 8.0).unwrap(), 2);
    let z = SpectralParameter::on_unit_circle(1.0);
    c.bench_function("resolvent apply 32^3", |b| b.iter(|| black_box(resolvent_apply(&f, &form, z).unwrap())));
}

fn oscillatory(c: &mut Criterion) {
    let chart = GraphChart::new(QuadraticForm::new(3, 1).unwrap(), 1.0).unwrap();
    let cub = OscillatoryCubature::default();
    let x = stationary_point(&chart, &[1.5, 0.0], 40.0);
    c.bench_function("oscillatory I at x_d = 40", |b| b.iter(|| black_box(oscillatory_i(&x, &chart, &cub).unwrap())));
}

fn pv_psi(c: &mut Criterion) {
    let kit = BumpKit::shared();
    let psi = build_pv_psi(kit);
    c.bench_function("pv psi eval", |b| b.iter(|| black_box(psi.eval(black_box(3.7)))));
}

fn normest(c: &mut Criterion) {
    let form = QuadraticForm::new(3, 1).unwrap();
    let op = resolvent_multiplier(&Grid::cubic(3, 16, 8.0).unwrap(), &form, SpectralParameter::new(0.0, 1.0)).unwrap();
    let probe = NormProbe::for_pair(vertex(3, Vertex::F).unwrap()).with_iterations(5);
    let mut g = c.benchmark_group("normest");
    g.sample_size(10);
    g.bench_function("opnorm lower 16^3 x5", |b| b.iter(|| black_box(opnorm_lower(&op, &probe).unwrap())));
    g.finish();
}

criterion_group!(benches, fft, resolvent, oscillatory, pv_psi, normest);
criterion_main!(benches);
