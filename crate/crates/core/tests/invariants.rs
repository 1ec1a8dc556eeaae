use usol_core::exponent_region::{vertex, Vertex};
use usol_core::multipliers::{resolvent_multiplier, SpectralParameter};
use usol_core::normest::{opnorm_lower, NormProbe};
use usol_core::quadrature::OscillatoryCubature;
use usol_core::surface_ops::{evolution_u, evolution_u_adjoint, oscillatory_i, stationary_point};
use usol_core::{Axis, Complex64, Grid, GraphChart, QuadraticForm, SampledField};

fn chart() -> GraphChart {
    GraphChart::new(QuadraticForm::new(3, 1).unwrap(), 1.0).unwrap()
}

fn chart_grid() -> Grid {
    Grid::new(vec![Axis::new(64, 16.0).with_carrier(1.5), Axis::new(64, 16.0)]).unwrap()
}

fn l2(f: &SampledField) -> f64 {
    f.l2_norm_sq().sqrt()
}

#[test]
fn evolution_composed_with_its_adjoint_is_the_squared_cutoff() {
    let chart = chart();
    let g = usol_core::normest::random_field(&chart_grid(), 3);
    for t in [0.0, 0.7, 5.0] {
        let ug = evolution_u(&g, &chart, t, None).unwrap();
        assert!(l2(&ug) <= l2(&g) * (1.0 + 1e-12));
        let back = evolution_u_adjoint(&ug, &chart, t, None).unwrap();
        let expected = g
            .fourier()
            .unwrap()
            .multiply_frequency(|et| Complex64::new(chart.cutoff_at(et).powi(2), 0.0))
            .unwrap()
            .inv_fourier()
            .unwrap();
        let diff = back.axpy(Complex64::new(-1.0, 0.0), &expected).unwrap();
        assert!(l2(&diff) <= 1e-12 * l2(&g), "t = {t}: {}", l2(&diff));
    }
}

#[test]
fn evolution_at_time_zero_is_the_cutoff_multiplier() {
    let chart = chart();
    let g = usol_core::normest::random_field(&chart_grid(), 4);
    let u0 = evolution_u(&g, &chart, 0.0, None).unwrap();
    let expected = g
        .fourier()
        .unwrap()
        .multiply_frequency(|et| Complex64::new(chart.cutoff_at(et), 0.0))
        .unwrap()
        .inv_fourier()
        .unwrap();
    let diff = u0.axpy(Complex64::new(-1.0, 0.0), &expected).unwrap();
    assert!(l2(&diff) <= 1e-12 * l2(&g));
}

#[test]
fn oscillatory_integral_concentrates_on_the_stationary_ray() {
    let chart = chart();
    let cub = OscillatoryCubature::default();
    let e0 = [1.5, 0.0];
    for i in 1..=10 {
        let xd = 10.0 * i as f64;
        let on = stationary_point(&chart, &e0, xd);
        // shifting x~_1 by 2 x_d leaves the range of -x_d grad G over the support
        let mut off = on.clone();
        off[0] += 2.0 * xd;
        let a = oscillatory_i(&on, &chart, &cub).unwrap().norm();
        let b = oscillatory_i(&off, &chart, &cub).unwrap().norm();
        assert!(a > 10.0 * b, "x_d = {xd}: on {a:e} off {b:e}");
    }
}

#[test]
fn norm_bound_grows_with_iterations() {
    let form = QuadraticForm::new(3, 1).unwrap();
    let grid = Grid::cubic(3, 16, 8.0).unwrap();
    let op = resolvent_multiplier(&grid, &form, SpectralParameter::new(0.0, 1.0)).unwrap();
    let probe = NormProbe::for_pair(vertex(3, Vertex::B).unwrap()).with_seed(11);
    let short = opnorm_lower(&op, &probe.clone().with_iterations(2)).unwrap();
    let long = opnorm_lower(&op, &probe.with_iterations(20)).unwrap();
    assert!(long.monotone);
    assert!(long.bound >= short.bound * (1.0 - 1e-9), "{} < {}", long.bound, short.bound);
    for w in long.trace.windows(2) {
        assert!(w[1] >= w[0] * (1.0 - 1e-9));
    }
}

#[test]
fn scaling_invariant_pair_gives_z_independent_bounds() {
    // 1/p - 1/q = 2/d: halving the box and scaling z by 4 conjugates the operator by a dilation
    let form = QuadraticForm::new(3, 1).unwrap();
    let probe = NormProbe::for_pair(vertex(3, Vertex::F).unwrap()).with_seed(5).with_iterations(8);
    let z = SpectralParameter::new(0.3, 0.8);
    let big = Grid::cubic(3, 16, 8.0).unwrap();
    let small = Grid::cubic(3, 16, 4.0).unwrap();
    let a = opnorm_lower(&resolvent_multiplier(&big, &form, z).unwrap(), &probe).unwrap().bound;
    let b = opnorm_lower(&resolvent_multiplier(&small, &form, z.scaled(4.0)).unwrap(), &probe).unwrap().bound;
    assert!((a / b - 1.0).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn dual_pairs_give_comparable_bounds() {
    let form = QuadraticForm::new(3, 1).unwrap();
    let grid = Grid::cubic(3, 16, 8.0).unwrap();
    let op = resolvent_multiplier(&grid, &form, SpectralParameter::new(0.0, 1.0)).unwrap();
    let b = vertex(3, Vertex::B).unwrap();
    let bd = usol_core::exponent_region::dual(b);
    let est = |pair| opnorm_lower(&op, &NormProbe::for_pair(pair).with_seed(2).with_iterations(15)).unwrap().bound;
    let (x, y) = (est(b), est(bd));
    assert!(x / y < 2.0 && y / x < 2.0, "{x} vs {y}");
}
