use num_rational::Rational64;
use proptest::prelude::*;
use usol_core::dyadic_decomp::{build_pv_psi, BumpKit};
use usol_core::exponent_region::{classify, dual, predicted_slopes, sobolev_admissible, ExponentPair};
use usol_core::field::{Axis, Grid, SampledField, Space};
use usol_core::multipliers::{resolvent_apply, t_rho_lambda_apply, LocalizedMultiplier, MChoice, SpectralParameter};
use usol_core::quadform::{GraphChart, Isometry, QuadraticForm};
use usol_core::{Complex64, Status};

/// Orthogonal `m x m` matrix from Gram-Schmidt on `raw` (row-major).
fn orthogonal(m: usize, raw: &[f64]) -> Vec<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        let mut v: Vec<f64> = raw[i * m..(i + 1) * m].to_vec();
        for r in &rows {
            let dot: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(r).for_each(|(a, b)| *a -= dot * b);
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n < 1e-6 {
            // degenerate draw: fall back to a unit vector
            v = (0..m).map(|j| if j == i { 1.0 } else { 0.0 }).collect();
            for r in &rows {
                let dot: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= dot * b);
            }
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= n);
        } else {
            v.iter_mut().for_each(|a| *a /= n);
        }
        rows.push(v);
    }
    rows.concat()
}

fn form_strategy() -> impl Strategy<Value = QuadraticForm> {
    (3usize..=5).prop_flat_map(|d| (Just(d), 1..d)).prop_map(|(d, k)| QuadraticForm::new(d, k).unwrap())
}

fn pair_strategy() -> impl Strategy<Value = ExponentPair> {
    (0i64..=60, 0i64..=60, 1i64..=60).prop_map(|(a, b, den)| {
        let ip = Rational64::new(a.min(den), den);
        let iq = Rational64::new(b.min(den), den);
        ExponentPair::new(ip, iq)
    })
}

fn random_field(grid: Grid, values: &[(f64, f64)]) -> SampledField {
    let v = values.iter().take(grid.len()).map(|&(a, b)| Complex64::new(a, b)).collect();
    SampledField::new(grid, v, Space::Physical).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_is_invariant_under_block_rotations(
        form in form_strategy(),
        raw in prop::collection::vec(-1.0f64..1.0, 50),
        xi in prop::collection::vec(-5.0f64..5.0, 5),
    ) {
        let (d, k) = (form.d(), form.k());
        let r1 = orthogonal(k, &raw[..k * k]);
        let r2 = orthogonal(d - k, &raw[25..25 + (d - k) * (d - k)]);
        let m = Isometry::block(&form, &r1, &r2).unwrap();
        let xi = &xi[..d];
        let scale = 1.0 + xi.iter().map(|v| v * v).sum::<f64>();
        prop_assert!((form.eval(&m.apply(xi)) - form.eval(xi)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn chart_points_lie_on_the_surface(
        form in form_strategy(),
        rho in prop_oneof![-2.0f64..-0.01, 0.01f64..2.0],
        eta1 in 0.3f64..3.0,
        rest in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let chart = GraphChart::new(form, rho).unwrap();
        let mut et = vec![eta1];
        et.extend_from_slice(&rest[..form.d() - 2]);
        let eta = chart.eta_point(&et);
        let scale = 1.0 + eta.iter().map(|v| v * v).sum::<f64>();
        prop_assert!((form.eval_eta(&eta) - rho).abs() <= 1e-12 * scale);
        prop_assert!((form.eval(&chart.point(&et)) - rho).abs() <= 1e-12 * scale);
    }

    #[test]
    fn rotate_to_graph_preserves_norm(form in form_strategy(), xi in prop::collection::vec(-10.0f64..10.0, 5)) {
        let xi = &xi[..form.d()];
        let eta = form.rotate_to_graph(xi).unwrap();
        let n0: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let n1: f64 = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((n0 - n1).abs() <= 1e-12 * (1.0 + n0));
        let back = form.graph_to_xi(&eta);
        for (a, b) in back.iter().zip(xi) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + n0));
        }
    }

    #[test]
    fn classification_is_self_dual(d in 3usize..=8, pair in pair_strategy()) {
        prop_assert_eq!(classify(d, pair).unwrap().status, classify(d, dual(pair)).unwrap().status);
        prop_assert_eq!(sobolev_admissible(d, pair).unwrap().status, sobolev_admissible(d, dual(pair)).unwrap().status);
    }

    #[test]
    fn sobolev_range_is_admissible(d in 3usize..=8, pair in pair_strategy()) {
        if sobolev_admissible(d, pair).unwrap().status == Status::StrongType {
            prop_assert_eq!(classify(d, pair).unwrap().status, Status::StrongType);
        }
        if classify(d, pair).unwrap().status == Status::StrongType {
            let s = predicted_slopes(d, pair);
            prop_assert!(s.glambda >= Rational64::from(0));
            prop_assert!(s.knapp >= Rational64::from(0));
        }
    }

    #[test]
    fn norms_are_homogeneous(
        values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
        c in 0.01f64..100.0,
        p in 1.0f64..6.0,
    ) {
        let f = random_field(Grid::cubic(2, 8, 3.0).unwrap(), &values);
        let g = f.scale(Complex64::new(c, 0.0));
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
        prop_assert!(close(g.lp_norm(p).unwrap(), c * f.lp_norm(p).unwrap()));
        prop_assert!(close(g.lorentz_p1(p.max(1.01)).unwrap(), c * f.lorentz_p1(p.max(1.01)).unwrap()));
        prop_assert!(close(g.lorentz_qinf(p.max(1.01)).unwrap(), c * f.lorentz_qinf(p.max(1.01)).unwrap()));
    }

    #[test]
    fn lebesgue_norms_follow_the_dilation_law(lambda in 0.5f64..2.0, p in 1.0f64..8.0) {
        let grid = Grid::cubic(2, 256, 16.0).unwrap();
        let gauss = |x: &[f64], s: f64| Complex64::new((-std::f64::consts::PI * s * s * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0);
        let f = SampledField::from_physical(grid.clone(), |x| gauss(x, 1.0));
        let f_l = SampledField::from_physical(grid, |x| gauss(x, lambda));
        let predicted = lambda.powf(-2.0 / p) * f.lp_norm(p).unwrap();
        prop_assert!((f_l.lp_norm(p).unwrap() / predicted - 1.0).abs() < 0.01);
    }

    #[test]
    fn distribution_is_nonincreasing(values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), ts in prop::collection::vec(0.0f64..1.5, 8)) {
        let mu = random_field(Grid::cubic(2, 8, 2.0).unwrap(), &values).distribution().unwrap();
        let mut ts = ts;
        ts.sort_by(f64::total_cmp);
        for w in ts.windows(2) {
            prop_assert!(mu.measure_above(w[0]) >= mu.measure_above(w[1]));
        }
    }

    #[test]
    fn fourier_transform_is_unitary(values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), carrier in -2.0f64..2.0) {
        let grid = Grid::new(vec![Axis::new(8, 4.0).with_carrier(carrier), Axis::new(8, 2.0)]).unwrap();
        let f = random_field(grid, &values);
        let fh = f.fourier().unwrap();
        prop_assert!((fh.l2_norm_sq() / f.l2_norm_sq() - 1.0).abs() < 1e-12);
        let back = fh.inv_fourier().unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pv_psi_is_odd(x in -200.0f64..200.0) {
        let psi = build_pv_psi(BumpKit::shared());
        prop_assert_eq!(psi.eval(-x), -psi.eval(x));
    }

    #[test]
    fn varphi_telescopes(log_x in -4.0f64..4.0) {
        let kit = BumpKit::shared();
        let x = 10f64.powf(log_x);
        let s: f64 = (-30..=60).map(|l| kit.varphi(2f64.powi(-l) * x)).sum();
        prop_assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn resolvent_is_diagonal_on_monomials(
        modes in prop::collection::vec(-7i64..8, 3),
        theta in 0.05f64..3.09,
    ) {
        let form = QuadraticForm::new(3, 1).unwrap();
        let grid = Grid::cubic(3, 16, 4.0).unwrap();
        let xi0: Vec<f64> = modes.iter().map(|&m| m as f64 / 4.0).collect();
        let mono = |x: &[f64]| Complex64::cis(2.0 * std::f64::consts::PI * x.iter().zip(&xi0).map(|(a, b)| a * b).sum::<f64>());
        let f = SampledField::from_physical(grid, mono);
        let z = SpectralParameter::on_unit_circle(if modes[0] % 2 == 0 { theta } else { -theta });
        let out = resolvent_apply(&f, &form, z).unwrap();
        let m = Complex64::new(1.0, 0.0) / (Complex64::new(form.eval(&xi0), 0.0) + z.as_complex());
        for (o, i) in out.values().iter().zip(f.values()) {
            prop_assert!((o - i * m).norm() <= 1e-13 * (1.0 + m.norm()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn localized_operator_is_linear(
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4096),
        b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4096),
        c in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let form = QuadraticForm::new(3, 1).unwrap();
        let chart = GraphChart::new(form, 1.0).unwrap();
        let psi = usol_core::dyadic_decomp::build_delta_psi(BumpKit::shared());
        let lm = LocalizedMultiplier::new(0.25, MChoice::One, psi, chart).unwrap();
        let grid = Grid::new(vec![
            Axis::new(16, 8.0).with_carrier(1.5),
            Axis::new(16, 8.0),
            Axis::new(16, 8.0).with_carrier(0.5),
        ]).unwrap();
        let f = random_field(grid.clone(), &a);
        let g = random_field(grid, &b);
        let c = Complex64::new(c.0, c.1);
        let lhs = t_rho_lambda_apply(&f.axpy(c, &g).unwrap(), &lm).unwrap();
        let rhs = t_rho_lambda_apply(&f, &lm).unwrap().axpy(c, &t_rho_lambda_apply(&g, &lm).unwrap()).unwrap();
        let scale = rhs.l2_norm_sq().sqrt().max(1e-300);
        let diff = lhs.axpy(Complex64::new(-1.0, 0.0), &rhs).unwrap().l2_norm_sq().sqrt();
        prop_assert!(diff <= 1e-12 * scale.max(f.l2_norm_sq().sqrt()));
    }
}
