use cnstn::spectral::{
    derivative, divergence, gradient, inner, integrate, laplacian, product, project_modes, riesz_double,
    riesz_grad, ScalarField, TorusGrid,
};
use proptest::prelude::*;

fn grid() -> TorusGrid {
    TorusGrid::new(2, 6, 16).unwrap()
}

fn random_field(grid: TorusGrid, modes: &[(i64, i64, f64, f64)]) -> ScalarField {
    let mut f = ScalarField::constant(grid, 0.7);
    for &(k1, k2, a, b) in modes {
        f.add_mode([k1, k2, 0], a, b);
    }
    f
}

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn modes() -> impl Strategy<Value = Vec<(i64, i64, f64, f64)>> {
    prop::collection::vec((-6i64..=6, -6i64..=6, -1.0..1.0f64, -1.0..1.0f64), 1..6)
}

#[test]
fn derivative_of_a_mode_is_analytic() {
    let g = grid();
    let f = ScalarField::from_fn(g, |x| (3.0 * x[0] - 2.0 * x[1]).sin());
    let dx = ScalarField::from_fn(g, |x| 3.0 * (3.0 * x[0] - 2.0 * x[1]).cos());
    let dy = ScalarField::from_fn(g, |x| -2.0 * (3.0 * x[0] - 2.0 * x[1]).cos());
    assert!(max_diff(&derivative(&f, 0), &dx) < 1e-12);
    assert!(max_diff(&derivative(&f, 1), &dy) < 1e-12);
    let lap = ScalarField::from_fn(g, |x| -13.0 * (3.0 * x[0] - 2.0 * x[1]).sin());
    assert!(max_diff(&laplacian(&f), &lap) < 1e-11);
}

#[test]
fn padded_product_of_modes_is_exact() {
    let g = grid();
    let a = ScalarField::from_fn(g, |x| (2.0 * x[0]).cos() + x[1].sin());
    let b = ScalarField::from_fn(g, |x| (5.0 * x[1]).cos());
    let expect = ScalarField::from_fn(g, |x| ((2.0 * x[0]).cos() + x[1].sin()) * (5.0 * x[1]).cos());
    assert!(max_diff(&product(&a, &b), &expect) < 1e-13);
}

#[test]
fn integral_of_a_mode_vanishes() {
    let g = grid();
    let f = ScalarField::from_fn(g, |x| 2.0 + (x[0] + x[1]).cos());
    let vol = 4.0 * std::f64::consts::PI.powi(2);
    assert!((integrate(&f) - 2.0 * vol).abs() < 1e-12);
}

#[test]
fn nyquist_is_kept_by_projection_and_zeroed_by_derivatives() {
    let g = grid();
    let f = ScalarField::from_fn(g, |x| (8.0 * x[0]).cos());
    assert!(f.coeff([-8, 0, 0]).norm() > 0.9);
    assert!(derivative(&f, 0).max_abs() < 1e-14);
    let p = project_modes(&f, 8);
    assert!(max_diff(&p, &f) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divergence_of_riesz_gradient_removes_the_mean(m in modes()) {
        let f = random_field(grid(), &m);
        let (v, mean) = riesz_grad(&f);
        let back = divergence(&v);
        let expect = f.axpy(-mean, &ScalarField::constant(grid(), 1.0));
        let scale = f.max_abs().max(1.0);
        prop_assert!(max_diff(&back, &expect) <= 1e-12 * scale);
    }

    #[test]
    fn trace_of_double_riesz_removes_the_mean(m in modes()) {
        let f = random_field(grid(), &m);
        let (a, mean) = riesz_double(&f, 0, 0);
        let (b, _) = riesz_double(&f, 1, 1);
        let trace = a.axpy(1.0, &b);
        let expect = f.axpy(-mean, &ScalarField::constant(grid(), 1.0));
        prop_assert!(max_diff(&trace, &expect) <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn double_riesz_is_symmetric(m in modes()) {
        let f = random_field(grid(), &m);
        let (a, _) = riesz_double(&f, 0, 1);
        let (b, _) = riesz_double(&f, 1, 0);
        prop_assert!(max_diff(&a, &b) == 0.0);
    }

    #[test]
    fn gradient_is_skew_adjoint_to_divergence(m in modes(), n in modes()) {
        let f = random_field(grid(), &m);
        let g = random_field(grid(), &n);
        let v = gradient(&g);
        let lhs = inner(&divergence(&v), &f);
        let rhs: f64 = (0..2).map(|a| inner(v.component(a), &derivative(&f, a))).sum();
        prop_assert!((lhs + rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn transform_round_trip(values in prop::collection::vec(-1.0..1.0f64, 256)) {
        let f = ScalarField::from_values(grid(), values.clone());
        let g = ScalarField::from_coeffs(grid(), f.coeffs().to_vec());
        for (a, b) in g.values().iter().zip(&values) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }
}
