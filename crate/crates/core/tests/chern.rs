use hexweb::chern::*;
use hexweb::cubic::*;
use hexweb::frobenius::Potential;
use hexweb::jets::*;
use proptest::prelude::*;

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// `a = 1 + y`, `b = x`, `c = x + 2y²`, `r = 2 − x y`.
fn sample_field() -> CubicDirectionField {
    let p = |t: &[(&[u32], i64)]| PolyExpr::from_terms(2, t).unwrap();
    CubicDirectionField::from_polys(
        p(&[(&[0, 0], 1), (&[0, 1], 1)]),
        p(&[(&[1, 0], 1)]),
        p(&[(&[1, 0], 1), (&[0, 2], 2)]),
        p(&[(&[0, 0], 2), (&[1, 1], -1)]),
    )
    .unwrap()
}

#[test]
fn printed_c_x_sign_in_second_component_disagrees() {
    let field = sample_field();
    let at = Point::new(C64::new(0.4, 0.1), C64::new(0.3, -0.2));
    let j = field.jets(at, 1).unwrap();
    let v = j.clone().map(|u| u.value());
    let dx = j.clone().map(|u| u.extract(1, 0).unwrap());
    let dy = j.map(|u| u.extract(0, 1).unwrap());
    let (g1, g2) = closed_form_numerators([&v[0], &v[1], &v[2], &v[3]], [&dx[0], &dx[1], &dx[2], &dx[3]], [&dy[0], &dy[1], &dy[2], &dy[3]]);
    let d3 = c(3.0) * discriminant(&v);
    let reference = gamma_from_definition(&field, at).unwrap();
    assert!((g1 / d3 - reference.dx).norm() < 1e-12 * reference.dx.norm().max(1.0));
    assert!((g2 / d3 - reference.dy).norm() < 1e-12 * reference.dy.norm().max(1.0));
    // flipping the sign of the 3a(bc − 9ar)·c_x term, as printed
    let [a, b, cc, r] = v;
    let term = c(3.0) * a * (b * cc - c(9.0) * a * r) * dx[2];
    let printed = (g2 - c(2.0) * term) / d3;
    assert!((printed - reference.dy).norm() > 1e-2 * reference.dy.norm());
}

#[test]
fn solution_a_is_flat_with_logarithmic_connection() {
    let pot = Potential::solution_a();
    let field = characteristic_field(&pot);
    let at = Point::new(C64::new(0.2, 0.05), C64::new(1.1, -0.03));
    assert!(curvature(&field, at, Route::Cubic).unwrap().norm() < 1e-10);
    assert!(corollary_residual(&pot, at).unwrap() < 1e-10);
    let g = gamma_cubic(&field, at).unwrap();
    let l = log_disc_form(&field, at).unwrap();
    assert!(g.rel_diff(&l) < 1e-10);
}

#[test]
fn solution_b_has_vanishing_connection() {
    let field = characteristic_field(&Potential::solution_b());
    let g = gamma_cubic(&field, Point::real(0.3, 0.6)).unwrap();
    assert!(g.norm() < 1e-13);
}

#[test]
fn singular_point_is_rejected() {
    let field = characteristic_field(&Potential::solution_a());
    assert!(gamma_cubic(&field, Point::real(0.0, 0.0)).is_err());
}

#[test]
fn curvature_does_not_depend_on_the_route() {
    let field = sample_field();
    let at = Point::new(C64::new(0.4, 0.1), C64::new(0.3, -0.2));
    let k = curvature(&field, at, Route::Cubic).unwrap();
    let other = curvature(&field, at, Route::Definition).unwrap();
    assert!((other - k).norm() < 1e-8 * k.norm().max(1.0), "{other} vs {k}");
    assert!(k.norm() > 1e-3);
    // the depressed route needs b = 0
    assert!(curvature(&field, at, Route::Depressed).is_err());
}

#[test]
fn depressed_route_differs_by_an_exact_term() {
    // p³ + (x + y²) p q² + (1 + x y) q³
    let p = |t: &[(&[u32], i64)]| PolyExpr::from_terms(2, t).unwrap();
    let field = CubicDirectionField::from_polys(
        p(&[(&[0, 0], 1)]),
        PolyExpr::zero(2),
        p(&[(&[1, 0], 1), (&[0, 2], 1)]),
        p(&[(&[0, 0], 1), (&[1, 1], 1)]),
    )
    .unwrap();
    let at = Point::new(C64::new(-1.2, 0.1), C64::new(0.3, 0.05));
    let dep = gamma_jet(&field, at, 0, Route::Depressed).unwrap().value();
    let cub = gamma_jet(&field, at, 0, Route::Cubic).unwrap().value();
    assert!(dep.rel_diff(&cub) > 1e-3);
    let (k1, k2) = (curvature(&field, at, Route::Depressed).unwrap(), curvature(&field, at, Route::Cubic).unwrap());
    assert!((k1 - k2).norm() < 1e-9 * k2.norm().max(1.0));
}

#[test]
fn flat_loop_has_trivial_holonomy() {
    let field = characteristic_field(&Potential::solution_a());
    let p = |x: f64, y: f64| Point::real(x, y);
    let lp = [p(0.1, 1.0), p(0.3, 1.1), p(0.2, 1.3), p(0.1, 1.0)];
    let xi = [c(0.7), c(-0.2)];
    let out = blaschke_transport(&field, &lp, xi, 40).unwrap();
    assert!((out.components[0] - xi[0]).norm() < 1e-9);
    assert!((out.components[1] - xi[1]).norm() < 1e-9);
}

fn linear_field(v: [f64; 12]) -> CubicDirectionField {
    let p = |k: usize| PolyExpr::from_terms(2, &[(&[0u32, 0][..], v[k]), (&[1, 0], v[k + 1]), (&[0, 1], v[k + 2])]).unwrap();
    CubicDirectionField::from_polys(p(0), p(3), p(6), p(9)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_formula_matches_definition(v in prop::array::uniform12(-1.0f64..1.0), x in -0.5f64..0.5, y in -0.5f64..0.5) {
        let field = linear_field(v);
        let at = Point::new(C64::new(x, 0.05), C64::new(y, -0.03));
        let coeffs = field.coeffs(at).unwrap();
        prop_assume!(discriminant(&coeffs).norm() > 1e-3 * disc_scale(&coeffs));
        let a = gamma_cubic(&field, at).unwrap();
        let b = gamma_from_definition(&field, at).unwrap();
        prop_assert!(a.rel_diff(&b) < 1e-7);
        prop_assert!(frame_data(&field, at).unwrap().spread() < 1e-9);
    }
}
