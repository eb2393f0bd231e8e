use hexweb::cubic::*;
use hexweb::frobenius::Potential;
use hexweb::jets::*;
use hexweb::webgeo::*;
use proptest::prelude::*;

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// Three families of parallel lines: `p (p − q)(p + q)`.
fn parallel_web() -> CubicDirectionField {
    CubicDirectionField::constant([c(1.0), c(0.0), c(-1.0), c(0.0)])
}

/// Non-flat web `p³ + (x + y²) pq² + q³`.
fn control() -> CubicDirectionField {
    let one = PolyExpr::constant(2, 1);
    let xy2 = PolyExpr::from_terms(2, &[(&[1, 0], 1), (&[0, 2], 1)]).unwrap();
    CubicDirectionField::from_polys(one.clone(), PolyExpr::zero(2), xy2, one).unwrap()
}

#[test]
fn parallel_web_closes_exactly() {
    let h = thomsen_closure(&parallel_web(), [0.2, -0.1], 0.1, 1e-10).unwrap();
    assert!(h.gap < 1e-12);
    assert_eq!(h.vertices.len(), 7);
}

#[test]
fn flat_web_closes_and_control_does_not() {
    let fa = characteristic_field(&Potential::solution_a());
    assert!(thomsen_closure(&fa, [0.0, 1.0], 0.05, 1e-10).unwrap().gap < 1e-8);
    let gaps: Vec<f64> = [0.04, 0.02]
        .iter()
        .map(|&e| thomsen_closure(&control(), [-3.0, 0.0], e, 1e-10).unwrap().gap / (e * e * e))
        .collect();
    assert!(gaps[0] > 1e-3);
    assert!((gaps[0] / gaps[1] - 1.0).abs() < 0.2);
}

#[test]
fn closure_needs_a_real_regular_base() {
    let fa = characteristic_field(&Potential::solution_a());
    // D < 0: one real leaf direction
    assert!(thomsen_closure(&fa, [1.0, 0.1], 0.05, 1e-10).is_err());
}

#[test]
fn leaves_follow_the_directions() {
    let fa = characteristic_field(&Potential::solution_a());
    let opts = LeafOptions::default();
    for branch in 0..3 {
        let leaf = integrate_leaf(&fa, [0.0, 1.0], branch, 0.3, &opts).unwrap();
        assert_eq!(leaf.termination, Termination::Length);
        let p = leaf.points[leaf.points.len() / 2];
        let (q, d) = leaf_point(&fa, p, real_directions(&fa, p).unwrap()[0], 0.0, &opts).unwrap();
        assert_eq!(q, p);
        assert!((d[0] * d[0] + d[1] * d[1] - 1.0).abs() < 1e-12);
    }
    assert!(integrate_leaf(&fa, [0.0, 1.0], 3, 0.3, &opts).is_err());
}

#[test]
fn first_integrals_of_a_constant_web() {
    let field = characteristic_field(&Potential::solution_b());
    let path = [Point::real(0.3, 0.4), Point::real(0.5, 0.6), Point::real(0.4, 0.8)];
    let s = first_integrals(&field, &path).unwrap();
    assert!((s.k - c(1.0)).norm() < 1e-12);
    assert!(s.abelian_residual < 1e-12);
    assert!(!s.path_dependent);
}

#[test]
fn non_flat_path_is_flagged() {
    let path = [Point::real(-3.0, 0.0), Point::real(-2.8, 0.1)];
    assert!(first_integrals(&control(), &path).unwrap().path_dependent);
}

#[test]
fn uniform_scaling_fixes_a_constant_web() {
    let field = CubicDirectionField::constant([c(1.0), c(0.3), c(-2.0), c(0.5)]);
    let pts = [Point::real(0.3, 0.2), Point::new(C64::new(-0.5, 0.1), c(0.7))];
    let r = symmetry_residual(&field, [1.0, 1.0], &pts, 0.2, Point::real(0.1, -0.1)).unwrap();
    assert!(r < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn solution_a_has_the_euler_symmetry(x in -0.5f64..0.5, y in 0.8f64..1.4, a in -0.2f64..0.2) {
        let fa = characteristic_field(&Potential::solution_a());
        let p = Point::new(c(x), C64::new(y, 0.01));
        let r = symmetry_residual(&fa, [3.0, 2.0], &[p], a, Point::real(0.0, 0.0)).unwrap();
        prop_assert!(r < 1e-10);
    }

    #[test]
    fn flow_is_a_one_parameter_group(x in -1.0f64..1.0, y in -1.0f64..1.0, a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let (p, o) = (Point::real(x, y), Point::real(0.2, -0.3));
        let w = [3.0, 2.0];
        let two = flow_point(flow_point(p, o, w, a), o, w, b);
        let one = flow_point(p, o, w, a + b);
        prop_assert!(two.dist(&one) < 1e-12);
    }
}
