use hexweb::chern::{curvature, Route};
use hexweb::cubic::*;
use hexweb::frobenius::Potential;
use hexweb::jets::*;
use hexweb::singular::*;
use proptest::prelude::*;

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

#[test]
fn catalog_forms_classify_as_themselves() {
    let origin = Point::real(0.0, 0.0);
    for form in NormalForm::catalog(0..=2) {
        let cl = classify_singularity(&form.field().unwrap(), origin).unwrap();
        let m = cl.matched.expect("catalog match");
        assert_eq!(m.form, form, "{}", form.label());
        assert!(!m.swapped);
        assert!(cl.residual < WEIGHT_TOL);
    }
}

#[test]
fn solution_a_matches_form_two_with_axes_swapped() {
    let fa = characteristic_field(&Potential::solution_a());
    let cl = classify_singularity(&fa, Point::real(0.0, 0.0)).unwrap();
    assert_eq!(cl.weights, [3, 2]);
    let m = cl.matched.unwrap();
    assert_eq!((m.form.id, m.swapped), (2, true));
}

#[test]
fn fixture_is_flat_but_unclassified() {
    let fx = broken_symmetry_fixture().to_field();
    let k = curvature(&fx, Point::new(C64::new(0.3, 0.1), C64::new(0.5, -0.2)), Route::Cubic).unwrap();
    assert!(k.norm() < 1e-10);
    match classify_singularity(&fx, Point::real(0.0, 0.0)) {
        Err(hexweb::Error::Unclassified { best }) => assert!(best > WEIGHT_TOL),
        other => panic!("expected no weights, got {other:?}"),
    }
}

#[test]
fn invalid_forms_are_rejected() {
    assert!(NormalForm::new(0, 0).is_err());
    assert!(NormalForm::new(7, 0).is_err());
    assert!(NormalForm::new(3, 1).is_err());
    assert!(NormalForm::new(6, MAX_M0 + 1).is_err());
}

#[test]
fn form_six_needs_positive_real_y() {
    let f = NormalForm::new(6, 0).unwrap().field().unwrap();
    assert!(f.coeffs(Point::real(0.2, -0.5)).is_err());
    assert!(f.coeffs(Point::real(0.2, 0.5)).is_ok());
}

#[test]
fn profile_past_the_fold() {
    for m0 in 0..=2 {
        let ode = FOde::new(m0).unwrap();
        let fold = ode.fold.expect("real fold");
        assert!(fold > 0.25 && fold < 0.45, "m0 = {m0}: {fold}");
        let real = solve_f_real(m0, 2.0, 1e-10).unwrap();
        assert!(real.halted_at.is_some_and(|t| t <= fold));
        let full = solve_f(m0, 1.0, 1e-10).unwrap();
        assert!(full.continued.iter().any(|&b| b));
        assert!(full.max_residual() < F_TOL);
        let k = ode.k();
        assert!((full.derivs[0] - c(k / 3.0)).norm() < 1e-12);
    }
}

#[test]
fn traces() {
    let f2 = NormalForm::new(2, 0).unwrap().field().unwrap();
    let t = trace_discriminant(&f2, [-1.0, 1.0, -1.0, 1.0], 24, 1e-10).unwrap();
    assert!(!t.is_empty());
    for p in t.points() {
        assert!((32.0 * p[0].powi(3) + 27.0 * p[1] * p[1]).abs() < 1e-6);
    }
    let fb = characteristic_field(&Potential::solution_b());
    assert!(trace_discriminant(&fb, [-1.0, 1.0, -1.0, 1.0], 16, 1e-10).unwrap().is_empty());
}

#[test]
fn multiplicities() {
    assert_eq!(multiplicity_of(&[c(1.0), c(0.0), c(-1.0), c(0.0)], 1e-9).unwrap(), Multiplicity::Simple);
    assert_eq!(multiplicity_of(&[c(1.0), c(0.0), c(-3.0), c(2.0)], 1e-9).unwrap(), Multiplicity::Double);
    assert_eq!(multiplicity_of(&[c(1.0), c(0.0), c(0.0), c(0.0)], 1e-9).unwrap(), Multiplicity::Triple);
    // p²q: both chart leads vanish
    assert_eq!(multiplicity_of(&[c(0.0), c(1.0), c(0.0), c(0.0)], 1e-9).unwrap(), Multiplicity::Double);
    let fa = characteristic_field(&Potential::solution_a());
    let on_cusp = Point::real((32.0f64 / 27.0).sqrt(), 1.0);
    assert_eq!(root_multiplicity(&fa, on_cusp, 1e-9).unwrap(), Multiplicity::Double);
}

/// `p³ − 3pq² + (2 + s) q³`, a double root at `s = 0`.
fn near_double(s: f64) -> [C64; 4] {
    [c(1.0), c(0.0), c(-3.0), c(2.0 + s)]
}

fn rel_disc(coeffs: &[C64; 4]) -> f64 {
    discriminant(coeffs).norm() / disc_scale(coeffs)
}

proptest! {
    #[test]
    fn tracker_holds_its_state_inside_the_band(steps in prop::collection::vec(-1.0f64..1.0, 1..40)) {
        let (tol, band) = (1e-6, 10.0);
        let mut tracker = MultiplicityTracker::new(tol, band);
        prop_assert_eq!(tracker.update(&near_double(0.0)).unwrap(), Multiplicity::Double);
        // |D| ≈ 108|s|; stay strictly inside the band
        let s_max = 0.9 * band * tol * disc_scale(&near_double(0.0)) / 108.0;
        for u in steps {
            let coeffs = near_double(u * s_max);
            prop_assume!(rel_disc(&coeffs) < band * tol);
            prop_assert_eq!(tracker.update(&coeffs).unwrap(), Multiplicity::Double);
        }
        let out = near_double(20.0 * band * tol * disc_scale(&near_double(0.0)) / 108.0);
        prop_assert_eq!(tracker.update(&out).unwrap(), Multiplicity::Simple);
    }

    #[test]
    fn memoryless_and_tracked_agree_far_from_the_discriminant(s in 0.05f64..1.0) {
        let coeffs = near_double(s);
        let mut tracker = MultiplicityTracker::new(1e-6, 10.0);
        prop_assert_eq!(tracker.update(&coeffs).unwrap(), multiplicity_of(&coeffs, 1e-6).unwrap());
    }

    #[test]
    fn catalog_webs_are_flat(x in -0.3f64..0.3, y in 0.3f64..0.8, id in 1u8..=6, m0 in 0u32..=2) {
        let m0 = if id == 1 || id == 6 { m0 } else { 0 };
        let f = NormalForm::new(id, m0).unwrap().field().unwrap();
        let p = Point::new(C64::new(x, 0.02), C64::new(y, -0.01));
        let coeffs = f.coeffs(p).unwrap();
        prop_assume!(rel_disc(&coeffs) > 1e-6);
        prop_assert!(curvature(&f, p, Route::Cubic).unwrap().norm() < 1e-7);
    }
}
