use hexweb::jets::*;
use proptest::prelude::*;

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn at() -> Point {
    Point::new(C64::new(0.3, 0.1), C64::new(-0.2, 0.05))
}

#[test]
fn exp_of_ln_is_identity() {
    let x = Jet::variable(at(), 6, Var::X);
    let y = Jet::variable(at(), 6, Var::Y);
    let u = (&(&x * &y) + &x).add_scalar(c(2.0));
    let back = u.ln().unwrap().exp();
    assert!((&back - &u).max_abs() < 1e-13);
}

#[test]
fn partials_of_a_monomial() {
    // x³y² at the base point
    let p = at();
    let x = Jet::variable(p, 5, Var::X);
    let y = Jet::variable(p, 5, Var::Y);
    let m = &x.powi(3) * &y.powi(2);
    let d = m.partial(2, 1).unwrap();
    assert!((d.value() - c(12.0) * p.x * p.y).norm() < 1e-14);
    assert_eq!(d.order(), 2);
}

#[test]
fn division_by_zero_value_fails() {
    let x = Jet::variable(Point::real(0.0, 0.0), 3, Var::X);
    assert!(x.recip().is_err());
    assert!(x.ln().is_err());
}

#[test]
fn polynomial_lift_matches_eval() {
    let f = PolyExpr::from_terms(2, &[(&[2, 1], (3, 2)), (&[0, 3], (-1, 1)), (&[1, 0], (1, 1))]).unwrap();
    let p = at();
    let j = f.lift(p, 4).unwrap();
    assert!((j.value() - f.eval(&[p.x, p.y]).unwrap()).norm() < 1e-15);
    let fx = f.derivative(0).eval(&[p.x, p.y]).unwrap();
    assert!((j.extract(1, 0).unwrap() - fx).norm() < 1e-14);
}

fn jet_strategy() -> impl Strategy<Value = Jet> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15).prop_map(|v| {
        let mut k = 0;
        Jet::from_fn(at(), 4, |_, _| {
            let z = C64::new(v[k].0, v[k].1);
            k += 1;
            z
        })
    })
}

proptest! {
    #[test]
    fn product_is_commutative(a in jet_strategy(), b in jet_strategy()) {
        prop_assert!((&(&a * &b) - &(&b * &a)).max_abs() < 1e-14);
    }

    #[test]
    fn leibniz_rule(a in jet_strategy(), b in jet_strategy()) {
        let lhs = (&a * &b).derivative(Var::X).unwrap();
        let rhs = &(&a.derivative(Var::X).unwrap() * &b.truncate(3)) + &(&a.truncate(3) * &b.derivative(Var::X).unwrap());
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn reciprocal_inverts(a in jet_strategy(), shift in 1.5f64..3.0) {
        let u = a.add_scalar(c(shift));
        let one = &u * &u.recip().unwrap();
        prop_assert!((one.value() - c(1.0)).norm() < 1e-13);
        prop_assert!((&one - &Jet::constant(at(), 4, c(1.0))).max_abs() < 1e-11);
    }

    #[test]
    fn swapping_twice_is_identity(a in jet_strategy()) {
        prop_assert_eq!(a.swap_vars().swap_vars(), a);
    }
}
