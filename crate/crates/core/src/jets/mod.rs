//! Truncated bivariate Taylor arithmetic over complex scalars.
//!
//! A [`Jet`] of order `K` at a base point stores the Taylor coefficients
//! `f_J / J!` for every multi-index `J = (i, j)` with `i + j <= K`. All ring
//! operations are exact up to truncation, so a formula written once in terms
//! of jets yields every partial derivative it needs.

mod field;
mod poly;
pub mod series;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use field::{constant_field, fn_field, scaled_field, DerivedField, FnField, ScalarField, SharedField};
pub use poly::{Coef, Monomial, PolyExpr};

pub type C64 = Complex64;

/// Default jet order used by the connection and curvature routines.
pub const DEFAULT_ORDER: usize = 6;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A point of the (complexified) plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: C64,
    pub y: C64,
}

impl Point {
    pub fn new(x: C64, y: C64) -> Self {
        Point { x, y }
    }

    pub fn real(x: f64, y: f64) -> Self {
        Point { x: c(x), y: c(y) }
    }

    pub fn try_new(x: C64, y: C64) -> Result<Self> {
        let p = Point { x, y };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn swapped(&self) -> Point {
        Point { x: self.y, y: self.x }
    }

    pub fn offset(&self, dx: C64, dy: C64) -> Point {
        Point { x: self.x + dx, y: self.y + dy }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        ((self.x - other.x).norm_sqr() + (self.y - other.y).norm_sqr()).sqrt()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Coordinate selector for jet variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

#[inline]
fn len_for(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Truncated Taylor expansion of a scalar field at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    base: Point,
    order: usize,
    coeffs: Vec<C64>,
}

impl Jet {
    pub fn zeros(base: Point, order: usize) -> Jet {
        Jet { base, order, coeffs: vec![C64::default(); len_for(order)] }
    }

    pub fn constant(base: Point, order: usize, value: C64) -> Jet {
        let mut j = Jet::zeros(base, order);
        j.coeffs[0] = value;
        j
    }

    /// The coordinate function `x` or `y` expanded at `base`.
    pub fn variable(base: Point, order: usize, var: Var) -> Jet {
        let mut j = Jet::zeros(base, order);
        match var {
            Var::X => {
                j.coeffs[0] = base.x;
                if order >= 1 {
                    j.coeffs[idx(1, 0)] = c(1.0);
                }
            }
            Var::Y => {
                j.coeffs[0] = base.y;
                if order >= 1 {
                    j.coeffs[idx(0, 1)] = c(1.0);
                }
            }
        }
        j
    }

    /// Builds a jet from Taylor coefficients given as a function of `(i, j)`.
    pub fn from_fn(base: Point, order: usize, mut f: impl FnMut(usize, usize) -> C64) -> Jet {
        let mut j = Jet::zeros(base, order);
        for n in 0..=order {
            for b in 0..=n {
                j.coeffs[idx(n - b, b)] = f(n - b, b);
            }
        }
        j
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> C64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `f_J / J!`.
    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        if i + j > self.order {
            C64::default()
        } else {
            self.coeffs[idx(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, v: C64) {
        assert!(i + j <= self.order, "multi-index ({i}, {j}) beyond order {}", self.order);
        self.coeffs[idx(i, j)] = v;
    }

    /// The raw partial derivative `∂^(i+j) f / ∂x^i ∂y^j` at the base point.
    pub fn extract(&self, i: usize, j: usize) -> Result<C64> {
        if i + j > self.order {
            return Err(Error::OrderExceeded { requested: i + j, order: self.order });
        }
        Ok(self.coeffs[idx(i, j)] * factorial(i) * factorial(j))
    }

    /// Jet of a partial derivative; its order drops by one.
    pub fn derivative(&self, var: Var) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::OrderExceeded { requested: 1, order: 0 });
        }
        let k = self.order - 1;
        Ok(Jet::from_fn(self.base, k, |i, j| match var {
            Var::X => self.coeff(i + 1, j) * (i + 1) as f64,
            Var::Y => self.coeff(i, j + 1) * (j + 1) as f64,
        }))
    }

    /// Mixed partial derivative jet of multi-index `(dx, dy)`.
    pub fn partial(&self, dx: usize, dy: usize) -> Result<Jet> {
        let mut out = self.clone();
        for _ in 0..dx {
            out = out.derivative(Var::X)?;
        }
        for _ in 0..dy {
            out = out.derivative(Var::Y)?;
        }
        Ok(out)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet::from_fn(self.base, order, |i, j| self.coeff(i, j))
    }

    /// Exchanges the roles of `x` and `y`.
    pub fn swap_vars(&self) -> Jet {
        Jet::from_fn(self.base.swapped(), self.order, |i, j| self.coeff(j, i))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.is_finite())
    }

    /// Evaluates the truncated Taylor polynomial at `base + (dx, dy)`.
    pub fn eval_offset(&self, dx: C64, dy: C64) -> C64 {
        let mut acc = C64::default();
        for n in 0..=self.order {
            for b in 0..=n {
                let a = n - b;
                acc += self.coeffs[idx(a, b)] * dx.powu(a as u32) * dy.powu(b as u32);
            }
        }
        acc
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.order != other.order {
            return Err(Error::JetMismatch(format!("orders {} and {}", self.order, other.order)));
        }
        if self.base != other.base {
            return Err(Error::JetMismatch(format!("base points {} and {}", self.base, other.base)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(&other.recip()?))
    }

    pub fn scale(&self, k: C64) -> Jet {
        self.map(|a| a * k)
    }

    pub fn add_scalar(&self, k: C64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += k;
        out
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Jet {
        Jet { base: self.base, order: self.order, coeffs: self.coeffs.iter().map(|&a| f(a)).collect() }
    }

    fn zip(&self, other: &Jet, f: impl Fn(C64, C64) -> C64) -> Jet {
        Jet {
            base: self.base,
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let k = self.order;
        let mut out = Jet::zeros(self.base, k);
        for n1 in 0..=k {
            for b1 in 0..=n1 {
                let u = self.coeffs[idx(n1 - b1, b1)];
                if u == C64::default() {
                    continue;
                }
                for n2 in 0..=(k - n1) {
                    for b2 in 0..=n2 {
                        let a = n1 - b1 + n2 - b2;
                        out.coeffs[idx(a, b1 + b2)] += u * other.coeffs[idx(n2 - b2, b2)];
                    }
                }
            }
        }
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Jet> {
        let u0 = self.coeffs[0];
        if u0 == C64::default() || !u0.is_finite() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = u0.inv();
        let mut w = Jet::zeros(self.base, self.order);
        w.coeffs[0] = inv0;
        for n in 1..=self.order {
            for b in 0..=n {
                let a = n - b;
                let mut acc = C64::default();
                // sum over 0 < L <= J of u_L w_{J-L}
                for la in 0..=a {
                    for lb in 0..=b {
                        if la + lb == 0 {
                            continue;
                        }
                        acc += self.coeffs[idx(la, lb)] * w.coeffs[idx(a - la, b - lb)];
                    }
                }
                w.coeffs[idx(a, b)] = -acc * inv0;
            }
        }
        Ok(w)
    }

    /// `g(self)` where `taylor[n] = g^(n)(u0) / n!` at the constant term `u0`.
    pub fn compose(&self, taylor: &[C64]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = C64::default();
        let mut out = Jet::constant(self.base, self.order, taylor.first().copied().unwrap_or_default());
        let mut power = Jet::constant(self.base, self.order, c(1.0));
        for coef in taylor.iter().take(self.order + 1).skip(1) {
            power = power.mul_unchecked(&h);
            out = out.zip(&power, |a, b| a + *coef * b);
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let e0 = self.value().exp();
        let t: Vec<C64> = (0..=self.order).map(|n| e0 / factorial(n)).collect();
        self.compose(&t)
    }

    pub fn ln(&self) -> Result<Jet> {
        let u0 = self.value();
        if u0 == C64::default() {
            return Err(Error::DomainError { function: "ln", at: format!("{u0}") });
        }
        let mut t = vec![u0.ln()];
        for n in 1..=self.order {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            t.push(c(sign / n as f64) / u0.powu(n as u32));
        }
        Ok(self.compose(&t))
    }

    /// Principal-branch power `self^alpha`.
    pub fn powc(&self, alpha: C64) -> Result<Jet> {
        let u0 = self.value();
        if u0 == C64::default() {
            let is_nat = alpha.im == 0.0 && alpha.re >= 0.0 && alpha.re.fract() == 0.0;
            if is_nat {
                return Ok(self.powi(alpha.re as u32));
            }
            return Err(Error::DomainError { function: "pow", at: format!("{u0}") });
        }
        let mut t = Vec::with_capacity(self.order + 1);
        let base = u0.powc(alpha);
        let mut binom = c(1.0);
        for n in 0..=self.order {
            if n > 0 {
                binom = binom * (alpha - (n - 1) as f64) / n as f64;
            }
            t.push(base * binom / u0.powu(n as u32));
        }
        Ok(self.compose(&t))
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut out = Jet::constant(self.base, self.order, c(1.0));
        for _ in 0..n {
            out = out.mul_unchecked(self);
        }
        out
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.powc(c(0.5))
    }

    pub fn tan(&self) -> Result<Jet> {
        let u0 = self.value();
        if u0.cos().norm() < 1e-14 {
            return Err(Error::DomainError { function: "tan", at: format!("{u0}") });
        }
        // T' = 1 + T^2 as a univariate series in the offset
        let mut t = vec![u0.tan()];
        for n in 0..self.order {
            let mut sq = C64::default();
            for k in 0..=n {
                sq += t[k] * t[n - k];
            }
            let rhs = if n == 0 { sq + 1.0 } else { sq };
            t.push(rhs / (n + 1) as f64);
        }
        Ok(self.compose(&t))
    }
}

impl<'a> Add for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        self.try_add(rhs).expect("jet addition")
    }
}

impl<'a> Sub for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        self.try_sub(rhs).expect("jet subtraction")
    }
}

impl<'a> Mul for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        self.try_mul(rhs).expect("jet multiplication")
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|a| -a)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.map(|a| a * rhs)
    }
}

impl Mul<C64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: C64) -> Jet {
        self.map(|a| a * rhs)
    }
}

/// Commutative ring operations shared by scalars and jets, so that one
/// polynomial formula serves both point values and their derivatives.
pub trait Ring: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, k: f64) -> Self;
}

impl Ring for C64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
}

impl Ring for Jet {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(x: f64, y: f64) -> Point {
        Point::real(x, y)
    }

    #[test]
    fn product_rule_example() {
        let at = p(2.0, 3.0);
        let xy = &Jet::variable(at, 2, Var::X) * &Jet::variable(at, 2, Var::Y);
        assert_eq!(xy.value(), c(6.0));
        assert_eq!(xy.extract(1, 0).unwrap(), c(3.0));
        assert_eq!(xy.extract(0, 1).unwrap(), c(2.0));
        assert_eq!(xy.coeff(1, 1), c(1.0));
    }

    #[test]
    fn additive_inverse_is_zero() {
        let at = p(0.3, -0.7);
        let u = Jet::from_fn(at, 4, |i, j| C64::new(i as f64 + 0.5, j as f64 - 1.0));
        let z = &u + &(-&u);
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn reciprocal_of_one_plus_x_is_geometric() {
        let at = p(0.0, 0.0);
        let u = Jet::variable(at, 3, Var::X).add_scalar(c(1.0));
        let w = u.recip().unwrap();
        let expected = [1.0, -1.0, 1.0, -1.0];
        for (n, e) in expected.iter().enumerate() {
            assert_relative_eq!(w.coeff(n, 0).re, *e, epsilon = 1e-15);
        }
        assert_eq!(w.coeff(0, 1), C64::default());
    }

    #[test]
    fn reciprocal_rejects_zero_constant() {
        let u = Jet::variable(p(0.0, 0.0), 3, Var::X);
        assert_eq!(u.recip().unwrap_err(), Error::ZeroConstantTerm);
    }

    #[test]
    fn mismatched_jets_are_rejected() {
        let a = Jet::constant(p(0.0, 0.0), 3, c(1.0));
        let b = Jet::constant(p(0.0, 0.0), 2, c(1.0));
        let d = Jet::constant(p(1.0, 0.0), 3, c(1.0));
        assert!(matches!(a.try_add(&b), Err(Error::JetMismatch(_))));
        assert!(matches!(a.try_mul(&d), Err(Error::JetMismatch(_))));
    }

    #[test]
    fn extract_beyond_order_fails() {
        let u = Jet::constant(p(0.0, 0.0), 2, c(5.0));
        assert_eq!(u.extract(1, 0).unwrap(), C64::default());
        assert!(matches!(u.extract(2, 1), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn derivative_of_x_squared() {
        let x = Jet::variable(p(1.5, 0.0), 3, Var::X);
        let x2 = &x * &x;
        assert_eq!(x2.extract(2, 0).unwrap(), c(2.0));
        let d = x2.derivative(Var::X).unwrap();
        assert_eq!(d.value(), c(3.0));
        assert_eq!(d.order(), 2);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let at = Point::new(C64::new(0.3, 0.1), C64::new(-0.2, 0.05));
        let x = Jet::variable(at, 5, Var::X);
        let y = Jet::variable(at, 5, Var::Y);
        let u = &(&x * &y) + &x;
        let e = u.exp();
        let l = e.ln().unwrap();
        assert!((&l - &u).max_abs() < 1e-13);
        let s = u.add_scalar(c(2.0)).sqrt().unwrap();
        assert!((&(&s * &s) - &u.add_scalar(c(2.0))).max_abs() < 1e-13);
        // tan' = 1 + tan^2
        let t = x.tan().unwrap();
        let dt = t.derivative(Var::X).unwrap();
        let rhs = (&t * &t).add_scalar(c(1.0)).truncate(4);
        assert!((&dt - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn swap_vars_transposes() {
        let at = p(1.0, 2.0);
        let u = Jet::from_fn(at, 3, |i, j| c((10 * i + j) as f64));
        let s = u.swap_vars();
        assert_eq!(s.coeff(2, 1), u.coeff(1, 2));
        assert_eq!(s.base(), p(2.0, 1.0));
    }
}
