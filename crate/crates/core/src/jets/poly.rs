use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Zero;

use super::{c, Jet, Point, Var, C64};
use crate::error::{Error, Result};

/// A polynomial coefficient: exact rational or complex floating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coef {
    Rational(Ratio<i64>),
    Complex(C64),
}

impl Coef {
    pub fn to_complex(&self) -> C64 {
        match self {
            Coef::Rational(r) => c(*r.numer() as f64 / *r.denom() as f64),
            Coef::Complex(z) => *z,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coef::Rational(r) => r.is_zero(),
            Coef::Complex(z) => *z == C64::default(),
        }
    }

    fn add(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Rational(a), Coef::Rational(b)) => Coef::Rational(a + b),
            _ => Coef::Complex(self.to_complex() + other.to_complex()),
        }
    }

    fn mul(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Rational(a), Coef::Rational(b)) => Coef::Rational(a * b),
            _ => Coef::Complex(self.to_complex() * other.to_complex()),
        }
    }

    fn scale_int(&self, k: i64) -> Coef {
        match self {
            Coef::Rational(r) => Coef::Rational(r * k),
            Coef::Complex(z) => Coef::Complex(z * k as f64),
        }
    }
}

impl From<i64> for Coef {
    fn from(v: i64) -> Self {
        Coef::Rational(Ratio::from_integer(v))
    }
}

impl From<(i64, i64)> for Coef {
    fn from((n, d): (i64, i64)) -> Self {
        Coef::Rational(Ratio::new(n, d))
    }
}

impl From<C64> for Coef {
    fn from(z: C64) -> Self {
        Coef::Complex(z)
    }
}

impl From<f64> for Coef {
    fn from(v: f64) -> Self {
        Coef::Complex(c(v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub exps: Vec<u32>,
    pub coef: Coef,
}

/// Sparse polynomial in a fixed number of variables; exponent tuples are
/// unique and zero coefficients are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyExpr {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Coef>,
}

impl PolyExpr {
    pub fn zero(nvars: usize) -> Self {
        PolyExpr { nvars, terms: BTreeMap::new() }
    }

    /// Builds a polynomial, rejecting duplicate exponent tuples.
    pub fn new(nvars: usize, monomials: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for m in monomials {
            if m.exps.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: m.exps.len() });
            }
            if terms.contains_key(&m.exps) {
                return Err(Error::DuplicateMonomial(m.exps));
            }
            terms.insert(m.exps, m.coef);
        }
        terms.retain(|_, v: &mut Coef| !v.is_zero());
        Ok(PolyExpr { nvars, terms })
    }

    /// Convenience constructor from `(exponents, coefficient)` pairs.
    pub fn from_terms<C: Into<Coef> + Copy>(nvars: usize, terms: &[(&[u32], C)]) -> Result<Self> {
        PolyExpr::new(
            nvars,
            terms.iter().map(|(e, k)| Monomial { exps: e.to_vec(), coef: (*k).into() }),
        )
    }

    pub fn constant(nvars: usize, value: impl Into<Coef>) -> Self {
        let mut p = PolyExpr::zero(nvars);
        p.add_term(vec![0; nvars], value.into());
        p
    }

    /// The coordinate `x_k`.
    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = PolyExpr::zero(nvars);
        p.add_term(e, 1.into());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&[u32], &Coef)> {
        self.terms.iter().map(|(e, k)| (e.as_slice(), k))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, exps: Vec<u32>, coef: Coef) {
        let next = match self.terms.get(&exps) {
            Some(old) => old.add(&coef),
            None => coef,
        };
        if next.is_zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, next);
        }
    }

    pub fn add(&self, other: &PolyExpr) -> Result<PolyExpr> {
        self.check_vars(other.nvars)?;
        let mut out = self.clone();
        for (e, k) in &other.terms {
            out.add_term(e.clone(), *k);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &PolyExpr) -> Result<PolyExpr> {
        self.check_vars(other.nvars)?;
        let mut out = PolyExpr::zero(self.nvars);
        for (e1, k1) in &self.terms {
            for (e2, k2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, k1.mul(k2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: impl Into<Coef>) -> PolyExpr {
        let k = k.into();
        let mut out = PolyExpr::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.mul(&k));
        }
        out
    }

    /// Exact partial derivative with respect to variable `k`.
    pub fn derivative(&self, k: usize) -> PolyExpr {
        let mut out = PolyExpr::zero(self.nvars);
        for (e, v) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[k] -= 1;
            out.add_term(e2, v.scale_int(e[k] as i64));
        }
        out
    }

    /// Appends a variable (with exponent zero) at position `at`.
    pub fn insert_var(&self, at: usize) -> PolyExpr {
        let mut out = PolyExpr::zero(self.nvars + 1);
        for (e, v) in &self.terms {
            let mut e2 = e.clone();
            e2.insert(at, 0);
            out.add_term(e2, *v);
        }
        out
    }

    pub fn eval(&self, point: &[C64]) -> Result<C64> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: point.len() });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, k)| {
                e.iter().zip(point).fold(k.to_complex(), |acc, (&n, &z)| acc * z.powu(n))
            })
            .sum())
    }

    /// Taylor jet of a bivariate polynomial at `point`; exact for every order.
    pub fn lift(&self, point: Point, order: usize) -> Result<Jet> {
        if self.nvars != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.nvars });
        }
        let max_deg = self.terms.keys().map(|e| e[0].max(e[1])).max().unwrap_or(0) as usize;
        let x = Jet::variable(point, order, Var::X);
        let y = Jet::variable(point, order, Var::Y);
        let mut xp = vec![Jet::constant(point, order, c(1.0))];
        let mut yp = vec![Jet::constant(point, order, c(1.0))];
        for k in 1..=max_deg {
            xp.push(&xp[k - 1] * &x);
            yp.push(&yp[k - 1] * &y);
        }
        let mut out = Jet::zeros(point, order);
        for (e, k) in &self.terms {
            let m = &xp[e[0] as usize] * &yp[e[1] as usize];
            out = &out + &(&m * k.to_complex());
        }
        Ok(out)
    }

    fn check_vars(&self, n: usize) -> Result<()> {
        if n != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: n });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solution_a() -> PolyExpr {
        PolyExpr::from_terms(2, &[(&[2, 2], (1, 4)), (&[0, 5], (1, 60))]).unwrap()
    }

    #[test]
    fn lift_linear_monomial() {
        let x = PolyExpr::var(2, 0);
        let j = x.lift(Point::real(2.0, 3.0), 1).unwrap();
        assert_eq!(j.value(), c(2.0));
        assert_eq!(j.extract(1, 0).unwrap(), c(1.0));
        assert_eq!(j.extract(0, 1).unwrap(), c(0.0));
    }

    #[test]
    fn lift_constant() {
        let k = PolyExpr::constant(2, 5);
        let j = k.lift(Point::real(-1.0, 4.0), 3).unwrap();
        assert_eq!(j.value(), c(5.0));
        assert_eq!(j.max_abs(), 5.0);
    }

    #[test]
    fn lift_third_derivatives_of_solution_a() {
        // symbolic: f_xxy = y, f_xxx = 0, f_xyy = x, f_yyy = y^2
        let j = solution_a().lift(Point::real(1.0, 1.0), 3).unwrap();
        assert!((j.extract(2, 1).unwrap() - 1.0).norm() < 1e-14);
        assert!(j.extract(3, 0).unwrap().norm() < 1e-14);
        assert!((j.extract(1, 2).unwrap() - 1.0).norm() < 1e-14);
        assert!((j.extract(0, 3).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn duplicate_monomials_rejected() {
        let err = PolyExpr::from_terms(2, &[(&[1, 2], 1), (&[1, 2], 3)]).unwrap_err();
        assert_eq!(err, Error::DuplicateMonomial(vec![1, 2]));
    }

    #[test]
    fn zero_coefficients_dropped() {
        let p = PolyExpr::from_terms(2, &[(&[1, 0], 0), (&[0, 1], 2)]).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn exact_derivative_keeps_rationals() {
        let d = solution_a().derivative(1).derivative(1).derivative(1);
        // f_yyy = y^2
        let expected = PolyExpr::from_terms(2, &[(&[0, 2], 1)]).unwrap();
        assert_eq!(d, expected);
    }
}
