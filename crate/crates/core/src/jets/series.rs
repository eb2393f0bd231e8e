//! Univariate truncated power series, stored as coefficient vectors.

use super::C64;
use crate::error::{Error, Result};

pub fn mul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::default(); n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub fn recip(a: &[C64], n: usize) -> Result<Vec<C64>> {
    let a0 = a.first().copied().unwrap_or_default();
    if a0 == C64::default() {
        return Err(Error::ZeroConstantTerm);
    }
    let inv0 = a0.inv();
    let mut w = vec![C64::default(); n];
    if n == 0 {
        return Ok(w);
    }
    w[0] = inv0;
    for k in 1..n {
        let mut acc = C64::default();
        for j in 1..=k.min(a.len() - 1) {
            acc += a[j] * w[k - j];
        }
        w[k] = -acc * inv0;
    }
    Ok(w)
}

pub fn eval(a: &[C64], s: C64) -> C64 {
    a.iter().rev().fold(C64::default(), |acc, &k| acc * s + k)
}

pub fn eval_derivative(a: &[C64], s: C64) -> C64 {
    a.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(C64::default(), |acc, (k, &v)| acc * s + v * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recip_of_one_minus_s() {
        let a = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        let w = recip(&a, 5).unwrap();
        assert!(w.iter().all(|z| (*z - 1.0).norm() < 1e-15));
    }

    #[test]
    fn derivative_eval() {
        let a = [C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)];
        assert_eq!(eval_derivative(&a, C64::new(2.0, 0.0)), C64::new(14.0, 0.0));
    }
}
