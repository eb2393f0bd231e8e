//! The scalar ODE `[12 + 2t² − 9tF] F′ = k (4 + 27F²)`, `k = 2(m₀+3)/(m₀+1)`,
//! `F(0) = 0`, solved by power-series stepping in the complex `t` plane.

use crate::error::{Error, Result};
use crate::jets::{c, C64};

/// Truncation order of the local power series.
pub const SERIES_ORDER: usize = 24;
/// Step length as a fraction of the estimated radius of convergence.
const STEP_FRACTION: f64 = 0.3;
const MAX_STEP: f64 = 0.1;
/// The real march stops once the radius of convergence falls below this.
pub const FOLD_RADIUS: f64 = 1e-3;
/// Default residual tolerance for accepted steps.
pub const F_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FOde {
    pub m0: u32,
    /// Where the real march stops, within about `1e-3` of the point where the
    /// real solution runs into `12 + 2t² − 9tF = 0`.
    pub fold: Option<f64>,
}

impl FOde {
    pub fn new(m0: u32) -> Result<Self> {
        let mut ode = FOde { m0, fold: None };
        let real = ode.march_real(2.0, F_TOL)?;
        ode.fold = real.halted_at;
        Ok(ode)
    }

    pub fn k(&self) -> f64 {
        2.0 * (self.m0 as f64 + 3.0) / (self.m0 as f64 + 1.0)
    }

    pub fn bracket(t: C64, f: C64) -> C64 {
        12.0 + 2.0 * t * t - 9.0 * t * f
    }

    /// Relative residual of the implicit ODE at `(t, F, F′)`.
    pub fn residual(&self, t: C64, f: C64, fp: C64) -> f64 {
        let rhs = self.k() * (4.0 + 27.0 * f * f);
        (Self::bracket(t, f) * fp - rhs).norm() / (1.0 + rhs.norm())
    }

    /// Taylor coefficients of the solution through `(t0, f0)` in powers of
    /// `t − t0`.
    pub fn series(&self, t0: C64, f0: C64, order: usize) -> Result<Vec<C64>> {
        let k = self.k();
        let g0 = Self::bracket(t0, f0);
        if g0.norm() < 1e-13 {
            return Err(Error::BracketVanishing { t: t0.re });
        }
        let tsq = [t0 * t0, 2.0 * t0, c(1.0)];
        let mut f = vec![f0];
        let mut g = vec![g0];
        for n in 0..order {
            if n > 0 {
                let tf = t0 * f[n] + f[n - 1];
                let t2 = if n < 3 { tsq[n] } else { C64::default() };
                g.push(2.0 * t2 - 9.0 * tf);
            }
            let sq: C64 = (0..=n).map(|j| f[j] * f[n - j]).sum();
            let mut rhs = 27.0 * k * sq;
            if n == 0 {
                rhs += 4.0 * k;
            }
            for j in 1..=n {
                rhs -= g[j] * (n - j + 1) as f64 * f[n - j + 1];
            }
            f.push(rhs / (g0 * (n + 1) as f64));
        }
        Ok(f)
    }

    /// Value of `F` and its Taylor series at `t`, continued along the path
    /// chosen by [`FOde::path_to`].
    pub fn series_at(&self, t: C64, order: usize) -> Result<Vec<C64>> {
        let path = self.path_to(t);
        let (f, _) = self.continue_along(&path, F_TOL)?;
        self.series(t, f, order)
    }

    /// Straight segment from 0 unless `t` lies past a fold near the real
    /// axis, in which case the path detours through the upper half plane.
    pub fn path_to(&self, t: C64) -> Vec<C64> {
        let zero = C64::default();
        match self.fold {
            Some(fold) if t.re.abs() >= 0.9 * fold && t.im.abs() <= 0.5 * t.re.abs() => {
                let w = C64::new(0.5 * t.re, 0.5 * t.re.abs());
                vec![zero, w, t]
            }
            _ => vec![zero, t],
        }
    }

    /// Continues `F` from `F(0) = 0` along a polygonal path; returns the end
    /// value and the largest step residual.
    pub fn continue_along(&self, path: &[C64], tol: f64) -> Result<(C64, f64)> {
        let mut z = path.first().copied().unwrap_or_default();
        let mut f = C64::default();
        let mut worst: f64 = 0.0;
        for &target in path.iter().skip(1) {
            while (target - z).norm() > 1e-15 {
                let (nz, nf, res) = self.step(z, f, target, tol)?;
                z = nz;
                f = nf;
                worst = worst.max(res);
            }
        }
        Ok((f, worst))
    }

    fn step(&self, z: C64, f: C64, target: C64, tol: f64) -> Result<(C64, C64, f64)> {
        let coeffs = self.series(z, f, SERIES_ORDER)?;
        let dist = (target - z).norm();
        let dir = (target - z) / dist;
        let mut h = (STEP_FRACTION * radius_estimate(&coeffs)).min(MAX_STEP).min(dist);
        loop {
            let s = dir * h;
            let (fv, fp) = eval_series(&coeffs, s);
            let res = self.residual(z + s, fv, fp);
            if res <= tol && fv.is_finite() {
                let nz = if h == dist { target } else { z + s };
                return Ok((nz, fv, res));
            }
            h *= 0.5;
            if h < 1e-12 {
                return Err(Error::BracketVanishing { t: z.re });
            }
        }
    }

    fn march_real(&self, t_max: f64, tol: f64) -> Result<FSamples> {
        let mut out = FSamples { m0: self.m0, ts: vec![0.0], values: vec![c(0.0)], derivs: vec![], residuals: vec![0.0], continued: vec![false], halted_at: None };
        let (mut t, mut f) = (0.0, C64::default());
        while t < t_max {
            let coeffs = self.series(c(t), f, SERIES_ORDER)?;
            if out.derivs.len() < out.ts.len() {
                out.derivs.push(coeffs[1]);
            }
            let rho = radius_estimate(&coeffs);
            if rho < FOLD_RADIUS {
                out.halted_at = Some(t);
                return Ok(out);
            }
            let (nz, nf, res) = self.step(c(t), f, c(t_max), tol)?;
            t = nz.re;
            f = nf;
            out.ts.push(t);
            out.values.push(f);
            out.residuals.push(res);
            out.continued.push(false);
        }
        let coeffs = self.series(c(t), f, 2)?;
        out.derivs.push(coeffs[1]);
        Ok(out)
    }
}

/// Samples of `F` on `[0, t_max]`.
#[derive(Clone, Debug)]
pub struct FSamples {
    pub m0: u32,
    pub ts: Vec<f64>,
    pub values: Vec<C64>,
    pub derivs: Vec<C64>,
    /// Residual of the implicit ODE on the local series at each sample.
    pub residuals: Vec<f64>,
    /// Whether the sample lies past the real fold and was reached by complex
    /// continuation.
    pub continued: Vec<bool>,
    /// Where the real march stopped because the bracket approached zero.
    pub halted_at: Option<f64>,
}

impl FSamples {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Real solve from `F(0) = 0`; stops with `halted_at` set at a fold.
pub fn solve_f_real(m0: u32, t_max: f64, tol: f64) -> Result<FSamples> {
    if !(t_max > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max = {t_max}, tol = {tol}")));
    }
    FOde { m0, fold: None }.march_real(t_max, tol)
}

/// Samples of `F` on `[0, t_max]`: the real march up to a fold, then `n_cont`
/// evenly spaced points beyond it reached by holomorphic continuation.
pub fn solve_f(m0: u32, t_max: f64, tol: f64) -> Result<FSamples> {
    let mut out = solve_f_real(m0, t_max, tol)?;
    let Some(stop) = out.halted_at else {
        return Ok(out);
    };
    let ode = FOde { m0, fold: Some(stop) };
    let n_cont = 32;
    for i in 1..=n_cont {
        let t = stop + (t_max - stop) * i as f64 / n_cont as f64;
        let path = ode.path_to(c(t));
        let (f, res) = ode.continue_along(&path, tol)?;
        let coeffs = ode.series(c(t), f, 2)?;
        out.ts.push(t);
        out.values.push(f);
        out.derivs.push(coeffs[1]);
        out.residuals.push(res.max(ode.residual(c(t), f, coeffs[1])));
        out.continued.push(true);
    }
    Ok(out)
}

fn eval_series(coeffs: &[C64], s: C64) -> (C64, C64) {
    let mut v = C64::default();
    for a in coeffs.iter().rev() {
        v = v * s + a;
    }
    let mut dv = C64::default();
    for n in (1..coeffs.len()).rev() {
        dv = dv * s + coeffs[n] * n as f64;
    }
    (v, dv)
}

fn radius_estimate(coeffs: &[C64]) -> f64 {
    let n = coeffs.len() - 1;
    let mut rho = f64::INFINITY;
    for (k, a) in coeffs.iter().enumerate().skip(n / 2) {
        let m = a.norm();
        if m > 0.0 && k > 0 {
            rho = rho.min(m.powf(-1.0 / k as f64));
        }
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_slope() {
        for m0 in 0..4u32 {
            let ode = FOde { m0, fold: None };
            let s = ode.series(c(0.0), c(0.0), 4).unwrap();
            let expected = 2.0 * (m0 as f64 + 3.0) / (3.0 * (m0 as f64 + 1.0));
            assert!((s[1].re - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn series_satisfies_the_equation() {
        let ode = FOde { m0: 1, fold: None };
        let s = ode.series(c(0.1), c(0.2), SERIES_ORDER).unwrap();
        let (f, fp) = eval_series(&s, C64::new(0.01, 0.005));
        assert!(ode.residual(C64::new(0.11, 0.005), f, fp) < 1e-13);
    }

    #[test]
    fn real_march_halts_at_fold() {
        let out = solve_f_real(0, 1.0, 1e-10).unwrap();
        let t = out.halted_at.expect("fold");
        assert!(t > 0.1 && t < 0.6, "{t}");
        assert!(out.max_residual() < 1e-10);
    }
}
