//! Dormand–Prince 5(4) integration and adaptive Gauss–Legendre quadrature.

use crate::error::{Error, Result};
use crate::jets::C64;

/// Outcome of one right-hand-side evaluation.
pub enum Eval {
    Ok(Vec<f64>),
    /// Ask the integrator to retry with a smaller step.
    Reject,
    /// Terminate the integration, keeping the last accepted state.
    Stop(String),
}

#[derive(Clone, Copy, Debug)]
pub struct Dp45Options {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub hmax: f64,
    pub hmin: f64,
    pub max_steps: usize,
}

impl Default for Dp45Options {
    fn default() -> Self {
        Dp45Options { rtol: 1e-10, atol: 1e-12, h0: 1e-3, hmax: 0.05, hmin: 1e-14, max_steps: 200_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub stopped: Option<String>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.ys.last().map(|v| v.as_slice()).unwrap_or(&[])
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &[f64], terms: &[(f64, &[f64])], h: f64) -> Vec<f64> {
    let mut out = y.to_vec();
    for (w, k) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += h * w * v;
        }
    }
    out
}

enum Stage {
    Done(Vec<f64>),
    Reject,
    Stop(String),
}

fn stage(f: &mut impl FnMut(f64, &[f64]) -> Eval, t: f64, y: &[f64]) -> Stage {
    match f(t, y) {
        Eval::Ok(v) => Stage::Done(v),
        Eval::Reject => Stage::Reject,
        Eval::Stop(s) => Stage::Stop(s),
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
pub fn dp45(
    mut f: impl FnMut(f64, &[f64]) -> Eval,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &Dp45Options,
) -> Result<Trajectory> {
    let mut traj = Trajectory { ts: vec![t0], ys: vec![y0.to_vec()], stopped: None };
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = opts.h0.min(opts.hmax).min((t_end - t0).abs()).max(opts.hmin) * dir;
    let mut k1 = match stage(&mut f, t, &y) {
        Stage::Done(v) => v,
        Stage::Reject => return Err(Error::Integration("rejected at the initial point".into())),
        Stage::Stop(s) => {
            traj.stopped = Some(s);
            return Ok(traj);
        }
    };
    let mut steps = 0;
    while (t_end - t) * dir > 1e-15 * (1.0 + t.abs()) {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration(format!("step limit reached at t = {t}")));
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        macro_rules! st {
            ($tt:expr, $yy:expr) => {
                match stage(&mut f, $tt, &$yy) {
                    Stage::Done(v) => v,
                    Stage::Reject => {
                        h *= 0.5;
                        if h.abs() < opts.hmin {
                            return Err(Error::Integration(format!("step underflow at t = {t}")));
                        }
                        continue;
                    }
                    Stage::Stop(s) => {
                        traj.stopped = Some(s);
                        return Ok(traj);
                    }
                }
            };
        }
        let k2 = st!(t + C2 * h, axpy(&y, &[(A21, &k1)], h));
        let k3 = st!(t + C3 * h, axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = st!(t + C4 * h, axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = st!(t + C5 * h, axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = st!(t + h, axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
        let y5 = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = st!(t + h, y5);
        let mut err: f64 = 0.0;
        for i in 0..y.len() {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            k1 = k7;
            traj.ts.push(t);
            traj.ys.push(y.clone());
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).abs().min(opts.hmax).max(opts.hmin) * dir;
        if err > 1.0 && h.abs() <= opts.hmin {
            return Err(Error::Integration(format!("step underflow at t = {t}")));
        }
    }
    Ok(traj)
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn gl8(f: &mut impl FnMut(f64) -> Result<C64>, a: f64, b: f64) -> Result<C64> {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = C64::default();
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += f(m + r * x)? * *w;
    }
    Ok(acc * r)
}

/// `∫ₐᵇ f` by recursive bisection of 8-point Gauss–Legendre panels.
pub fn integrate(mut f: impl FnMut(f64) -> Result<C64>, a: f64, b: f64, tol: f64) -> Result<C64> {
    fn rec(f: &mut impl FnMut(f64) -> Result<C64>, a: f64, b: f64, whole: C64, tol: f64, depth: usize) -> Result<C64> {
        let m = 0.5 * (a + b);
        let l = gl8(f, a, m)?;
        let r = gl8(f, m, b)?;
        let err = (l + r - whole).norm();
        if err <= tol * (1.0 + (l + r).norm()) || depth == 0 {
            if depth == 0 && err > 1e3 * tol {
                return Err(Error::Integration(format!("quadrature did not converge on [{a}, {b}]")));
            }
            return Ok(l + r);
        }
        Ok(rec(f, a, m, l, 0.5 * tol, depth - 1)? + rec(f, m, b, r, 0.5 * tol, depth - 1)?)
    }
    let whole = gl8(&mut f, a, b)?;
    rec(&mut f, a, b, whole, tol, 30)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let opts = Dp45Options::default();
        let tr = dp45(|_, y| Eval::Ok(vec![-y[0]]), 0.0, &[1.0], 2.0, &opts).unwrap();
        assert!((tr.last()[0] - (-2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let opts = Dp45Options::default();
        let tr = dp45(|_, y| Eval::Ok(vec![y[1], -y[0]]), 0.0, &[0.0, 1.0], -1.0, &opts).unwrap();
        assert!((tr.last()[0] - (-1.0f64).sin()).abs() < 1e-9);
    }

    #[test]
    fn stop_keeps_last_state() {
        let opts = Dp45Options::default();
        let tr = dp45(
            |_, y| if y[0] > 0.5 { Eval::Stop("wall".into()) } else { Eval::Ok(vec![1.0]) },
            0.0,
            &[0.0],
            2.0,
            &opts,
        )
        .unwrap();
        assert_eq!(tr.stopped.as_deref(), Some("wall"));
        assert!(tr.last()[0] <= 0.5 + 1e-12);
    }

    #[test]
    fn quadrature_of_smooth_and_peaked() {
        let v = integrate(|x| Ok(C64::new(x.cos(), x * x)), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - C64::new(1.0f64.sin(), 1.0 / 3.0)).norm() < 1e-12);
        let v = integrate(|x| Ok(C64::new(1.0 / (1e-4 + x * x), 0.0)), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((v.re - exact).abs() < 1e-8 * exact);
    }
}
