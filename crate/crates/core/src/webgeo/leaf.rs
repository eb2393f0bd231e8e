use crate::cubic::{disc_scale, discriminant, roots, CubicDirectionField};
use crate::error::{Error, Result};
use crate::jets::{Point, C64};
use crate::ode::{dp45, Dp45Options, Eval};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Length,
    Domain,
    Discriminant,
}

#[derive(Clone, Debug)]
pub struct Leaf {
    pub branch: usize,
    pub points: Vec<[f64; 2]>,
    pub termination: Termination,
}

impl Leaf {
    pub fn end(&self) -> [f64; 2] {
        *self.points.last().expect("leaf has its start point")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LeafOptions {
    pub tol: f64,
    /// Relative `|D|` at which integration stops.
    pub disc_cutoff: f64,
    /// `[xmin, xmax, ymin, ymax]`.
    pub window: Option<[f64; 4]>,
    /// Largest allowed turn of the tracked direction per evaluation, radians.
    pub max_turn: f64,
    pub hmax: f64,
}

impl Default for LeafOptions {
    fn default() -> Self {
        LeafOptions { tol: 1e-10, disc_cutoff: 1e-6, window: None, max_turn: std::f64::consts::PI / 6.0, hmax: 0.02 }
    }
}

fn real_coeffs(field: &CubicDirectionField, p: [f64; 2]) -> Result<[f64; 4]> {
    let v = field.coeffs(Point::real(p[0], p[1]))?;
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if v.iter().any(|z| z.im.abs() > 1e-12 * scale.max(1.0)) {
        return Err(Error::ComplexBranch);
    }
    Ok(v.map(|z| z.re))
}

fn canonical(d: [f64; 2]) -> [f64; 2] {
    if d[0] > 1e-12 || (d[0].abs() <= 1e-12 && d[1] > 0.0) {
        d
    } else {
        [-d[0], -d[1]]
    }
}

/// Unit leaf directions `(q, −p)` of the three real roots, in root order,
/// each with `dx > 0` (or `dy > 0` when vertical). Needs `D > 0`.
pub fn real_directions(field: &CubicDirectionField, p: [f64; 2]) -> Result<[[f64; 2]; 3]> {
    let coeffs = real_coeffs(field, p)?;
    let cz = coeffs.map(|v| C64::new(v, 0.0));
    let d = discriminant(&cz).re;
    if d <= 0.0 {
        return Err(Error::ComplexBranch);
    }
    let rs = roots(field, Point::real(p[0], p[1]))?;
    let mut out = [[0.0; 2]; 3];
    for (i, r) in rs.iter().enumerate() {
        // a real root has a real representative in its chart
        let v = [r[1].re, -r[0].re];
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        out[i] = canonical([v[0] / n, v[1] / n]);
    }
    Ok(out)
}

fn rel_disc(field: &CubicDirectionField, p: [f64; 2]) -> Result<f64> {
    let c = field.coeffs(Point::real(p[0], p[1]))?;
    Ok(discriminant(&c).re / disc_scale(&c))
}

/// Integrates the leaf of `branch` (0, 1, 2 in root order) from `start` for
/// arc length `|length|`; negative lengths run against the canonical
/// orientation.
pub fn integrate_leaf(
    field: &CubicDirectionField,
    start: [f64; 2],
    branch: usize,
    length: f64,
    opts: &LeafOptions,
) -> Result<Leaf> {
    if branch > 2 {
        return Err(Error::InvalidArgument(format!("branch {branch} out of range")));
    }
    if rel_disc(field, start)? <= opts.disc_cutoff {
        return Err(Error::SingularPoint { disc_abs: rel_disc(field, start)?.abs(), multiplicity: 2 });
    }
    let dirs = real_directions(field, start)?;
    let leaf = integrate_leaf_along(field, start, dirs[branch], length, opts)?;
    Ok(Leaf { branch, ..leaf })
}

fn closest_direction(dirs: &[[f64; 2]; 3], reference: [f64; 2]) -> [f64; 2] {
    let mut best = dirs[0];
    let mut best_dot = -1.0;
    for d in dirs {
        let dot = (d[0] * reference[0] + d[1] * reference[1]).abs();
        if dot > best_dot {
            best_dot = dot;
            best = *d;
        }
    }
    best
}

/// Leaf through `start` whose direction is closest to `reference`, followed
/// for signed arc length `length` (the sign is relative to the canonical
/// orientation of that direction).
fn integrate_leaf_along(
    field: &CubicDirectionField,
    start: [f64; 2],
    reference: [f64; 2],
    length: f64,
    opts: &LeafOptions,
) -> Result<Leaf> {
    let d0 = closest_direction(&real_directions(field, start)?, reference);
    let sign = if length < 0.0 { -1.0 } else { 1.0 };
    let mut reference = [d0[0] * sign, d0[1] * sign];
    let cos_max = opts.max_turn.cos();
    let rhs = |_: f64, y: &[f64]| -> Eval {
        let p = [y[0], y[1]];
        if let Some(w) = opts.window {
            if p[0] < w[0] || p[0] > w[1] || p[1] < w[2] || p[1] > w[3] {
                return Eval::Stop("domain".into());
            }
        }
        match rel_disc(field, p) {
            Ok(d) if d > opts.disc_cutoff => {}
            Ok(_) => return Eval::Stop("discriminant".into()),
            Err(_) => return Eval::Stop("domain".into()),
        }
        let dirs = match real_directions(field, p) {
            Ok(d) => d,
            Err(_) => return Eval::Stop("discriminant".into()),
        };
        let (mut best, mut best_dot) = ([0.0; 2], -1.0);
        for d in dirs {
            let dot = d[0] * reference[0] + d[1] * reference[1];
            if dot.abs() > best_dot {
                best_dot = dot.abs();
                best = if dot < 0.0 { [-d[0], -d[1]] } else { d };
            }
        }
        if best_dot < cos_max {
            return Eval::Reject;
        }
        reference = best;
        Eval::Ok(best.to_vec())
    };
    let dp = Dp45Options { rtol: opts.tol, atol: opts.tol, h0: opts.hmax.min(length.abs().max(1e-12)) * 0.1, hmax: opts.hmax, ..Dp45Options::default() };
    let traj = dp45(rhs, 0.0, &start, length.abs(), &dp)?;
    let termination = match traj.stopped.as_deref() {
        None => Termination::Length,
        Some("domain") => Termination::Domain,
        Some(_) => Termination::Discriminant,
    };
    Ok(Leaf { branch: 0, points: traj.ys.iter().map(|v| [v[0], v[1]]).collect(), termination })
}

/// Point at signed arc length `s` on the leaf through `start` whose direction
/// is closest to `reference`, with the derivative of that point in `s`.
pub fn leaf_point(
    field: &CubicDirectionField,
    start: [f64; 2],
    reference: [f64; 2],
    s: f64,
    opts: &LeafOptions,
) -> Result<([f64; 2], [f64; 2])> {
    let d0 = closest_direction(&real_directions(field, start)?, reference);
    if s == 0.0 {
        return Ok((start, d0));
    }
    let leaf = integrate_leaf_along(field, start, d0, s, opts)?;
    if leaf.termination != Termination::Length {
        return Err(Error::LeftRegularRegion(format!("leaf from ({}, {}) stopped early", start[0], start[1])));
    }
    let end = leaf.end();
    let n = leaf.points.len();
    let prev = if n >= 2 { leaf.points[n - 2] } else { start };
    let travel = [end[0] - prev[0], end[1] - prev[1]];
    let mut t = closest_direction(&real_directions(field, end)?, travel);
    if t[0] * travel[0] + t[1] * travel[1] < 0.0 {
        t = [-t[0], -t[1]];
    }
    let sign = s.signum();
    Ok((end, [t[0] * sign, t[1] * sign]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::c;

    #[test]
    fn constant_web_leaves_are_straight() {
        let f = CubicDirectionField::constant([1.0, -3.0, 0.0, 1.0].map(c));
        let dirs = real_directions(&f, [0.0, 0.0]).unwrap();
        for b in 0..3 {
            let leaf = integrate_leaf(&f, [0.2, -0.1], b, 0.5, &LeafOptions::default()).unwrap();
            let e = leaf.end();
            assert!((e[0] - 0.2 - 0.5 * dirs[b][0]).abs() < 1e-12);
            assert!((e[1] + 0.1 - 0.5 * dirs[b][1]).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_region_rejected() {
        let f = CubicDirectionField::constant([1.0, 0.0, 0.0, 1.0].map(c));
        assert_eq!(real_directions(&f, [0.0, 0.0]).unwrap_err(), Error::ComplexBranch);
    }
}
