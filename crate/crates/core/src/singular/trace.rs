//! Tracing the real discriminant curve `D = 0` of a real cubic field.

use crate::cubic::{disc_scale, discriminant_jet, CubicDirectionField};
use crate::error::{Error, Result};
use crate::jets::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminantTrace {
    pub polylines: Vec<Vec<[f64; 2]>>,
    pub seeds: Vec<[f64; 2]>,
    /// `[xmin, xmax, ymin, ymax]`.
    pub window: [f64; 4],
    /// Largest `|D| / scale` over the emitted points.
    pub max_residual: f64,
}

impl DiscriminantTrace {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.polylines.iter().flatten()
    }
}

struct Sample {
    d: f64,
    grad: [f64; 2],
    scale: f64,
}

fn sample(field: &CubicDirectionField, p: [f64; 2]) -> Result<Sample> {
    let jets = field.jets(Point::real(p[0], p[1]), 1)?;
    let coeffs = [jets[0].value(), jets[1].value(), jets[2].value(), jets[3].value()];
    let scale = disc_scale(&coeffs);
    let dj = discriminant_jet(&jets);
    let d = dj.value();
    if d.im.abs() > 1e-10 * scale {
        return Err(Error::ComplexBranch);
    }
    Ok(Sample { d: d.re, grad: [dj.coeff(1, 0).re, dj.coeff(0, 1).re], scale })
}

fn inside(w: &[f64; 4], p: [f64; 2]) -> bool {
    p[0] >= w[0] && p[0] <= w[1] && p[1] >= w[2] && p[1] <= w[3]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Newton projection onto `D = 0` along the gradient.
fn polish(field: &CubicDirectionField, mut p: [f64; 2], tol: f64, max_iter: usize) -> Result<Option<[f64; 2]>> {
    for _ in 0..max_iter {
        let s = sample(field, p)?;
        if s.d.abs() <= tol * s.scale {
            return Ok(Some(p));
        }
        let g2 = s.grad[0] * s.grad[0] + s.grad[1] * s.grad[1];
        if !(g2 > 0.0) || !g2.is_finite() {
            return Ok(None);
        }
        let k = s.d / g2;
        p = [p[0] - k * s.grad[0], p[1] - k * s.grad[1]];
    }
    Ok(None)
}

fn tangent(field: &CubicDirectionField, p: [f64; 2], prev: Option<[f64; 2]>) -> Result<Option<[f64; 2]>> {
    let s = sample(field, p)?;
    let n = s.grad[0].hypot(s.grad[1]);
    if !(n > 0.0) || !n.is_finite() {
        return Ok(None);
    }
    let mut t = [-s.grad[1] / n, s.grad[0] / n];
    if let Some(q) = prev {
        if t[0] * q[0] + t[1] * q[1] < 0.0 {
            t = [-t[0], -t[1]];
        }
    }
    Ok(Some(t))
}

/// Continuation from `start` in direction `dir`; returns the points after
/// `start` and whether the curve closed on itself.
fn continue_branch(
    field: &CubicDirectionField,
    start: [f64; 2],
    dir: [f64; 2],
    window: &[f64; 4],
    h0: f64,
    tol: f64,
) -> Result<(Vec<[f64; 2]>, bool)> {
    let hmin = 1e-7 * h0;
    let mut out = Vec::new();
    let (mut p, mut t) = (start, dir);
    let mut h = h0;
    let max_points = 20_000;
    while out.len() < max_points {
        let pred = [p[0] + h * t[0], p[1] + h * t[1]];
        let next = polish(field, pred, tol, 60)?;
        let accepted = match next {
            Some(q) if dist(q, pred) <= 0.5 * h => match tangent(field, q, Some(t))? {
                Some(tq) if tq[0] * t[0] + tq[1] * t[1] > 0.94 => Some((q, tq)),
                _ => None,
            },
            _ => None,
        };
        let Some((q, tq)) = accepted else {
            h *= 0.5;
            if h < hmin {
                return Ok((out, false));
            }
            continue;
        };
        if !inside(window, q) {
            return Ok((out, false));
        }
        if out.len() > 3 && dist(q, start) < h {
            out.push(start);
            return Ok((out, true));
        }
        out.push(q);
        p = q;
        t = tq;
        h = (h * 1.5).min(h0);
    }
    Ok((out, false))
}

/// Traces the real discriminant curve in `window` from seeds found on an
/// `n × n` grid (sign changes along grid edges and local minima of `|D|`).
/// Every emitted point satisfies `|D| ≤ tol · scale`.
pub fn trace_discriminant(field: &CubicDirectionField, window: [f64; 4], n: usize, tol: f64) -> Result<DiscriminantTrace> {
    let [x0, x1, y0, y1] = window;
    if !(x1 > x0) || !(y1 > y0) || !window.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument(format!("degenerate window {window:?}")));
    }
    if n < 8 {
        return Err(Error::InvalidArgument(format!("grid size {n} < 8")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol}")));
    }
    let (dx, dy) = ((x1 - x0) / (n - 1) as f64, (y1 - y0) / (n - 1) as f64);
    let node = |i: usize, j: usize| [x0 + i as f64 * dx, y0 + j as f64 * dy];
    let mut grid = vec![vec![0.0; n]; n];
    for (i, row) in grid.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let s = sample(field, node(i, j))?;
            *v = s.d / s.scale;
        }
    }
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = grid[i][j];
            if i + 1 < n && v * grid[i + 1][j] < 0.0 {
                let w = v / (v - grid[i + 1][j]);
                candidates.push([node(i, j)[0] + w * dx, node(i, j)[1]]);
            }
            if j + 1 < n && v * grid[i][j + 1] < 0.0 {
                let w = v / (v - grid[i][j + 1]);
                candidates.push([node(i, j)[0], node(i, j)[1] + w * dy]);
            }
            if v == 0.0 {
                candidates.push(node(i, j));
            }
            if i > 0 && j > 0 && i + 1 < n && j + 1 < n {
                let m = v.abs();
                let neighbors = [grid[i - 1][j], grid[i + 1][j], grid[i][j - 1], grid[i][j + 1]];
                if m > 0.0 && neighbors.iter().all(|u| u.abs() > m) && neighbors.iter().all(|u| u * v > 0.0) {
                    candidates.push(node(i, j));
                }
            }
        }
    }

    let h0 = 0.5 * dx.min(dy);
    let mut trace = DiscriminantTrace { polylines: Vec::new(), seeds: Vec::new(), window, max_residual: 0.0 };
    for cand in candidates {
        let Some(seed) = polish(field, cand, tol, 200)? else { continue };
        if !inside(&window, seed) || dist(seed, cand) > 2.0 * dx.max(dy) {
            continue;
        }
        if trace.points().any(|&q| dist(q, seed) < 1.5 * h0) {
            continue;
        }
        let Some(t) = tangent(field, seed, None)? else {
            trace.seeds.push(seed);
            trace.polylines.push(vec![seed]);
            continue;
        };
        let (fwd, closed) = continue_branch(field, seed, t, &window, h0, tol)?;
        let mut line: Vec<[f64; 2]> = if closed {
            Vec::new()
        } else {
            let (back, _) = continue_branch(field, seed, [-t[0], -t[1]], &window, h0, tol)?;
            back.into_iter().rev().collect()
        };
        line.push(seed);
        line.extend(fwd);
        trace.seeds.push(seed);
        trace.polylines.push(line);
    }
    for p in trace.polylines.iter().flatten() {
        let s = sample(field, *p)?;
        trace.max_residual = trace.max_residual.max(s.d.abs() / s.scale);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{c, PolyExpr};

    #[test]
    fn line_x_equals_zero() {
        let f = CubicDirectionField::from_polys(
            PolyExpr::constant(2, c(1.0)),
            PolyExpr::zero(2),
            PolyExpr::var(2, 0),
            PolyExpr::zero(2),
        )
        .unwrap();
        let tr = trace_discriminant(&f, [-1.0, 1.0, -1.0, 1.0], 16, 1e-12).unwrap();
        assert_eq!(tr.polylines.len(), 1);
        assert!(tr.points().all(|p| p[0].abs() < 1e-4));
        let ys: Vec<f64> = tr.polylines[0].iter().map(|p| p[1]).collect();
        let span = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
        assert!(span > 1.8);
    }

    #[test]
    fn constant_field_has_empty_trace() {
        let f = CubicDirectionField::constant([1.0, 0.0, 0.0, 1.0].map(c));
        let tr = trace_discriminant(&f, [-1.0, 1.0, -1.0, 1.0], 8, 1e-10).unwrap();
        assert!(tr.is_empty());
    }

    #[test]
    fn circle_closes() {
        // (1, 0, r, 0) has D = −4r³, which changes sign across r = 0.
        let x = PolyExpr::var(2, 0);
        let y = PolyExpr::var(2, 1);
        let r = x.mul(&x).unwrap().add(&y.mul(&y).unwrap()).unwrap().add(&PolyExpr::constant(2, c(-0.25))).unwrap();
        let f = CubicDirectionField::from_polys(PolyExpr::constant(2, c(1.0)), PolyExpr::zero(2), r, PolyExpr::zero(2))
            .unwrap();
        // a cube root of the tolerance bounds the distance to the circle
        let tr = trace_discriminant(&f, [-1.0, 1.0, -1.0, 1.0], 12, 1e-20).unwrap();
        assert_eq!(tr.polylines.len(), 1);
        let line = &tr.polylines[0];
        assert!(dist(line[0], *line.last().unwrap()) < 1e-12);
        assert!(tr.points().all(|p| (p[0].hypot(p[1]) - 0.5).abs() < 1e-6));
    }
}
