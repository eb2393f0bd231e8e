use crate::chern::{gamma_cubic, FrameTracker};
use crate::cubic::{normalize_roots, CubicDirectionField, RootTriple};
use crate::error::{Error, Result};
use crate::jets::{Point, C64};
use crate::ode::{dp45, Dp45Options, Eval};

/// `k` and `u₁, u₂, u₃` with `dk = −γk`, `duᵢ = kσᵢ`, `k(base) = 1`,
/// `uᵢ(base) = 0`, at the end of a path.
#[derive(Clone, Debug)]
pub struct FirstIntegralState {
    pub k: C64,
    pub u: [C64; 3],
    /// Largest `|u₁ + u₂ + u₃|` seen along the path.
    pub abelian_residual: f64,
    /// Largest `|dγ|` at the path vertices.
    pub max_curvature: f64,
    /// Set when the curvature along the path exceeds `1e-6`, making the
    /// result depend on the path.
    pub path_dependent: bool,
    /// Normalized roots at the end of the path, labeled by continuation.
    pub frame: RootTriple,
}

fn pack(k: C64, u: &[C64; 3]) -> Vec<f64> {
    vec![k.re, k.im, u[0].re, u[0].im, u[1].re, u[1].im, u[2].re, u[2].im]
}

fn unpack(y: &[f64]) -> (C64, [C64; 3]) {
    (
        C64::new(y[0], y[1]),
        [C64::new(y[2], y[3]), C64::new(y[4], y[5]), C64::new(y[6], y[7])],
    )
}

pub fn first_integrals(field: &CubicDirectionField, path: &[Point]) -> Result<FirstIntegralState> {
    let Some(&start) = path.first() else {
        return Err(Error::Integration("empty path".into()));
    };
    let mut k = C64::new(1.0, 0.0);
    let mut u = [C64::default(); 3];
    let mut frame = normalize_roots(field, start)?;
    let mut abelian: f64 = 0.0;
    let mut max_curv: f64 = 0.0;
    for p in path {
        max_curv = max_curv.max(crate::chern::curvature(field, *p, crate::chern::Route::Cubic)?.norm());
    }
    let opts = Dp45Options { rtol: 1e-12, atol: 1e-13, h0: 1e-3, hmax: 0.02, ..Dp45Options::default() };
    for w in path.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let v = [p1.x - p0.x, p1.y - p0.y];
        let mut tracker = FrameTracker::from_triple(frame);
        let mut failure = None;
        let rhs = |s: f64, y: &[f64]| -> Eval {
            let p = Point::new(p0.x + v[0] * s, p0.y + v[1] * s);
            let (k, _) = unpack(y);
            let g = match gamma_cubic(field, p) {
                Ok(g) => g,
                Err(e) => {
                    failure = Some(e);
                    return Eval::Stop("singular".into());
                }
            };
            let t = match tracker.advance(field, p) {
                Ok(t) => *t,
                Err(_) => return Eval::Reject,
            };
            let dk = -g.pair(v) * k;
            let du: [C64; 3] = std::array::from_fn(|i| k * (t.p[i] * v[0] + t.q[i] * v[1]));
            Eval::Ok(pack(dk, &du))
        };
        let traj = dp45(rhs, 0.0, &pack(k, &u), 1.0, &opts)?;
        if let Some(e) = failure {
            return Err(e);
        }
        if traj.stopped.is_some() {
            return Err(Error::PathHitsDiscriminant { disc_abs: 0.0, at: p1.to_string() });
        }
        for y in &traj.ys {
            let (_, uu) = unpack(y);
            abelian = abelian.max((uu[0] + uu[1] + uu[2]).norm());
        }
        let (kk, uu) = unpack(traj.last());
        k = kk;
        u = uu;
        let mut end_tracker = FrameTracker::from_triple(frame);
        frame = *end_tracker.advance_along(field, p0, p1, 64)?;
    }
    Ok(FirstIntegralState {
        k,
        u,
        abelian_residual: abelian,
        max_curvature: max_curv,
        path_dependent: max_curv > 1e-6,
        frame,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::c;

    #[test]
    fn parallel_web_has_linear_integrals() {
        let f = CubicDirectionField::constant([1.0, 0.0, -1.0, 0.0].map(c));
        let path = [Point::real(0.0, 0.0), Point::real(0.5, 0.2), Point::real(0.1, 0.9)];
        let st = first_integrals(&f, &path).unwrap();
        assert!((st.k - 1.0).norm() < 1e-13);
        assert!(st.abelian_residual < 1e-13);
        let t = normalize_roots(&f, path[0]).unwrap();
        for i in 0..3 {
            let lin = t.p[i] * 0.1 + t.q[i] * 0.9;
            assert!((st.u[i] - lin).norm() < 1e-12);
        }
    }
}
