use super::leaf::{leaf_point, real_directions, LeafOptions};
use crate::cubic::CubicDirectionField;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct HexagonReport {
    pub base: [f64; 2],
    pub eps: f64,
    /// `P1 … P7`; the figure closes when `P7 = P1`.
    pub vertices: Vec<[f64; 2]>,
    pub gap: f64,
}

/// Intersection of the leaf of `from_branch` through `p` with the leaf of
/// `to_branch` through `base`, by Newton on the two arc lengths.
fn intersect(
    field: &CubicDirectionField,
    p: [f64; 2],
    from_dir: [f64; 2],
    base: [f64; 2],
    to_dir: [f64; 2],
    opts: &LeafOptions,
) -> Result<[f64; 2]> {
    let (_, d1) = leaf_point(field, p, from_dir, 0.0, opts)?;
    let (_, d2) = leaf_point(field, base, to_dir, 0.0, opts)?;
    // p + s d1 = base + u d2
    let solve = |d1: [f64; 2], d2: [f64; 2], r: [f64; 2]| -> Result<(f64, f64)> {
        let det = -d1[0] * d2[1] + d1[1] * d2[0];
        if det.abs() < 1e-14 {
            return Err(Error::LeftRegularRegion("leaves are tangent".into()));
        }
        let s = (-r[0] * d2[1] + r[1] * d2[0]) / det;
        let u = (d1[0] * r[1] - d1[1] * r[0]) / det;
        Ok((s, u))
    };
    let (mut s, mut u) = solve(d1, d2, [base[0] - p[0], base[1] - p[1]])?;
    for _ in 0..30 {
        let (x1, t1) = leaf_point(field, p, d1, s, opts)?;
        let (x2, t2) = leaf_point(field, base, d2, u, opts)?;
        let f = [x1[0] - x2[0], x1[1] - x2[1]];
        if f[0].hypot(f[1]) < 1e-13 {
            return Ok(x1);
        }
        // J [ds, du] = −f with J = [t1, −t2]
        let (ds, du) = solve(t1, t2, [-f[0], -f[1]])?;
        s += ds;
        u += du;
    }
    Err(Error::LeftRegularRegion("hexagon vertex did not converge".into()))
}

/// Thomsen hexagon at `base`: start on leaf 1 at distance `eps`, then
/// follow foliations 2, 1, 3, 2, 1, 3, each up to the leaf through `base`
/// of the remaining foliation.
pub fn thomsen_closure(field: &CubicDirectionField, base: [f64; 2], eps: f64, tol: f64) -> Result<HexagonReport> {
    let opts = LeafOptions { tol, hmax: (eps / 4.0).max(1e-4), ..LeafOptions::default() };
    // foliations are labeled by their directions at the base point
    let dirs = real_directions(field, base)?;
    let (p1, _) = leaf_point(field, base, dirs[0], eps, &opts)?;
    let mut vertices = vec![p1];
    let steps = [(1, 2), (0, 1), (2, 0), (1, 2), (0, 1), (2, 0)];
    let mut cur = p1;
    for (follow, target) in steps {
        cur = intersect(field, cur, dirs[follow], base, dirs[target], &opts)?;
        vertices.push(cur);
    }
    let gap = (cur[0] - p1[0]).hypot(cur[1] - p1[1]);
    Ok(HexagonReport { base, eps, vertices, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::c;

    #[test]
    fn parallel_web_closes() {
        let f = CubicDirectionField::constant([1.0, 0.0, -1.0, 0.0].map(c));
        let r = thomsen_closure(&f, [0.0, 0.0], 0.1, 1e-10).unwrap();
        assert!(r.gap < 1e-12, "{r:?}");
        // the six steps visit six distinct vertices
        for i in 0..6 {
            for j in (i + 1)..6 {
                let d = (r.vertices[i][0] - r.vertices[j][0]).hypot(r.vertices[i][1] - r.vertices[j][1]);
                assert!(d > 1e-3);
            }
        }
    }
}
