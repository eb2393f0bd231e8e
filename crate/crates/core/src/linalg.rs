//! Small dense helpers: cubic roots via the companion matrix, 3×3 eigen
//! problems and projective matching of direction triples.

use nalgebra::{Matrix3, Vector3};


use crate::jets::C64;

/// Roots of `z^3 + c2 z^2 + c1 z + c0` from the Schur form of the companion
/// matrix, each polished by two Newton steps.
pub fn monic_cubic_roots(c2: C64, c1: C64, c0: C64) -> [C64; 3] {
    let zero = C64::default();
    let one = C64::new(1.0, 0.0);
    let comp = Matrix3::new(zero, zero, -c0, one, zero, -c1, zero, one, -c2);
    let mut roots = match comp.try_schur(f64::EPSILON, 500).and_then(|s| s.eigenvalues()) {
        Some(eig) => [eig[0], eig[1], eig[2]],
        None => durand_kerner(c2, c1, c0),
    };
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let f = ((*r + c2) * *r + c1) * *r + c0;
            let df = (3.0 * *r + 2.0 * c2) * *r + c1;
            if df.norm() > 1e-300 {
                let step = f / df;
                let cand = *r - step;
                let fc = ((cand + c2) * cand + c1) * cand + c0;
                if fc.norm() <= f.norm() {
                    *r = cand;
                }
            }
        }
    }
    roots
}

fn durand_kerner(c2: C64, c1: C64, c0: C64) -> [C64; 3] {
    let f = |z: C64| ((z + c2) * z + c1) * z + c0;
    let seed = C64::new(0.4, 0.9);
    let mut r = [C64::new(1.0, 0.0), seed, seed * seed];
    for _ in 0..500 {
        let prev = r;
        for i in 0..3 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..3 {
                if j != i {
                    den *= r[i] - r[j];
                }
            }
            if den.norm() > 0.0 {
                r[i] -= f(r[i]) / den;
            }
        }
        if (0..3).all(|i| (r[i] - prev[i]).norm() < 1e-16 * (1.0 + r[i].norm())) {
            break;
        }
    }
    r
}

/// Eigenvalues of a 3×3 complex matrix from its Schur form, falling back
/// to the characteristic polynomial.
pub fn eigenvalues3(m: &Matrix3<C64>) -> [C64; 3] {
    if let Some(eig) = m.try_schur(f64::EPSILON, 500).and_then(|s| s.eigenvalues()) {
        return [eig[0], eig[1], eig[2]];
    }
    let tr = m.trace();
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let det = m.determinant();
    monic_cubic_roots(-tr, minors, -det)
}

/// A unit null vector of the (numerically) rank-2 matrix `m`, from the
/// largest cross product of its rows.
pub fn null_vector3(m: &Matrix3<C64>) -> Vector3<C64> {
    let rows: Vec<Vector3<C64>> = (0..3).map(|i| m.row(i).transpose()).collect();
    let mut best = Vector3::zeros();
    let mut best_norm = -1.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let v = rows[i].cross(&rows[j]);
        let n = v.norm();
        if n > best_norm {
            best_norm = n;
            best = v;
        }
    }
    if best_norm > 0.0 {
        best / C64::new(best_norm, 0.0)
    } else {
        best
    }
}

/// Sine of the Hermitian angle between two projective points `[u0:u1]`, `[v0:v1]`.
pub fn projective_distance(u: [C64; 2], v: [C64; 2]) -> f64 {
    let nu = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
    let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return 1.0;
    }
    (u[0] * v[1] - u[1] * v[0]).norm() / (nu * nv)
}

pub const PERMUTATIONS3: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Matching of two direction triples minimizing the largest projective
/// distance; returns the permutation and that distance.
pub fn best_matching(a: &[[C64; 2]; 3], b: &[[C64; 2]; 3]) -> ([usize; 3], f64) {
    let mut best = (PERMUTATIONS3[0], f64::INFINITY);
    for perm in PERMUTATIONS3 {
        let d = (0..3)
            .map(|i| projective_distance(a[i], b[perm[i]]))
            .fold(0.0, f64::max);
        if d < best.1 {
            best = (perm, d);
        }
    }
    best
}

/// Ordering rule for complex slopes: lexicographic on `(Re, Im)`.
pub fn slope_cmp(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}
