//! Associativity (WDVV) potentials in three flat coordinates `(t, x, y)`
//! with unity `∂t`, their multiplication tables, idempotents, Euler data and
//! the booklet web cut on a slice `t = const`.
//!
//! Vectors are written in the basis `(∂t, ∂x, ∂y)`.

use nalgebra::{Matrix3, Vector3};
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jets::{c, Jet, Point, PolyExpr, C64};
use crate::linalg::{best_matching, eigenvalues3, null_vector3, projective_distance, slope_cmp, PERMUTATIONS3};

/// Normal form of the potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// `⟨e, e⟩ = 0`: `F = t²y/2 + tx²/2 + f(x, y)`.
    A,
    /// `⟨e, e⟩ ≠ 0`: `F = t³/6 + txy + f(x, y)`.
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    case: Case,
    f: PolyExpr,
    series_order: Option<usize>,
}

impl Potential {
    pub fn new(case: Case, f: PolyExpr) -> Result<Self> {
        if f.nvars() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: f.nvars() });
        }
        Ok(Potential { case, f, series_order: None })
    }

    /// `f = x²y²/4 + y⁵/60`, case A.
    pub fn solution_a() -> Self {
        let f = PolyExpr::from_terms(2, &[(&[2, 2], (1, 4)), (&[0, 5], (1, 60))]).expect("valid");
        Potential { case: Case::A, f, series_order: None }
    }

    /// `f = x³/6 + y³/6`, case B.
    pub fn solution_b() -> Self {
        let f = PolyExpr::from_terms(2, &[(&[3, 0], (1, 6)), (&[0, 3], (1, 6))]).expect("valid");
        Potential { case: Case::B, f, series_order: None }
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn f(&self) -> &PolyExpr {
        &self.f
    }

    /// Truncation order when the potential came from [`taylor_solve`].
    pub fn series_order(&self) -> Option<usize> {
        self.series_order
    }

    /// The full potential `F(t, x, y)`.
    pub fn full(&self) -> PolyExpr {
        let head = match self.case {
            Case::A => PolyExpr::from_terms(3, &[(&[2, 0, 1], (1, 2)), (&[1, 2, 0], (1, 2))]),
            Case::B => PolyExpr::from_terms(3, &[(&[3, 0, 0], (1, 6)), (&[1, 1, 1], (1, 1))]),
        }
        .expect("valid");
        head.add(&self.f.insert_var(0)).expect("same arity")
    }

    /// Jets of `f_xxx, f_xxy, f_xyy, f_yyy`.
    pub fn third_jets(&self, at: Point, order: usize) -> Result<[Jet; 4]> {
        let j = self.f.lift(at, order + 3)?;
        Ok([j.partial(3, 0)?, j.partial(2, 1)?, j.partial(1, 2)?, j.partial(0, 3)?])
    }

    /// Values of `f_xxx, f_xxy, f_xyy, f_yyy`.
    pub fn third_derivatives(&self, at: Point) -> Result<[C64; 4]> {
        Ok(self.third_jets(at, 0)?.map(|j| j.value()))
    }

    pub fn constant_metric(&self) -> Matrix3<C64> {
        let (o, z) = (c(1.0), c(0.0));
        match self.case {
            Case::A => Matrix3::new(z, z, o, z, o, z, o, z, z),
            Case::B => Matrix3::new(o, z, z, z, z, o, z, o, z),
        }
    }
}

/// Case A: `f_yyy − f_xxy² + f_xxx f_xyy`; case B: `f_xxx f_yyy − f_xxy f_xyy − 1`.
pub fn associativity_residual(pot: &Potential, at: Point) -> Result<C64> {
    Ok(associativity_residual_jet(pot, at, 0)?.value())
}

pub fn associativity_residual_jet(pot: &Potential, at: Point, order: usize) -> Result<Jet> {
    let [xxx, xxy, xyy, yyy] = pot.third_jets(at, order)?;
    Ok(match pot.case {
        Case::A => &(&yyy - &(&xxy * &xxy)) + &(&xxx * &xyy),
        Case::B => (&(&xxx * &yyy) - &(&xxy * &xyy)).add_scalar(c(-1.0)),
    })
}

/// Structure constants at a point: `c[α][β][γ]` is the `∂γ` component of `∂α·∂β`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusPoint {
    pub point: [C64; 3],
    pub c: [[[C64; 3]; 3]; 3],
    pub eta: Matrix3<C64>,
}

pub fn multiplication_table(pot: &Potential, point: [C64; 3]) -> Result<FrobeniusPoint> {
    let [xxx, xxy, xyy, yyy] = pot.third_derivatives(Point::new(point[1], point[2]))?;
    let (o, z) = (c(1.0), c(0.0));
    let (xx, xy, yy) = match pot.case {
        Case::A => ([xxy, xxx, o], [xyy, xxy, z], [yyy, xyy, z]),
        Case::B => ([z, xxy, xxx], [o, xyy, xxy], [z, yyy, xyy]),
    };
    let mut table = [[[z; 3]; 3]; 3];
    for k in 0..3 {
        let mut unit = [z; 3];
        unit[k] = o;
        table[0][k] = unit;
        table[k][0] = unit;
    }
    table[1][1] = xx;
    table[1][2] = xy;
    table[2][1] = xy;
    table[2][2] = yy;
    Ok(FrobeniusPoint { point, c: table, eta: pot.constant_metric() })
}

pub fn multiply(u: &[C64; 3], v: &[C64; 3], fp: &FrobeniusPoint) -> [C64; 3] {
    let mut out = [C64::default(); 3];
    for a in 0..3 {
        for b in 0..3 {
            let w = u[a] * v[b];
            if w == C64::default() {
                continue;
            }
            for (g, o) in out.iter_mut().enumerate() {
                *o += w * fp.c[a][b][g];
            }
        }
    }
    out
}

/// Matrix of `v ↦ u·v`.
pub fn multiplication_operator(u: &[C64; 3], fp: &FrobeniusPoint) -> Matrix3<C64> {
    let mut m = Matrix3::zeros();
    for k in 0..3 {
        let mut e = [C64::default(); 3];
        e[k] = c(1.0);
        let col = multiply(u, &e, fp);
        for g in 0..3 {
            m[(g, k)] = col[g];
        }
    }
    m
}

pub fn associator_norm(u: &[C64; 3], v: &[C64; 3], w: &[C64; 3], fp: &FrobeniusPoint) -> f64 {
    let l = multiply(&multiply(u, v, fp), w, fp);
    let r = multiply(u, &multiply(v, w, fp), fp);
    (0..3).map(|i| (l[i] - r[i]).norm()).fold(0.0, f64::max)
}

fn vnorm(v: &[C64; 3]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn min_gap(ev: &[C64; 3]) -> f64 {
    let d = [(ev[0] - ev[1]).norm(), (ev[0] - ev[2]).norm(), (ev[1] - ev[2]).norm()];
    d.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Relative eigenvalue gap below which the algebra is treated as non-semisimple.
pub const SEMISIMPLE_TOL: f64 = 1e-8;

/// The three idempotents, sorted by the slope rule on their `[X:Y]` part.
pub fn idempotents(fp: &FrobeniusPoint, seed: u64) -> Result<[[C64; 3]; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_gap = 0.0;
    for _ in 0..6 {
        let u: [C64; 3] = std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let m = multiplication_operator(&u, fp);
        let ev = eigenvalues3(&m);
        let scale = 1.0 + ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        last_gap = min_gap(&ev) / scale;
        if last_gap < SEMISIMPLE_TOL {
            continue;
        }
        let mut out = [[C64::default(); 3]; 3];
        let mut ok = true;
        for (k, lam) in ev.iter().enumerate() {
            let shifted = m - Matrix3::from_diagonal_element(*lam);
            let n: Vector3<C64> = null_vector3(&shifted);
            let v = [n[0], n[1], n[2]];
            let sq = multiply(&v, &v, fp);
            // v·v = κ v
            let j = (0..3).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap_or(0);
            let kappa = sq[j] / v[j];
            if !(kappa.norm() > SEMISIMPLE_TOL) || !kappa.is_finite() {
                ok = false;
                break;
            }
            out[k] = v.map(|z| z / kappa);
        }
        if !ok {
            continue;
        }
        out.sort_by(|a, b| slope_cmp(&direction_key(a), &direction_key(b)));
        return Ok(out);
    }
    Err(Error::NonSemisimple { gap: last_gap })
}

fn direction_key(e: &[C64; 3]) -> C64 {
    if e[2] == C64::default() {
        C64::new(f64::INFINITY, 0.0)
    } else {
        e[1] / e[2]
    }
}

/// Maximum of `|eᵢ·eⱼ − δᵢⱼeᵢ|` and `|Σeᵢ − e|`.
pub fn idempotent_residual(es: &[[C64; 3]; 3], fp: &FrobeniusPoint) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let p = multiply(&es[i], &es[j], fp);
            for k in 0..3 {
                let target = if i == j { es[i][k] } else { C64::default() };
                worst = worst.max((p[k] - target).norm());
            }
        }
    }
    for k in 0..3 {
        let s: C64 = es.iter().map(|e| e[k]).sum();
        let target = if k == 0 { c(1.0) } else { C64::default() };
        worst = worst.max((s - target).norm());
    }
    worst
}

/// Weights `(w_t, w_x, w_y, w_F)` with `w_t = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerData {
    pub weights: [Ratio<i64>; 4],
}

impl EulerData {
    pub fn as_f64(&self) -> [f64; 4] {
        self.weights.map(|w| *w.numer() as f64 / *w.denom() as f64)
    }

    /// `L_E(e) ≠ 0`, i.e. `w_t ≠ 0`.
    pub fn unity_not_invariant(&self) -> bool {
        !self.weights[0].is_zero()
    }

    /// `E` at `(t, x, y)`.
    pub fn vector(&self, point: [C64; 3]) -> [C64; 3] {
        let w = self.as_f64();
        [point[0] * w[0], point[1] * w[1], point[2] * w[2]]
    }
}

/// Quasi-homogeneity weights of the full potential from its monomials.
pub fn euler_data(pot: &Potential) -> Result<EulerData> {
    // unknowns (w_x, w_y, w_F): J_x w_x + J_y w_y − w_F = −J_t
    let full = pot.full();
    let mut rows: Vec<[Ratio<i64>; 4]> = full
        .monomials()
        .map(|(e, _)| {
            let r = |v: u32| Ratio::from_integer(v as i64);
            [r(e[1]), r(e[2]), -Ratio::one(), -r(e[0])]
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let Some(p) = (row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let lead = rows[row][col];
        for k in 0..4 {
            rows[row][k] /= lead;
        }
        for i in 0..rows.len() {
            if i != row && !rows[i][col].is_zero() {
                let f = rows[i][col];
                for k in 0..4 {
                    let v = rows[row][k];
                    rows[i][k] -= f * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| !r[3].is_zero()) {
        return Err(Error::NotQuasiHomogeneous);
    }
    if pivots.len() < 3 {
        return Err(Error::AmbiguousWeights);
    }
    Ok(EulerData { weights: [Ratio::one(), rows[0][3], rows[1][3], rows[2][3]] })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuE {
    pub matrix: Matrix3<C64>,
    pub eigenvalues: [C64; 3],
    pub semisimple: bool,
}

/// Multiplication by the Euler field at `(t, x, y)`.
pub fn mu_e(pot: &Potential, point: [C64; 3]) -> Result<MuE> {
    let euler = euler_data(pot)?;
    let fp = multiplication_table(pot, point)?;
    let m = multiplication_operator(&euler.vector(point), &fp);
    let mut ev = eigenvalues3(&m);
    ev.sort_by(slope_cmp);
    let scale = 1.0 + ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let semisimple = min_gap(&ev) / scale > SEMISIMPLE_TOL;
    Ok(MuE { matrix: m, eigenvalues: ev, semisimple })
}

/// Seed used for the randomized multiplication operator.
pub const IDEMPOTENT_SEED: u64 = 0x1d3e_77a5;

/// Directions `[X:Y]` of the idempotents projected along `e` to the slice.
pub fn booklet_directions(pot: &Potential, at: Point, t0: C64) -> Result<[[C64; 2]; 3]> {
    let fp = multiplication_table(pot, [t0, at.x, at.y])?;
    let es = idempotents(&fp, IDEMPOTENT_SEED)?;
    Ok(es.map(|e| [e[1], e[2]]))
}

/// Projective distance between booklet and characteristic leaf directions
/// under the best matching.
pub fn theorem2_residual(pot: &Potential, at: Point) -> Result<f64> {
    let booklet = booklet_directions(pot, at, C64::default())?;
    let field = crate::cubic::characteristic_field(pot);
    let roots = crate::cubic::roots(&field, at)?;
    let leaves = roots.map(|r| [r[1], -r[0]]);
    Ok(best_matching(&booklet, &leaves).1)
}

/// Same as [`theorem2_residual`] for an explicit (possibly perturbed) table.
pub fn theorem2_residual_table(pot: &Potential, fp: &FrobeniusPoint) -> Result<f64> {
    let es = idempotents(fp, IDEMPOTENT_SEED)?;
    let booklet = es.map(|e| [e[1], e[2]]);
    let field = crate::cubic::characteristic_field(pot);
    let roots = crate::cubic::roots(&field, Point::new(fp.point[1], fp.point[2]))?;
    let leaves = roots.map(|r| [r[1], -r[0]]);
    Ok(best_matching(&booklet, &leaves).1)
}

/// Solves the associativity equation as an evolution in `y` from the data
/// `f(x,0), f_y(x,0), f_yy(x,0)` (univariate polynomials in `x`), returning
/// the Taylor polynomial of total degree `order` at the origin.
pub fn taylor_solve(case: Case, data: [&PolyExpr; 3], order: usize) -> Result<Potential> {
    for d in data {
        if d.nvars() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: d.nvars() });
        }
    }
    let origin = Point::real(0.0, 0.0);
    let mut f = Jet::zeros(origin, order);
    for (j, d) in data.iter().enumerate() {
        let fact = [1.0, 1.0, 2.0][j];
        for (e, k) in d.monomials() {
            let i = e[0] as usize;
            if i + j <= order {
                f.set_coeff(i, j, k.to_complex() / fact);
            }
        }
    }
    for j in 3..=order {
        let d3 = |u: &Jet, a: usize, b: usize| u.partial(a, b);
        let xxx = d3(&f, 3, 0)?;
        let xxy = d3(&f, 2, 1)?;
        let xyy = d3(&f, 1, 2)?;
        let rhs = match case {
            Case::A => &(&xxy * &xxy) - &(&xxx * &xyy),
            Case::B => {
                if xxx.value().norm() < 1e-14 {
                    return Err(Error::VanishingLeadingDerivative);
                }
                (&(&xxy * &xyy)).add_scalar(c(1.0)).try_div(&xxx)?
            }
        };
        let fall = (j * (j - 1) * (j - 2)) as f64;
        for i in 0..=(order - j) {
            f.set_coeff(i, j, rhs.coeff(i, j - 3) / fall);
        }
    }
    let mut terms = Vec::new();
    for n in 0..=order {
        for j in 0..=n {
            let v = f.coeff(n - j, j);
            if v != C64::default() {
                terms.push(crate::jets::Monomial { exps: vec![(n - j) as u32, j as u32], coef: v.into() });
            }
        }
    }
    let poly = PolyExpr::new(2, terms)?;
    Ok(Potential { case, f: poly, series_order: Some(order) })
}

fn match_idempotents(prev: &[[C64; 3]; 3], cur: &[[C64; 3]; 3]) -> ([[C64; 3]; 3], f64) {
    let mut best = (*cur, f64::INFINITY);
    for perm in PERMUTATIONS3 {
        let cand = perm.map(|i| cur[i]);
        let d = (0..3)
            .map(|k| {
                let diff: [C64; 3] = std::array::from_fn(|g| cand[k][g] - prev[k][g]);
                vnorm(&diff)
            })
            .fold(0.0, f64::max);
        if d < best.1 {
            best = (cand, d);
        }
    }
    best
}

/// Transport of a slice vector `v = (v_x, v_y)` along a polyline in the
/// slice `t = 0` that keeps its idempotent coordinates constant.
pub fn frobenius_transport(pot: &Potential, curve: &[Point], v: [C64; 2], steps_per_segment: usize) -> Result<[C64; 2]> {
    if curve.is_empty() {
        return Ok(v);
    }
    let table_at = |p: Point| multiplication_table(pot, [C64::default(), p.x, p.y]);
    let mut es = idempotents(&table_at(curve[0])?, IDEMPOTENT_SEED)?;
    // coordinates of (0, v_x, v_y) in the idempotent frame
    let frame = Matrix3::from_fn(|r, k| es[k][r]);
    let lu = frame.lu();
    let eta = lu
        .solve(&Vector3::new(C64::default(), v[0], v[1]))
        .ok_or(Error::NonSemisimple { gap: 0.0 })?;
    let n = steps_per_segment.max(1);
    for w in curve.windows(2) {
        for s in 1..=n {
            let tau = s as f64 / n as f64;
            let p = Point::new(w[0].x + (w[1].x - w[0].x) * tau, w[0].y + (w[1].y - w[0].y) * tau);
            let cur = idempotents(&table_at(p)?, IDEMPOTENT_SEED)?;
            let (aligned, d) = match_idempotents(&es, &cur);
            let spread = (0..3)
                .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| projective_distance([aligned[i][1], aligned[i][2]], [aligned[j][1], aligned[j][2]]))
                .fold(f64::INFINITY, f64::min);
            if !d.is_finite() || spread < 1e-8 {
                return Err(Error::BranchCollision(format!("idempotents merge near {p}")));
            }
            es = aligned;
        }
    }
    let out: [C64; 2] = std::array::from_fn(|g| (0..3).map(|k| eta[k] * es[k][g + 1]).sum());
    Ok(out)
}
