//! Cubic binary vector fields `V = a ∂x³ + b ∂x²∂y + c ∂x∂y² + r ∂y³`.
//!
//! `V` acts on covectors `σ = p dx + q dy` through
//! `C(p, q) = a p³ + b p² q + c p q² + r q³`. A root `[p:q]` of `C` is a
//! covector annihilating one web direction; the direction itself is the
//! leaf vector `q ∂x − p ∂y`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frobenius::{Case, Potential};
use crate::jets::{c, constant_field, scaled_field, Jet, Point, PolyExpr, Ring, SharedField, C64};
use crate::linalg::{monic_cubic_roots, projective_distance, slope_cmp};

/// Absolute tolerance on `max |coefficient|` below which the cubic is
/// considered identically zero.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Relative discriminant cutoff separating regular from singular points.
pub const REGULAR_CUTOFF: f64 = 1e-12;

/// Relative tolerance for choosing an affine chart of the slope equation.
pub const CHART_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CubicDirectionField {
    pub a: SharedField,
    pub b: SharedField,
    pub c: SharedField,
    pub r: SharedField,
}

fn max_abs(v: &[C64; 4]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Scale used for discriminant tolerances: `(1 + max|coefficient|)^4`.
pub fn disc_scale(coeffs: &[C64; 4]) -> f64 {
    (1.0 + max_abs(coeffs)).powi(4)
}

impl CubicDirectionField {
    pub fn new(a: SharedField, b: SharedField, c: SharedField, r: SharedField) -> Self {
        CubicDirectionField { a, b, c, r }
    }

    pub fn from_polys(a: PolyExpr, b: PolyExpr, c: PolyExpr, r: PolyExpr) -> Result<Self> {
        for p in [&a, &b, &c, &r] {
            if p.nvars() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: p.nvars() });
            }
        }
        Ok(CubicDirectionField::new(Arc::new(a), Arc::new(b), Arc::new(c), Arc::new(r)))
    }

    pub fn constant(coeffs: [C64; 4]) -> Self {
        let [a, b, cc, r] = coeffs.map(constant_field);
        CubicDirectionField::new(a, b, cc, r)
    }

    pub fn fields(&self) -> [&SharedField; 4] {
        [&self.a, &self.b, &self.c, &self.r]
    }

    /// Coefficient values; fails where all four vanish.
    pub fn coeffs(&self, at: Point) -> Result<[C64; 4]> {
        let v = [self.a.value(at)?, self.b.value(at)?, self.c.value(at)?, self.r.value(at)?];
        check_nondegenerate(&v)?;
        Ok(v)
    }

    pub fn jets(&self, at: Point, order: usize) -> Result<[Jet; 4]> {
        let j = [
            self.a.jet(at, order)?,
            self.b.jet(at, order)?,
            self.c.jet(at, order)?,
            self.r.jet(at, order)?,
        ];
        check_nondegenerate(&[j[0].value(), j[1].value(), j[2].value(), j[3].value()])?;
        Ok(j)
    }
}

fn check_nondegenerate(v: &[C64; 4]) -> Result<()> {
    let m = max_abs(v);
    if !(m > DEGENERATE_TOL) {
        return Err(Error::DegenerateCoefficients { max_abs: m });
    }
    Ok(())
}

/// Characteristic web of a solution of the associativity equation:
/// case A gives `(f_xyy, −2 f_xxy, f_xxx, 1)`, case B `(f_yyy, −f_xyy, −f_xxy, f_xxx)`.
pub fn characteristic_field(pot: &Potential) -> CubicDirectionField {
    let f = pot.f();
    let d = |i: usize, j: usize| -> PolyExpr {
        let mut g = f.clone();
        for _ in 0..i {
            g = g.derivative(0);
        }
        for _ in 0..j {
            g = g.derivative(1);
        }
        g
    };
    let p = |g: PolyExpr| -> SharedField { Arc::new(g) };
    match pot.case() {
        Case::A => CubicDirectionField::new(
            p(d(1, 2)),
            p(d(2, 1).scale(-2)),
            p(d(3, 0)),
            p(PolyExpr::constant(2, 1)),
        ),
        Case::B => CubicDirectionField::new(
            p(d(0, 3)),
            p(d(1, 2).scale(-1)),
            p(d(2, 1).scale(-1)),
            p(d(3, 0)),
        ),
    }
}

/// `D = 18abcr − 27a²r² − 4ac³ + b²c² − 4b³r` over any ring.
pub fn disc_generic<T: Ring>(a: &T, b: &T, cc: &T, r: &T) -> T {
    let abcr = a.mul(b).mul(cc).mul(r).scale(18.0);
    let a2r2 = a.mul(a).mul(r).mul(r).scale(-27.0);
    let ac3 = a.mul(cc).mul(cc).mul(cc).scale(-4.0);
    let b2c2 = b.mul(b).mul(cc).mul(cc);
    let b3r = b.mul(b).mul(b).mul(r).scale(-4.0);
    abcr.add(&a2r2).add(&ac3).add(&b2c2).add(&b3r)
}

pub fn discriminant(coeffs: &[C64; 4]) -> C64 {
    let [a, b, cc, r] = coeffs;
    disc_generic(a, b, cc, r)
}

pub fn discriminant_at(field: &CubicDirectionField, at: Point) -> Result<C64> {
    Ok(discriminant(&field.coeffs(at)?))
}

pub fn discriminant_jet(jets: &[Jet; 4]) -> Jet {
    disc_generic(&jets[0], &jets[1], &jets[2], &jets[3])
}

/// `C(p, q)`.
pub fn eval_form(coeffs: &[C64; 4], p: C64, q: C64) -> C64 {
    let [a, b, cc, r] = *coeffs;
    a * p * p * p + b * p * p * q + cc * p * q * q + r * q * q * q
}

fn slope_key(root: &[C64; 2]) -> C64 {
    if root[1] == C64::default() {
        C64::new(f64::INFINITY, 0.0)
    } else {
        root[0] / root[1]
    }
}

/// Chart representative: `(s, 1)` when `|p| <= |q|`, else `(1, t)`.
fn chart_rep(p: C64, q: C64) -> [C64; 2] {
    if p.norm() <= q.norm() {
        [p / q, c(1.0)]
    } else {
        [c(1.0), q / p]
    }
}

fn polish_root(coeffs: &[C64; 4], root: [C64; 2]) -> [C64; 2] {
    let [a, b, cc, r] = *coeffs;
    let (mut z, s_chart) = if root[1] == c(1.0) { (root[0], true) } else { (root[1], false) };
    let (g, dg): (Box<dyn Fn(C64) -> C64>, Box<dyn Fn(C64) -> C64>) = if s_chart {
        (
            Box::new(move |s| ((a * s + b) * s + cc) * s + r),
            Box::new(move |s| (3.0 * a * s + 2.0 * b) * s + cc),
        )
    } else {
        (
            Box::new(move |t| ((r * t + cc) * t + b) * t + a),
            Box::new(move |t| (3.0 * r * t + 2.0 * cc) * t + b),
        )
    };
    for _ in 0..3 {
        let d = dg(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - g(z) / d;
        if cand.is_finite() && g(cand).norm() <= g(z).norm() {
            z = cand;
        } else {
            break;
        }
    }
    if s_chart {
        chart_rep(z, c(1.0))
    } else {
        chart_rep(c(1.0), z)
    }
}

/// Projective roots `[p:q]` of `C`, with multiplicity, each in the affine
/// chart where it is bounded, sorted by the slope rule `p/q` on `(Re, Im)`.
pub fn projective_roots(coeffs: &[C64; 4]) -> Result<[[C64; 2]; 3]> {
    check_nondegenerate(coeffs)?;
    let [a, b, cc, r] = *coeffs;
    let m = max_abs(coeffs);
    let mut roots: [[C64; 2]; 3] = if a.norm() >= r.norm() && a.norm() > 1e-14 * m {
        let s = monic_cubic_roots(b / a, cc / a, r / a);
        s.map(|s| chart_rep(s, c(1.0)))
    } else if r.norm() > 1e-14 * m {
        let t = monic_cubic_roots(cc / r, b / r, a / r);
        t.map(|t| chart_rep(c(1.0), t))
    } else {
        // C = pq(bp + cq)
        [[c(0.0), c(1.0)], [c(1.0), c(0.0)], chart_rep(cc, -b)]
    };
    for root in roots.iter_mut() {
        *root = polish_root(coeffs, *root);
    }
    roots.sort_by(|u, v| slope_cmp(&slope_key(u), &slope_key(v)));
    Ok(roots)
}

pub fn roots(field: &CubicDirectionField, at: Point) -> Result<[[C64; 2]; 3]> {
    projective_roots(&field.coeffs(at)?)
}

/// Multiplicity of the most repeated root, judged from pairwise distances.
pub(crate) fn repeated_multiplicity(roots: &[[C64; 2]; 3]) -> usize {
    let d01 = projective_distance(roots[0], roots[1]);
    let d02 = projective_distance(roots[0], roots[2]);
    let d12 = projective_distance(roots[1], roots[2]);
    let close = 1e-4;
    if d01 < close && d02 < close && d12 < close {
        3
    } else {
        2
    }
}

pub fn is_regular(coeffs: &[C64; 4]) -> bool {
    discriminant(coeffs).norm() > REGULAR_CUTOFF * disc_scale(coeffs)
}

fn singular_error(coeffs: &[C64; 4]) -> Error {
    let mult = projective_roots(coeffs).map(|r| repeated_multiplicity(&r)).unwrap_or(3);
    Error::SingularPoint { disc_abs: discriminant(coeffs).norm(), multiplicity: mult }
}

/// Normalized root covectors `σᵢ = (pᵢ, qᵢ)`: `σ₁ + σ₂ + σ₃ = 0` and
/// `V₁V₂V₃ = V` with `Vᵢ = qᵢ∂x − pᵢ∂y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootTriple {
    pub p: [C64; 3],
    pub q: [C64; 3],
}

/// Coefficients of `Π (αᵢ P + βᵢ Q)` in the basis `P³, P²Q, PQ², Q³`.
pub fn product_coeffs<T: Ring>(alpha: &[T; 3], beta: &[T; 3]) -> [T; 4] {
    let [a1, a2, a3] = alpha;
    let [b1, b2, b3] = beta;
    [
        a1.mul(a2).mul(a3),
        a1.mul(a2).mul(b3).add(&a1.mul(b2).mul(a3)).add(&b1.mul(a2).mul(a3)),
        a1.mul(b2).mul(b3).add(&b1.mul(a2).mul(b3)).add(&b1.mul(b2).mul(a3)),
        b1.mul(b2).mul(b3),
    ]
}

impl RootTriple {
    pub fn sigma(&self, i: usize) -> [C64; 2] {
        [self.p[i], self.q[i]]
    }

    /// `Vᵢ = qᵢ ∂x − pᵢ ∂y`, the direction of the i-th foliation.
    pub fn leaf_vector(&self, i: usize) -> [C64; 2] {
        [self.q[i], -self.p[i]]
    }

    /// Coefficient of `Ω = σ₁ ∧ σ₂` against `dx ∧ dy`.
    pub fn area(&self) -> C64 {
        self.p[0] * self.q[1] - self.p[1] * self.q[0]
    }

    /// The three wedge products `σ₁∧σ₂, σ₂∧σ₃, σ₃∧σ₁`.
    pub fn wedges(&self) -> [C64; 3] {
        let w = |i: usize, j: usize| self.p[i] * self.q[j] - self.p[j] * self.q[i];
        [w(0, 1), w(1, 2), w(2, 0)]
    }

    pub fn sum_residual(&self) -> f64 {
        let scale = (0..3).map(|i| self.p[i].norm().max(self.q[i].norm())).fold(0.0, f64::max);
        let sp: C64 = self.p.iter().sum();
        let sq: C64 = self.q.iter().sum();
        sp.norm().max(sq.norm()) / scale.max(f64::MIN_POSITIVE)
    }

    /// Relative mismatch between `V₁V₂V₃` and `V`.
    pub fn factorization_residual(&self, coeffs: &[C64; 4]) -> f64 {
        let alpha = self.q;
        let beta = self.p.map(|v| -v);
        let prod = product_coeffs(&alpha, &beta);
        let diff = (0..4).map(|k| (prod[k] - coeffs[k]).norm()).fold(0.0, f64::max);
        diff / max_abs(coeffs)
    }

    /// Residuals of the four polynomial equations relating the first two
    /// normalized roots to `(a, b, c, r)`.
    pub fn pqv_residual(&self, coeffs: &[C64; 4]) -> f64 {
        let [p1, p2, _] = self.p;
        let [q1, q2, _] = self.q;
        let [a, b, cc, r] = *coeffs;
        let e = [
            q1 * q2 * (q1 + q2) + a,
            p1 * p2 * (p1 + p2) - r,
            p1 * (q2 * q2 + 2.0 * q1 * q2) + p2 * (q1 * q1 + 2.0 * q1 * q2) - b,
            q1 * (p2 * p2 + 2.0 * p1 * p2) + q2 * (p1 * p1 + 2.0 * p1 * p2) + cc,
        ];
        e.iter().map(|z| z.norm()).fold(0.0, f64::max) / max_abs(coeffs)
    }

    pub fn scaled(&self, k: C64) -> RootTriple {
        RootTriple { p: self.p.map(|v| v * k), q: self.q.map(|v| v * k) }
    }

    pub fn permuted(&self, perm: [usize; 3]) -> RootTriple {
        RootTriple { p: perm.map(|i| self.p[i]), q: perm.map(|i| self.q[i]) }
    }

    /// Aligns `self` with `reference`: the relabeling and cube root of unity
    /// (the only freedom left by the normalization) closest to it.
    pub fn aligned_to(&self, reference: &RootTriple) -> (RootTriple, f64) {
        let mut best = (*self, f64::INFINITY);
        for k in 0..3 {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
            for perm in crate::linalg::PERMUTATIONS3 {
                let cand = self.permuted(perm).scaled(w);
                let d = (0..3)
                    .map(|i| (cand.p[i] - reference.p[i]).norm() + (cand.q[i] - reference.q[i]).norm())
                    .sum::<f64>();
                if d < best.1 {
                    best = (cand, d);
                }
            }
        }
        best
    }

    pub fn scale_norm(&self) -> f64 {
        (0..3).map(|i| self.p[i].norm() + self.q[i].norm()).sum()
    }
}

/// Jets of the normalized root covectors.
#[derive(Clone, Debug)]
pub struct RootTripleJets {
    pub p: [Jet; 3],
    pub q: [Jet; 3],
}

impl RootTripleJets {
    pub fn values(&self) -> RootTriple {
        RootTriple { p: [0, 1, 2].map(|i| self.p[i].value()), q: [0, 1, 2].map(|i| self.q[i].value()) }
    }
}

fn newton_root_jet(jets: &[Jet; 4], root: [C64; 2]) -> Result<(Jet, Jet)> {
    let [a, b, cc, r] = jets;
    let base = a.base();
    let order = a.order();
    let one = Jet::constant(base, order, c(1.0));
    let s_chart = root[1] == c(1.0);
    let mut z = Jet::constant(base, order, if s_chart { root[0] } else { root[1] });
    let iters = (usize::BITS - (order + 1).leading_zeros()) as usize + 2;
    for _ in 0..iters {
        let (g, dg) = if s_chart {
            let g = &(&(&(&(&(a * &z) + b) * &z) + cc) * &z) + r;
            let dg = &(&(&(&(a * &z) * 3.0) + &(b * 2.0)) * &z) + cc;
            (g, dg)
        } else {
            let g = &(&(&(&(&(r * &z) + cc) * &z) + b) * &z) + a;
            let dg = &(&(&(&(r * &z) * 3.0) + &(cc * 2.0)) * &z) + b;
            (g, dg)
        };
        z = &z - &g.try_div(&dg)?;
    }
    Ok(if s_chart { (z, one) } else { (one, z) })
}

/// Normalized root jets at a regular point: kernel scaling makes the
/// covectors sum to zero, then a common principal cube root enforces the
/// exact factorization `V₁V₂V₃ = V`.
pub fn normalized_root_jets(jets: &[Jet; 4]) -> Result<RootTripleJets> {
    let coeffs = [jets[0].value(), jets[1].value(), jets[2].value(), jets[3].value()];
    if !is_regular(&coeffs) {
        return Err(singular_error(&coeffs));
    }
    let roots = projective_roots(&coeffs)?;
    let mut ps = Vec::with_capacity(3);
    let mut qs = Vec::with_capacity(3);
    for root in roots {
        let (p, q) = newton_root_jet(jets, root)?;
        ps.push(p);
        qs.push(q);
    }
    // kernel of the 2×3 matrix [p; q]
    let t = [
        &(&ps[1] * &qs[2]) - &(&ps[2] * &qs[1]),
        &(&ps[2] * &qs[0]) - &(&ps[0] * &qs[2]),
        &(&ps[0] * &qs[1]) - &(&ps[1] * &qs[0]),
    ];
    let p: [Jet; 3] = [0, 1, 2].map(|i| &t[i] * &ps[i]);
    let q: [Jet; 3] = [0, 1, 2].map(|i| &t[i] * &qs[i]);
    let beta = p.clone().map(|v| -&v);
    let prod = product_coeffs(&q, &beta);
    let k = (0..4)
        .max_by(|&i, &j| coeffs[i].norm().total_cmp(&coeffs[j].norm()))
        .unwrap_or(0);
    // λ³ · prod_k = coeff_k
    let ratio = jets[k].try_div(&prod[k])?;
    let lambda = ratio.powc(c(1.0 / 3.0))?;
    Ok(RootTripleJets { p: p.map(|v| &v * &lambda), q: q.map(|v| &v * &lambda) })
}

pub fn normalize_roots(field: &CubicDirectionField, at: Point) -> Result<RootTriple> {
    let jets = field.jets(at, 0)?;
    Ok(normalized_root_jets(&jets)?.values())
}

/// `K₃ dy³ + K₂ dy²dx + K₁ dy dx² + K₀ dx³`.
#[derive(Clone, Debug)]
pub struct KForm {
    pub k3: SharedField,
    pub k2: SharedField,
    pub k1: SharedField,
    pub k0: SharedField,
}

impl KForm {
    pub fn new(k3: SharedField, k2: SharedField, k1: SharedField, k0: SharedField) -> Self {
        KForm { k3, k2, k1, k0 }
    }

    pub fn coeffs(&self, at: Point) -> Result<[C64; 4]> {
        let v = [self.k3.value(at)?, self.k2.value(at)?, self.k1.value(at)?, self.k0.value(at)?];
        check_nondegenerate(&v)?;
        Ok(v)
    }

    pub fn jets(&self, at: Point, order: usize) -> Result<[Jet; 4]> {
        let j = [
            self.k3.jet(at, order)?,
            self.k2.jet(at, order)?,
            self.k1.jet(at, order)?,
            self.k0.jet(at, order)?,
        ];
        check_nondegenerate(&[j[0].value(), j[1].value(), j[2].value(), j[3].value()])?;
        Ok(j)
    }

    /// Inverse of [`to_kform`].
    pub fn to_field(&self) -> CubicDirectionField {
        CubicDirectionField::new(
            scaled_field(self.k3.clone(), c(-1.0)),
            self.k2.clone(),
            scaled_field(self.k1.clone(), c(-1.0)),
            self.k0.clone(),
        )
    }

    /// Residual of the form on a direction `[dx:dy]`.
    pub fn eval_direction(coeffs: &[C64; 4], dx: C64, dy: C64) -> C64 {
        let [k3, k2, k1, k0] = *coeffs;
        k3 * dy * dy * dy + k2 * dy * dy * dx + k1 * dy * dx * dx + k0 * dx * dx * dx
    }
}

/// Substitutes `[p:q] = [−dy:dx]`: `K₃ = −a, K₂ = b, K₁ = −c, K₀ = r`.
pub fn to_kform(field: &CubicDirectionField) -> KForm {
    KForm::new(
        scaled_field(field.a.clone(), c(-1.0)),
        field.b.clone(),
        scaled_field(field.c.clone(), c(-1.0)),
        field.r.clone(),
    )
}

/// Affine chart of the slope equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// `p = dy/dx`, coordinates `(x, y)`.
    Xy,
    /// `p = dx/dy`, coordinates `(y, x)`.
    Yx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartPreference {
    Auto,
    Force(Chart),
}

/// `p³ + A p + B = 0` in a chart; jets are expressed in chart coordinates.
#[derive(Clone, Debug)]
pub struct DepressedForm {
    pub a: Jet,
    pub b: Jet,
    /// Quadratic coefficient of the monic slope cubic before the shift.
    pub k2: Jet,
    pub chart: Chart,
}

/// Removes the quadratic term of the monic slope cubic by the shift
/// `p = s − k₂/3`.
pub fn depress(kform: &KForm, at: Point, order: usize, pref: ChartPreference) -> Result<DepressedForm> {
    let [k3, k2, k1, k0] = kform.jets(at, order)?;
    let vals = [k3.value(), k2.value(), k1.value(), k0.value()];
    let tol = CHART_TOL * max_abs(&vals);
    let chart = match pref {
        ChartPreference::Force(ch) => ch,
        ChartPreference::Auto => {
            if vals[0].norm() > tol {
                Chart::Xy
            } else if vals[3].norm() > tol {
                Chart::Yx
            } else {
                return Err(Error::NoValidChart);
            }
        }
    };
    let (lead, m2, m1, m0) = match chart {
        Chart::Xy => (&k3, &k2, &k1, &k0),
        Chart::Yx => (&k0, &k1, &k2, &k3),
    };
    if lead.value().norm() <= tol {
        return Err(Error::NoValidChart);
    }
    let inv = lead.recip()?;
    let (n2, n1, n0) = (m2 * &inv, m1 * &inv, m0 * &inv);
    let a = &n1 - &(&(&n2 * &n2) * (1.0 / 3.0));
    let b = &(&(&(&(&n2 * &n2) * &n2) * (2.0 / 27.0)) - &(&(&n2 * &n1) * (1.0 / 3.0))) + &n0;
    let (a, b, k2j) = match chart {
        Chart::Xy => (a, b, n2),
        Chart::Yx => (a.swap_vars(), b.swap_vars(), n2.swap_vars()),
    };
    Ok(DepressedForm { a, b, k2: k2j, chart })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cc(v: f64) -> C64 {
        c(v)
    }

    fn slopes(coeffs: [f64; 4]) -> Vec<C64> {
        projective_roots(&coeffs.map(cc)).unwrap().iter().map(|r| r[0] / r[1]).collect()
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&[1.0, 0.0, 0.0, 1.0].map(cc)), cc(-27.0));
        assert_eq!(discriminant(&[1.0, -2.0, 0.0, 1.0].map(cc)), cc(5.0));
        assert_eq!(discriminant(&[1.0, 0.0, 0.0, 0.0].map(cc)), cc(0.0));
    }

    #[test]
    fn roots_of_p_cubed_plus_q_cubed() {
        let s = slopes([1.0, 0.0, 0.0, 1.0]);
        for z in &s {
            assert!((z * z * z + 1.0).norm() < 1e-13);
        }
        let w = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        for target in [cc(-1.0), w, w.conj()] {
            assert!(s.iter().any(|z| (z - target).norm() < 1e-13));
        }
    }

    #[test]
    fn roots_of_p_p_minus_q_p_plus_q() {
        let s = slopes([1.0, 0.0, -1.0, 0.0]);
        assert!((s[0] + 1.0).norm() < 1e-14);
        assert!(s[1].norm() < 1e-14);
        assert!((s[2] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn triple_root_at_infinity() {
        let r = projective_roots(&[0.0, 0.0, 0.0, 1.0].map(cc)).unwrap();
        for root in r {
            assert!(root[1].norm() < 1e-12);
        }
    }

    #[test]
    fn all_zero_rejected() {
        assert!(matches!(
            projective_roots(&[0.0; 4].map(cc)),
            Err(Error::DegenerateCoefficients { .. })
        ));
    }

    #[test]
    fn normalization_of_slopes_zero_one_minus_one() {
        let f = CubicDirectionField::constant([1.0, 0.0, -1.0, 0.0].map(cc));
        let t = normalize_roots(&f, Point::real(0.0, 0.0)).unwrap();
        assert!(t.sum_residual() < 1e-14);
        assert!(t.factorization_residual(&[1.0, 0.0, -1.0, 0.0].map(cc)) < 1e-14);
        // proportional to {(0, −2), (1, 1), (−1, 1)} up to a common λ, λ³ = −1/2
        let k = (0..3).find(|&i| t.p[i].norm() < 1e-14).unwrap();
        let lam = t.q[k] / cc(-2.0);
        assert!((lam * lam * lam + 0.5).norm() < 1e-13);
        for target in [(1.0, 1.0), (-1.0, 1.0)] {
            let hit = (0..3).any(|i| (t.p[i] - lam * target.0).norm() + (t.q[i] - lam * target.1).norm() < 1e-13);
            assert!(hit);
        }
    }

    #[test]
    fn normalization_fixed_point() {
        let coeffs = [2.0, -1.0, 0.5, 3.0].map(cc);
        let f = CubicDirectionField::constant(coeffs);
        let t = normalize_roots(&f, Point::real(0.0, 0.0)).unwrap();
        let f2 = CubicDirectionField::constant(coeffs);
        let t2 = normalize_roots(&f2, Point::real(1.0, 1.0)).unwrap();
        let (aligned, d) = t2.aligned_to(&t);
        assert!(d < 1e-12, "{aligned:?}");
    }

    #[test]
    fn triple_root_normalization_fails() {
        let f = CubicDirectionField::constant([1.0, 0.0, 0.0, 0.0].map(cc));
        match normalize_roots(&f, Point::real(0.0, 0.0)) {
            Err(Error::SingularPoint { multiplicity, .. }) => assert_eq!(multiplicity, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kform_matches_binary_forms() {
        let x = PolyExpr::var(2, 0);
        let y = PolyExpr::var(2, 1);
        let f = CubicDirectionField::from_polys(x.clone(), y.scale(-2), PolyExpr::zero(2), PolyExpr::constant(2, 1))
            .unwrap();
        let k = to_kform(&f);
        let at = Point::real(0.7, -1.3);
        let v = k.coeffs(at).unwrap();
        // dx³ − 2y dx dy² − x dy³
        assert_eq!(v, [cc(-0.7), cc(2.6), cc(0.0), cc(1.0)]);
        let back = k.to_field().coeffs(at).unwrap();
        assert_eq!(back, f.coeffs(at).unwrap());
    }

    fn kform_const(v: [f64; 4]) -> KForm {
        let [a, b, c3, d] = v.map(|z| constant_field(cc(z)));
        KForm::new(a, b, c3, d)
    }

    #[test]
    fn depress_examples() {
        let at = Point::real(0.4, 0.9);
        // K = (1, 0, 2x, y) already depressed
        let x = PolyExpr::var(2, 0);
        let y = PolyExpr::var(2, 1);
        let k = KForm::new(constant_field(cc(1.0)), constant_field(cc(0.0)), Arc::new(x.scale(2)), Arc::new(y));
        let d = depress(&k, at, 2, ChartPreference::Auto).unwrap();
        assert!((d.a.value() - 0.8).norm() < 1e-15);
        assert!((d.b.value() - 0.9).norm() < 1e-15);
        assert!((d.a.extract(1, 0).unwrap() - 2.0).norm() < 1e-15);

        let d = depress(&kform_const([1.0, 3.0, 0.0, 0.0]), at, 0, ChartPreference::Auto).unwrap();
        assert!((d.a.value() + 3.0).norm() < 1e-14);
        assert!((d.b.value() - 2.0).norm() < 1e-14);
    }

    #[test]
    fn depress_form_three_expansion() {
        // (p − 2x/3)(p² + 2xp/3 + y − 2x²/9) = p³ + (y − 2x²/3) p + 4x³/27 − 2xy/3
        let x = PolyExpr::var(2, 0);
        let y = PolyExpr::var(2, 1);
        let x2 = x.mul(&x).unwrap();
        let x3 = x2.mul(&x).unwrap();
        let xy = x.mul(&y).unwrap();
        let k1 = y.add(&x2.scale((-2, 9))).unwrap().add(&x2.scale((-4, 9))).unwrap();
        let k0 = x3.scale((4, 27)).add(&xy.scale((-2, 3))).unwrap();
        let k = KForm::new(constant_field(cc(1.0)), constant_field(cc(0.0)), Arc::new(k1), Arc::new(k0));
        let at = Point::real(0.3, -0.2);
        let d = depress(&k, at, 0, ChartPreference::Auto).unwrap();
        let (xv, yv) = (0.3, -0.2);
        assert!((d.a.value() - (yv - 2.0 * xv * xv / 3.0)).norm() < 1e-15);
        assert!((d.b.value() - (4.0 * xv * xv * xv / 27.0 - 2.0 * xv * yv / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn depress_without_chart_fails() {
        let k = kform_const([0.0, 1.0, 1.0, 0.0]);
        assert_eq!(depress(&k, Point::real(0.0, 0.0), 0, ChartPreference::Auto).unwrap_err(), Error::NoValidChart);
    }
}
