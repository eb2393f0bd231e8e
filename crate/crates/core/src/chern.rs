//! The Chern connection `γ` of a 3-web given by a cubic binary field,
//! computed three ways: from the normalized root covectors, from a closed
//! polynomial formula in `(a, b, c, r)` and their first partials, and from the
//! depressed slope cubic `p³ + A p + B`.

use crate::cubic::{
    depress, disc_scale, discriminant_jet, normalized_root_jets, to_kform, Chart, ChartPreference,
    CubicDirectionField, RootTriple, REGULAR_CUTOFF,
};
use crate::error::{Error, Result};
use crate::frobenius::{associativity_residual, Potential};
use crate::jets::{c, Jet, Point, Ring, Var, C64};
use crate::ode::integrate;

/// `γ = γ_dx dx + γ_dy dy` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionValue {
    pub dx: C64,
    pub dy: C64,
}

impl ConnectionValue {
    pub fn norm(&self) -> f64 {
        self.dx.norm().max(self.dy.norm())
    }

    /// Componentwise distance relative to `1 + ‖γ‖`.
    pub fn rel_diff(&self, other: &ConnectionValue) -> f64 {
        let d = (self.dx - other.dx).norm().max((self.dy - other.dy).norm());
        d / (1.0 + self.norm().max(other.norm()))
    }

    /// `γ(v)` for a tangent vector `v = (v_x, v_y)`.
    pub fn pair(&self, v: [C64; 2]) -> C64 {
        self.dx * v[0] + self.dy * v[1]
    }
}

/// Jets of the two components of `γ`.
#[derive(Clone, Debug)]
pub struct ConnectionJet {
    pub dx: Jet,
    pub dy: Jet,
}

impl ConnectionJet {
    pub fn value(&self) -> ConnectionValue {
        ConnectionValue { dx: self.dx.value(), dy: self.dy.value() }
    }

    /// `∂x γ_dy − ∂y γ_dx` as a jet one order lower.
    pub fn curvature(&self) -> Result<Jet> {
        Ok(&self.dy.derivative(Var::X)? - &self.dx.derivative(Var::Y)?)
    }

    fn swapped(&self) -> ConnectionJet {
        ConnectionJet { dx: self.dy.swap_vars(), dy: self.dx.swap_vars() }
    }
}

/// Numerators `(γ₁, γ₂)` of `γ = (γ₁ dx + γ₂ dy)/(3D)` from the values
/// `v = (a, b, c, r)` and their partials.
pub fn closed_form_numerators<T: Ring>(v: [&T; 4], dx: [&T; 4], dy: [&T; 4]) -> (T, T) {
    let [a, b, cc, r] = v;
    let [ax, bx, cx, rx] = dx;
    let [ay, by, cy, ry] = dy;
    let m = |u: &T, w: &T| u.mul(w);
    let m3 = |u: &T, w: &T, z: &T| u.mul(w).mul(z);

    let br = m(b, r);
    let c2 = m(cc, cc);
    let bc = m(b, cc);
    let ar = m(a, r);
    let ac = m(a, cc);
    let b2 = m(b, b);

    let g1 = m3(b, cc, r)
        .scale(15.0)
        .sub(&m3(a, r, r).scale(27.0))
        .sub(&m3(cc, cc, cc).scale(4.0))
        .mul(ax)
        .add(&r.mul(&br.scale(3.0).sub(&c2)).scale(6.0).mul(ay))
        .add(&b.mul(&c2.sub(&br.scale(3.0))).scale(2.0).mul(bx))
        .add(&r.mul(&bc.sub(&ar.scale(9.0))).scale(3.0).mul(by))
        .add(&b.mul(&ar.scale(9.0).sub(&bc)).mul(cx))
        .add(&r.mul(&ac.scale(3.0).sub(&b2)).scale(6.0).mul(cy))
        .add(&b.mul(&b2.sub(&ac.scale(3.0))).scale(2.0).mul(rx))
        .add(
            &m3(a, b, r)
                .scale(9.0)
                .sub(&m3(a, cc, cc).scale(12.0))
                .add(&m3(b, b, cc).scale(3.0))
                .mul(ry),
        );

    let g2 = m3(a, cc, r)
        .scale(9.0)
        .sub(&m3(b, b, r).scale(12.0))
        .add(&m3(b, cc, cc).scale(3.0))
        .mul(ax)
        .add(&cc.mul(&c2.sub(&br.scale(3.0))).scale(2.0).mul(ay))
        .add(&a.mul(&br.scale(3.0).sub(&c2)).scale(6.0).mul(bx))
        .add(&cc.mul(&ar.scale(9.0).sub(&bc)).mul(by))
        .add(&a.mul(&bc.sub(&ar.scale(9.0))).scale(3.0).mul(cx))
        .add(&cc.mul(&b2.sub(&ac.scale(3.0))).scale(2.0).mul(cy))
        .add(&a.mul(&ac.scale(3.0).sub(&b2)).scale(6.0).mul(rx))
        .add(
            &m3(a, b, cc)
                .scale(15.0)
                .sub(&m3(a, a, r).scale(27.0))
                .sub(&m3(b, b, b).scale(4.0))
                .mul(ry),
        );
    (g1, g2)
}

fn check_regular_jets(jets: &[Jet; 4]) -> Result<Jet> {
    let d = discriminant_jet(jets);
    let vals = [jets[0].value(), jets[1].value(), jets[2].value(), jets[3].value()];
    if d.value().norm() <= REGULAR_CUTOFF * disc_scale(&vals) {
        let mult = crate::cubic::projective_roots(&vals)
            .map(|r| crate::cubic::repeated_multiplicity(&r))
            .unwrap_or(3);
        return Err(Error::SingularPoint { disc_abs: d.value().norm(), multiplicity: mult });
    }
    Ok(d)
}

/// Closed-formula connection from coefficient jets of order `K + 1`; the
/// result has order `K`.
pub fn gamma_cubic_jets(jets: &[Jet; 4]) -> Result<ConnectionJet> {
    let order = jets[0].order();
    if order == 0 {
        return Err(Error::OrderExceeded { requested: 1, order: 0 });
    }
    let d = check_regular_jets(jets)?.truncate(order - 1);
    let v: Vec<Jet> = jets.iter().map(|j| j.truncate(order - 1)).collect();
    let dx: Vec<Jet> = jets.iter().map(|j| j.derivative(Var::X)).collect::<Result<_>>()?;
    let dy: Vec<Jet> = jets.iter().map(|j| j.derivative(Var::Y)).collect::<Result<_>>()?;
    let (g1, g2) = closed_form_numerators(
        [&v[0], &v[1], &v[2], &v[3]],
        [&dx[0], &dx[1], &dx[2], &dx[3]],
        [&dy[0], &dy[1], &dy[2], &dy[3]],
    );
    let inv = (&d * 3.0).recip()?;
    Ok(ConnectionJet { dx: &g1 * &inv, dy: &g2 * &inv })
}

pub fn gamma_cubic(field: &CubicDirectionField, at: Point) -> Result<ConnectionValue> {
    Ok(gamma_cubic_jets(&field.jets(at, 1)?)?.value())
}

/// Connection of `p³ + A p + B = 0` from jets of `A` and `B` (order `K + 1`
/// gives order `K`).
pub fn gamma_depressed(a: &Jet, b: &Jet) -> Result<ConnectionJet> {
    let order = a.order();
    if order == 0 {
        return Err(Error::OrderExceeded { requested: 1, order: 0 });
    }
    let den = &(&(&(a * a) * a) * 4.0) + &(&(b * b) * 27.0);
    let scale = (1.0 + a.value().norm().max(b.value().norm())).powi(6);
    if den.value().norm() <= REGULAR_CUTOFF * scale {
        return Err(Error::SingularPoint { disc_abs: den.value().norm(), multiplicity: 2 });
    }
    let (ax, ay) = (a.derivative(Var::X)?, a.derivative(Var::Y)?);
    let (bx, by) = (b.derivative(Var::X)?, b.derivative(Var::Y)?);
    let (a, b, den) = (a.truncate(order - 1), b.truncate(order - 1), den.truncate(order - 1));
    let a2 = &a * &a;
    let ab = &a * &b;
    let gx = &(&(&(&(&a2 * &ax) * 2.0) - &(&(&a2 * &by) * 4.0)) + &(&(&ab * &ay) * 6.0)) + &(&(&b * &bx) * 9.0);
    let gy = &(&(&(&(&a2 * &ay) * 4.0) + &(&(&a * &bx) * 6.0)) + &(&(&b * &by) * 18.0)) - &(&(&b * &ax) * 9.0);
    let inv = den.recip()?;
    Ok(ConnectionJet { dx: &gx * &inv, dy: &gy * &inv })
}

/// Relative size below which the quadratic coefficient of the monic slope
/// cubic counts as identically zero.
pub const QUADRATIC_TOL: f64 = 1e-12;

/// Depressed-route connection. The shift removing the quadratic term is a
/// change of fibre coordinate, so the formula applies only in a chart where
/// that term vanishes identically; such a chart is searched for.
pub fn gamma_depressed_field(field: &CubicDirectionField, at: Point, order: usize) -> Result<ConnectionJet> {
    let kform = to_kform(field);
    let mut worst: f64 = 0.0;
    let mut first_err = None;
    for chart in [Chart::Xy, Chart::Yx] {
        let dep = match depress(&kform, at, order + 1, ChartPreference::Force(chart)) {
            Ok(d) => d,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        let k2 = dep.k2.max_abs();
        let scale = 1.0 + dep.a.max_abs().max(dep.b.max_abs());
        if k2 > QUADRATIC_TOL * scale {
            worst = worst.max(k2);
            continue;
        }
        let g = gamma_depressed(&dep.a, &dep.b)?;
        return Ok(match chart {
            Chart::Xy => g,
            Chart::Yx => g.swapped(),
        });
    }
    if worst > 0.0 {
        Err(Error::QuadraticTermPresent { max_abs: worst })
    } else {
        Err(first_err.unwrap_or(Error::NoValidChart))
    }
}

/// Root-frame data at a point: normalized covectors, area coefficient and
/// `hᵢ` with `dσᵢ = hᵢ Ω`.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub roots: RootTriple,
    pub area: C64,
    pub h: [C64; 3],
    /// The three expressions `h₂σ₁ − h₁σ₂`, `h₃σ₂ − h₂σ₃`, `h₁σ₃ − h₃σ₁`.
    pub expressions: [ConnectionValue; 3],
}

impl FrameData {
    pub fn spread(&self) -> f64 {
        let e = &self.expressions;
        e[0].rel_diff(&e[1]).max(e[1].rel_diff(&e[2])).max(e[0].rel_diff(&e[2]))
    }

    /// Relative mismatch between `σ₁∧σ₂`, `σ₂∧σ₃`, `σ₃∧σ₁`.
    pub fn wedge_spread(&self) -> f64 {
        let w = self.roots.wedges();
        let m = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
        ((w[0] - w[1]).norm().max((w[1] - w[2]).norm())) / m
    }
}

struct DefinitionJets {
    roots: RootTriple,
    area: C64,
    h: [Jet; 3],
    exprs: [ConnectionJet; 3],
}

fn definition_jets(jets: &[Jet; 4]) -> Result<DefinitionJets> {
    let order = jets[0].order();
    if order == 0 {
        return Err(Error::OrderExceeded { requested: 1, order: 0 });
    }
    let rj = normalized_root_jets(jets)?;
    let k = order - 1;
    let p: [Jet; 3] = [0, 1, 2].map(|i| rj.p[i].truncate(k));
    let q: [Jet; 3] = [0, 1, 2].map(|i| rj.q[i].truncate(k));
    let area = &(&p[0] * &q[1]) - &(&p[1] * &q[0]);
    let inv = area.recip()?;
    let mut h = Vec::with_capacity(3);
    for i in 0..3 {
        let curl = &rj.q[i].derivative(Var::X)? - &rj.p[i].derivative(Var::Y)?;
        h.push(&curl * &inv);
    }
    let h: [Jet; 3] = [h[0].clone(), h[1].clone(), h[2].clone()];
    let expr = |i: usize, j: usize| ConnectionJet {
        // h_j σ_i − h_i σ_j
        dx: &(&h[j] * &p[i]) - &(&h[i] * &p[j]),
        dy: &(&h[j] * &q[i]) - &(&h[i] * &q[j]),
    };
    let exprs = [expr(0, 1), expr(1, 2), expr(2, 0)];
    Ok(DefinitionJets { roots: rj.values(), area: area.value(), h, exprs })
}

pub fn frame_data(field: &CubicDirectionField, at: Point) -> Result<FrameData> {
    let d = definition_jets(&field.jets(at, 1)?)?;
    Ok(FrameData {
        roots: d.roots,
        area: d.area,
        h: [d.h[0].value(), d.h[1].value(), d.h[2].value()],
        expressions: [d.exprs[0].value(), d.exprs[1].value(), d.exprs[2].value()],
    })
}

/// Agreement required between the three defining expressions.
pub const EXPRESSION_TOL: f64 = 1e-9;

/// Connection from its definition, as a jet of order `K` from coefficient
/// jets of order `K + 1`.
pub fn gamma_from_definition_jets(jets: &[Jet; 4]) -> Result<ConnectionJet> {
    let d = definition_jets(jets)?;
    let vals = [d.exprs[0].value(), d.exprs[1].value(), d.exprs[2].value()];
    let spread = vals[0].rel_diff(&vals[1]).max(vals[1].rel_diff(&vals[2]));
    if spread > EXPRESSION_TOL {
        return Err(Error::InconsistentConnection { spread });
    }
    let [e0, _, _] = d.exprs;
    Ok(e0)
}

pub fn gamma_from_definition(field: &CubicDirectionField, at: Point) -> Result<ConnectionValue> {
    Ok(gamma_from_definition_jets(&field.jets(at, 1)?)?.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Cubic,
    Depressed,
    Definition,
}

/// `γ` jet of the given order along a route.
pub fn gamma_jet(field: &CubicDirectionField, at: Point, order: usize, route: Route) -> Result<ConnectionJet> {
    match route {
        Route::Cubic => gamma_cubic_jets(&field.jets(at, order + 1)?),
        Route::Definition => gamma_from_definition_jets(&field.jets(at, order + 1)?),
        Route::Depressed => gamma_depressed_field(field, at, order),
    }
}

/// `K = ∂x γ_dy − ∂y γ_dx`.
pub fn curvature(field: &CubicDirectionField, at: Point, route: Route) -> Result<C64> {
    Ok(gamma_jet(field, at, 1, route)?.curvature()?.value())
}

/// Associativity residual above which [`corollary_residual`] refuses.
pub const SOLUTION_TOL: f64 = 1e-8;

/// Distance between `γ` and `−(1/6) d ln D` for the characteristic web.
pub fn corollary_residual(pot: &Potential, at: Point) -> Result<f64> {
    let res = associativity_residual(pot, at)?.norm();
    if res > SOLUTION_TOL {
        return Err(Error::NotASolution { residual: res });
    }
    let field = crate::cubic::characteristic_field(pot);
    let jets = field.jets(at, 1)?;
    let g = gamma_cubic_jets(&jets)?.value();
    let d = discriminant_jet(&jets);
    let dv = d.value();
    let target = ConnectionValue {
        dx: -d.extract(1, 0)? / (6.0 * dv),
        dy: -d.extract(0, 1)? / (6.0 * dv),
    };
    Ok(g.rel_diff(&target))
}

/// Relative `|D|` below which a path is considered to meet the discriminant.
pub const PATH_DISC_TOL: f64 = 1e-10;

/// Quadrature tolerance for path integrals of `γ`.
pub const PATH_QUAD_TOL: f64 = 1e-12;

fn checked_gamma(field: &CubicDirectionField, p: Point) -> Result<ConnectionValue> {
    let coeffs = field.coeffs(p)?;
    let d = crate::cubic::discriminant(&coeffs);
    if d.norm() <= PATH_DISC_TOL * disc_scale(&coeffs) {
        return Err(Error::PathHitsDiscriminant { disc_abs: d.norm(), at: p.to_string() });
    }
    gamma_cubic(field, p)
}

/// `∫ γ` along a polyline.
pub fn exactness_potential(field: &CubicDirectionField, path: &[Point]) -> Result<C64> {
    let mut total = C64::default();
    for w in path.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let v = [p1.x - p0.x, p1.y - p0.y];
        total += integrate(
            |s| {
                let p = Point::new(p0.x + v[0] * s, p0.y + v[1] * s);
                Ok(checked_gamma(field, p)?.pair(v))
            },
            0.0,
            1.0,
            PATH_QUAD_TOL,
        )?;
    }
    Ok(total)
}

/// Frame `vᵢ = Vᵢ/Ω₀` with `v₁ + v₂ + v₃ = 0`.
pub fn blaschke_frame(t: &RootTriple) -> [[C64; 2]; 3] {
    let area = t.area();
    [0, 1, 2].map(|i| {
        let v = t.leaf_vector(i);
        [v[0] / area, v[1] / area]
    })
}

/// Follows the normalized root triple along a path, fixing the relabeling
/// and the cube root of unity by continuity.
#[derive(Clone, Debug)]
pub struct FrameTracker {
    current: RootTriple,
}

impl FrameTracker {
    pub fn new(field: &CubicDirectionField, at: Point) -> Result<Self> {
        Ok(FrameTracker { current: crate::cubic::normalize_roots(field, at)? })
    }

    pub fn from_triple(t: RootTriple) -> Self {
        FrameTracker { current: t }
    }

    pub fn current(&self) -> &RootTriple {
        &self.current
    }

    pub fn advance(&mut self, field: &CubicDirectionField, to: Point) -> Result<&RootTriple> {
        let next = crate::cubic::normalize_roots(field, to)?;
        let (aligned, d) = next.aligned_to(&self.current);
        if d > 0.5 * self.current.scale_norm() {
            return Err(Error::BranchCollision(format!("root frame jumps near {to}")));
        }
        self.current = aligned;
        Ok(&self.current)
    }

    /// Advances in `steps` equal steps along the segment `from → to`.
    pub fn advance_along(&mut self, field: &CubicDirectionField, from: Point, to: Point, steps: usize) -> Result<&RootTriple> {
        let n = steps.max(1);
        for s in 1..=n {
            let tau = s as f64 / n as f64;
            self.advance(field, Point::new(from.x + (to.x - from.x) * tau, from.y + (to.y - from.y) * tau))?;
        }
        Ok(&self.current)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportResult {
    /// Final components `(ξ¹, ξ²)` in the frame `(v₁, v₂)`.
    pub components: [C64; 2],
    /// The transported vector `ξ¹v₁ + ξ²v₂` in `(∂x, ∂y)` components.
    pub vector: [C64; 2],
}

fn solve2(cols: [[C64; 2]; 2], rhs: [C64; 2]) -> Result<[C64; 2]> {
    let det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
    if det.norm() == 0.0 {
        return Err(Error::SingularPoint { disc_abs: 0.0, multiplicity: 2 });
    }
    Ok([
        (rhs[0] * cols[1][1] - rhs[1] * cols[1][0]) / det,
        (cols[0][0] * rhs[1] - cols[0][1] * rhs[0]) / det,
    ])
}

/// Parallel transport `dξⁱ = γ ξⁱ` in the frame `(v₁, v₂)` along a polyline,
/// starting from frame components `xi`.
pub fn blaschke_transport(
    field: &CubicDirectionField,
    curve: &[Point],
    xi: [C64; 2],
    steps_per_segment: usize,
) -> Result<TransportResult> {
    let Some(&start) = curve.first() else {
        return Err(Error::Integration("empty curve".into()));
    };
    let mut tracker = FrameTracker::new(field, start)?;
    for w in curve.windows(2) {
        tracker.advance_along(field, w[0], w[1], steps_per_segment)?;
    }
    let factor = exactness_potential(field, curve)?.exp();
    let comps = [xi[0] * factor, xi[1] * factor];
    let frame = blaschke_frame(tracker.current());
    let vector = [
        comps[0] * frame[0][0] + comps[1] * frame[1][0],
        comps[0] * frame[0][1] + comps[1] * frame[1][1],
    ];
    Ok(TransportResult { components: comps, vector })
}

/// Same transport for a tangent vector given in `(∂x, ∂y)` components.
pub fn blaschke_transport_vector(
    field: &CubicDirectionField,
    curve: &[Point],
    v: [C64; 2],
    steps_per_segment: usize,
) -> Result<TransportResult> {
    let Some(&start) = curve.first() else {
        return Err(Error::Integration("empty curve".into()));
    };
    let frame = blaschke_frame(&crate::cubic::normalize_roots(field, start)?);
    let xi = solve2([frame[0], frame[1]], v)?;
    blaschke_transport(field, curve, xi, steps_per_segment)
}

/// `−(1/6) ln D` differentiated, for comparisons.
pub fn log_disc_form(field: &CubicDirectionField, at: Point) -> Result<ConnectionValue> {
    let jets = field.jets(at, 1)?;
    let d = discriminant_jet(&jets);
    let k = c(-1.0 / 6.0) / d.value();
    Ok(ConnectionValue { dx: k * d.extract(1, 0)?, dy: k * d.extract(0, 1)? })
}
