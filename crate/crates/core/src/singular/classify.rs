use super::forms::{NormalForm, MAX_M0};
use super::{root_multiplicity, Multiplicity};
use crate::cubic::CubicDirectionField;
use crate::error::{Error, Result};
use crate::jets::{Point, C64};
use crate::webgeo::symmetry_residual;

/// Weights are searched over `|wᵢ| ≤ WEIGHT_BOUND`.
pub const WEIGHT_BOUND: i64 = 12;
/// Largest symmetry residual accepted for the detected weights.
pub const WEIGHT_TOL: f64 = 1e-6;
const FLOW_TIME: f64 = 0.02;
const PROBE: f64 = 0.05;
const PROBE_TOL: f64 = 1e-9;

/// Offsets of the complex sample points around the singular point.
const OFFSETS: [(f64, f64, f64, f64); 4] = [
    (0.115, 0.035, 0.155, -0.02),
    (0.06, -0.025, 0.135, 0.045),
    (0.175, 0.01, 0.08, 0.055),
    (0.14, -0.04, 0.11, -0.015),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogMatch {
    pub form: NormalForm,
    /// The roles of `x` and `y` are exchanged relative to the catalog.
    pub swapped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    /// Primitive integer weights `[w₁:w₂]` with the first nonzero one positive.
    pub weights: [i64; 2],
    pub residual: f64,
    pub multiplicity: Multiplicity,
    /// `None` when no catalog entry has these weights and the same root
    /// multiplicities near the point.
    pub matched: Option<CatalogMatch>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn canonical(w: [i64; 2]) -> [i64; 2] {
    let g = gcd(w[0], w[1]).max(1);
    let w = [w[0] / g, w[1] / g];
    if w[0] < 0 || (w[0] == 0 && w[1] < 0) {
        [-w[0], -w[1]]
    } else {
        w
    }
}

fn samples(center: Point) -> Vec<Point> {
    OFFSETS
        .iter()
        .map(|&(xr, xi, yr, yi)| center.offset(C64::new(xr, xi), C64::new(yr, yi)))
        .collect()
}

/// Root multiplicities at the point and at small offsets along the two axes.
fn signature(field: &CubicDirectionField, center: Point, swapped: bool) -> [Option<Multiplicity>; 3] {
    let d = C64::new(PROBE, 0.0);
    let z = C64::default();
    let (ex, ey) = if swapped { ((z, d), (d, z)) } else { ((d, z), (z, d)) };
    [
        root_multiplicity(field, center, PROBE_TOL).ok(),
        root_multiplicity(field, center.offset(ex.0, ex.1), PROBE_TOL).ok(),
        root_multiplicity(field, center.offset(ey.0, ey.1), PROBE_TOL).ok(),
    ]
}

fn compatible(a: &[Option<Multiplicity>; 3], b: &[Option<Multiplicity>; 3]) -> bool {
    a.iter().zip(b).all(|(u, v)| match (u, v) {
        (Some(u), Some(v)) => u == v,
        _ => true,
    })
}

/// Finds the diagonal weights fixing the web at `at` by a discrete search,
/// then matches them against the catalog. Weight collisions between entries
/// are resolved by the root multiplicities at the point and along the axes.
pub fn classify_singularity(field: &CubicDirectionField, at: Point) -> Result<Classification> {
    let multiplicity = root_multiplicity(field, at, PROBE_TOL)?;
    let pts = samples(at);
    let mut best: Option<([i64; 2], f64)> = None;
    for w1 in -WEIGHT_BOUND..=WEIGHT_BOUND {
        for w2 in -WEIGHT_BOUND..=WEIGHT_BOUND {
            if (w1 == 0 && w2 == 0) || canonical([w1, w2]) != [w1, w2] {
                continue;
            }
            let Ok(r) = symmetry_residual(field, [w1 as f64, w2 as f64], &pts, FLOW_TIME, at) else {
                continue;
            };
            if best.map_or(true, |(_, b)| r < b) {
                best = Some(([w1, w2], r));
            }
        }
    }
    let Some((weights, residual)) = best else {
        return Err(Error::Unclassified { best: f64::INFINITY });
    };
    if residual > WEIGHT_TOL {
        return Err(Error::Unclassified { best: residual });
    }

    let here = signature(field, at, false);
    let origin = Point::real(0.0, 0.0);
    let mut matched = None;
    'search: for form in NormalForm::catalog(0..=MAX_M0) {
        let v = form.weights();
        for swapped in [false, true] {
            let v = if swapped { [v[1], v[0]] } else { v };
            if canonical(v) != weights {
                continue;
            }
            let Ok(model) = form.field() else { continue };
            if compatible(&here, &signature(&model, origin, swapped)) {
                matched = Some(CatalogMatch { form, swapped });
                break 'search;
            }
        }
    }
    Ok(Classification { weights, residual, multiplicity, matched })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_weights() {
        assert_eq!(canonical([-4, 6]), [2, -3]);
        assert_eq!(canonical([0, -3]), [0, 1]);
        assert_eq!(canonical([3, 2]), [3, 2]);
    }

    #[test]
    fn form2_is_recognized() {
        let f = NormalForm::new(2, 0).unwrap().field().unwrap();
        let cl = classify_singularity(&f, Point::real(0.0, 0.0)).unwrap();
        assert_eq!(cl.weights, [2, 3]);
        assert_eq!(cl.multiplicity, Multiplicity::Triple);
        assert_eq!(cl.matched, Some(CatalogMatch { form: NormalForm::new(2, 0).unwrap(), swapped: false }));
    }
}
