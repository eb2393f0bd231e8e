//! Singular points of cubic webs: discriminant tracing, root multiplicity,
//! the normal-form catalog and weight-based classification.

mod classify;
mod fode;
mod forms;
mod trace;

pub use classify::{classify_singularity, CatalogMatch, Classification, WEIGHT_BOUND, WEIGHT_TOL};
pub use fode::{solve_f, solve_f_real, FOde, FSamples, FOLD_RADIUS, F_TOL, SERIES_ORDER};
pub use forms::{broken_symmetry_fixture, normal_form_field, NormalForm, NormalFormCoefficients, MAX_M0};
pub use trace::{trace_discriminant, DiscriminantTrace};

use std::fmt;

use crate::cubic::{disc_scale, discriminant, CubicDirectionField};
use crate::error::{Error, Result};
use crate::jets::{Point, C64};

/// Root partition of the cubic at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    /// 1+1+1
    Simple,
    /// 2+1
    Double,
    /// 3
    Triple,
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Multiplicity::Simple => "1+1+1",
            Multiplicity::Double => "2+1",
            Multiplicity::Triple => "3",
        })
    }
}

/// Depressed invariants `(A, B)` of the monic cubic in the chart with the
/// larger leading coefficient; `None` when `p` and `q` both divide the form.
fn depressed_invariants(coeffs: &[C64; 4]) -> Option<(C64, C64)> {
    let [a, b, cc, r] = *coeffs;
    // a p³ + b p²q + c pq² + r q³ monic in p (lead a) or in q (lead r)
    let (lead, m2, m1, m0) = if a.norm() >= r.norm() { (a, b, cc, r) } else { (r, cc, b, a) };
    if lead.norm() <= 1e-14 * (b.norm() + cc.norm()) {
        return None;
    }
    let (n2, n1, n0) = (m2 / lead, m1 / lead, m0 / lead);
    let big_a = n1 - n2 * n2 / 3.0;
    let big_b = 2.0 * n2 * n2 * n2 / 27.0 - n2 * n1 / 3.0 + n0;
    Some((big_a, big_b))
}

/// Classifies from coefficients: simple iff `|D| > tol · scale`, triple iff
/// both depressed invariants vanish to `tol`.
pub fn multiplicity_of(coeffs: &[C64; 4], tol: f64) -> Result<Multiplicity> {
    let m = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(m > 0.0) {
        return Err(Error::DegenerateCoefficients { max_abs: m });
    }
    if discriminant(coeffs).norm() > tol * disc_scale(coeffs) {
        return Ok(Multiplicity::Simple);
    }
    Ok(match depressed_invariants(coeffs) {
        Some((a, b)) if a.norm() <= tol && b.norm() <= tol => Multiplicity::Triple,
        _ => Multiplicity::Double,
    })
}

pub fn root_multiplicity(field: &CubicDirectionField, at: Point, tol: f64) -> Result<Multiplicity> {
    multiplicity_of(&field.coeffs(at)?, tol)
}

/// Stateful classifier for scanning: a point leaves the singular class only
/// once `|D|` exceeds `band · tol · scale`, so tiny perturbations near the
/// threshold cannot toggle the answer.
#[derive(Clone, Copy, Debug)]
pub struct MultiplicityTracker {
    pub tol: f64,
    pub band: f64,
    state: Option<Multiplicity>,
}

impl MultiplicityTracker {
    pub fn new(tol: f64, band: f64) -> Self {
        MultiplicityTracker { tol, band: band.max(1.0), state: None }
    }

    pub fn state(&self) -> Option<Multiplicity> {
        self.state
    }

    pub fn update(&mut self, coeffs: &[C64; 4]) -> Result<Multiplicity> {
        let next = match self.state {
            Some(Multiplicity::Double | Multiplicity::Triple) => {
                let d = discriminant(coeffs).norm();
                if d > self.band * self.tol * disc_scale(coeffs) {
                    Multiplicity::Simple
                } else {
                    match multiplicity_of(coeffs, self.tol)? {
                        Multiplicity::Simple => self.state.unwrap_or(Multiplicity::Double),
                        m => m,
                    }
                }
            }
            _ => multiplicity_of(coeffs, self.tol)?,
        };
        self.state = Some(next);
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::c;

    #[test]
    fn constant_examples() {
        assert_eq!(multiplicity_of(&[1.0, 0.0, 0.0, 1.0].map(c), 1e-10).unwrap(), Multiplicity::Simple);
        assert_eq!(multiplicity_of(&[1.0, 0.0, 0.0, 0.0].map(c), 1e-10).unwrap(), Multiplicity::Triple);
        assert_eq!(multiplicity_of(&[0.0, 0.0, 0.0, 1.0].map(c), 1e-10).unwrap(), Multiplicity::Triple);
        // p²q: double root q = 0 and simple p = 0
        assert_eq!(multiplicity_of(&[0.0, 1.0, 0.0, 0.0].map(c), 1e-10).unwrap(), Multiplicity::Double);
        assert!(multiplicity_of(&[0.0; 4].map(c), 1e-10).is_err());
    }

    #[test]
    fn tracker_holds_inside_band() {
        let mut t = MultiplicityTracker::new(1e-10, 10.0);
        let base = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(t.update(&base.map(c)).unwrap(), Multiplicity::Triple);
        // |D| = 27r² ≈ 6e-9 lies between tol·scale and band·tol·scale
        let near = [1.0, 0.0, 0.0, 1.5e-5];
        assert_eq!(multiplicity_of(&near.map(c), 1e-10).unwrap(), Multiplicity::Simple);
        assert_eq!(t.update(&near.map(c)).unwrap(), Multiplicity::Triple);
        let far = [1.0, 0.0, 0.0, 1e-2];
        assert_eq!(t.update(&far.map(c)).unwrap(), Multiplicity::Simple);
    }
}
