//! Catalog of quasi-homogeneous normal forms of flat singular webs, written
//! as implicit ODEs in `p = dy/dx`.

use std::sync::Arc;

use super::fode::FOde;
use crate::cubic::{CubicDirectionField, KForm};
use crate::error::{Error, Result};
use crate::jets::{c, fn_field, Jet, Point, ScalarField, SharedField, C64};

/// Largest `m₀` accepted by the catalog.
pub const MAX_M0: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub id: u8,
    /// Only meaningful for forms 1 and 6; zero otherwise.
    pub m0: u32,
}

/// Coefficients of a normal form at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormalFormCoefficients {
    /// `[K₃, K₂, K₁, K₀]`.
    KForm([C64; 4]),
    /// `p³ + A p + B`.
    Depressed { a: C64, b: C64 },
}

impl NormalForm {
    pub fn new(id: u8, m0: u32) -> Result<Self> {
        match id {
            1 | 6 if m0 <= MAX_M0 => Ok(NormalForm { id, m0 }),
            1 | 6 => Err(Error::InvalidNormalForm(format!("m0 = {m0} exceeds {MAX_M0}"))),
            2..=5 if m0 == 0 => Ok(NormalForm { id, m0 }),
            2..=5 => Err(Error::InvalidNormalForm(format!("form {id} takes no m0"))),
            _ => Err(Error::InvalidNormalForm(format!("unknown id {id}"))),
        }
    }

    /// Forms 1–5 and 6 with the given range of `m₀` (form 1 uses the same range).
    pub fn catalog(m0s: std::ops::RangeInclusive<u32>) -> Vec<NormalForm> {
        let mut out: Vec<NormalForm> = m0s.clone().map(|m0| NormalForm { id: 1, m0 }).collect();
        out.extend((2..=5).map(|id| NormalForm { id, m0: 0 }));
        out.extend(m0s.map(|m0| NormalForm { id: 6, m0 }));
        out
    }

    /// Weights `[w₁:w₂]` of the symmetry `X = w₁x∂x + w₂y∂y`.
    pub fn weights(&self) -> [i64; 2] {
        let m = self.m0 as i64;
        match self.id {
            1 => [2 + m, 2],
            2 => [2, 3],
            3 => [1, 2],
            4 => [1, 3],
            5 => [0, 1],
            _ => [1 + m, -2],
        }
    }

    pub fn label(&self) -> String {
        match self.id {
            1 | 6 => format!("form {} (m0 = {})", self.id, self.m0),
            id => format!("form {id}"),
        }
    }

    /// Whether the coefficients are given as a depressed monic cubic.
    pub fn is_depressed(&self) -> bool {
        self.id != 1
    }

    /// `[K₃, K₂, K₁, K₀]` jets at `at`.
    pub fn kform_jets(&self, at: Point, order: usize, f: Option<&FOde>) -> Result<[Jet; 4]> {
        let x = Jet::variable(at, order, crate::jets::Var::X);
        let y = Jet::variable(at, order, crate::jets::Var::Y);
        let one = Jet::constant(at, order, c(1.0));
        let zero = Jet::zeros(at, order);
        if self.id == 1 {
            return Ok([y.powi(self.m0), zero, -&one, Jet::zeros(at, order)]);
        }
        let (a, b) = self.depressed_jets(&x, &y, f)?;
        Ok([one, zero, a, b])
    }

    fn depressed_jets(&self, x: &Jet, y: &Jet, f: Option<&FOde>) -> Result<(Jet, Jet)> {
        match self.id {
            2 => Ok((x * 2.0, y.clone())),
            3 => {
                let x2 = x * x;
                let a = y - &(&x2 * (2.0 / 3.0));
                let b = &(&(&x2 * x) * (4.0 / 27.0)) - &(&(x * y) * (2.0 / 3.0));
                Ok((a, b))
            }
            4 => {
                let x3 = &(x * x) * x;
                let a = &(x * 4.0) * &(y - &(&x3 * (4.0 / 9.0)));
                let b = &(&(y * y) + &(&(&x3 * &x3) * (64.0 / 81.0))) - &(&(y * &x3) * (32.0 / 9.0));
                Ok((a, b))
            }
            5 => {
                let tan = (x * (2.0 * 3f64.sqrt())).tan()?;
                let b = &(&(&(y * y) * y) * &tan) * (-2.0 / 27f64.sqrt());
                Ok((y * y, b))
            }
            _ => self.form6_jets(x, y, f),
        }
    }

    /// `A = y^{3+m₀}`, `B = −y^{(9+3m₀)/2} F((m₀+1) x y^{(1+m₀)/2})` on the
    /// principal branch, `Re y > 0`. On `y = 0` only values are defined.
    fn form6_jets(&self, x: &Jet, y: &Jet, f: Option<&FOde>) -> Result<(Jet, Jet)> {
        let m = self.m0 as f64;
        let a = y.powi(3 + self.m0);
        let y0 = y.value();
        if y0 == C64::default() && y.order() == 0 {
            return Ok((a, Jet::zeros(y.base(), 0)));
        }
        if !(y0.re > 0.0) {
            return Err(Error::DomainError { function: "normal form 6 (needs Re y > 0)", at: format!("{}", y.base()) });
        }
        let owned;
        let ode = match f {
            Some(o) => o,
            None => {
                owned = FOde::new(self.m0)?;
                &owned
            }
        };
        let arg = &(x * &y.powc(c((1.0 + m) / 2.0))?) * (m + 1.0);
        let series = ode.series_at(arg.value(), y.order())?;
        let fv = arg.compose(&series);
        let b = &(&y.powc(c((9.0 + 3.0 * m) / 2.0))? * &fv) * -1.0;
        Ok((a, b))
    }

    /// Coefficients at a single point.
    pub fn coefficients(&self, at: Point) -> Result<NormalFormCoefficients> {
        let j = self.kform_jets(at, 0, None)?;
        Ok(if self.is_depressed() {
            NormalFormCoefficients::Depressed { a: j[2].value(), b: j[3].value() }
        } else {
            NormalFormCoefficients::KForm(j.map(|v| v.value()))
        })
    }

    pub fn kform(&self) -> Result<KForm> {
        let ode = if self.id == 6 { Some(Arc::new(FOde::new(self.m0)?)) } else { None };
        let form = *self;
        let comp = |i: usize| -> SharedField {
            let ode = ode.clone();
            Arc::new(Component { form, index: i, ode })
        };
        Ok(KForm::new(comp(0), comp(1), comp(2), comp(3)))
    }

    pub fn field(&self) -> Result<CubicDirectionField> {
        Ok(self.kform()?.to_field())
    }
}

#[derive(Debug)]
struct Component {
    form: NormalForm,
    index: usize,
    ode: Option<Arc<FOde>>,
}

impl ScalarField for Component {
    fn jet(&self, at: Point, order: usize) -> Result<Jet> {
        let j = self.form.kform_jets(at, order, self.ode.as_deref())?;
        Ok(j[self.index].clone())
    }
}

/// Coefficients of form `id` at `at`.
pub fn normal_form_field(id: u8, m0: u32, at: Point) -> Result<NormalFormCoefficients> {
    NormalForm::new(id, m0)?.coefficients(at)
}

/// `dy³ − 2x²y(1+x²) dy dx² + 8x³y² dx³`: a flat web whose symmetries do not
/// survive at the origin. Not quasi-homogeneous, so it is not classified.
pub fn broken_symmetry_fixture() -> KForm {
    let k1 = fn_field("-2x^2y(1+x^2)", |x, y| Ok(&(&(&(x * x) * y) * &(x * x).add_scalar(c(1.0))) * -2.0));
    let k0 = fn_field("8x^3y^2", |x, y| Ok(&(&(&(&(x * x) * x) * y) * y) * 8.0));
    KForm::new(crate::jets::constant_field(c(1.0)), crate::jets::constant_field(c(0.0)), k1, k0)
}
