use std::fmt;
use std::sync::Arc;

use super::{Jet, Point, PolyExpr, Var, C64};
use crate::error::Result;

/// A scalar field that can be expanded into a jet at any point of its domain.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn jet(&self, at: Point, order: usize) -> Result<Jet>;

    fn value(&self, at: Point) -> Result<C64> {
        Ok(self.jet(at, 0)?.value())
    }
}

pub type SharedField = Arc<dyn ScalarField>;

impl ScalarField for PolyExpr {
    fn jet(&self, at: Point, order: usize) -> Result<Jet> {
        self.lift(at, order)
    }
}

type JetFn = dyn Fn(&Jet, &Jet) -> Result<Jet> + Send + Sync;

/// A field given by a formula on the coordinate jets `(x, y)`.
#[derive(Clone)]
pub struct FnField {
    label: String,
    f: Arc<JetFn>,
}

impl FnField {
    pub fn new(label: impl Into<String>, f: impl Fn(&Jet, &Jet) -> Result<Jet> + Send + Sync + 'static) -> Self {
        FnField { label: label.into(), f: Arc::new(f) }
    }
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnField({})", self.label)
    }
}

impl ScalarField for FnField {
    fn jet(&self, at: Point, order: usize) -> Result<Jet> {
        let x = Jet::variable(at, order, Var::X);
        let y = Jet::variable(at, order, Var::Y);
        (self.f)(&x, &y)
    }
}

pub fn fn_field(
    label: impl Into<String>,
    f: impl Fn(&Jet, &Jet) -> Result<Jet> + Send + Sync + 'static,
) -> SharedField {
    Arc::new(FnField::new(label, f))
}

pub fn constant_field(v: C64) -> SharedField {
    fn_field(format!("{v}"), move |x, _| Ok(Jet::constant(x.base(), x.order(), v)))
}

#[derive(Debug)]
struct Scaled {
    inner: SharedField,
    k: C64,
}

impl ScalarField for Scaled {
    fn jet(&self, at: Point, order: usize) -> Result<Jet> {
        Ok(self.inner.jet(at, order)?.scale(self.k))
    }
}

pub fn scaled_field(inner: SharedField, k: C64) -> SharedField {
    Arc::new(Scaled { inner, k })
}

/// Partial derivative `∂^(dx+dy) / ∂x^dx ∂y^dy` of another field.
#[derive(Debug)]
pub struct DerivedField {
    pub inner: SharedField,
    pub dx: usize,
    pub dy: usize,
}

impl ScalarField for DerivedField {
    fn jet(&self, at: Point, order: usize) -> Result<Jet> {
        self.inner.jet(at, order + self.dx + self.dy)?.partial(self.dx, self.dy)
    }
}
