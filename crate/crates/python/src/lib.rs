//! Python bindings for the `hexweb` crate.
//!
//! Points are passed as `(x, y)` with `x`, `y` real or complex.

use hexweb::chern::{self, Route};
use hexweb::cubic::{self, characteristic_field, CubicDirectionField};
use hexweb::frobenius::{self, Case, Potential};
use hexweb::jets::{Monomial, PolyExpr, Point, C64};
use hexweb::singular::{self, NormalForm};
use hexweb::webgeo;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyhexweb, HexwebError, PyException);

fn err(e: hexweb::Error) -> PyErr {
    HexwebError::new_err(e.to_string())
}

fn pt(x: C64, y: C64) -> Point {
    Point::new(x, y)
}

fn path(points: Vec<(C64, C64)>) -> Vec<Point> {
    points.into_iter().map(|(x, y)| pt(x, y)).collect()
}

fn poly(terms: Vec<(Vec<u32>, C64)>, nvars: usize) -> PyResult<PolyExpr> {
    let monos = terms.into_iter().map(|(exps, coef)| Monomial { exps, coef: coef.into() });
    PolyExpr::new(nvars, monos).map_err(err)
}

fn parse_case(case: &str) -> PyResult<Case> {
    match case {
        "A" | "a" => Ok(Case::A),
        "B" | "b" => Ok(Case::B),
        _ => Err(PyValueError::new_err(format!("case must be 'A' or 'B', got {case:?}"))),
    }
}

fn parse_route(route: &str) -> PyResult<Route> {
    match route {
        "cubic" => Ok(Route::Cubic),
        "depressed" => Ok(Route::Depressed),
        "definition" => Ok(Route::Definition),
        _ => Err(PyValueError::new_err(format!("unknown route {route:?}"))),
    }
}

/// WDVV potential `F(t, x, y)` in case A or B, determined by `f(x, y)`.
#[pyclass(name = "Potential", module = "pyhexweb", frozen)]
struct PyPotential {
    inner: Potential,
}

#[pymethods]
impl PyPotential {
    /// `monomials` is a list of `([i, j], coef)` terms of `f(x, y)`.
    #[new]
    fn new(case: &str, monomials: Vec<(Vec<u32>, C64)>) -> PyResult<Self> {
        let inner = Potential::new(parse_case(case)?, poly(monomials, 2)?).map_err(err)?;
        Ok(PyPotential { inner })
    }

    #[staticmethod]
    fn solution_a() -> Self {
        PyPotential { inner: Potential::solution_a() }
    }

    #[staticmethod]
    fn solution_b() -> Self {
        PyPotential { inner: Potential::solution_b() }
    }

    /// Series solution from `f(x,0)`, `f_y(x,0)`, `f_yy(x,0)`, each a list of
    /// coefficients in ascending powers of `x`.
    #[staticmethod]
    fn taylor_solve(case: &str, data: [Vec<C64>; 3], order: usize) -> PyResult<Self> {
        let polys = data
            .map(|cs| poly(cs.into_iter().enumerate().map(|(i, v)| (vec![i as u32], v)).collect(), 1));
        let [d0, d1, d2] = polys;
        let inner = frobenius::taylor_solve(parse_case(case)?, [&d0?, &d1?, &d2?], order).map_err(err)?;
        Ok(PyPotential { inner })
    }

    #[getter]
    fn case(&self) -> &'static str {
        match self.inner.case() {
            Case::A => "A",
            Case::B => "B",
        }
    }

    /// Terms `([i, j], coef)` of `f(x, y)`.
    fn monomials(&self) -> Vec<(Vec<u32>, C64)> {
        self.inner.f().monomials().map(|(e, k)| (e.to_vec(), k.to_complex())).collect()
    }

    fn associativity_residual(&self, x: C64, y: C64) -> PyResult<C64> {
        frobenius::associativity_residual(&self.inner, pt(x, y)).map_err(err)
    }

    fn corollary_residual(&self, x: C64, y: C64) -> PyResult<f64> {
        chern::corollary_residual(&self.inner, pt(x, y)).map_err(err)
    }

    fn theorem2_residual(&self, x: C64, y: C64) -> PyResult<f64> {
        frobenius::theorem2_residual(&self.inner, pt(x, y)).map_err(err)
    }

    /// Euler weights of `(t, x, y)` and of `F`.
    fn euler_weights(&self) -> PyResult<[f64; 4]> {
        Ok(frobenius::euler_data(&self.inner).map_err(err)?.as_f64())
    }

    /// Characteristic web on the slice `t = 0`.
    fn field(&self) -> PyField {
        PyField { inner: characteristic_field(&self.inner) }
    }

    /// Transports a slice vector keeping its idempotent coordinates fixed.
    #[pyo3(signature = (curve, v, steps = 40))]
    fn transport(&self, curve: Vec<(C64, C64)>, v: (C64, C64), steps: usize) -> PyResult<(C64, C64)> {
        let out = frobenius::frobenius_transport(&self.inner, &path(curve), [v.0, v.1], steps).map_err(err)?;
        Ok((out[0], out[1]))
    }

    fn __repr__(&self) -> String {
        format!("Potential(case={}, f={} terms)", self.case(), self.inner.f().len())
    }
}

/// Web of the binary cubic `a p³ + b p²q + c pq² + r q³`.
#[pyclass(name = "Field", module = "pyhexweb", frozen)]
struct PyField {
    inner: CubicDirectionField,
}

#[pymethods]
impl PyField {
    /// Each coefficient is a list of `([i, j], coef)` monomials in `x, y`.
    #[new]
    fn new(
        a: Vec<(Vec<u32>, C64)>,
        b: Vec<(Vec<u32>, C64)>,
        c: Vec<(Vec<u32>, C64)>,
        r: Vec<(Vec<u32>, C64)>,
    ) -> PyResult<Self> {
        let inner = CubicDirectionField::from_polys(poly(a, 2)?, poly(b, 2)?, poly(c, 2)?, poly(r, 2)?).map_err(err)?;
        Ok(PyField { inner })
    }

    /// Catalog normal form `id` (1–6); `m0` applies to forms 1 and 6.
    #[staticmethod]
    #[pyo3(signature = (id, m0 = 0))]
    fn normal_form(id: u8, m0: u32) -> PyResult<Self> {
        let inner = NormalForm::new(id, m0).and_then(|f| f.field()).map_err(err)?;
        Ok(PyField { inner })
    }

    /// Flat web without a local infinitesimal symmetry.
    #[staticmethod]
    fn broken_symmetry() -> Self {
        PyField { inner: singular::broken_symmetry_fixture().to_field() }
    }

    fn coeffs(&self, x: C64, y: C64) -> PyResult<[C64; 4]> {
        self.inner.coeffs(pt(x, y)).map_err(err)
    }

    fn discriminant(&self, x: C64, y: C64) -> PyResult<C64> {
        cubic::discriminant_at(&self.inner, pt(x, y)).map_err(err)
    }

    /// Projective roots `(p, q)` of the cubic.
    fn roots(&self, x: C64, y: C64) -> PyResult<Vec<(C64, C64)>> {
        Ok(cubic::roots(&self.inner, pt(x, y)).map_err(err)?.iter().map(|r| (r[0], r[1])).collect())
    }

    /// Components `(γ_x, γ_y)` of the connection form.
    #[pyo3(signature = (x, y, route = "cubic"))]
    fn gamma(&self, x: C64, y: C64, route: &str) -> PyResult<(C64, C64)> {
        let g = chern::gamma_jet(&self.inner, pt(x, y), 0, parse_route(route)?).map_err(err)?.value();
        Ok((g.dx, g.dy))
    }

    #[pyo3(signature = (x, y, route = "cubic"))]
    fn curvature(&self, x: C64, y: C64, route: &str) -> PyResult<C64> {
        chern::curvature(&self.inner, pt(x, y), parse_route(route)?).map_err(err)
    }

    /// Gap of the hexagonal closure figure at a real base point.
    #[pyo3(signature = (x, y, eps = 0.05, tol = 1e-10))]
    fn hexagon_gap(&self, x: f64, y: f64, eps: f64, tol: f64) -> PyResult<f64> {
        Ok(webgeo::thomsen_closure(&self.inner, [x, y], eps, tol).map_err(err)?.gap)
    }

    /// Largest `|u₁ + u₂ + u₃|` along a polygonal path.
    fn abelian_residual(&self, points: Vec<(C64, C64)>) -> PyResult<f64> {
        Ok(webgeo::first_integrals(&self.inner, &path(points)).map_err(err)?.abelian_residual)
    }

    #[pyo3(signature = (weights, points, a = 0.1, center = (C64::new(0.0, 0.0), C64::new(0.0, 0.0))))]
    fn symmetry_residual(&self, weights: (f64, f64), points: Vec<(C64, C64)>, a: f64, center: (C64, C64)) -> PyResult<f64> {
        webgeo::symmetry_residual(&self.inner, [weights.0, weights.1], &path(points), a, pt(center.0, center.1))
            .map_err(err)
    }

    /// Parallel transport of frame components along a polyline.
    #[pyo3(signature = (curve, xi, steps = 40))]
    fn transport(&self, curve: Vec<(C64, C64)>, xi: (C64, C64), steps: usize) -> PyResult<(C64, C64)> {
        let out = chern::blaschke_transport(&self.inner, &path(curve), [xi.0, xi.1], steps).map_err(err)?;
        Ok((out.components[0], out.components[1]))
    }

    /// Real discriminant curve in `[xmin, xmax, ymin, ymax]` as polylines.
    #[pyo3(signature = (window, n = 24, tol = 1e-10))]
    fn trace_discriminant(&self, window: [f64; 4], n: usize, tol: f64) -> PyResult<Vec<Vec<(f64, f64)>>> {
        let trace = singular::trace_discriminant(&self.inner, window, n, tol).map_err(err)?;
        Ok(trace.polylines.iter().map(|l| l.iter().map(|p| (p[0], p[1])).collect()).collect())
    }

    #[pyo3(signature = (x, y, tol = 1e-9))]
    fn root_multiplicity(&self, x: C64, y: C64, tol: f64) -> PyResult<String> {
        Ok(singular::root_multiplicity(&self.inner, pt(x, y), tol).map_err(err)?.to_string())
    }

    /// Quasi-homogeneous weights at a point and the matching catalog form.
    fn classify<'py>(&self, py: Python<'py>, x: f64, y: f64) -> PyResult<Bound<'py, PyDict>> {
        let cl = singular::classify_singularity(&self.inner, Point::real(x, y)).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("weights", cl.weights)?;
        out.set_item("residual", cl.residual)?;
        out.set_item("multiplicity", cl.multiplicity.to_string())?;
        out.set_item("form", cl.matched.map(|m| m.form.label()))?;
        out.set_item("swapped", cl.matched.map(|m| m.swapped))?;
        Ok(out)
    }
}

/// Samples `(t, F(t))` of the normal-form-6 profile on `[0, t_max]`.
#[pyfunction]
#[pyo3(signature = (m0, t_max = 1.0, tol = 1e-10))]
fn solve_f(m0: u32, t_max: f64, tol: f64) -> PyResult<(Vec<f64>, Vec<C64>, f64)> {
    let s = singular::solve_f(m0, t_max, tol).map_err(err)?;
    let res = s.max_residual();
    Ok((s.ts, s.values, res))
}

/// Runs the command line front-end, e.g. `run_cli(["normalforms", "--out", d])`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    hexweb::cli::run(std::iter::once("hexweb".to_string()).chain(args))
}

#[pymodule]
fn pyhexweb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HexwebError", m.py().get_type::<HexwebError>())?;
    m.add_class::<PyPotential>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(solve_f, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
