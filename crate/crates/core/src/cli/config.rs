//! Job configuration files.
//!
//! ```json
//! {
//!   "kind": "potential",
//!   "case": "A",
//!   "monomials": [ { "exps": [2, 2], "coef": "1/4" }, { "exps": [0, 5], "coef": [0.016666, 0.0] } ],
//!   "window": [-1.0, 1.0, 0.5, 1.5]
//! }
//! ```
//!
//! `kind` is `potential` (monomials of `f(x, y)`, or of the full `F(t, x, y)`
//! with three exponents), `field` (entries `a`, `b`, `c`, `r`, each a list of
//! monomials in `x, y`) or `normal_form` (`id`, optional `m0`).

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Deserialize;

use crate::cubic::{characteristic_field, CubicDirectionField};
use crate::frobenius::{Case, Potential};
use crate::jets::{Coef, Monomial, PolyExpr, C64};
use crate::singular::NormalForm;

use super::CliError;

/// Default tolerances; a config may override any of these keys.
pub const DEFAULT_TOLERANCES: [(&str, f64); 12] = [
    ("associativity", 1e-10),
    ("classify", 1e-6),
    ("closure", 1e-6),
    ("corollary", 1e-8),
    ("expressions", 1e-9),
    ("flatness", 1e-7),
    ("fode", 1e-8),
    ("gamma_routes", 1e-7),
    ("strict", 1e-8),
    ("symmetry", 1e-7),
    ("theorem2", 1e-8),
    ("trace", 1e-8),
];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: String,
    case: Option<String>,
    monomials: Option<Vec<RawMonomial>>,
    a: Option<Vec<RawMonomial>>,
    b: Option<Vec<RawMonomial>>,
    c: Option<Vec<RawMonomial>>,
    r: Option<Vec<RawMonomial>>,
    id: Option<u8>,
    m0: Option<u32>,
    window: Option<[f64; 4]>,
    grid: Option<usize>,
    samples: Option<usize>,
    leaves: Option<usize>,
    base: Option<[f64; 2]>,
    eps: Option<f64>,
    point: Option<[f64; 2]>,
    expect_flat: Option<bool>,
    m0_max: Option<u32>,
    tolerances: Option<BTreeMap<String, f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonomial {
    exps: Vec<u32>,
    coef: RawCoef,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCoef {
    Complex([f64; 2]),
    Real(f64),
    Text(String),
}

#[derive(Clone, Debug)]
pub enum Input {
    Potential(Potential),
    Field(CubicDirectionField),
    NormalForm(NormalForm),
}

impl Input {
    pub fn field(&self) -> Result<CubicDirectionField, CliError> {
        match self {
            Input::Potential(p) => Ok(characteristic_field(p)),
            Input::Field(f) => Ok(f.clone()),
            Input::NormalForm(n) => n.field().map_err(CliError::Compute),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Input::Potential(p) => format!("potential, case {:?}", p.case()),
            Input::Field(_) => "field".to_string(),
            Input::NormalForm(n) => n.label(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub input: Input,
    pub window: [f64; 4],
    pub grid: usize,
    pub samples: usize,
    pub leaves: usize,
    pub base: [f64; 2],
    pub eps: f64,
    pub point: [f64; 2],
    pub expect_flat: bool,
    pub m0_max: u32,
    pub tolerances: BTreeMap<String, f64>,
}

impl JobConfig {
    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances[key]
    }

    /// Configuration used when a command runs without a file.
    pub fn catalog_default() -> JobConfig {
        JobConfig {
            input: Input::NormalForm(NormalForm { id: 2, m0: 0 }),
            window: [-1.0, 1.0, -1.0, 1.0],
            grid: 32,
            samples: 50,
            leaves: 8,
            base: [0.0, 0.0],
            eps: 0.05,
            point: [0.0, 0.0],
            expect_flat: true,
            m0_max: 2,
            tolerances: default_tolerances(),
        }
    }
}

fn default_tolerances() -> BTreeMap<String, f64> {
    DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn parse_coef(raw: &RawCoef) -> Result<Coef, CliError> {
    match raw {
        RawCoef::Complex([re, im]) if re.is_finite() && im.is_finite() => Ok(Coef::Complex(C64::new(*re, *im))),
        RawCoef::Real(v) if v.is_finite() => {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                Ok(Coef::Rational(Ratio::from_integer(*v as i64)))
            } else {
                Ok(Coef::Complex(C64::new(*v, 0.0)))
            }
        }
        RawCoef::Text(s) => Ratio::<i64>::from_str(s.trim())
            .map(Coef::Rational)
            .map_err(|_| schema(format!("coefficient {s:?} is not of the form \"p/q\""))),
        _ => Err(schema("non-finite coefficient")),
    }
}

fn parse_poly(raw: &[RawMonomial], nvars: usize, what: &str) -> Result<PolyExpr, CliError> {
    let mut monomials = Vec::with_capacity(raw.len());
    for m in raw {
        if m.exps.len() != nvars {
            return Err(schema(format!("{what}: exponent tuple {:?} should have {nvars} entries", m.exps)));
        }
        monomials.push(Monomial { exps: m.exps.clone(), coef: parse_coef(&m.coef)? });
    }
    PolyExpr::new(nvars, monomials).map_err(|e| schema(format!("{what}: {e}")))
}

fn parse_potential(raw: &RawConfig) -> Result<Potential, CliError> {
    let case = match raw.case.as_deref() {
        Some("A") => Case::A,
        Some("B") => Case::B,
        Some(other) => return Err(schema(format!("case must be \"A\" or \"B\", got {other:?}"))),
        None => return Err(schema("potential needs a case")),
    };
    let monos = raw.monomials.as_ref().ok_or_else(|| schema("potential needs monomials"))?;
    let arity = monos.first().map(|m| m.exps.len()).unwrap_or(2);
    let f = match arity {
        2 => parse_poly(monos, 2, "monomials")?,
        3 => {
            let full = parse_poly(monos, 3, "monomials")?;
            let head = Potential::new(case, PolyExpr::zero(2)).map_err(CliError::Compute)?.full();
            let mut rest = Vec::new();
            for (e, c) in full.monomials() {
                if e[0] == 0 {
                    rest.push(Monomial { exps: vec![e[1], e[2]], coef: *c });
                } else {
                    let expected = head.monomials().find(|(h, _)| *h == e).map(|(_, k)| k.to_complex());
                    if expected != Some(c.to_complex()) {
                        return Err(schema(format!(
                            "t-dependent monomial {e:?} does not match the case {case:?} normalization"
                        )));
                    }
                }
            }
            if head.monomials().any(|(h, _)| !full.monomials().any(|(e, _)| e == h)) {
                return Err(schema(format!("full potential lacks the case {case:?} t-terms")));
            }
            PolyExpr::new(2, rest).map_err(|e| schema(e.to_string()))?
        }
        n => return Err(schema(format!("exponent tuples must have 2 or 3 entries, got {n}"))),
    };
    Potential::new(case, f).map_err(|e| schema(e.to_string()))
}

fn parse_field(raw: &RawConfig) -> Result<CubicDirectionField, CliError> {
    let get = |v: &Option<Vec<RawMonomial>>, name: &str| -> Result<PolyExpr, CliError> {
        parse_poly(v.as_deref().ok_or_else(|| schema(format!("field needs entry {name:?}")))?, 2, name)
    };
    let (a, b, c, r) = (get(&raw.a, "a")?, get(&raw.b, "b")?, get(&raw.c, "c")?, get(&raw.r, "r")?);
    if a.is_zero() && b.is_zero() && c.is_zero() && r.is_zero() {
        return Err(schema("all four field coefficients are zero"));
    }
    CubicDirectionField::from_polys(a, b, c, r).map_err(|e| schema(e.to_string()))
}

pub fn parse_config(text: &str) -> Result<JobConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| schema(format!("invalid config: {e}")))?;
    let input = match raw.kind.as_str() {
        "potential" => Input::Potential(parse_potential(&raw)?),
        "field" => Input::Field(parse_field(&raw)?),
        "normal_form" => {
            let id = raw.id.ok_or_else(|| schema("normal_form needs an id"))?;
            Input::NormalForm(NormalForm::new(id, raw.m0.unwrap_or(0)).map_err(|e| schema(e.to_string()))?)
        }
        other => return Err(schema(format!("unknown kind {other:?}"))),
    };
    let default_window = match &input {
        Input::Potential(_) => [-1.0, 1.0, 0.5, 1.5],
        Input::NormalForm(_) => [-0.4, 0.4, 0.2, 0.8],
        Input::Field(_) => [-1.0, 1.0, -1.0, 1.0],
    };
    let window = raw.window.unwrap_or(default_window);
    if !window.iter().all(|v| v.is_finite()) || !(window[1] > window[0]) || !(window[3] > window[2]) {
        return Err(schema(format!("degenerate window {window:?}")));
    }
    let mut tolerances = default_tolerances();
    for (k, v) in raw.tolerances.unwrap_or_default() {
        if !tolerances.contains_key(&k) {
            return Err(schema(format!("unknown tolerance {k:?}")));
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(schema(format!("tolerance {k:?} must be positive, got {v}")));
        }
        tolerances.insert(k, v);
    }
    let grid = raw.grid.unwrap_or(32);
    if grid < 8 {
        return Err(schema(format!("grid must be at least 8, got {grid}")));
    }
    let eps = raw.eps.unwrap_or(0.05);
    if !(eps > 0.0) {
        return Err(schema(format!("eps must be positive, got {eps}")));
    }
    let center = [0.5 * (window[0] + window[1]), 0.5 * (window[2] + window[3])];
    let expect_flat = raw.expect_flat.unwrap_or(!matches!(input, Input::Field(_)));
    Ok(JobConfig {
        input,
        window,
        grid,
        samples: raw.samples.unwrap_or(100).max(1),
        leaves: raw.leaves.unwrap_or(8).max(1),
        base: raw.base.unwrap_or(center),
        eps,
        point: raw.point.unwrap_or([0.0, 0.0]),
        expect_flat,
        m0_max: raw.m0_max.unwrap_or(2),
        tolerances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solution_a_round_trip() {
        let cfg = parse_config(
            r#"{"kind":"potential","case":"A","monomials":[{"exps":[2,2],"coef":"1/4"},{"exps":[0,5],"coef":"1/60"}]}"#,
        )
        .unwrap();
        let Input::Potential(p) = cfg.input else { panic!() };
        assert_eq!(p, Potential::solution_a());
    }

    #[test]
    fn full_potential_with_t_terms() {
        let cfg = parse_config(
            r#"{"kind":"potential","case":"B","monomials":[
                {"exps":[3,0,0],"coef":"1/6"},{"exps":[1,1,1],"coef":1},
                {"exps":[0,3,0],"coef":"1/6"},{"exps":[0,0,3],"coef":[0.16666666666666666,0]}]}"#,
        )
        .unwrap();
        let Input::Potential(p) = cfg.input else { panic!() };
        assert_eq!(p.case(), Case::B);
        assert_eq!(p.f().len(), 2);
    }

    #[test]
    fn duplicate_monomial_names_exponents() {
        let err = parse_config(
            r#"{"kind":"potential","case":"A","monomials":[{"exps":[2,2],"coef":"1/4"},{"exps":[2,2],"coef":"1/3"}]}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("[2, 2]"), "{err}");
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            r#"{"kind":"surface"}"#,
            r#"{"kind":"potential","case":"C","monomials":[]}"#,
            r#"{"kind":"field","a":[],"b":[],"c":[],"r":[]}"#,
            r#"{"kind":"normal_form","id":9}"#,
            r#"{"kind":"normal_form","id":2,"tolerances":{"corollary":-1}}"#,
            r#"{"kind":"normal_form","id":2,"window":[1,0,0,1]}"#,
            r#"{"kind":"normal_form","id":2,"colour":"red"}"#,
        ] {
            assert_eq!(parse_config(text).unwrap_err().exit_code(), 2, "{text}");
        }
    }
}
