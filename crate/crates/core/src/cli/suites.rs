use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::{Input, JobConfig};
use super::report::{write_file, Invariant};
use super::svg::Svg;
use super::{CliError, Outcome};
use crate::chern::{corollary_residual, curvature, frame_data, gamma_cubic, gamma_from_definition, gamma_jet, Route};
use crate::cubic::{disc_scale, discriminant, CubicDirectionField};
use crate::frobenius::{associativity_residual, euler_data, theorem2_residual};
use crate::jets::{c, Point, C64};
use crate::singular::{
    classify_singularity, root_multiplicity, solve_f, trace_discriminant, DiscriminantTrace, NormalForm,
};
use crate::webgeo::{integrate_leaf, real_directions, symmetry_residual, thomsen_closure, LeafOptions};

/// Relative `|D|` below which a sample point is rejected as singular.
const REGULAR_SAMPLE: f64 = 1e-6;
/// Relative `|D|` required for the logarithmic-derivative identity.
const COROLLARY_SAMPLE: f64 = 1e-3;
const SYMMETRY_FLOW: f64 = 0.05;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex points whose real parts are uniform in the window and whose
/// imaginary parts are small, keeping only those with `|D| > min_disc · scale`.
pub fn sample_points(
    field: &CubicDirectionField,
    window: [f64; 4],
    n: usize,
    min_disc: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Point> {
    let [x0, x1, y0, y1] = window;
    let (ix, iy) = (0.05 * (x1 - x0), 0.05 * (y1 - y0));
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 50 * n {
        tries += 1;
        let p = Point::new(
            C64::new(rng.gen_range(x0..x1), rng.gen_range(-ix..ix)),
            C64::new(rng.gen_range(y0..y1), rng.gen_range(-iy..iy)),
        );
        let Ok(coeffs) = field.coeffs(p) else { continue };
        if discriminant(&coeffs).norm() > min_disc * disc_scale(&coeffs) {
            out.push(p);
        }
    }
    out
}

/// Evaluates `f` at every point, returning the values and the error count.
fn collect(points: &[Point], mut f: impl FnMut(Point) -> crate::Result<f64>) -> (Vec<f64>, usize) {
    let mut values = Vec::with_capacity(points.len());
    let mut failures = 0;
    for &p in points {
        match f(p) {
            Ok(v) if v.is_finite() => values.push(v),
            _ => failures += 1,
        }
    }
    (values, failures)
}

fn route_invariants(field: &CubicDirectionField, pts: &[Point], cfg: &JobConfig) -> Vec<Invariant> {
    let (g, gf) = collect(pts, |p| Ok(gamma_from_definition(field, p)?.rel_diff(&gamma_cubic(field, p)?)));
    let (e, ef) = collect(pts, |p| Ok(frame_data(field, p)?.spread()));
    let (k, kf) = collect(pts, |p| Ok(curvature(field, p, Route::Cubic)?.norm()));
    let mut out = vec![
        Invariant::max_below("gamma_routes", &g, gf, cfg.tol("gamma_routes")),
        Invariant::max_below("expressions", &e, ef, cfg.tol("expressions")),
    ];
    let mut flat = Invariant::max_below("flatness", &k, kf, cfg.tol("flatness"));
    if !cfg.expect_flat {
        flat.pass = true;
        flat.note = Some("informational: web not expected to be flat".into());
    }
    out.push(flat);
    out
}

pub fn check(cfg: &JobConfig, seed: u64) -> Result<Outcome, CliError> {
    let field = cfg.input.field()?;
    let mut r = rng(seed);
    let pts = sample_points(&field, cfg.window, cfg.samples, REGULAR_SAMPLE, &mut r);
    if pts.is_empty() {
        return Err(CliError::Usage("no regular sample points in the window".into()));
    }
    let mut inv = Vec::new();
    match &cfg.input {
        Input::Potential(pot) => {
            let (a, af) = collect(&pts, |p| Ok(associativity_residual(pot, p)?.norm()));
            inv.push(Invariant::max_below("associativity", &a, af, cfg.tol("associativity")));
            let cor_pts = sample_points(&field, cfg.window, cfg.samples, COROLLARY_SAMPLE, &mut r);
            let (cr, cf) = collect(&cor_pts, |p| corollary_residual(pot, p));
            inv.push(Invariant::max_below("corollary", &cr, cf, cfg.tol("corollary")));
            inv.extend(route_invariants(&field, &pts, cfg));
            let (t2, tf) = collect(&pts, |p| theorem2_residual(pot, p));
            inv.push(Invariant::max_below("theorem2", &t2, tf, cfg.tol("theorem2")));
            match euler_data(pot) {
                Ok(e) => {
                    let w = e.as_f64();
                    let sub = &pts[..pts.len().min(20)];
                    let (s, sf) = collect(sub, |p| {
                        symmetry_residual(&field, [w[1], w[2]], &[p], SYMMETRY_FLOW, Point::real(0.0, 0.0))
                    });
                    inv.push(Invariant::max_below("euler_symmetry", &s, sf, cfg.tol("symmetry")));
                }
                Err(e) => inv.push(Invariant::skipped("euler_symmetry", e.to_string())),
            }
        }
        Input::Field(_) => inv.extend(route_invariants(&field, &pts, cfg)),
        Input::NormalForm(form) => {
            inv.extend(route_invariants(&field, &pts, cfg));
            inv.push(form_symmetry(form, &field, &pts, cfg));
        }
    }
    Ok(Outcome { invariants: inv, artifacts: vec![], details: None })
}

fn form_symmetry(form: &NormalForm, field: &CubicDirectionField, pts: &[Point], cfg: &JobConfig) -> Invariant {
    let w = form.weights();
    let sub = &pts[..pts.len().min(20)];
    let (s, sf) = collect(sub, |p| {
        symmetry_residual(field, [w[0] as f64, w[1] as f64], &[p], SYMMETRY_FLOW, Point::real(0.0, 0.0))
    });
    Invariant::max_below("symmetry", &s, sf, cfg.tol("symmetry"))
}

fn fmt_c(z: Option<C64>) -> String {
    match z {
        Some(z) => format!("{},{}", z.re, z.im),
        None => "nan,nan".into(),
    }
}

/// CSV columns: `x,y,D_re,D_im,gamma_dx_re,gamma_dx_im,gamma_dy_re,gamma_dy_im,K_re,K_im`.
pub fn gamma(cfg: &JobConfig, out: &std::path::Path) -> Result<Outcome, CliError> {
    let field = cfg.input.field()?;
    let [x0, x1, y0, y1] = cfg.window;
    let n = cfg.grid;
    let mut csv = String::from("x,y,D_re,D_im,gamma_dx_re,gamma_dx_im,gamma_dy_re,gamma_dy_im,K_re,K_im\n");
    let mut singular = 0;
    for j in 0..n {
        for i in 0..n {
            let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
            let y = y0 + (y1 - y0) * j as f64 / (n - 1) as f64;
            let p = Point::real(x, y);
            let d = field.coeffs(p).ok().map(|k| discriminant(&k));
            let g = gamma_jet(&field, p, 1, Route::Cubic).ok();
            let k = g.as_ref().and_then(|g| g.curvature().ok()).map(|k| k.value());
            let v = g.map(|g| g.value());
            if v.is_none() {
                singular += 1;
            }
            let _ = writeln!(
                csv,
                "{x},{y},{},{},{},{}",
                fmt_c(d),
                fmt_c(v.map(|v| v.dx)),
                fmt_c(v.map(|v| v.dy)),
                fmt_c(k)
            );
        }
    }
    write_file(out, "gamma.csv", &csv)?;
    Ok(Outcome {
        invariants: vec![],
        artifacts: vec!["gamma.csv".into()],
        details: Some(json!({ "rows": n * n, "singular_points": singular })),
    })
}

/// One polyline per (seed, branch): the leaf followed both ways inside the window.
fn leaf_polylines(field: &CubicDirectionField, cfg: &JobConfig) -> (Vec<(usize, Vec<[f64; 2]>)>, usize) {
    let [x0, x1, y0, y1] = cfg.window;
    let length = 2.0 * (x1 - x0).hypot(y1 - y0);
    let opts = LeafOptions { window: Some(cfg.window), hmax: 0.01 * (x1 - x0).max(y1 - y0), ..LeafOptions::default() };
    let ymid = 0.5 * (y0 + y1);
    let mut lines = Vec::new();
    let mut real_seeds = 0;
    for k in 0..cfg.leaves {
        let seed = [x0 + (x1 - x0) * (k as f64 + 0.5) / cfg.leaves as f64, ymid];
        if real_directions(field, seed).is_err() {
            continue;
        }
        real_seeds += 1;
        for branch in 0..3 {
            let fwd = integrate_leaf(field, seed, branch, length, &opts);
            let back = integrate_leaf(field, seed, branch, -length, &opts);
            let (Ok(fwd), Ok(back)) = (fwd, back) else { continue };
            let mut pts: Vec<[f64; 2]> = back.points.into_iter().rev().collect();
            pts.extend(fwd.points.into_iter().skip(1));
            lines.push((branch, pts));
        }
    }
    (lines, real_seeds)
}

fn try_trace(field: &CubicDirectionField, cfg: &JobConfig) -> crate::Result<DiscriminantTrace> {
    trace_discriminant(field, cfg.window, cfg.grid, 1e-2 * cfg.tol("trace"))
}

pub fn leaves(cfg: &JobConfig, out: &std::path::Path) -> Result<Outcome, CliError> {
    let field = cfg.input.field()?;
    let (lines, real_seeds) = leaf_polylines(&field, cfg);
    let mut svg = Svg::new(cfg.window);
    for (b, pts) in &lines {
        svg.leaf(pts, *b);
    }
    let trace = try_trace(&field, cfg).ok();
    if let Some(t) = &trace {
        for l in &t.polylines {
            svg.discriminant(l);
        }
    }
    write_file(out, "leaves.svg", &svg.render())?;
    let count = if real_seeds == 0 {
        Invariant::failed("leaf_count", "no seed with three real directions")
    } else {
        let expected = 3 * real_seeds;
        Invariant {
            name: "leaf_count".into(),
            value: Some(lines.len() as f64),
            tol: expected as f64,
            samples: real_seeds,
            pass: lines.len() == expected,
            note: Some(format!("expected {expected} polylines")),
        }
    };
    Ok(Outcome {
        invariants: vec![count],
        artifacts: vec!["leaves.svg".into()],
        details: Some(json!({
            "seeds": cfg.leaves,
            "real_seeds": real_seeds,
            "polylines": lines.len(),
            "discriminant_polylines": trace.map(|t| t.polylines.len()),
        })),
    })
}

pub fn closure(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let field = cfg.input.field()?;
    let rep = thomsen_closure(&field, cfg.base, cfg.eps, 1e-10).map_err(CliError::Compute)?;
    let mut inv = Invariant::max_below("closure_gap", &[rep.gap], 0, cfg.tol("closure"));
    if !cfg.expect_flat {
        inv.pass = true;
        inv.note = Some(format!("informational: gap / eps^3 = {}", rep.gap / cfg.eps.powi(3)));
    }
    Ok(Outcome {
        invariants: vec![inv],
        artifacts: vec![],
        details: Some(json!({
            "base": rep.base,
            "eps": rep.eps,
            "vertices": rep.vertices,
            "gap": rep.gap,
        })),
    })
}

/// CSV columns: `polyline,x,y,D`.
pub fn discriminant_cmd(cfg: &JobConfig, out: &std::path::Path) -> Result<Outcome, CliError> {
    let field = cfg.input.field()?;
    let trace = try_trace(&field, cfg).map_err(CliError::Compute)?;
    let mut csv = String::from("polyline,x,y,D\n");
    for (k, line) in trace.polylines.iter().enumerate() {
        for p in line {
            let d = field.coeffs(Point::real(p[0], p[1])).map(|k| discriminant(&k).re).unwrap_or(f64::NAN);
            let _ = writeln!(csv, "{k},{},{},{d}", p[0], p[1]);
        }
    }
    write_file(out, "discriminant.csv", &csv)?;
    let mut svg = Svg::new(cfg.window);
    let small = JobConfig { leaves: cfg.leaves.min(6), ..cfg.clone() };
    for (b, pts) in leaf_polylines(&field, &small).0 {
        svg.leaf(&pts, b);
    }
    for l in &trace.polylines {
        svg.discriminant(l);
    }
    write_file(out, "discriminant.svg", &svg.render())?;
    let inv = if trace.is_empty() {
        Invariant::skipped("trace_residual", "empty trace: no real discriminant points in the window")
    } else {
        let n = trace.points().count();
        Invariant { samples: n, ..Invariant::max_below("trace_residual", &[trace.max_residual], 0, cfg.tol("trace")) }
    };
    Ok(Outcome {
        invariants: vec![inv],
        artifacts: vec!["discriminant.csv".into(), "discriminant.svg".into()],
        details: Some(json!({
            "empty": trace.is_empty(),
            "polylines": trace.polylines.len(),
            "seeds": trace.seeds,
            "window": trace.window,
        })),
    })
}

/// Random regular points in the catalog's working region `Re y > 0`.
pub fn catalog_points(field: &CubicDirectionField, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    sample_points(field, [-0.4, 0.4, 0.2, 0.8], n, REGULAR_SAMPLE, rng)
}

pub fn normalforms(cfg: &JobConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut r = rng(seed);
    let mut inv = Vec::new();
    for form in NormalForm::catalog(0..=cfg.m0_max) {
        let label = form.label();
        let field = match form.field() {
            Ok(f) => f,
            Err(e) => {
                inv.push(Invariant::failed(&format!("{label}: flatness"), e.to_string()));
                continue;
            }
        };
        let pts = catalog_points(&field, cfg.samples, &mut r);
        let (k, kf) = collect(&pts, |p| Ok(curvature(&field, p, Route::Cubic)?.norm()));
        inv.push(Invariant::max_below(&format!("{label}: flatness"), &k, kf, cfg.tol("flatness")));
        let mut s = form_symmetry(&form, &field, &pts, cfg);
        s.name = format!("{label}: symmetry");
        inv.push(s);
        if form.id == 2 {
            // the printed connection formula uses the normalization of p³ + Ap + B
            let (g, gf) = collect(&pts, |p| Ok(gamma_jet(&field, p, 0, Route::Depressed)?.value().norm()));
            inv.push(Invariant::max_below("form 2: gamma vanishes", &g, gf, 1e-12));
        }
    }
    for m0 in 0..=cfg.m0_max {
        match solve_f(m0, 1.0, 1e-2 * cfg.tol("fode")) {
            Ok(s) => {
                let n = s.ts.len();
                inv.push(Invariant {
                    samples: n,
                    note: s.halted_at.map(|t| format!("real solution folds at t = {t:.6}; continued through Im t > 0")),
                    ..Invariant::max_below(&format!("F (m0 = {m0}): residual"), &s.residuals, 0, cfg.tol("fode"))
                });
                let expected = 2.0 * (m0 as f64 + 3.0) / (3.0 * (m0 as f64 + 1.0));
                let init = s.values[0].norm() + (s.derivs[0] - c(expected)).norm();
                inv.push(Invariant::max_below(&format!("F (m0 = {m0}): initial data"), &[init], 0, 1e-12));
            }
            Err(e) => inv.push(Invariant::failed(&format!("F (m0 = {m0}): residual"), e.to_string())),
        }
    }
    Ok(Outcome { invariants: inv, artifacts: vec![], details: None })
}

pub fn classify(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let field = cfg.input.field()?;
    let at = Point::real(cfg.point[0], cfg.point[1]);
    let mult = root_multiplicity(&field, at, 1e-9).map_err(CliError::Compute)?;
    let (inv, details) = match classify_singularity(&field, at) {
        Ok(cl) => {
            let status = if cl.matched.is_some() { "matched" } else { "unmatched weights" };
            let matched = cl.matched.map(|m| json!({ "id": m.form.id, "m0": m.form.m0, "swapped": m.swapped }));
            (
                Invariant::max_below("weight_residual", &[cl.residual], 0, cfg.tol("classify")),
                json!({
                    "point": cfg.point,
                    "multiplicity": mult.to_string(),
                    "weights": cl.weights,
                    "status": status,
                    "matched": matched,
                }),
            )
        }
        Err(crate::Error::Unclassified { best }) => (
            Invariant {
                note: Some("not quasi-homogeneous / unclassified".into()),
                ..Invariant::max_below("weight_residual", &[best], 0, cfg.tol("classify"))
            },
            json!({ "point": cfg.point, "multiplicity": mult.to_string(), "status": "unclassified" }),
        ),
        Err(e) => return Err(CliError::Compute(e)),
    };
    Ok(Outcome { invariants: vec![inv], artifacts: vec![], details: Some(details) })
}
