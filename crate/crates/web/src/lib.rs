//! Browser bindings. Each export takes plain numbers and returns a JSON
//! string the page plots; the same functions are callable natively.

use std::sync::Arc;

use dpsqueeze::domains::GeneralEllipsoid;
use dpsqueeze::levi::{self, LEVI_TOL};
use dpsqueeze::squeeze::{self, ExtremeParams, OrbitCase, SqueezeConfig};
use dpsqueeze::{fixtures, Complex64, Point, WPolynomial};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// `|z_1|^{2m}` in two variables.
fn power(m: u32) -> Result<WPolynomial, String> {
    if !(1..=8).contains(&m) {
        return Err(format!("m = {m} must lie in 1..=8"));
    }
    WPolynomial::from_terms(&[m], &[(&[m], &[m], Complex64::new(1.0, 0.0))]).map_err(|e| e.to_string())
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let n = count.max(2);
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub bound: f64,
    pub delta: f64,
    pub lambda: f64,
}

/// Extreme-point bound at `(0, t)` for `t` log-spaced in `[r'/1000, r']`.
pub fn extreme_curve(m: u32, r: f64, rp: f64, c: f64, count: usize) -> Result<Vec<CurvePoint>, String> {
    let poly = Arc::new(power(m)?);
    let params = ExtremeParams { r, r_prime: rp, c };
    let cfg = SqueezeConfig { uniform_samples: 0, ..SqueezeConfig::default() };
    log_grid(rp * 1e-3, rp, count)
        .into_iter()
        .map(|t| {
            let q = [Complex64::new(0.0, 0.0), Complex64::new(t, 0.0)];
            let rep = squeeze::extreme_point_bound(poly.clone(), params, &q, &cfg).map_err(|e| e.to_string())?;
            Ok(CurvePoint {
                t,
                bound: rep.bound,
                delta: rep.trace.delta.unwrap_or(f64::NAN),
                lambda: rep.trace.lambda.unwrap_or(f64::NAN),
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct LeviPoint {
    pub s: f64,
    pub min_eig: f64,
}

/// Smallest restricted Levi eigenvalue over the circle `|z_1| = s` of the
/// boundary of `|z_2|^2 + |z_1|^{2m} + κ|z_1|^2 Re(z_1^{2m-2}) < 1`.
pub fn levi_profile(m: u32, kappa: f64, count: usize) -> Result<Vec<LeviPoint>, String> {
    if !(2..=8).contains(&m) || !(kappa.abs() < 1.0) {
        return Err(format!("need 2 <= m <= 8 and |κ| < 1, got m = {m}, κ = {kappa}"));
    }
    let poly = fixtures::perturbed_power(m, kappa);
    let dom = GeneralEllipsoid::unit(Arc::new(poly.clone())).map_err(|e| e.to_string())?;
    let s_max = 0.999 * (1.0 + kappa.abs()).powf(-1.0 / (2 * m) as f64);
    let angles = 64;
    log_grid(1e-3, s_max, count)
        .into_iter()
        .map(|s| {
            let mut min_eig = f64::INFINITY;
            for k in 0..angles {
                let z1 = Complex64::from_polar(s, std::f64::consts::TAU * k as f64 / angles as f64);
                let p = poly.evaluate(&[z1]).map_err(|e| e.to_string())?;
                let q = [z1, Complex64::new((1.0 - p).sqrt(), 0.0)];
                let rep = levi::levi_report(&dom, &q, LEVI_TOL).map_err(|e| e.to_string())?;
                min_eig = min_eig.min(rep.min_eigenvalue());
            }
            Ok(LeviPoint { s, min_eig })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct OrbitSequence {
    pub j: Vec<f64>,
    pub ratio: Vec<f64>,
    pub p_image: Vec<f64>,
    pub case: OrbitCase,
    pub rule: String,
}

/// Sequence `a_j → (0, 1)` in `|z_2|^2 + |z_1|^{2m} < 1` with
/// `a_{j,2} = 1 - 1/j` and `P(a_j') = (1 - j^{-s})(1 - |a_{j,2}|^2)`.
/// `s = 0` is the radial approach; larger `s` hugs the boundary.
pub fn orbit_sequence(m: u32, s: f64, count: usize) -> Result<OrbitSequence, String> {
    if !(0.0..=1.0).contains(&s) {
        return Err(format!("s = {s} must lie in [0, 1]"));
    }
    let dom = GeneralEllipsoid::unit(Arc::new(power(m)?)).map_err(|e| e.to_string())?;
    let js: Vec<f64> = (2..count.max(3) + 2).map(|j| j as f64).collect();
    let points: Vec<Point> = js
        .iter()
        .map(|&j| {
            let an = 1.0 - 1.0 / j;
            let p = (1.0 - j.powf(-s)) * (1.0 - an * an);
            vec![Complex64::new(p.powf(0.5 / m as f64), 0.0), Complex64::new(an, 0.0)]
        })
        .collect();
    let trace = squeeze::orbit_trace(&dom, &points).map_err(|e| e.to_string())?;
    Ok(OrbitSequence {
        j: js,
        ratio: trace.records.iter().map(|r| r.ratio).collect(),
        p_image: trace.records.iter().map(|r| r.p_image).collect(),
        case: trace.case,
        rule: trace.rule,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = extremeCurve)]
pub fn extreme_curve_js(m: u32, r: f64, rp: f64, c: f64, count: usize) -> Result<String, JsError> {
    to_js(extreme_curve(m, r, rp, c, count))
}

#[wasm_bindgen(js_name = leviProfile)]
pub fn levi_profile_js(m: u32, kappa: f64, count: usize) -> Result<String, JsError> {
    to_js(levi_profile(m, kappa, count))
}

#[wasm_bindgen(js_name = orbitSequence)]
pub fn orbit_sequence_js(m: u32, s: f64, count: usize) -> Result<String, JsError> {
    to_js(orbit_sequence(m, s, count))
}
