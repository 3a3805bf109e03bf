//! One function per subcommand. Each returns an [`Outcome`] or a classified
//! error; writing the report is left to the caller.

use std::sync::Arc;

use dpsqueeze::domains::{self, Domain, GeneralEllipsoid, SiegelModel};
use dpsqueeze::holomaps::{self, HolomorphicMap, MaxViolationReport};
use dpsqueeze::levi::{self, WbConfig};
use dpsqueeze::optim::SearchConfig;
use dpsqueeze::schema::{DomainSpec, MapKind, MapSpec, ModelKind};
use dpsqueeze::squeeze::{self, ExtremeParams, SqueezeBoundReport, SqueezeConfig, SqueezeError};
use dpsqueeze::{wpoly, Complex64, Point, WPolynomial};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, Method, RunConfig};
use crate::report::{num, opt, CliError, Outcome};

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Validate => validate(cfg),
        Command::WbCheck => wb_check(cfg),
        Command::Levi => levi_cmd(cfg),
        Command::Bound => bound(cfg),
        Command::Sweep => sweep(cfg),
        Command::MapsVerify => maps_verify(cfg),
        Command::OrbitTrace => orbit(cfg),
        Command::HhrScan => hhr(cfg),
    }
}

fn spec(cfg: &RunConfig) -> Result<&DomainSpec, CliError> {
    cfg.domain.as_ref().ok_or_else(|| CliError::invalid(format!("{} requires --spec", cfg.command.name())))
}

fn polynomial(cfg: &RunConfig) -> Result<Arc<WPolynomial>, CliError> {
    Ok(Arc::new(WPolynomial::from_spec(&spec(cfg)?.poly)?))
}

fn ellipsoid(cfg: &RunConfig) -> Result<GeneralEllipsoid, CliError> {
    let s = spec(cfg)?;
    if s.model != ModelKind::Ellipsoid {
        return Err(CliError::invalid(format!("{} requires model \"ellipsoid\"", cfg.command.name())));
    }
    Ok(GeneralEllipsoid::new(polynomial(cfg)?, s.r)?)
}

fn check_dims(points: &[Point], dim: usize) -> Result<(), CliError> {
    match points.iter().find(|p| p.len() != dim) {
        Some(p) => Err(CliError::invalid(format!("point has dimension {}, the domain has {dim}", p.len()))),
        None => Ok(()),
    }
}

fn coord_header(dim: usize) -> Vec<String> {
    (1..=dim).flat_map(|j| [format!("z{j}_re"), format!("z{j}_im")]).collect()
}

fn coord_fields(z: &[Complex64]) -> Vec<String> {
    z.iter().flat_map(|c| [num(c.re), num(c.im)]).collect()
}

fn squeeze_config(cfg: &RunConfig) -> SqueezeConfig {
    SqueezeConfig { geometry: cfg.geometry, seed: cfg.seed, ..SqueezeConfig::default() }
}

fn validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let search = SearchConfig { seed: cfg.seed, ..SearchConfig::default() };
    let rep = wpoly::validate(&spec(cfg)?.poly, &search)?;
    let header = ["valid", "balanced", "hermitian_violations", "weight_violations", "p_min", "p_max"].map(String::from).to_vec();
    let (lo, hi) = rep.positivity.as_ref().map_or((String::new(), String::new()), |p| (num(p.minimum), num(p.maximum)));
    let row = vec![
        rep.valid.to_string(),
        rep.balanced.to_string(),
        rep.hermitian_violations.len().to_string(),
        rep.weight_violations.len().to_string(),
        lo,
        hi,
    ];
    Ok(Outcome::new(&rep, rep.valid).table(header, vec![row]))
}

fn wb_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dom = ellipsoid(cfg)?;
    let wb = WbConfig {
        exclusion_radius: cfg.exclusion,
        samples: cfg.samples,
        seed: cfg.seed,
        tol: cfg.tol,
        ..WbConfig::default()
    };
    if !(wb.exclusion_radius >= 0.0) {
        return Err(CliError::invalid(format!("--exclusion {} must be non-negative", wb.exclusion_radius)));
    }
    let rep = levi::wb_check(&dom, &wb);
    let header = vec!["radius".to_string(), "min_eig".to_string()];
    let rows = rep.trend.iter().map(|t| vec![num(t.radius), num(t.min_eig)]).collect();
    Ok(Outcome::new(&rep, rep.pass).table(header, rows))
}

#[derive(Serialize)]
struct LeviBatch {
    reports: Vec<levi::LeviReport>,
    min_eigenvalue: f64,
}

fn levi_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dom = ellipsoid(cfg)?;
    let dim = dom.poly().signature().dim();
    check_dims(&cfg.points, dim)?;
    let points = if cfg.points.is_empty() {
        domains::sample_boundary(&dom, cfg.samples, cfg.seed)
    } else {
        cfg.points.clone()
    };
    let reports = points
        .iter()
        .map(|q| levi::levi_report(&dom, q, cfg.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let min_eigenvalue = reports.iter().map(|r| r.min_eigenvalue()).fold(f64::INFINITY, f64::min);
    let mut header = coord_header(dim);
    header.extend(["min_eig", "classification"].map(String::from));
    let rows = reports
        .iter()
        .map(|r| {
            let mut row = coord_fields(&r.point);
            row.push(num(r.min_eigenvalue()));
            row.push(serde_json::to_value(r.classification).expect("enum serializes").as_str().unwrap_or_default().to_string());
            row
        })
        .collect();
    Ok(Outcome::new(&LeviBatch { reports, min_eigenvalue }, true).table(header, rows))
}

/// Evaluates the selected method at one point.
fn bound_at(cfg: &RunConfig, dom: &GeneralEllipsoid, z: &[Complex64], sq: &SqueezeConfig) -> Result<SqueezeBoundReport, SqueezeError> {
    match cfg.method {
        Method::Lemma21 => squeeze::lemma21_bound(dom, z, sq),
        Method::SliceReduced => squeeze::slice_reduced_bound(dom, z, sq),
        Method::Extreme => {
            let params = ExtremeParams { r: cfg.r, r_prime: cfg.rp, c: cfg.c };
            squeeze::extreme_point_bound(dom.poly_arc().clone(), params, z, sq)
        }
    }
}

/// Fixed CSV columns for bound reports.
fn bound_header(dim: usize) -> Vec<String> {
    let mut h = coord_header(dim);
    h.extend(["bound", "method", "lambda", "delta", "d", "r", "R"].map(String::from));
    h
}

fn bound_row(rep: &SqueezeBoundReport) -> Vec<String> {
    let mut row = coord_fields(&rep.point);
    row.extend([
        num(rep.bound),
        rep.method.as_str().to_string(),
        opt(rep.trace.lambda),
        opt(rep.trace.delta),
        opt(rep.trace.diameter),
        num(rep.trace.inner_radius),
        num(rep.trace.outer_radius),
    ]);
    row
}

/// The extreme-point construction lives on the unit ellipsoid; the other
/// methods use the spec's scale.
fn bound_domain(cfg: &RunConfig) -> Result<GeneralEllipsoid, CliError> {
    let dom = ellipsoid(cfg)?;
    if cfg.method == Method::Extreme {
        return Ok(GeneralEllipsoid::unit(dom.poly_arc().clone())?);
    }
    Ok(dom)
}

fn bound(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dom = bound_domain(cfg)?;
    let dim = dom.poly().signature().dim();
    let [z] = cfg.points.as_slice() else {
        return Err(CliError::invalid(format!("bound takes exactly one --point, got {}", cfg.points.len())));
    };
    check_dims(&cfg.points, dim)?;
    let rep = bound_at(cfg, &dom, z, &squeeze_config(cfg))?;
    let row = bound_row(&rep);
    Ok(Outcome::new(&rep, true).table(bound_header(dim), vec![row]))
}

#[derive(Serialize)]
struct SweepReport {
    reports: Vec<SqueezeBoundReport>,
    min_bound: f64,
}

/// Sample points for a sweep: interior points for the ratio methods, and
/// `(0', t)` with `t` log-spaced in `[r'/1000, r']` for the extreme method.
fn sweep_points(cfg: &RunConfig, dom: &GeneralEllipsoid) -> Vec<Point> {
    if cfg.method != Method::Extreme {
        return domains::sample_interior(dom, cfg.samples, cfg.seed);
    }
    let dim = dom.poly().signature().dim();
    let n = cfg.samples.max(1);
    (0..n)
        .map(|k| {
            let s = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
            let mut z = vec![Complex64::new(0.0, 0.0); dim];
            z[dim - 1] = Complex64::new(cfg.rp * 1e-3f64.powf(1.0 - s), 0.0);
            z
        })
        .collect()
}

fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dom = bound_domain(cfg)?;
    let dim = dom.poly().signature().dim();
    check_dims(&cfg.points, dim)?;
    let points = if cfg.points.is_empty() { sweep_points(cfg, &dom) } else { cfg.points.clone() };
    let sq = squeeze_config(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::invalid(format!("--jobs {}: {e}", cfg.jobs)))?;
    // indexed collect keeps the input order whatever the scheduling
    let results: Vec<_> = pool.install(|| points.par_iter().map(|z| bound_at(cfg, &dom, z, &sq)).collect());
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let min_bound = reports.iter().map(|r| r.bound).fold(f64::INFINITY, f64::min);
    let rows = reports.iter().map(bound_row).collect();
    Ok(Outcome::new(&SweepReport { reports, min_bound }, true).table(bound_header(dim), rows))
}

#[derive(Serialize)]
struct MapsReport {
    tol: f64,
    maps: Vec<MapCheck>,
}

#[derive(Serialize)]
struct MapCheck {
    source: &'static str,
    target: &'static str,
    pass: bool,
    report: MaxViolationReport,
}

/// Parameters used when no descriptor is given.
const DEFAULT_A: [f64; 2] = [0.3, 0.1];
const DEFAULT_THETA: f64 = 0.5;

fn maps_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let poly = polynomial(cfg)?;
    let specs: Vec<MapSpec> = match &cfg.map {
        Some(m) => vec![m.clone()],
        None => [MapKind::Identity, MapKind::Cayley, MapKind::Automorphism, MapKind::Dilation, MapKind::Normalization]
            .into_iter()
            .map(|map| MapSpec { map, a: Some(DEFAULT_A), theta: Some(DEFAULT_THETA), lambda: Some(cfg.lambda) })
            .collect(),
    };
    let d = GeneralEllipsoid::unit(poly.clone())?;
    let e = SiegelModel::new(poly.clone(), 1.0)?;
    let mut maps = Vec::with_capacity(specs.len());
    for (i, s) in specs.iter().enumerate() {
        let map = HolomorphicMap::from_spec(s, &poly)?;
        let seed = cfg.seed.wrapping_add(i as u64);
        let (source, target, report) = match s.map {
            MapKind::Identity | MapKind::Automorphism => ("D", "D", holomaps::verify_map(&map, &d, &d, cfg.samples, seed)),
            MapKind::Cayley => ("D", "E", holomaps::verify_map(&map, &d, &e, cfg.samples, seed)),
            MapKind::Dilation => ("E", "E", holomaps::verify_map(&map, &e, &e, cfg.samples, seed)),
            MapKind::Normalization => ("E", "D", holomaps::verify_map(&map, &e, &d, cfg.samples, seed)),
        };
        let pass = report.sign_disagreements == 0
            && report.boundary_residual <= cfg.tol
            && report.cayley_identity_residual.is_none_or(|r| r <= cfg.tol);
        maps.push(MapCheck { source, target, pass, report });
    }
    let pass = maps.iter().all(|m| m.pass);
    let header = ["map", "source", "target", "pass", "samples", "skipped", "sign_disagreements", "boundary_residual", "identity_residual"]
        .map(String::from)
        .to_vec();
    let rows = maps
        .iter()
        .map(|m| {
            let kind = serde_json::to_value(m.report.map).expect("enum serializes");
            vec![
                kind.as_str().unwrap_or_default().to_string(),
                m.source.to_string(),
                m.target.to_string(),
                m.pass.to_string(),
                m.report.samples.to_string(),
                m.report.skipped.to_string(),
                m.report.sign_disagreements.to_string(),
                num(m.report.boundary_residual),
                opt(m.report.cayley_identity_residual),
            ]
        })
        .collect();
    Ok(Outcome::new(&MapsReport { tol: cfg.tol, maps }, pass).table(header, rows))
}

fn orbit(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dom = ellipsoid(cfg)?;
    let dim = dom.poly().signature().dim();
    if cfg.points.is_empty() {
        return Err(CliError::invalid("orbit-trace requires --point or --points"));
    }
    check_dims(&cfg.points, dim)?;
    let trace = squeeze::orbit_trace(&dom, &cfg.points)?;
    let mut header = coord_header(dim);
    header.extend(["p_image", "defining_gap", "ratio"].map(String::from));
    let rows = trace
        .records
        .iter()
        .map(|r| {
            let mut row = coord_fields(&r.point);
            row.extend([num(r.p_image), num(r.defining_gap), num(r.ratio)]);
            row
        })
        .collect();
    Ok(Outcome::new(&trace, true).table(header, rows))
}

fn hhr(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dom = ellipsoid(cfg)?;
    let prof = squeeze::hhr_scan(&dom, &cfg.eps_grid, cfg.samples, cfg.seed, &cfg.geometry)?;
    let header = ["epsilon", "r", "R", "bound", "samples"].map(String::from).to_vec();
    let rows = prof
        .levels
        .iter()
        .map(|l| vec![num(l.epsilon), num(l.inner_radius), num(l.outer_radius), num(l.bound), l.samples.to_string()])
        .collect();
    Ok(Outcome::new(&prof, true).table(header, rows))
}
