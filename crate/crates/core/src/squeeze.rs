//! Lower bounds for the squeezing function `σ_Ω(z)`.
//!
//! Every bound is a ratio `inner / outer` where the inner radius is the
//! radius of a ball about the (possibly moved) point inside the domain and
//! the outer radius is that of a ball containing it. Points are moved only
//! by biholomorphisms, under which `σ` is invariant.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{
    self, ConeRegion, Domain, DomainError, GeneralEllipsoid, GeometryConfig, NormalizedHorosphere,
    BOUNDARY_TOL,
};
use crate::holomaps::{self, CayleyMap, MapError, NormalizationMap};
use crate::point::{self, Point};
use crate::sampling;
use crate::wpoly::{self, WPolynomial};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SqueezeError {
    #[error("point is not interior (defining value {0:e})")]
    NotInterior(f64),
    #[error("point is not in the cone region Γ(r' = {r_prime}, c = {c})")]
    ConeMembership { r_prime: f64, c: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("normalized point is not interior to ψ(Λ_λ(D(r))) (defining value {0:e}); q is too far from the extreme point")]
    OutsideRegime(f64),
    #[error("scale equation: {0}")]
    Scale(MapError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl SqueezeError {
    /// True for failures of an iterative numerical method.
    pub fn is_nonconvergence(&self) -> bool {
        matches!(
            self,
            SqueezeError::Scale(MapError::ScaleSolve(_)) | SqueezeError::Domain(DomainError::NonConvergence(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundMethod {
    #[serde(rename = "lemma21")]
    Lemma21,
    #[serde(rename = "slice-reduced")]
    SliceReduced,
    #[serde(rename = "extreme-point")]
    ExtremePoint,
}

impl BoundMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundMethod::Lemma21 => "lemma21",
            BoundMethod::SliceReduced => "slice-reduced",
            BoundMethod::ExtremePoint => "extreme-point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeConfig {
    pub geometry: GeometryConfig,
    /// Samples of the normalized slice for the uniform constant; 0 skips it.
    pub uniform_samples: usize,
    pub seed: u64,
}

impl Default for SqueezeConfig {
    fn default() -> Self {
        Self { geometry: GeometryConfig::default(), uniform_samples: 32, seed: 1 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundTrace {
    /// Point at which the radii were measured, when it differs from the input.
    #[serde(with = "point::interleaved::option", default, skip_serializing_if = "Option::is_none")]
    pub orbit_image: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter: Option<f64>,
    /// `r(z, Ω)` or the extreme-point `δ`.
    pub inner_radius: f64,
    /// `R(z, Ω)` or the diameter.
    pub outer_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_gamma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezeBoundReport {
    #[serde(with = "point::interleaved")]
    pub point: Point,
    pub bound: f64,
    pub method: BoundMethod,
    pub trace: BoundTrace,
    pub numerics: SqueezeConfig,
}

fn ratio(inner: f64, outer: f64) -> f64 {
    (inner / outer).min(1.0)
}

fn require_interior<D: Domain + ?Sized>(domain: &D, z: &[Complex64]) -> Result<(), SqueezeError> {
    let rho = domain.defining_value(z)?;
    if rho >= -BOUNDARY_TOL {
        return Err(SqueezeError::NotInterior(rho));
    }
    Ok(())
}

/// `σ_Ω(z) >= r(z, Ω) / R(z, Ω)`.
pub fn lemma21_bound(
    domain: &GeneralEllipsoid,
    z: &[Complex64],
    cfg: &SqueezeConfig,
) -> Result<SqueezeBoundReport, SqueezeError> {
    require_interior(domain, z)?;
    let inner = domains::boundary_distance(domain, z, &cfg.geometry)?.distance;
    let outer = domains::circumscribed_radius(domain, z, &cfg.geometry)?.radius;
    Ok(SqueezeBoundReport {
        point: z.to_vec(),
        bound: ratio(inner, outer),
        method: BoundMethod::Lemma21,
        trace: BoundTrace { inner_radius: inner, outer_radius: outer, ..BoundTrace::default() },
        numerics: *cfg,
    })
}

const HERMITIAN_NOTE: &str =
    "all m_j = 1: D_P is linearly equivalent to the unit ball, whose automorphisms act transitively; point moved to 0";

/// Moves `p` by automorphisms of `D_P` and applies [`lemma21_bound`] there.
///
/// The automorphism `φ_{p_n,0}` sends `p` into the slice `{z_n = 0}`. When
/// every `m_j = 1` the domain is a Hermitian ellipsoid, biholomorphic to the
/// ball by a linear map fixing 0, and the point is moved to the origin.
pub fn slice_reduced_bound(
    domain: &GeneralEllipsoid,
    p: &[Complex64],
    cfg: &SqueezeConfig,
) -> Result<SqueezeBoundReport, SqueezeError> {
    require_interior(domain, p)?;
    let poly = domain.poly();
    let hermitian = poly.signature().m().iter().all(|&m| m == 1) && domain.scale() == 1.0;
    let (image, note) = if hermitian {
        if !poly.is_balanced() {
            return Err(MapError::Unbalanced.into());
        }
        (vec![Complex64::new(0.0, 0.0); p.len()], Some(HERMITIAN_NOTE.to_string()))
    } else {
        (holomaps::orbit_to_slice(poly, p)?, None)
    };
    let inner = lemma21_bound(domain, &image, cfg)?;
    let mut trace = inner.trace;
    trace.orbit_image = Some(image);
    trace.notes.extend(note);
    Ok(SqueezeBoundReport {
        point: p.to_vec(),
        bound: inner.bound,
        method: BoundMethod::SliceReduced,
        trace,
        numerics: *cfg,
    })
}

/// Parameters of the extreme-point construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeParams {
    /// `D(r) ⊂ Ω` is the horosphere ball assumed inside the domain.
    pub r: f64,
    pub r_prime: f64,
    pub c: f64,
}

const DIAMETER_NOTE: &str = "d is the diameter of D_P; R(G_λ(q), D_P) would give a sharper outer radius";

/// `σ_Ω(q) >= δ_q / d` for `q` in the cone `Γ(r', c)` of the Siegel model,
/// where `δ_q` is the distance from `G_λ(q)` to `∂ψ(Λ_λ(D(r)))` and `d` the
/// diameter of `D_P`.
pub fn extreme_point_bound(
    poly: Arc<WPolynomial>,
    params: ExtremeParams,
    q: &[Complex64],
    cfg: &SqueezeConfig,
) -> Result<SqueezeBoundReport, SqueezeError> {
    let ExtremeParams { r, r_prime, c } = params;
    if !(r_prime > 0.0 && r_prime < r && r <= 1.0) {
        return Err(SqueezeError::InvalidParameters(format!("need 0 < r' < r <= 1, got r = {r}, r' = {r_prime}")));
    }
    if !poly.is_balanced() {
        return Err(MapError::Unbalanced.into());
    }
    let cone = ConeRegion::new(poly.clone(), r_prime, c)?;
    if !cone.contains(q)? {
        return Err(SqueezeError::ConeMembership { r_prime, c });
    }
    let scale = holomaps::solve_normalization_scale(poly.signature(), q).map_err(SqueezeError::Scale)?;
    let lambda = scale.lambda;
    let w = NormalizationMap::new(&poly, lambda)?.apply(q)?;
    let target = NormalizedHorosphere::new(poly.clone(), r, lambda)?;
    let rho = target.defining_value(&w)?;
    if rho >= -BOUNDARY_TOL {
        return Err(SqueezeError::OutsideRegime(rho));
    }
    let delta = domains::boundary_distance(&target, &w, &cfg.geometry)?.distance;
    let unit = GeneralEllipsoid::unit(poly.clone())?;
    let d = domains::diameter(&unit, &cfg.geometry)?.diameter;
    let uniform_gamma0 = if cfg.uniform_samples > 0 {
        Some(uniform_gamma0(&poly, params, d, cfg)?)
    } else {
        None
    };
    Ok(SqueezeBoundReport {
        point: q.to_vec(),
        bound: ratio(delta, d),
        method: BoundMethod::ExtremePoint,
        trace: BoundTrace {
            orbit_image: Some(w.clone()),
            lambda: Some(lambda),
            delta: Some(delta),
            diameter: Some(d),
            inner_radius: delta,
            outer_radius: d,
            uniform_gamma0,
            notes: vec![DIAMETER_NOTE.into()],
        },
        numerics: *cfg,
    })
}

/// `(dist(Σ, ∂D^r) / 2) / d` with `Σ = ψ(Σ̃)` and
/// `Σ̃ = {‖z‖ = 1} ∩ E^{r'} ∩ {|Im z_n| <= c Re z_n}`, sampled by rejection.
fn uniform_gamma0(poly: &Arc<WPolynomial>, params: ExtremeParams, d: f64, cfg: &SqueezeConfig) -> Result<f64, SqueezeError> {
    let sig = poly.signature();
    let dim = sig.dim();
    let cayley = CayleyMap::new(poly)?;
    let target = GeneralEllipsoid::new(poly.clone(), params.r)?;
    let mut rng = sampling::substream(cfg.seed, 7);
    let mut dist = f64::INFINITY;
    let mut found = 0;
    let mut attempts = 0;
    while found < cfg.uniform_samples && attempts < 10_000 * cfg.uniform_samples {
        attempts += 1;
        let mut z = sampling::unit_complex_sphere(&mut rng, dim);
        let zn = &mut z[dim - 1];
        if zn.re < 0.0 {
            zn.re = -zn.re;
        }
        let zn = *zn;
        let in_siegel = poly.eval_unchecked(&z[..dim - 1]) / params.r_prime < 2.0 * zn.re;
        if !in_siegel || zn.im.abs() > params.c * zn.re {
            continue;
        }
        let s = cayley.apply(&z)?;
        if target.rho(&s) >= -BOUNDARY_TOL {
            continue;
        }
        found += 1;
        dist = dist.min(domains::boundary_distance(&target, &s, &cfg.geometry)?.distance);
    }
    if found == 0 {
        return Err(DomainError::NonConvergence("sampling of the normalized slice").into());
    }
    Ok(dist / 2.0 / d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    #[serde(with = "point::interleaved")]
    pub point: Point,
    /// `b_j = φ_{a_n,0}(a)`, in the slice `{z_n = 0}`.
    #[serde(with = "point::interleaved")]
    pub slice_image: Point,
    /// `P(b_j')`, evaluated directly.
    pub p_image: f64,
    /// `P(a') / (1 - |a_n|^2)`.
    pub p_identity: f64,
    /// `|P(b_j')(1 - |a_n|^2) - P(a')|`
    pub identity_residual: f64,
    /// `1 - |a_n|^2 - P(a')`, comparable to the distance to the boundary.
    pub defining_gap: f64,
    /// `P(a') / (1 - |a_n|^2 - P(a'))`
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitCase {
    /// Ratio bounded: `P(b_j)` stays away from 1.
    #[serde(rename = "case1")]
    Case1,
    /// Ratio unbounded: `P(b_j) → 1`.
    #[serde(rename = "case2")]
    Case2,
}

/// Ratio above which an increasing tail is declared unbounded.
pub const CASE2_RATIO: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub records: Vec<OrbitRecord>,
    pub case: OrbitCase,
    pub rule: String,
}

/// Slice images of a sequence approaching `(0', e^{iθ})` and the
/// tangential/nontangential classification of its tail.
pub fn orbit_trace(domain: &GeneralEllipsoid, points: &[Point]) -> Result<OrbitTrace, SqueezeError> {
    let poly = domain.poly();
    let mut records = Vec::with_capacity(points.len());
    for a in points {
        require_interior(domain, a)?;
        let n1 = a.len() - 1;
        let b = holomaps::orbit_to_slice(poly, a)?;
        let pa = poly.eval_unchecked(&a[..n1]);
        let rest = 1.0 - a[n1].norm_sqr();
        let pb = poly.eval_unchecked(&b[..n1]);
        let gap = rest - pa;
        records.push(OrbitRecord {
            point: a.clone(),
            slice_image: b,
            p_image: pb,
            p_identity: pa / rest,
            identity_residual: (pb * rest - pa).abs(),
            defining_gap: gap,
            ratio: pa / gap,
        });
    }
    let case = classify(&records);
    Ok(OrbitTrace {
        records,
        case,
        rule: format!(
            "case2 iff the last ratio exceeds {CASE2_RATIO:e} and ratios are non-decreasing over the trailing half"
        ),
    })
}

fn classify(records: &[OrbitRecord]) -> OrbitCase {
    let Some(last) = records.last() else { return OrbitCase::Case1 };
    let tail = &records[records.len() / 2..];
    let increasing = tail.windows(2).all(|w| w[1].ratio >= w[0].ratio);
    if last.ratio > CASE2_RATIO && increasing {
        OrbitCase::Case2
    } else {
        OrbitCase::Case1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhrLevel {
    pub epsilon: f64,
    /// `r(K_ε, Ω)` over all points sampled at this or larger levels.
    pub inner_radius: f64,
    /// `R(K_ε, Ω)`, likewise.
    pub outer_radius: f64,
    pub bound: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhrProfile {
    /// Levels in decreasing `ε`.
    pub levels: Vec<HhrLevel>,
    pub samples_per_level: usize,
    pub seed: u64,
    pub note: String,
}

pub const HHR_NOTE: &str = "bounds hold on K_eps and, through the slice reduction, on its automorphism orbit; \
they degenerate as eps -> 0, and a uniform bound on all of D_P additionally relies on the squeezing function \
tending to 1 at strongly pseudoconvex boundary points, which is cited and not computed";

/// `r(K_ε, Ω) / R(K_ε, Ω)` for `K_ε = {(z', 0) : P(z') <= 1 - ε}`.
///
/// Levels are processed in decreasing `ε`; since `K_ε` grows as `ε`
/// shrinks, each level keeps the extremes of all earlier samples. Every
/// level samples 0, points on `P = 1 - ε` and points inside.
pub fn hhr_scan(
    domain: &GeneralEllipsoid,
    eps_grid: &[f64],
    samples_per_level: usize,
    seed: u64,
    cfg: &GeometryConfig,
) -> Result<HhrProfile, SqueezeError> {
    if !domain.poly().is_balanced() {
        return Err(MapError::Unbalanced.into());
    }
    if let Some(e) = eps_grid.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(SqueezeError::InvalidParameters(format!("ε = {e} must lie in (0, 1]")));
    }
    let mut grid = eps_grid.to_vec();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();

    let poly = domain.poly();
    let sig = poly.signature();
    let dim = sig.dim();
    let mut inner = f64::INFINITY;
    let mut outer: f64 = 0.0;
    let mut levels = Vec::with_capacity(grid.len());
    for (i, &eps) in grid.iter().enumerate() {
        let level = 1.0 - eps;
        let mut rng = sampling::substream(seed, i as u64);
        let mut pts = vec![vec![Complex64::new(0.0, 0.0); dim]];
        for k in 0..samples_per_level {
            let dir = sampling::weighted_direction(sig, &mut rng);
            let s_max = level / poly.eval_unchecked(&dir);
            let s = if k % 2 == 0 { s_max } else { s_max * rand::Rng::random::<f64>(&mut rng) };
            let mut z = wpoly::scale_point_unchecked(sig, s, &dir);
            z.push(Complex64::new(0.0, 0.0));
            pts.push(z);
        }
        let mut used = 0;
        for z in &pts {
            // points of K_ε on ∂D_P (only at ε = 0) contribute nothing usable
            if domain.rho(z) >= -BOUNDARY_TOL {
                continue;
            }
            used += 1;
            inner = inner.min(domains::boundary_distance(domain, z, cfg)?.distance);
            outer = outer.max(domains::circumscribed_radius(domain, z, cfg)?.radius);
        }
        levels.push(HhrLevel { epsilon: eps, inner_radius: inner, outer_radius: outer, bound: ratio(inner, outer), samples: used });
    }
    Ok(HhrProfile { levels, samples_per_level, seed, note: HHR_NOTE.into() })
}
