//! The model domains and the metric quantities the squeezing bounds need.
//!
//! | type | defining function ρ (domain = {ρ < 0}) |
//! |------|-----------------------------------------|
//! | [`GeneralEllipsoid`] | `|z_n|^2 + P(z')/r - 1` |
//! | [`SiegelModel`] | `P(z')/r - 2 Re z_n` |
//! | [`HorosphereBall`] | `λ|z_n|^2 + P(z') - 2r Re z_n` |
//! | [`NormalizedHorosphere`] | `λ|1 - z_n|^2 + 2P(z') + 2r|z_n|^2 - 2r` |
//!
//! Distances and radii are numerical estimates from multi-start local
//! search; every returned boundary point is feasible to `BOUNDARY_TOL`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optim::{self, Sphere, SpherePair};
use crate::point::{self, Point};
use crate::sampling;
use crate::wpoly::{self, PolyError, WPolynomial};

/// Points with `|ρ| <= BOUNDARY_TOL` count as boundary points.
pub const BOUNDARY_TOL: f64 = 1e-10;

pub const ESTIMATE_LABEL: &str = "numerical estimate";

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DomainError {
    #[error("expected a point of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scale r = {0} must lie in (0, 1]")]
    InvalidScale(f64),
    #[error("dilation λ = {0} must be positive")]
    InvalidLambda(f64),
    #[error("cone aperture c = {0} must be positive")]
    InvalidAperture(f64),
    #[error("point lies outside the domain (defining value {0:e})")]
    Outside(f64),
    #[error("the domain is unbounded")]
    Unbounded,
    #[error("this construction requires a balanced polynomial")]
    Unbalanced,
    #[error("{0} did not converge")]
    NonConvergence(&'static str),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub trait Domain {
    fn poly(&self) -> &WPolynomial;

    fn dim(&self) -> usize {
        self.poly().signature().dim()
    }

    fn defining_value(&self, z: &[Complex64]) -> Result<f64, DomainError> {
        check_dim(self.dim(), z)?;
        Ok(self.rho(z))
    }

    fn contains(&self, z: &[Complex64]) -> Result<bool, DomainError> {
        Ok(self.defining_value(z)? < 0.0)
    }

    /// Wirtinger gradient `∂ρ/∂z_j`.
    fn defining_gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>, DomainError> {
        check_dim(self.dim(), z)?;
        Ok(self.rho_gradient(z))
    }

    #[doc(hidden)]
    fn rho(&self, z: &[Complex64]) -> f64;
    #[doc(hidden)]
    fn rho_gradient(&self, z: &[Complex64]) -> Vec<Complex64>;
}

/// A domain whose closure lies in the ball of radius `reach()` about 0.
pub trait BoundedDomain: Domain {
    fn reach(&self) -> f64;
}

fn check_dim(n: usize, z: &[Complex64]) -> Result<(), DomainError> {
    if z.len() != n {
        return Err(DomainError::DimensionMismatch { expected: n, found: z.len() });
    }
    Ok(())
}

fn check_scale(r: f64) -> Result<(), DomainError> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(DomainError::InvalidScale(r))
    }
}

fn split(z: &[Complex64]) -> (&[Complex64], Complex64) {
    let (zp, zn) = z.split_at(z.len() - 1);
    (zp, zn[0])
}

/// `D_P` (r = 1) or `D^r = {|z_n|^2 + P(z')/r < 1}`.
#[derive(Debug, Clone)]
pub struct GeneralEllipsoid {
    poly: Arc<WPolynomial>,
    r: f64,
    /// `(r / c1)^{1/(2 m_j)}` bounds `|z_j|` on the closure.
    coord_bounds: Vec<f64>,
}

impl GeneralEllipsoid {
    pub fn new(poly: Arc<WPolynomial>, r: f64) -> Result<Self, DomainError> {
        check_scale(r)?;
        let c1 = poly.positive_comparability()?.c1;
        let sig = poly.signature();
        let coord_bounds = (0..sig.inner_dim()).map(|j| (r / c1).powf(sig.exponent(j))).collect();
        Ok(Self { poly, r, coord_bounds })
    }

    pub fn unit(poly: Arc<WPolynomial>) -> Result<Self, DomainError> {
        Self::new(poly, 1.0)
    }

    pub fn scale(&self) -> f64 {
        self.r
    }

    pub fn poly_arc(&self) -> &Arc<WPolynomial> {
        &self.poly
    }

    /// `‖z‖ + 1 + Σ_j (r/c1)^{1/(2 m_j)}`, an upper bound for `R(z, Ω)`.
    pub fn analytic_radius_bound(&self, z: &[Complex64]) -> f64 {
        point::norm(z) + 1.0 + self.coord_bounds.iter().sum::<f64>()
    }

    /// Moves `u != 0` along its weighted ray `t ↦ (t^{1/2m_j} u_j, t^{1/2} u_n)`
    /// onto the boundary. Exact: ρ is affine in `t` along these rays.
    pub fn retract_to_boundary(&self, u: &[Complex64]) -> Point {
        let (up, un) = split(u);
        let s = 1.0 / (un.norm_sqr() + self.poly.eval_unchecked(up) / self.r);
        weighted_scale(&self.poly, s, u)
    }
}

/// Full-point weighted scaling: `z_j ↦ t^{1/2m_j} z_j`, `z_n ↦ t^{1/2} z_n`.
pub(crate) fn weighted_scale(poly: &WPolynomial, t: f64, z: &[Complex64]) -> Point {
    let (zp, zn) = split(z);
    let mut out = wpoly::scale_point_unchecked(poly.signature(), t, zp);
    out.push(zn * t.sqrt());
    out
}

impl Domain for GeneralEllipsoid {
    fn poly(&self) -> &WPolynomial {
        &self.poly
    }
    fn rho(&self, z: &[Complex64]) -> f64 {
        let (zp, zn) = split(z);
        zn.norm_sqr() + self.poly.eval_unchecked(zp) / self.r - 1.0
    }
    fn rho_gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let (zp, zn) = split(z);
        let mut g: Vec<Complex64> = self.poly.grad_unchecked(zp).into_iter().map(|v| v / self.r).collect();
        g.push(zn.conj());
        g
    }
}

impl BoundedDomain for GeneralEllipsoid {
    fn reach(&self) -> f64 {
        (1.0 + self.coord_bounds.iter().map(|b| b * b).sum::<f64>()).sqrt()
    }
}

/// `E_P` (r = 1) or `E^r = {P(z')/r < 2 Re z_n}`. Unbounded.
#[derive(Debug, Clone)]
pub struct SiegelModel {
    poly: Arc<WPolynomial>,
    r: f64,
}

impl SiegelModel {
    pub fn new(poly: Arc<WPolynomial>, r: f64) -> Result<Self, DomainError> {
        check_scale(r)?;
        Ok(Self { poly, r })
    }

    pub fn scale(&self) -> f64 {
        self.r
    }
}

impl Domain for SiegelModel {
    fn poly(&self) -> &WPolynomial {
        &self.poly
    }
    fn rho(&self, z: &[Complex64]) -> f64 {
        let (zp, zn) = split(z);
        self.poly.eval_unchecked(zp) / self.r - 2.0 * zn.re
    }
    fn rho_gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let (zp, _) = split(z);
        let mut g: Vec<Complex64> = self.poly.grad_unchecked(zp).into_iter().map(|v| v / self.r).collect();
        g.push(Complex64::new(-1.0, 0.0));
        g
    }
}

/// `D(r) = {|z_n - r|^2 + P(z') < r^2}` and its dilates
/// `Λ_λ(D(r)) = {λ|z_n|^2 + P(z') < 2r Re z_n}`.
#[derive(Debug, Clone)]
pub struct HorosphereBall {
    poly: Arc<WPolynomial>,
    r: f64,
    lambda: f64,
}

impl HorosphereBall {
    pub fn new(poly: Arc<WPolynomial>, r: f64) -> Result<Self, DomainError> {
        Self::with_dilation(poly, r, 1.0)
    }

    pub fn with_dilation(poly: Arc<WPolynomial>, r: f64, lambda: f64) -> Result<Self, DomainError> {
        check_scale(r)?;
        if !(lambda > 0.0) {
            return Err(DomainError::InvalidLambda(lambda));
        }
        Ok(Self { poly, r, lambda })
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `|z_n - r|^2 + P(z') - r^2`; equals `defining_value` at λ = 1.
    pub fn centered_value(&self, z: &[Complex64]) -> Result<f64, DomainError> {
        check_dim(self.dim(), z)?;
        let (zp, zn) = split(z);
        Ok((zn - self.r).norm_sqr() + self.poly.eval_unchecked(zp) - self.r * self.r)
    }
}

impl Domain for HorosphereBall {
    fn poly(&self) -> &WPolynomial {
        &self.poly
    }
    fn rho(&self, z: &[Complex64]) -> f64 {
        let (zp, zn) = split(z);
        self.lambda * zn.norm_sqr() + self.poly.eval_unchecked(zp) - 2.0 * self.r * zn.re
    }
    fn rho_gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let (zp, zn) = split(z);
        let mut g = self.poly.grad_unchecked(zp);
        g.push(self.lambda * zn.conj() - self.r);
        g
    }
}

/// `Γ(r', c) = D(r') ∩ {|Im z_n| <= c |Re z_n|}` (closed cone condition).
#[derive(Debug, Clone)]
pub struct ConeRegion {
    ball: HorosphereBall,
    c: f64,
}

impl ConeRegion {
    pub fn new(poly: Arc<WPolynomial>, r_prime: f64, c: f64) -> Result<Self, DomainError> {
        if !(c > 0.0) {
            return Err(DomainError::InvalidAperture(c));
        }
        Ok(Self { ball: HorosphereBall::new(poly, r_prime)?, c })
    }

    pub fn aperture(&self) -> f64 {
        self.c
    }

    pub fn radius(&self) -> f64 {
        self.ball.radius()
    }

    pub fn in_cone(&self, z: &[Complex64]) -> Result<bool, DomainError> {
        check_dim(self.ball.dim(), z)?;
        let zn = z[z.len() - 1];
        Ok(zn.im.abs() <= self.c * zn.re.abs())
    }

    pub fn contains(&self, z: &[Complex64]) -> Result<bool, DomainError> {
        Ok(self.ball.contains(z)? && self.in_cone(z)?)
    }
}

/// `ψ(Λ_λ(D(r)))`, the horosphere after normalization, written with the
/// denominators of `ψ` cleared:
/// `λ|1 - z_n|^2 + 2P(z') + 2r|z_n|^2 - 2r < 0`.
///
/// This is `|1 + z_n|^2` times the pulled-back function
/// `λ|ψ(z)_n|^2 + P(ψ(z)') - 2r Re ψ(z)_n`, valid for balanced `P`.
#[derive(Debug, Clone)]
pub struct NormalizedHorosphere {
    poly: Arc<WPolynomial>,
    r: f64,
    lambda: f64,
    reach: f64,
}

impl NormalizedHorosphere {
    pub fn new(poly: Arc<WPolynomial>, r: f64, lambda: f64) -> Result<Self, DomainError> {
        check_scale(r)?;
        if !(lambda > 0.0) {
            return Err(DomainError::InvalidLambda(lambda));
        }
        if !poly.is_balanced() {
            return Err(DomainError::Unbalanced);
        }
        // contained in D^r since λ|1 - z_n|^2 >= 0
        let reach = GeneralEllipsoid::new(poly.clone(), r)?.reach();
        Ok(Self { poly, r, lambda, reach })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Domain for NormalizedHorosphere {
    fn poly(&self) -> &WPolynomial {
        &self.poly
    }
    fn rho(&self, z: &[Complex64]) -> f64 {
        let (zp, zn) = split(z);
        self.lambda * (1.0 - zn).norm_sqr() + 2.0 * self.poly.eval_unchecked(zp) + 2.0 * self.r * zn.norm_sqr()
            - 2.0 * self.r
    }
    fn rho_gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let (zp, zn) = split(z);
        let mut g: Vec<Complex64> = self.poly.grad_unchecked(zp).into_iter().map(|v| 2.0 * v).collect();
        g.push(-self.lambda * (1.0 - zn.conj()) + 2.0 * self.r * zn.conj());
        g
    }
}

impl BoundedDomain for NormalizedHorosphere {
    fn reach(&self) -> f64 {
        self.reach
    }
}

/// `K ⊂ Λ_λ(D(r))`, i.e. `λ|z_n|^2 + P(z') < 2r Re z_n` for every point.
pub fn family_covers(
    poly: Arc<WPolynomial>,
    lambda: f64,
    r: f64,
    points: &[Point],
) -> Result<bool, DomainError> {
    let dom = HorosphereBall::with_dilation(poly, r, lambda)?;
    for p in points {
        if !dom.contains(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Search budget for distances, radii and diameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub seed: u64,
    /// Random seed rays in addition to the ± real coordinate axes.
    pub random_directions: usize,
    /// Best seeds refined by local descent.
    pub refine: usize,
    /// Marching steps across the domain when shooting a ray.
    pub march_steps: usize,
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            random_directions: 48,
            refine: 6,
            march_steps: 256,
            max_iter: 400,
            grad_tol: 1e-11,
        }
    }
}

/// `r(z, Ω)`: nearest boundary point found and its distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub distance: f64,
    #[serde(with = "point::interleaved")]
    pub nearest: Point,
    /// `|ρ|` at the nearest point.
    pub residual: f64,
    pub seeds: usize,
    pub refined: usize,
    /// Spread of the refined local minima.
    pub seed_spread: f64,
    /// Set when the query point was itself on the boundary.
    pub on_boundary: bool,
    pub label: String,
}

fn axis_and_random_directions(dim: usize, extra: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut dirs = Vec::with_capacity(2 * dim + extra);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            dirs.push(e);
        }
    }
    let mut rng = sampling::seeded(seed);
    dirs.extend((0..extra).map(|_| sampling::unit_sphere(&mut rng, dim)));
    dirs
}

struct RayShooter<'a, D: BoundedDomain + ?Sized> {
    domain: &'a D,
    origin: Vec<f64>,
    extent: f64,
    steps: usize,
}

impl<D: BoundedDomain + ?Sized> RayShooter<'_, D> {
    fn rho_at(&self, t: f64, u: &[f64]) -> f64 {
        let w: Vec<f64> = self.origin.iter().zip(u).map(|(o, d)| o + t * d).collect();
        self.domain.rho(&point::from_real(&w))
    }

    /// First `t > 0` with `ρ(origin + t u) >= 0`, bracketed by marching and
    /// refined by bisection. Returns the outer bracket end.
    fn first_exit(&self, u: &[f64]) -> Option<f64> {
        let h = self.extent / self.steps as f64;
        let mut lo = 0.0;
        let mut hi = None;
        for k in 1..=self.steps + 1 {
            let t = k as f64 * h;
            if self.rho_at(t, u) >= 0.0 {
                hi = Some(t);
                break;
            }
            lo = t;
        }
        let mut hi = hi?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.rho_at(mid, u) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// Exit time and its gradient in `u` by implicit differentiation:
    /// `∂t/∂u = -t ∇ρ(w) / (∇ρ(w)·u)`.
    fn exit_with_gradient(&self, u: &[f64]) -> Option<(f64, Vec<f64>)> {
        let t = self.first_exit(u)?;
        let w: Vec<f64> = self.origin.iter().zip(u).map(|(o, d)| o + t * d).collect();
        let g = point::to_real(
            &self
                .domain
                .rho_gradient(&point::from_real(&w))
                .into_iter()
                .map(|c| 2.0 * c.conj())
                .collect::<Vec<_>>(),
        );
        let gu: f64 = g.iter().zip(u).map(|(a, b)| a * b).sum();
        if !(gu > 0.0) {
            return None;
        }
        Some((t, g.into_iter().map(|gi| -t * gi / gu).collect()))
    }
}

/// `r(z, Ω) = sup{r: B(z; r) ⊂ Ω}`.
///
/// The exit time `t(u)` of the ray from `z` in direction `u` satisfies
/// `t(u) >= r(z, Ω)` with equality towards a nearest boundary point, so the
/// distance is the minimum of `t` over the unit sphere. Seeds are the ± real
/// axes plus random rays; the best ones are refined by descent on `t(u)`.
pub fn boundary_distance<D: BoundedDomain + ?Sized>(
    domain: &D,
    z: &[Complex64],
    cfg: &GeometryConfig,
) -> Result<DistanceEstimate, DomainError> {
    let rho = domain.defining_value(z)?;
    if rho.abs() <= BOUNDARY_TOL {
        return Ok(DistanceEstimate {
            distance: 0.0,
            nearest: z.to_vec(),
            residual: rho.abs(),
            seeds: 0,
            refined: 0,
            seed_spread: 0.0,
            on_boundary: true,
            label: ESTIMATE_LABEL.into(),
        });
    }
    if rho > 0.0 {
        return Err(DomainError::Outside(rho));
    }
    let origin = point::to_real(z);
    let shooter = RayShooter {
        domain,
        extent: point::norm(z) + domain.reach(),
        origin: origin.clone(),
        steps: cfg.march_steps.max(8),
    };
    let dirs = axis_and_random_directions(origin.len(), cfg.random_directions, cfg.seed);
    let seeds = dirs.len();
    let mut shots: Vec<(f64, Vec<f64>)> =
        dirs.into_iter().filter_map(|u| shooter.first_exit(&u).map(|t| (t, u))).collect();
    shots.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut refined = Vec::new();
    for (_, u) in shots.into_iter().take(cfg.refine.max(1)) {
        if let Some(res) =
            optim::descend(&Sphere, |x| shooter.exit_with_gradient(x), u, cfg.max_iter, cfg.grad_tol)
        {
            refined.push(res);
        }
    }
    let best = refined
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or(DomainError::NonConvergence("boundary distance search"))?;
    let spread = refined.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max) - best.value;
    let w: Vec<f64> = origin.iter().zip(&best.x).map(|(o, d)| o + best.value * d).collect();
    let nearest = point::from_real(&w);
    let residual = domain.rho(&nearest).abs();
    if residual > BOUNDARY_TOL {
        return Err(DomainError::NonConvergence("boundary projection"));
    }
    Ok(DistanceEstimate {
        distance: best.value,
        nearest,
        residual,
        seeds,
        refined: refined.len(),
        seed_spread: spread,
        on_boundary: false,
        label: ESTIMATE_LABEL.into(),
    })
}

/// `R(z, Ω)`: farthest boundary point found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    #[serde(with = "point::interleaved")]
    pub farthest: Point,
    pub analytic_bound: f64,
    pub seeds: usize,
    pub label: String,
}

const FD_STEP: f64 = 1e-7;

/// `R(z, Ω) = inf{R: B(z; R) ⊃ Ω}`, maximized over the boundary
/// parameterized by weighted rays (see [`GeneralEllipsoid::retract_to_boundary`]).
pub fn circumscribed_radius(
    domain: &GeneralEllipsoid,
    z: &[Complex64],
    cfg: &GeometryConfig,
) -> Result<RadiusEstimate, DomainError> {
    check_dim(domain.dim(), z)?;
    let neg_dist2 = |x: &[f64]| -> Option<f64> {
        let b = domain.retract_to_boundary(&point::from_real(x));
        Some(-b.iter().zip(z).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>())
    };
    let dirs = axis_and_random_directions(2 * domain.dim(), cfg.random_directions, cfg.seed);
    let seeds = dirs.len();
    let mut scored: Vec<(f64, Vec<f64>)> = dirs.into_iter().map(|u| (neg_dist2(&u).unwrap(), u)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, u) in scored.into_iter().take(cfg.refine.max(1)) {
        let res = optim::descend(
            &Sphere,
            |x| Some((neg_dist2(x)?, optim::fd_gradient(neg_dist2, x, FD_STEP)?)),
            u,
            cfg.max_iter,
            cfg.grad_tol,
        );
        if let Some(res) = res {
            if best.as_ref().is_none_or(|(v, _)| res.value < *v) {
                best = Some((res.value, res.x));
            }
        }
    }
    let (v, x) = best.ok_or(DomainError::NonConvergence("circumscribed radius search"))?;
    let radius = (-v).sqrt();
    let analytic_bound = domain.analytic_radius_bound(z);
    if radius > analytic_bound * (1.0 + 1e-9) {
        return Err(DomainError::NonConvergence("circumscribed radius exceeds analytic bound"));
    }
    Ok(RadiusEstimate {
        radius,
        farthest: domain.retract_to_boundary(&point::from_real(&x)),
        analytic_bound,
        seeds,
        label: ESTIMATE_LABEL.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    pub diameter: f64,
    #[serde(with = "point::interleaved")]
    pub endpoint_a: Point,
    #[serde(with = "point::interleaved")]
    pub endpoint_b: Point,
    pub samples: usize,
    pub label: String,
}

/// Boundary samples used by [`diameter`] for the pairwise scan.
pub const DIAMETER_SAMPLES: usize = 256;

/// Diameter of the closure: pairwise scan over boundary samples, best pairs
/// refined by local maximization over pairs of boundary parameters.
pub fn diameter(domain: &GeneralEllipsoid, cfg: &GeometryConfig) -> Result<DiameterEstimate, DomainError> {
    let dim = 2 * domain.dim();
    let dirs = axis_and_random_directions(dim, DIAMETER_SAMPLES, cfg.seed);
    let pts: Vec<Point> = dirs.iter().map(|u| domain.retract_to_boundary(&point::from_real(u))).collect();
    let mut pairs = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            pairs.push((point::distance(&pts[i], &pts[j]), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let neg_sep2 = |x: &[f64]| -> Option<f64> {
        let a = domain.retract_to_boundary(&point::from_real(&x[..dim]));
        let b = domain.retract_to_boundary(&point::from_real(&x[dim..]));
        Some(-a.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>())
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for &(_, i, j) in pairs.iter().take(cfg.refine.max(1)) {
        let x0: Vec<f64> = dirs[i].iter().chain(&dirs[j]).copied().collect();
        let res = optim::descend(
            &SpherePair { split: dim },
            |x| Some((neg_sep2(x)?, optim::fd_gradient(neg_sep2, x, FD_STEP)?)),
            x0,
            cfg.max_iter,
            cfg.grad_tol,
        );
        if let Some(res) = res {
            if best.as_ref().is_none_or(|(v, _)| res.value < *v) {
                best = Some((res.value, res.x));
            }
        }
    }
    let (v, x) = best.ok_or(DomainError::NonConvergence("diameter search"))?;
    Ok(DiameterEstimate {
        diameter: (-v).sqrt(),
        endpoint_a: domain.retract_to_boundary(&point::from_real(&x[..dim])),
        endpoint_b: domain.retract_to_boundary(&point::from_real(&x[dim..])),
        samples: pts.len(),
        label: ESTIMATE_LABEL.into(),
    })
}

/// Boundary points: `z'` with `P(z') <= r` (weighted direction times a
/// uniform weighted scale), `|z_n| = sqrt(1 - P(z')/r)`, uniform phase.
pub fn sample_boundary(domain: &GeneralEllipsoid, count: usize, seed: u64) -> Vec<Point> {
    sample_boundary_excluding(domain, count, seed, 0.0)
}

/// As [`sample_boundary`], restricted to `σ_Λ(z') >= min_sigma`. Returns
/// fewer points only when `min_sigma` exceeds every attainable `σ_Λ`.
pub fn sample_boundary_excluding(domain: &GeneralEllipsoid, count: usize, seed: u64, min_sigma: f64) -> Vec<Point> {
    let mut rng = sampling::seeded(seed);
    let sig = domain.poly().signature();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let dir = sampling::weighted_direction(sig, &mut rng);
        let p_dir = domain.poly().eval_unchecked(&dir);
        let s_max = domain.scale() / p_dir;
        if s_max < min_sigma {
            continue;
        }
        let s = min_sigma + (s_max - min_sigma) * rand::Rng::random::<f64>(&mut rng);
        let mut z = wpoly::scale_point_unchecked(sig, s, &dir);
        let p = domain.poly().eval_unchecked(&z) / domain.scale();
        let modulus = (1.0 - p).max(0.0).sqrt();
        z.push(modulus * sampling::phase(&mut rng));
        out.push(z);
    }
    out
}

/// Interior points `ρ = s - 1` with `s` uniform in (0, 1), obtained by
/// weighted scaling of boundary samples.
pub fn sample_interior(domain: &GeneralEllipsoid, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = sampling::substream(seed, 1);
    sample_boundary(domain, count, seed)
        .into_iter()
        .map(|b| {
            let s: f64 = rand::Rng::random_range(&mut rng, 1e-6..1.0);
            weighted_scale(domain.poly(), s, &b)
        })
        .collect()
}

/// Domains that can generate test points for map verification.
pub trait SampleDomain: Domain {
    /// Points on both sides of the boundary and points on it.
    fn sample_points(&self, count: usize, seed: u64) -> (Vec<Point>, Vec<Point>);
}

impl SampleDomain for GeneralEllipsoid {
    fn sample_points(&self, count: usize, seed: u64) -> (Vec<Point>, Vec<Point>) {
        let boundary = sample_boundary(self, count, seed);
        let mut rng = sampling::substream(seed, 2);
        let volume = boundary
            .iter()
            .map(|b| {
                let s: f64 = rand::Rng::random_range(&mut rng, 1e-6..1.5);
                weighted_scale(self.poly(), s, b)
            })
            .collect();
        (volume, boundary)
    }
}

impl SampleDomain for SiegelModel {
    fn sample_points(&self, count: usize, seed: u64) -> (Vec<Point>, Vec<Point>) {
        use rand::Rng;
        let mut rng = sampling::seeded(seed);
        let sig = self.poly.signature();
        let mut volume = Vec::with_capacity(count);
        let mut boundary = Vec::with_capacity(count);
        for _ in 0..count {
            let dir = sampling::weighted_direction(sig, &mut rng);
            let s: f64 = rng.random_range(0.0..2.0);
            let zp = wpoly::scale_point_unchecked(sig, s, &dir);
            let base = self.poly.eval_unchecked(&zp) / (2.0 * self.r);
            let y: f64 = rng.random_range(-2.0..2.0);
            let delta: f64 = rng.random_range(-0.25..1.5);
            let mut b = zp.clone();
            b.push(Complex64::new(base, y));
            let mut v = zp;
            v.push(Complex64::new(base + delta, y));
            boundary.push(b);
            volume.push(v);
        }
        (volume, boundary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ball() -> GeneralEllipsoid {
        GeneralEllipsoid::unit(Arc::new(fixtures::ball())).unwrap()
    }

    #[test]
    fn membership_examples() {
        let p = Arc::new(fixtures::ball());
        let d = ball();
        assert_eq!(d.defining_value(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), -1.0);
        assert!(d.contains(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap());
        let h = HorosphereBall::new(p.clone(), 1.0).unwrap();
        assert_eq!(h.centered_value(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap(), -1.0);
        assert!(h.contains(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap());
        let e = SiegelModel::new(p, 1.0).unwrap();
        assert_eq!(e.defining_value(&[c(0.0, 0.0), c(-1.0, 0.0)]).unwrap(), 2.0);
        assert!(!e.contains(&[c(0.0, 0.0), c(-1.0, 0.0)]).unwrap());
        assert!(matches!(
            d.defining_value(&[c(0.0, 0.0)]),
            Err(DomainError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn constructor_validation() {
        let p = Arc::new(fixtures::ball());
        assert_eq!(GeneralEllipsoid::new(p.clone(), 0.0).unwrap_err(), DomainError::InvalidScale(0.0));
        assert_eq!(GeneralEllipsoid::new(p.clone(), 1.5).unwrap_err(), DomainError::InvalidScale(1.5));
        assert_eq!(
            HorosphereBall::with_dilation(p.clone(), 1.0, 0.0).unwrap_err(),
            DomainError::InvalidLambda(0.0)
        );
        assert_eq!(ConeRegion::new(p, 0.5, -1.0).unwrap_err(), DomainError::InvalidAperture(-1.0));
        assert_eq!(
            NormalizedHorosphere::new(Arc::new(fixtures::intro_example()), 1.0, 0.5).unwrap_err(),
            DomainError::Unbalanced
        );
    }

    #[test]
    fn ball_distances() {
        let d = ball();
        let cfg = GeometryConfig::default();
        let r0 = boundary_distance(&d, &[c(0.0, 0.0), c(0.0, 0.0)], &cfg).unwrap();
        assert_relative_eq!(r0.distance, 1.0, epsilon = 1e-12);
        let r1 = boundary_distance(&d, &[c(0.0, 0.0), c(0.5, 0.0)], &cfg).unwrap();
        assert_relative_eq!(r1.distance, 0.5, epsilon = 1e-10);
        assert!(r1.residual <= BOUNDARY_TOL);
        assert_relative_eq!(r1.nearest[1].re, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn boundary_and_outside_points() {
        let d = ball();
        let cfg = GeometryConfig::default();
        let on = boundary_distance(&d, &[c(0.6, 0.0), c(0.0, 0.8)], &cfg).unwrap();
        assert!(on.on_boundary);
        assert_eq!(on.distance, 0.0);
        assert!(matches!(
            boundary_distance(&d, &[c(1.0, 0.0), c(0.5, 0.0)], &cfg),
            Err(DomainError::Outside(_))
        ));
    }

    #[test]
    fn ball_radii_and_diameter() {
        let d = ball();
        let cfg = GeometryConfig::default();
        let r0 = circumscribed_radius(&d, &[c(0.0, 0.0), c(0.0, 0.0)], &cfg).unwrap();
        assert_relative_eq!(r0.radius, 1.0, epsilon = 1e-12);
        let r1 = circumscribed_radius(&d, &[c(0.0, 0.0), c(0.0, 0.5)], &cfg).unwrap();
        assert_relative_eq!(r1.radius, 1.5, epsilon = 1e-9);
        assert!(r1.radius <= r1.analytic_bound);
        let diam = diameter(&d, &cfg).unwrap();
        assert_relative_eq!(diam.diameter, 2.0, epsilon = 1e-9);
        assert_relative_eq!(diam.diameter, 2.0 * r0.radius, epsilon = 1e-9);
    }

    #[test]
    fn boundary_samples() {
        let d = ball();
        assert!(sample_boundary(&d, 0, 1).is_empty());
        for z in sample_boundary(&d, 200, 3) {
            assert_relative_eq!(point::norm(&z), 1.0, epsilon = 1e-12);
        }
        let q = GeneralEllipsoid::unit(Arc::new(fixtures::quartic())).unwrap();
        let pts = sample_boundary(&q, 500, 9);
        assert_eq!(pts.len(), 500);
        for z in &pts {
            assert!(q.defining_value(z).unwrap().abs() <= 1e-10);
        }
        assert_eq!(pts, sample_boundary(&q, 500, 9));
    }

    #[test]
    fn excluded_boundary_samples_respect_sigma() {
        let q = GeneralEllipsoid::unit(Arc::new(fixtures::quartic())).unwrap();
        let sig = q.poly().signature().clone();
        for z in sample_boundary_excluding(&q, 300, 4, 0.2) {
            assert!(wpoly::sigma_weight(&sig, &z[..1]).unwrap() >= 0.2 - 1e-12);
        }
        assert!(sample_boundary_excluding(&q, 10, 4, 2.0).is_empty());
    }

    #[test]
    fn family_cover_examples() {
        let p = Arc::new(fixtures::ball());
        let k = vec![vec![c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(family_covers(p.clone(), 1.0, 1.0, &k).unwrap());
        assert!(!family_covers(p, 3.0, 1.0, &k).unwrap());
    }

    #[test]
    fn horosphere_forms_agree_at_unit_dilation() {
        let p = Arc::new(fixtures::two_variable());
        let h = HorosphereBall::new(p, 0.7).unwrap();
        let mut rng = sampling::seeded(11);
        for _ in 0..1000 {
            let z = sampling::unit_complex_sphere(&mut rng, 3);
            let a = h.defining_value(&z).unwrap();
            let b = h.centered_value(&z).unwrap();
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn normalized_horosphere_matches_pullback_through_cayley() {
        use crate::holomaps::CayleyMap;
        let poly = Arc::new(fixtures::two_variable());
        let (r, lambda) = (0.8, 0.3);
        let dom = NormalizedHorosphere::new(poly.clone(), r, lambda).unwrap();
        let horo = HorosphereBall::with_dilation(poly.clone(), r, lambda).unwrap();
        let psi = CayleyMap::new(&poly).unwrap();
        let mut rng = sampling::seeded(5);
        for _ in 0..2000 {
            let v: Point = sampling::unit_complex_sphere(&mut rng, 3).into_iter().map(|x| x * 1.2).collect();
            if (v[2] + 1.0).re <= 0.05 {
                continue;
            }
            let pulled = horo.defining_value(&psi.apply(&v).unwrap()).unwrap();
            let cleared = dom.defining_value(&v).unwrap();
            let scale = (v[2] + 1.0).norm_sqr();
            assert!((pulled * scale - cleared).abs() <= 1e-10 * (1.0 + cleared.abs()));
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let poly = Arc::new(fixtures::coupled_quartic(0.7));
        let doms: Vec<Box<dyn Domain>> = vec![
            Box::new(GeneralEllipsoid::new(poly.clone(), 0.6).unwrap()),
            Box::new(SiegelModel::new(poly.clone(), 0.6).unwrap()),
            Box::new(HorosphereBall::with_dilation(poly.clone(), 0.6, 0.4).unwrap()),
            Box::new(NormalizedHorosphere::new(poly, 0.6, 0.4).unwrap()),
        ];
        let z = vec![c(0.3, -0.2), c(0.1, 0.4), c(0.2, 0.5)];
        for d in &doms {
            let g = d.defining_gradient(&z).unwrap();
            let x = point::to_real(&z);
            let fd = optim::fd_gradient(|v| Some(d.defining_value(&point::from_real(v)).unwrap()), &x, 1e-6).unwrap();
            for (j, gj) in g.iter().enumerate() {
                // ∂ρ/∂z = (ρ_x - i ρ_y)/2
                let w = c(fd[2 * j], -fd[2 * j + 1]) / 2.0;
                assert!((gj - w).norm() < 1e-8, "{gj} vs {w}");
            }
        }
    }
}
