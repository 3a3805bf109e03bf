//! Explicit biholomorphisms between the model domains.
//!
//! - [`CayleyMap`] `ψ`: `D_P → E_P`, self-inverse.
//! - [`EllipsoidAutomorphism`] `φ_{a,θ}` of `D_P`.
//! - [`Dilation`] `Λ_λ` of `E_P`.
//! - [`NormalizationMap`] `G_λ = ψ∘Λ_λ`: `E_P → D_P`.
//!
//! Fractional powers use the principal branch. Their arguments have
//! positive real part on the domains involved, and points violating that
//! are rejected rather than mapped across the branch cut.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{Domain, SampleDomain};
use crate::point::{self, Point};
use crate::schema::{MapKind, MapSpec};
use crate::wpoly::{WPolynomial, WeightSignature};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MapError {
    #[error("map requires a balanced polynomial (wt(K) = wt(L) = 1/2 for every term)")]
    Unbalanced,
    #[error("z_n = -1 is a pole of the Cayley map")]
    Pole,
    #[error("Re({0}) <= 0: argument of the fractional power leaves the principal half-plane")]
    BranchCut(Complex64),
    #[error("automorphism parameter |a| = {0} must be < 1")]
    InvalidParameter(f64),
    #[error("dilation λ = {0} must be positive")]
    InvalidLambda(f64),
    #[error("point with |z_n| = {0} is not interior")]
    NotInterior(f64),
    #[error("normalization scale requires q != 0")]
    ZeroPoint,
    #[error("normalization scale bisection failed (residual {0:e})")]
    ScaleSolve(f64),
    #[error("expected a point of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("map descriptor is missing `{0}`")]
    MissingField(&'static str),
}

fn check_dim(sig: &WeightSignature, z: &[Complex64]) -> Result<(), MapError> {
    if z.len() != sig.dim() {
        return Err(MapError::DimensionMismatch { expected: sig.dim(), found: z.len() });
    }
    Ok(())
}

fn balanced_signature(poly: &WPolynomial) -> Result<WeightSignature, MapError> {
    if !poly.is_balanced() {
        return Err(MapError::Unbalanced);
    }
    Ok(poly.signature().clone())
}

/// `ψ(z) = (2^{1/2m_j} z_j / (1 + z_n)^{1/m_j}, (1 - z_n)/(1 + z_n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyMap {
    sig: WeightSignature,
}

impl CayleyMap {
    pub fn new(poly: &WPolynomial) -> Result<Self, MapError> {
        Ok(Self { sig: balanced_signature(poly)? })
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Point, MapError> {
        check_dim(&self.sig, z)?;
        let zn = z[z.len() - 1];
        let w = 1.0 + zn;
        if w.norm() < 1e-300 {
            return Err(MapError::Pole);
        }
        if w.re <= 0.0 {
            return Err(MapError::BranchCut(w));
        }
        let mut out: Point = z[..z.len() - 1]
            .iter()
            .zip(self.sig.m())
            .map(|(zj, &m)| {
                let m = m as f64;
                zj * 2f64.powf(0.5 / m) / w.powf(1.0 / m)
            })
            .collect();
        out.push((1.0 - zn) / w);
        Ok(out)
    }
}

/// `φ_{a,θ}(z) = ((1-|a|^2)^{1/2m_j} z_j / (1 - ā z_n)^{1/m_j}, e^{iθ}(z_n - a)/(1 - ā z_n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidAutomorphism {
    sig: WeightSignature,
    a: Complex64,
    theta: f64,
}

impl EllipsoidAutomorphism {
    pub fn new(poly: &WPolynomial, a: Complex64, theta: f64) -> Result<Self, MapError> {
        let sig = balanced_signature(poly)?;
        if !(a.norm() < 1.0) {
            return Err(MapError::InvalidParameter(a.norm()));
        }
        Ok(Self { sig, a, theta })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Point, MapError> {
        check_dim(&self.sig, z)?;
        let zn = z[z.len() - 1];
        let den = 1.0 - self.a.conj() * zn;
        if den.re <= 0.0 {
            return Err(MapError::BranchCut(den));
        }
        let shrink = 1.0 - self.a.norm_sqr();
        let mut out: Point = z[..z.len() - 1]
            .iter()
            .zip(self.sig.m())
            .map(|(zj, &m)| {
                let m = m as f64;
                zj * shrink.powf(0.5 / m) / den.powf(1.0 / m)
            })
            .collect();
        out.push(Complex64::from_polar(1.0, self.theta) * (zn - self.a) / den);
        Ok(out)
    }
}

/// `Λ_λ(z) = (z_j / λ^{1/2m_j}, z_n / λ)`.
///
/// Only weighted homogeneity is needed for `Λ_λ(E_P) = E_P`, so no balance
/// requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    sig: WeightSignature,
    lambda: f64,
}

impl Dilation {
    pub fn new(sig: &WeightSignature, lambda: f64) -> Result<Self, MapError> {
        if !(lambda > 0.0) {
            return Err(MapError::InvalidLambda(lambda));
        }
        Ok(Self { sig: sig.clone(), lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Point, MapError> {
        check_dim(&self.sig, z)?;
        Ok(dilate(&self.sig, self.lambda, z))
    }

    /// `Λ_λ ∘ Λ_μ = Λ_{λμ}`
    pub fn compose(&self, other: &Dilation) -> Dilation {
        Dilation { sig: self.sig.clone(), lambda: self.lambda * other.lambda }
    }
}

fn dilate(sig: &WeightSignature, lambda: f64, z: &[Complex64]) -> Point {
    let n1 = z.len() - 1;
    let mut out: Point = z[..n1]
        .iter()
        .enumerate()
        .map(|(j, zj)| zj / lambda.powf(sig.exponent(j)))
        .collect();
    out.push(z[n1] / lambda);
    out
}

/// `G_λ = ψ ∘ Λ_λ`, from the Siegel side to the ellipsoid side.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationMap {
    dilation: Dilation,
    cayley: CayleyMap,
}

impl NormalizationMap {
    pub fn new(poly: &WPolynomial, lambda: f64) -> Result<Self, MapError> {
        Ok(Self { cayley: CayleyMap::new(poly)?, dilation: Dilation::new(poly.signature(), lambda)? })
    }

    pub fn lambda(&self) -> f64 {
        self.dilation.lambda
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Point, MapError> {
        self.cayley.apply(&self.dilation.apply(z)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HolomorphicMap {
    Identity(usize),
    Cayley(CayleyMap),
    Automorphism(EllipsoidAutomorphism),
    Dilation(Dilation),
    Normalization(NormalizationMap),
}

impl HolomorphicMap {
    pub fn from_spec(spec: &MapSpec, poly: &WPolynomial) -> Result<Self, MapError> {
        Ok(match spec.map {
            MapKind::Identity => HolomorphicMap::Identity(poly.signature().dim()),
            MapKind::Cayley => HolomorphicMap::Cayley(CayleyMap::new(poly)?),
            MapKind::Automorphism => {
                let a = spec.a.ok_or(MapError::MissingField("a"))?;
                HolomorphicMap::Automorphism(EllipsoidAutomorphism::new(
                    poly,
                    Complex64::new(a[0], a[1]),
                    spec.theta.unwrap_or(0.0),
                )?)
            }
            MapKind::Dilation => HolomorphicMap::Dilation(Dilation::new(
                poly.signature(),
                spec.lambda.ok_or(MapError::MissingField("lambda"))?,
            )?),
            MapKind::Normalization => HolomorphicMap::Normalization(NormalizationMap::new(
                poly,
                spec.lambda.ok_or(MapError::MissingField("lambda"))?,
            )?),
        })
    }

    pub fn kind(&self) -> MapKind {
        match self {
            HolomorphicMap::Identity(_) => MapKind::Identity,
            HolomorphicMap::Cayley(_) => MapKind::Cayley,
            HolomorphicMap::Automorphism(_) => MapKind::Automorphism,
            HolomorphicMap::Dilation(_) => MapKind::Dilation,
            HolomorphicMap::Normalization(_) => MapKind::Normalization,
        }
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Point, MapError> {
        match self {
            HolomorphicMap::Identity(n) => {
                if z.len() != *n {
                    return Err(MapError::DimensionMismatch { expected: *n, found: z.len() });
                }
                Ok(z.to_vec())
            }
            HolomorphicMap::Cayley(m) => m.apply(z),
            HolomorphicMap::Automorphism(m) => m.apply(z),
            HolomorphicMap::Dilation(m) => m.apply(z),
            HolomorphicMap::Normalization(m) => m.apply(z),
        }
    }
}

/// `φ_{p_n,0}(p)`: moves an interior point into the slice `{z_n = 0}`.
pub fn orbit_to_slice(poly: &WPolynomial, p: &[Complex64]) -> Result<Point, MapError> {
    check_dim(poly.signature(), p)?;
    let pn = p[p.len() - 1];
    if !(pn.norm() < 1.0) {
        return Err(MapError::NotInterior(pn.norm()));
    }
    let mut out = EllipsoidAutomorphism::new(poly, pn, 0.0)?.apply(p)?;
    // (p_n - p_n) / (...) is exactly zero already; keep it so for -0.0 too
    *out.last_mut().expect("n >= 2") = Complex64::new(0.0, 0.0);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationScale {
    pub lambda: f64,
    /// `|‖Λ_λ(q)‖ - 1|`
    pub residual: f64,
    pub iterations: usize,
}

/// Tolerance on `|‖Λ_λ(q)‖ - 1|`.
pub const SCALE_TOL: f64 = 1e-12;

/// The unique `λ > 0` with `‖Λ_λ(q)‖ = 1`.
///
/// `λ ↦ ‖Λ_λ(q)‖` is strictly decreasing (each coordinate modulus is), so
/// bisection in `log λ` on a geometrically expanded bracket converges.
pub fn solve_normalization_scale(sig: &WeightSignature, q: &[Complex64]) -> Result<NormalizationScale, MapError> {
    check_dim(sig, q)?;
    let nq = point::norm(q);
    if nq == 0.0 {
        return Err(MapError::ZeroPoint);
    }
    let f = |lambda: f64| point::norm(&dilate(sig, lambda, q)) - 1.0;
    let mm = 2.0 * sig.max_m() as f64;
    let (a, b) = (nq.powf(mm), nq.powf(1.0 / mm));
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut iterations = 0;
    while f(lo) < 0.0 {
        lo *= 0.5;
        iterations += 1;
    }
    while f(hi) > 0.0 {
        hi *= 2.0;
        iterations += 1;
    }
    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        iterations += 1;
        let mid = 0.5 * (llo + lhi);
        if mid <= llo || mid >= lhi {
            break;
        }
        if f(mid.exp()) > 0.0 {
            llo = mid;
        } else {
            lhi = mid;
        }
    }
    let lambda = [llo.exp(), lhi.exp()]
        .into_iter()
        .min_by(|x, y| f(*x).abs().total_cmp(&f(*y).abs()))
        .expect("two candidates");
    let residual = f(lambda).abs();
    if residual > SCALE_TOL {
        return Err(MapError::ScaleSolve(residual));
    }
    Ok(NormalizationScale { lambda, residual, iterations })
}

/// Worst-case discrepancies of a map over sampled points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxViolationReport {
    pub map: MapKind,
    pub samples: usize,
    /// Points the map rejected (branch cut or pole), excluded from the maxima.
    pub skipped: usize,
    /// Points with `|ρ_source| > SIGN_FILTER` whose image has the opposite sign.
    pub sign_disagreements: usize,
    /// `max |ρ_target(f(b))| / (1 + ‖f(b)‖^2)` over boundary samples `b`.
    pub boundary_residual: f64,
    /// Cayley map only: `max |2Re((1-z_n)/(1+z_n)) - P(ψ(z)') - 2(1-|z_n|^2-P(z'))/|1+z_n|^2|`.
    pub cayley_identity_residual: Option<f64>,
    pub seed: u64,
}

/// Sign comparisons skip source points closer than this to the boundary.
pub const SIGN_FILTER: f64 = 1e-8;

/// Samples the source domain and checks that the map carries interior to
/// interior, exterior to exterior and boundary to boundary.
pub fn verify_map<S, T>(
    map: &HolomorphicMap,
    source: &S,
    target: &T,
    sample_count: usize,
    seed: u64,
) -> MaxViolationReport
where
    S: SampleDomain + ?Sized,
    T: Domain + ?Sized,
{
    let (volume, boundary) = source.sample_points(sample_count, seed);
    let mut skipped = 0;
    let mut sign_disagreements = 0;
    let mut identity: Option<f64> = matches!(map, HolomorphicMap::Cayley(_)).then_some(0.0);
    let poly = source.poly();
    for z in &volume {
        let Ok(w) = map.apply(z) else {
            skipped += 1;
            continue;
        };
        let rs = source.rho(z);
        let rt = target.rho(&w);
        if rs.abs() > SIGN_FILTER && (rs < 0.0) != (rt < 0.0) {
            sign_disagreements += 1;
        }
        if let Some(id) = identity.as_mut() {
            *id = id.max(cayley_identity_residual(poly, z, &w));
        }
    }
    let mut boundary_residual: f64 = 0.0;
    for b in &boundary {
        let Ok(w) = map.apply(b) else {
            skipped += 1;
            continue;
        };
        let scale = 1.0 + point::norm(&w).powi(2);
        boundary_residual = boundary_residual.max(target.rho(&w).abs() / scale);
    }
    MaxViolationReport {
        map: map.kind(),
        samples: volume.len() + boundary.len(),
        skipped,
        sign_disagreements,
        boundary_residual,
        cayley_identity_residual: identity,
        seed,
    }
}

/// `|2Re((1-z_n)/(1+z_n)) - P(ψ(z)') - 2(1 - |z_n|^2 - P(z'))/|1+z_n|^2|`,
/// given `image = ψ(z)`.
pub fn cayley_identity_residual(poly: &WPolynomial, z: &[Complex64], image: &[Complex64]) -> f64 {
    let n1 = z.len() - 1;
    let zn = z[n1];
    let lhs = 2.0 * ((1.0 - zn) / (1.0 + zn)).re - poly.eval_unchecked(&image[..n1]);
    let rhs = 2.0 * (1.0 - zn.norm_sqr() - poly.eval_unchecked(&z[..n1])) / (1.0 + zn).norm_sqr();
    (lhs - rhs).abs()
}
