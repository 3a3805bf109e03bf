//! Levi form of `ρ = |z_n|^2 + P(z')/r - 1` on the complex tangent space,
//! and sampled certification of strong pseudoconvexity away from the
//! circle `{(0', e^{iθ})}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{self, Domain, DomainError, GeneralEllipsoid, BOUNDARY_TOL};
use crate::point::{self, Point};

/// Default threshold on the minimum restricted eigenvalue.
pub const LEVI_TOL: f64 = 1e-8;

const GRADIENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LeviError {
    #[error("point is not on the boundary (|ρ| = {0:e} > 1e-10)")]
    OffBoundary(f64),
    #[error("complex gradient of ρ vanishes (norm {0:e})")]
    VanishingGradient(f64),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    StronglyPseudoconvex,
    WeaklyPseudoconvex,
    Indefinite,
}

impl Classification {
    pub fn from_min_eigenvalue(min: f64, tol: f64) -> Self {
        if min > tol {
            Classification::StronglyPseudoconvex
        } else if min >= -tol {
            Classification::WeaklyPseudoconvex
        } else {
            Classification::Indefinite
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeviReport {
    #[serde(with = "point::interleaved")]
    pub point: Point,
    /// Euclidean norm of the Wirtinger gradient `(∂ρ/∂z_j)`.
    pub gradient_norm: f64,
    /// Ascending.
    pub restricted_eigenvalues: Vec<f64>,
    pub classification: Classification,
    pub tol: f64,
}

impl LeviReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.restricted_eigenvalues[0]
    }
}

/// Complex Hessian `∂²ρ/∂z_j∂conj(z_k)`: `Hess P / r` with a 1 in the last slot.
pub fn defining_hessian(domain: &GeneralEllipsoid, z: &[Complex64]) -> Result<DMatrix<Complex64>, LeviError> {
    domain.defining_value(z)?;
    let n = z.len();
    let hp = domain.poly().hessian_unchecked(&z[..n - 1]);
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    h.view_mut((0, 0), (n - 1, n - 1)).copy_from(&(hp / Complex64::new(domain.scale(), 0.0)));
    h[(n - 1, n - 1)] = Complex64::new(1.0, 0.0);
    Ok(h)
}

/// Orthonormal basis (as columns) of `{t : Σ_j g_j t_j = 0}`, completed
/// from the normalized `conj(g)` by Gram–Schmidt against the coordinate
/// vectors. The coordinate with the largest `|g_j|` is skipped.
pub fn tangent_basis(gradient: &[Complex64]) -> DMatrix<Complex64> {
    let n = gradient.len();
    let gn = point::norm(gradient);
    let mut frame: Vec<DVector<Complex64>> = vec![DVector::from_iterator(n, gradient.iter().map(|g| g.conj() / gn))];
    let skip = (0..n).max_by(|&a, &b| gradient[a].norm().total_cmp(&gradient[b].norm())).unwrap_or(0);
    for i in (0..n).filter(|&i| i != skip) {
        let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
        v[i] = Complex64::new(1.0, 0.0);
        // two passes for stability
        for _ in 0..2 {
            for f in &frame {
                let c = f.dotc(&v);
                v -= f * c;
            }
        }
        let norm = v.norm();
        frame.push(v / Complex64::new(norm, 0.0));
    }
    DMatrix::from_columns(&frame[1..])
}

/// `B^H conj(H) B`, the matrix of `t ↦ Σ H_jk t_j conj(t_k)` in the basis `B`.
pub fn restricted_levi_matrix(hessian: &DMatrix<Complex64>, basis: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    basis.adjoint() * hessian.conjugate() * basis
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    // symmetrize away rounding before the real-eigenvalue solver
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn levi_report(domain: &GeneralEllipsoid, q: &[Complex64], tol: f64) -> Result<LeviReport, LeviError> {
    let rho = domain.defining_value(q)?;
    if rho.abs() > BOUNDARY_TOL {
        return Err(LeviError::OffBoundary(rho.abs()));
    }
    let g = domain.rho_gradient(q);
    let gradient_norm = point::norm(&g);
    if gradient_norm <= GRADIENT_TOL {
        return Err(LeviError::VanishingGradient(gradient_norm));
    }
    let h = defining_hessian(domain, q)?;
    let eig = hermitian_eigenvalues(&restricted_levi_matrix(&h, &tangent_basis(&g)));
    Ok(LeviReport {
        point: q.to_vec(),
        gradient_norm,
        classification: Classification::from_min_eigenvalue(eig[0], tol),
        restricted_eigenvalues: eig,
        tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WbConfig {
    /// Samples satisfy `σ_Λ(z') >= exclusion_radius`.
    pub exclusion_radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Trend radii are `exclusion_radius * factor`, in the given order.
    pub trend_factors: Vec<f64>,
    pub trend_samples: usize,
}

impl Default for WbConfig {
    fn default() -> Self {
        Self {
            exclusion_radius: 0.1,
            samples: 10_000,
            seed: 1,
            tol: LEVI_TOL,
            trend_factors: vec![1.0, 0.1, 0.01, 0.001],
            trend_samples: 2_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub radius: f64,
    pub min_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WbReport {
    pub pass: bool,
    pub tol: f64,
    pub min_eigenvalue: f64,
    #[serde(with = "point::interleaved")]
    pub argmin_point: Point,
    pub samples: usize,
    pub exclusion_radius: f64,
    /// Minimum over all samples with `σ_Λ >= radius`, radii decreasing.
    pub trend: Vec<TrendPoint>,
    pub note: String,
}

pub const WB_NOTE: &str = "certified at sampled boundary points only; no uniform eigenvalue bound is implied";

fn min_over(domain: &GeneralEllipsoid, pts: &[Point], tol: f64) -> (usize, Option<(f64, Point)>) {
    let mut used = 0;
    let mut best: Option<(f64, Point)> = None;
    for p in pts {
        // a vanishing gradient cannot occur on D_P (|z_n| or ∇P is nonzero);
        // skip defensively rather than abort the scan
        let Ok(rep) = levi_report(domain, p, tol) else { continue };
        used += 1;
        let v = rep.min_eigenvalue();
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, rep.point));
        }
    }
    (used, best)
}

/// Sampled WB certification: minimum restricted eigenvalue over boundary
/// points with `σ_Λ(z') >= exclusion_radius`, plus the running minimum as the
/// exclusion radius shrinks.
pub fn wb_check(domain: &GeneralEllipsoid, cfg: &WbConfig) -> WbReport {
    let pts = domains::sample_boundary_excluding(domain, cfg.samples, cfg.seed, cfg.exclusion_radius);
    let (used, best) = min_over(domain, &pts, cfg.tol);
    let (min_eigenvalue, argmin_point) = best.unwrap_or((f64::NAN, Vec::new()));

    let mut radii: Vec<f64> = cfg.trend_factors.iter().map(|f| f * cfg.exclusion_radius).collect();
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut running = f64::INFINITY;
    let trend = radii
        .into_iter()
        .enumerate()
        .map(|(i, radius)| {
            let seed = cfg.seed.wrapping_add(1 + i as u64);
            let level = domains::sample_boundary_excluding(domain, cfg.trend_samples, seed, radius);
            if let (_, Some((v, _))) = min_over(domain, &level, cfg.tol) {
                running = running.min(v);
            }
            if (radius - cfg.exclusion_radius).abs() <= f64::EPSILON * radius {
                running = running.min(min_eigenvalue);
            }
            TrendPoint { radius, min_eig: running }
        })
        .collect();

    WbReport {
        pass: used > 0 && min_eigenvalue > cfg.tol,
        tol: cfg.tol,
        min_eigenvalue,
        argmin_point,
        samples: used,
        exclusion_radius: cfg.exclusion_radius,
        trend,
        note: WB_NOTE.into(),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fixtures;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit(p: crate::WPolynomial) -> GeneralEllipsoid {
        GeneralEllipsoid::unit(Arc::new(p)).unwrap()
    }

    #[test]
    fn ball_eigenvalue_is_one() {
        let d = unit(fixtures::ball());
        let s = 0.5f64.sqrt();
        let rep = levi_report(&d, &[c(s, 0.0), c(s, 0.0)], LEVI_TOL).unwrap();
        assert!((rep.min_eigenvalue() - 1.0).abs() < 1e-12);
        assert_eq!(rep.classification, Classification::StronglyPseudoconvex);
    }

    #[test]
    fn quartic_pole_is_weak() {
        let d = unit(fixtures::quartic());
        let rep = levi_report(&d, &[c(0.0, 0.0), c(1.0, 0.0)], LEVI_TOL).unwrap();
        assert!(rep.min_eigenvalue().abs() <= 1e-12);
        assert_eq!(rep.classification, Classification::WeaklyPseudoconvex);
    }

    #[test]
    fn rejects_interior_points() {
        let d = unit(fixtures::ball());
        assert!(matches!(levi_report(&d, &[c(0.1, 0.0), c(0.0, 0.0)], LEVI_TOL), Err(LeviError::OffBoundary(_))));
    }

    #[test]
    fn basis_is_orthonormal_and_tangent() {
        let g = vec![c(0.3, -0.2), c(1.1, 0.4), c(-0.5, 0.9)];
        let b = tangent_basis(&g);
        let gram = b.adjoint() * &b;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-12);
        for col in b.column_iter() {
            let s: Complex64 = g.iter().zip(col.iter()).map(|(a, t)| a * t).sum();
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn intro_example_passes_away_from_circle() {
        let d = unit(fixtures::intro_example());
        let cfg = WbConfig { exclusion_radius: 0.1, samples: 500, trend_samples: 200, ..WbConfig::default() };
        let rep = wb_check(&d, &cfg);
        assert!(rep.pass, "{rep:?}");
        for w in rep.trend.windows(2) {
            assert!(w[1].min_eig <= w[0].min_eig);
        }
    }

    #[test]
    fn indefinite_classification() {
        assert_eq!(Classification::from_min_eigenvalue(-1e-3, 1e-8), Classification::Indefinite);
    }
}
