//! Weighted homogeneous Hermitian polynomials
//! `P(z') = Σ a_KL z'^K conj(z')^L` with `wt(K) + wt(L) = 1`.
//!
//! Coefficients are stored canonically: one representative per unordered
//! pair `{K, L}` (with `K < L` lexicographically) plus real diagonal terms.
//! The conjugate partner is reconstructed at evaluation, so a constructed
//! `WPolynomial` is real-valued by construction.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optim::{self, SearchConfig, Sphere};
use crate::point::{self, Point};
use crate::sampling;
use crate::schema::{PolynomialSpec, TermSpec};

/// Sphere minima at or below this are not accepted as positive.
pub const POSITIVITY_TOL: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PolyError {
    #[error("polynomial has no terms")]
    EmptyTerms,
    #[error("weight m[{index}] = {value} is not a positive integer")]
    NonPositiveWeight { index: usize, value: i64 },
    #[error("n = {n} does not match m of length {m_len} (need n = len(m) + 1 >= 2)")]
    SignatureMismatch { n: i64, m_len: usize },
    #[error("term {term}: exponent {value} is not a non-negative integer")]
    NonIntegerExponent { term: usize, value: String },
    #[error("term {term}: multi-index has length {found}, expected {expected}")]
    TermLength { term: usize, expected: usize, found: usize },
    #[error("expected a point of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("term {term}: {detail}")]
    Hermitian { term: usize, detail: String },
    #[error("term {term}: wt(K) + wt(L) = {weight}, expected 1")]
    WeightSum { term: usize, weight: String },
    #[error("scale factor t = {0} must be positive")]
    NonPositiveScale(f64),
    #[error("P is not positive on the weighted sphere: minimum {minimum:e}")]
    NotPositive { minimum: f64, argmin: Vec<f64> },
    #[error("sphere search did not converge in any of {restarts} restarts")]
    NonConvergence { restarts: usize },
}

/// The weights `(m_1, ..., m_{n-1})`; coordinate `j` scales as `t^{1/(2 m_j)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSignature {
    m: Vec<u32>,
}

impl WeightSignature {
    pub fn new(m: Vec<u32>) -> Result<Self, PolyError> {
        if m.is_empty() {
            return Err(PolyError::SignatureMismatch { n: 1, m_len: 0 });
        }
        if let Some(index) = m.iter().position(|&v| v == 0) {
            return Err(PolyError::NonPositiveWeight { index, value: 0 });
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    /// Ambient complex dimension n.
    pub fn dim(&self) -> usize {
        self.m.len() + 1
    }

    /// Number of z' coordinates, n - 1.
    pub fn inner_dim(&self) -> usize {
        self.m.len()
    }

    pub fn max_m(&self) -> u32 {
        self.m.iter().copied().max().unwrap_or(1)
    }

    /// `1 / (2 m_j)`
    pub fn exponent(&self, j: usize) -> f64 {
        1.0 / (2.0 * self.m[j] as f64)
    }

    /// Exact `wt(K) = Σ k_j / (2 m_j)`.
    pub fn weight(&self, k: &MultiIndex) -> Ratio<i64> {
        k.0.iter()
            .zip(&self.m)
            .map(|(&kj, &mj)| Ratio::new(kj as i64, 2 * mj as i64))
            .fold(Ratio::from_integer(0), |acc, w| acc + w)
    }

    fn check_dim(&self, zp: &[Complex64]) -> Result<(), PolyError> {
        if zp.len() != self.inner_dim() {
            return Err(PolyError::DimensionMismatch { expected: self.inner_dim(), found: zp.len() });
        }
        Ok(())
    }

    /// Moves `u != 0` along its weighted orbit onto `{σ_Λ = 1}`.
    pub fn retract_to_weighted_sphere(&self, u: &[Complex64]) -> Point {
        let s = sigma_weight_unchecked(self, u);
        scale_point_unchecked(self, 1.0 / s, u)
    }
}

/// Multi-index `K = (k_1, ..., k_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Coordinate j multiplied by `t^{1/(2 m_j)}`.
pub fn scale_point(sig: &WeightSignature, t: f64, zp: &[Complex64]) -> Result<Point, PolyError> {
    if !(t > 0.0) {
        return Err(PolyError::NonPositiveScale(t));
    }
    sig.check_dim(zp)?;
    Ok(scale_point_unchecked(sig, t, zp))
}

pub(crate) fn scale_point_unchecked(sig: &WeightSignature, t: f64, zp: &[Complex64]) -> Point {
    zp.iter()
        .enumerate()
        .map(|(j, z)| z * t.powf(sig.exponent(j)))
        .collect()
}

/// `σ_Λ(z') = Σ |z_j|^{2 m_j}`
pub fn sigma_weight(sig: &WeightSignature, zp: &[Complex64]) -> Result<f64, PolyError> {
    sig.check_dim(zp)?;
    Ok(sigma_weight_unchecked(sig, zp))
}

pub(crate) fn sigma_weight_unchecked(sig: &WeightSignature, zp: &[Complex64]) -> f64 {
    zp.iter()
        .zip(sig.m())
        .map(|(z, &m)| z.norm_sqr().powi(m as i32))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    k: MultiIndex,
    l: MultiIndex,
    coeff: Complex64,
}

impl Term {
    fn is_diagonal(&self) -> bool {
        self.k == self.l
    }
}

/// Extremes of `P` on the weighted sphere `{σ_Λ = 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparability {
    pub c1: f64,
    pub c2: f64,
    #[serde(with = "point::interleaved")]
    pub argmin: Point,
    #[serde(with = "point::interleaved")]
    pub argmax: Point,
    pub restarts: usize,
    pub converged: usize,
}

#[derive(Debug, Clone)]
pub struct WPolynomial {
    sig: WeightSignature,
    terms: Vec<Term>,
    balanced: bool,
    comparability: OnceLock<Result<Comparability, PolyError>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermIssue {
    pub term: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub minimum: f64,
    pub maximum: f64,
    pub argmin: Vec<f64>,
    pub positive: bool,
    pub tolerance: f64,
    pub restarts: usize,
    pub converged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub balanced: bool,
    pub hermitian_violations: Vec<TermIssue>,
    pub weight_violations: Vec<TermIssue>,
    /// Absent when structural violations prevent building the polynomial.
    pub positivity: Option<PositivityReport>,
}

struct Parsed {
    sig: WeightSignature,
    /// (K, L, coefficient, input term index), duplicates merged.
    entries: BTreeMap<(MultiIndex, MultiIndex), (Complex64, usize)>,
}

fn parse_exponent(term: usize, v: &serde_json::Number) -> Result<u32, PolyError> {
    v.as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| PolyError::NonIntegerExponent { term, value: v.to_string() })
}

fn parse_spec(spec: &PolynomialSpec) -> Result<Parsed, PolyError> {
    if let Some(index) = spec.m.iter().position(|&v| v <= 0 || v > u32::MAX as i64) {
        return Err(PolyError::NonPositiveWeight { index, value: spec.m[index] });
    }
    if spec.n < 2 || spec.n as usize != spec.m.len() + 1 {
        return Err(PolyError::SignatureMismatch { n: spec.n, m_len: spec.m.len() });
    }
    if spec.terms.is_empty() {
        return Err(PolyError::EmptyTerms);
    }
    let sig = WeightSignature::new(spec.m.iter().map(|&v| v as u32).collect())?;
    let mut entries: BTreeMap<(MultiIndex, MultiIndex), (Complex64, usize)> = BTreeMap::new();
    for (i, t) in spec.terms.iter().enumerate() {
        let parse = |v: &[serde_json::Number]| -> Result<MultiIndex, PolyError> {
            if v.len() != sig.inner_dim() {
                return Err(PolyError::TermLength { term: i, expected: sig.inner_dim(), found: v.len() });
            }
            Ok(MultiIndex(v.iter().map(|x| parse_exponent(i, x)).collect::<Result<_, _>>()?))
        };
        let k = parse(&t.k)?;
        let l = parse(&t.l)?;
        let c = Complex64::new(t.re, t.im);
        entries
            .entry((k, l))
            .and_modify(|e| e.0 += c)
            .or_insert((c, i));
    }
    Ok(Parsed { sig, entries })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= HERMITIAN_TOL * a.norm().max(b.norm()).max(1.0)
}

/// Structural checks, returned as issue lists rather than errors.
fn structural_issues(parsed: &Parsed) -> (Vec<TermIssue>, Vec<TermIssue>, bool) {
    let mut herm = Vec::new();
    let mut weight = Vec::new();
    let mut balanced = true;
    let half = Ratio::new(1, 2);
    for ((k, l), &(c, idx)) in &parsed.entries {
        let wk = parsed.sig.weight(k);
        let wl = parsed.sig.weight(l);
        if wk + wl != Ratio::from_integer(1) {
            weight.push(TermIssue { term: idx, message: format!("wt(K) + wt(L) = {}", wk + wl) });
        }
        if wk != half || wl != half {
            balanced = false;
        }
        if k == l {
            if c.im.abs() > HERMITIAN_TOL * c.norm().max(1.0) {
                herm.push(TermIssue {
                    term: idx,
                    message: format!("diagonal coefficient {c} is not real"),
                });
            }
        } else if k < l {
            if let Some(&(partner, pidx)) = parsed.entries.get(&(l.clone(), k.clone())) {
                if !close(partner, c.conj()) {
                    herm.push(TermIssue {
                        term: pidx,
                        message: format!(
                            "coefficient {partner} of (L,K) is not the conjugate of {c} given at term {idx}"
                        ),
                    });
                }
            }
        }
    }
    herm.sort_by_key(|t| t.term);
    weight.sort_by_key(|t| t.term);
    (herm, weight, balanced)
}

fn canonical_terms(parsed: &Parsed) -> Vec<Term> {
    let mut out = Vec::new();
    for ((k, l), &(c, _)) in &parsed.entries {
        if k == l {
            out.push(Term { k: k.clone(), l: l.clone(), coeff: Complex64::new(c.re, 0.0) });
        } else if k < l {
            out.push(Term { k: k.clone(), l: l.clone(), coeff: c });
        } else if !parsed.entries.contains_key(&(l.clone(), k.clone())) {
            // implied partner: store the representative with K < L
            out.push(Term { k: l.clone(), l: k.clone(), coeff: c.conj() });
        }
    }
    out.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
    out
}

/// Full structural and numerical validation of a raw spec.
pub fn validate(spec: &PolynomialSpec, cfg: &SearchConfig) -> Result<ValidationReport, PolyError> {
    let parsed = parse_spec(spec)?;
    let (hermitian_violations, weight_violations, balanced) = structural_issues(&parsed);
    let positivity = if hermitian_violations.is_empty() && weight_violations.is_empty() {
        let poly = WPolynomial::from_parsed(&parsed);
        match comparability_constants(&poly, cfg) {
            Ok(c) => Some(PositivityReport {
                minimum: c.c1,
                maximum: c.c2,
                argmin: point::to_interleaved(&c.argmin),
                positive: c.c1 > POSITIVITY_TOL,
                tolerance: POSITIVITY_TOL,
                restarts: c.restarts,
                converged: c.converged,
            }),
            Err(PolyError::NonConvergence { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let valid = hermitian_violations.is_empty()
        && weight_violations.is_empty()
        && positivity.as_ref().is_some_and(|p| p.positive);
    Ok(ValidationReport { valid, balanced, hermitian_violations, weight_violations, positivity })
}

#[inline]
fn monomial(z: &[Complex64], k: &[u32]) -> Complex64 {
    z.iter()
        .zip(k)
        .fold(Complex64::new(1.0, 0.0), |acc, (zj, &kj)| acc * zj.powu(kj))
}

/// `z^{K - e_j}`, zero when `k_j = 0`.
#[inline]
fn monomial_minus(z: &[Complex64], k: &[u32], j: usize) -> Complex64 {
    if k[j] == 0 {
        return Complex64::new(0.0, 0.0);
    }
    z.iter().zip(k).enumerate().fold(Complex64::new(1.0, 0.0), |acc, (i, (zi, &ki))| {
        acc * zi.powu(if i == j { ki - 1 } else { ki })
    })
}

impl WPolynomial {
    fn from_parsed(parsed: &Parsed) -> Self {
        let terms = canonical_terms(parsed);
        let half = Ratio::new(1, 2);
        let balanced = terms
            .iter()
            .all(|t| parsed.sig.weight(&t.k) == half && parsed.sig.weight(&t.l) == half);
        Self { sig: parsed.sig.clone(), terms, balanced, comparability: OnceLock::new() }
    }

    /// Builds a polynomial, rejecting structural violations. Positivity is
    /// checked lazily by [`WPolynomial::comparability`].
    pub fn from_spec(spec: &PolynomialSpec) -> Result<Self, PolyError> {
        let parsed = parse_spec(spec)?;
        let (herm, weight, _) = structural_issues(&parsed);
        if let Some(w) = weight.into_iter().next() {
            return Err(PolyError::WeightSum { term: w.term, weight: w.message });
        }
        if let Some(h) = herm.into_iter().next() {
            return Err(PolyError::Hermitian { term: h.term, detail: h.message });
        }
        Ok(Self::from_parsed(&parsed))
    }

    /// Convenience constructor from `(K, L, a_KL)` triples.
    pub fn from_terms(m: &[u32], terms: &[(&[u32], &[u32], Complex64)]) -> Result<Self, PolyError> {
        let spec = PolynomialSpec {
            n: m.len() as i64 + 1,
            m: m.iter().map(|&v| v as i64).collect(),
            terms: terms.iter().map(|(k, l, c)| TermSpec::new(k, l, c.re, c.im)).collect(),
        };
        Self::from_spec(&spec)
    }

    /// `σ_Λ` itself.
    pub fn sigma(sig: &WeightSignature) -> Self {
        let n1 = sig.inner_dim();
        let terms = sig
            .m()
            .iter()
            .enumerate()
            .map(|(j, &mj)| {
                let mut k = vec![0; n1];
                k[j] = mj;
                Term { k: MultiIndex(k.clone()), l: MultiIndex(k), coeff: Complex64::new(1.0, 0.0) }
            })
            .collect();
        Self { sig: sig.clone(), terms, balanced: true, comparability: OnceLock::new() }
    }

    /// The canonical spec (one representative per conjugate pair).
    pub fn to_spec(&self) -> PolynomialSpec {
        PolynomialSpec {
            n: self.sig.dim() as i64,
            m: self.sig.m().iter().map(|&v| v as i64).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| TermSpec::new(&t.k.0, &t.l.0, t.coeff.re, t.coeff.im))
                .collect(),
        }
    }

    pub fn signature(&self) -> &WeightSignature {
        &self.sig
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.im == 0.0)
    }

    /// Number of canonical terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Real value of `P(z')`.
    pub fn evaluate(&self, zp: &[Complex64]) -> Result<f64, PolyError> {
        self.sig.check_dim(zp)?;
        Ok(self.eval_unchecked(zp))
    }

    pub(crate) fn eval_unchecked(&self, zp: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let zk = monomial(zp, &t.k.0);
                if t.is_diagonal() {
                    t.coeff.re * zk.norm_sqr()
                } else {
                    2.0 * (t.coeff * zk * monomial(zp, &t.l.0).conj()).re
                }
            })
            .sum()
    }

    /// Raw complex sum over the full expansion (both conjugate partners)
    /// and the sum of term moduli `Σ |a_KL| |z^K conj(z)^L|`.
    pub fn evaluate_raw(&self, zp: &[Complex64]) -> Result<(Complex64, f64), PolyError> {
        self.sig.check_dim(zp)?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for t in &self.terms {
            let zk = monomial(zp, &t.k.0);
            let zl = monomial(zp, &t.l.0);
            let v = t.coeff * zk * zl.conj();
            sum += v;
            abs += v.norm();
            if !t.is_diagonal() {
                let w = t.coeff.conj() * zl * zk.conj();
                sum += w;
                abs += w.norm();
            }
        }
        Ok((sum, abs))
    }

    /// `∂P/∂z_j`
    pub fn wirtinger_gradient(&self, zp: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
        self.sig.check_dim(zp)?;
        Ok(self.grad_unchecked(zp))
    }

    pub(crate) fn grad_unchecked(&self, zp: &[Complex64]) -> Vec<Complex64> {
        let n1 = zp.len();
        let mut g = vec![Complex64::new(0.0, 0.0); n1];
        for t in &self.terms {
            let (k, l) = (&t.k.0, &t.l.0);
            let zk_bar = monomial(zp, k).conj();
            let zl_bar = monomial(zp, l).conj();
            for (j, gj) in g.iter_mut().enumerate() {
                *gj += t.coeff * (k[j] as f64) * monomial_minus(zp, k, j) * zl_bar;
                if !t.is_diagonal() {
                    *gj += t.coeff.conj() * (l[j] as f64) * monomial_minus(zp, l, j) * zk_bar;
                }
            }
        }
        g
    }

    /// Complex Hessian `H_jk = ∂²P/∂z_j∂conj(z_k)`.
    pub fn complex_hessian(&self, zp: &[Complex64]) -> Result<DMatrix<Complex64>, PolyError> {
        self.sig.check_dim(zp)?;
        Ok(self.hessian_unchecked(zp))
    }

    pub(crate) fn hessian_unchecked(&self, zp: &[Complex64]) -> DMatrix<Complex64> {
        let n1 = zp.len();
        let mut h = DMatrix::from_element(n1, n1, Complex64::new(0.0, 0.0));
        for t in &self.terms {
            let (k, l) = (&t.k.0, &t.l.0);
            for j in 0..n1 {
                for i in 0..n1 {
                    let mut v = t.coeff
                        * (k[j] as f64 * l[i] as f64)
                        * monomial_minus(zp, k, j)
                        * monomial_minus(zp, l, i).conj();
                    if !t.is_diagonal() {
                        v += t.coeff.conj()
                            * (l[j] as f64 * k[i] as f64)
                            * monomial_minus(zp, l, j)
                            * monomial_minus(zp, k, i).conj();
                    }
                    h[(j, i)] += v;
                }
            }
        }
        h
    }

    /// Real gradient packed as `∂P/∂x_j + i ∂P/∂y_j = 2 conj(∂P/∂z_j)`.
    pub(crate) fn real_gradient(&self, zp: &[Complex64]) -> Vec<Complex64> {
        self.grad_unchecked(zp).into_iter().map(|g| 2.0 * g.conj()).collect()
    }

    /// Cached [`comparability_constants`] with the default search budget.
    pub fn comparability(&self) -> Result<&Comparability, PolyError> {
        self.comparability
            .get_or_init(|| comparability_constants(self, &SearchConfig::default()))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Comparability constants, failing unless `c1 > POSITIVITY_TOL`.
    pub fn positive_comparability(&self) -> Result<&Comparability, PolyError> {
        let c = self.comparability()?;
        if c.c1 <= POSITIVITY_TOL {
            return Err(PolyError::NotPositive {
                minimum: c.c1,
                argmin: point::to_interleaved(&c.argmin),
            });
        }
        Ok(c)
    }
}

/// `P(u) / σ_Λ(u)` and its real gradient, for `u` on the Euclidean sphere.
fn sphere_ratio(poly: &WPolynomial, x: &[f64]) -> (f64, Vec<f64>) {
    let u = point::from_real(x);
    let p = poly.eval_unchecked(&u);
    let gp = poly.real_gradient(&u);
    let sig = poly.signature();
    let s = sigma_weight_unchecked(sig, &u);
    let mut grad = Vec::with_capacity(x.len());
    for (j, (uj, gpj)) in u.iter().zip(&gp).enumerate() {
        let m = sig.m()[j] as i32;
        let ds = 2.0 * m as f64 * uj.norm_sqr().powi(m - 1);
        grad.push((gpj.re * s - p * ds * uj.re) / (s * s));
        grad.push((gpj.im * s - p * ds * uj.im) / (s * s));
    }
    (p / s, grad)
}

/// `c1 = min`, `c2 = max` of `P` on `{σ_Λ = 1}` by multi-start descent.
///
/// The weighted sphere is parameterized by the Euclidean unit sphere via
/// `u ↦ scale_point(1/σ_Λ(u), u)`; homogeneity makes `P` at the retracted
/// point equal `P(u)/σ_Λ(u)`, so no constraint handling is needed.
pub fn comparability_constants(poly: &WPolynomial, cfg: &SearchConfig) -> Result<Comparability, PolyError> {
    let sig = poly.signature();
    let dim = 2 * sig.inner_dim();
    let mut rng = sampling::seeded(cfg.seed);
    let mut starts: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    starts.extend((0..cfg.restarts).map(|_| sampling::unit_sphere(&mut rng, dim)));

    let mut best_min: Option<(f64, Vec<f64>)> = None;
    let mut best_max: Option<(f64, Vec<f64>)> = None;
    let mut converged = 0;
    for x0 in &starts {
        let lo = optim::descend(&Sphere, |x| Some(sphere_ratio(poly, x)), x0.clone(), cfg.max_iter, cfg.grad_tol);
        let hi = optim::descend(
            &Sphere,
            |x| {
                let (v, g) = sphere_ratio(poly, x);
                Some((-v, g.into_iter().map(|gi| -gi).collect()))
            },
            x0.clone(),
            cfg.max_iter,
            cfg.grad_tol,
        );
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo.converged && hi.converged {
                converged += 1;
            }
            if best_min.as_ref().is_none_or(|(v, _)| lo.value < *v) {
                best_min = Some((lo.value, lo.x));
            }
            if best_max.as_ref().is_none_or(|(v, _)| -hi.value > *v) {
                best_max = Some((-hi.value, hi.x));
            }
        }
    }
    if converged == 0 {
        return Err(PolyError::NonConvergence { restarts: starts.len() });
    }
    let (c1, xmin) = best_min.expect("at least one start");
    let (c2, xmax) = best_max.expect("at least one start");
    Ok(Comparability {
        c1,
        c2,
        argmin: sig.retract_to_weighted_sphere(&point::from_real(&xmin)),
        argmax: sig.retract_to_weighted_sphere(&point::from_real(&xmax)),
        restarts: starts.len(),
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(fixtures::ball().evaluate(&[c(1.0, 0.0)]).unwrap(), 1.0);
        assert_relative_eq!(fixtures::intro_example().evaluate(&[c(1.0, 0.0)]).unwrap(), 1.5, epsilon = 1e-15);
        assert_relative_eq!(fixtures::quartic().evaluate(&[c(1.0, 1.0)]).unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let err = fixtures::ball().evaluate(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap_err();
        assert_eq!(err, PolyError::DimensionMismatch { expected: 1, found: 2 });
    }

    #[test]
    fn scale_point_examples() {
        let s1 = WeightSignature::new(vec![1]).unwrap();
        let s4 = WeightSignature::new(vec![4]).unwrap();
        let z = [c(0.3, -0.7)];
        assert_eq!(scale_point(&s1, 1.0, &z).unwrap(), z.to_vec());
        assert_relative_eq!(scale_point(&s1, 4.0, &[c(1.0, 0.0)]).unwrap()[0].re, 2.0, epsilon = 1e-15);
        assert_relative_eq!(scale_point(&s4, 256.0, &[c(1.0, 0.0)]).unwrap()[0].re, 2.0, epsilon = 1e-14);
        assert_eq!(scale_point(&s1, 0.0, &z), Err(PolyError::NonPositiveScale(0.0)));
        assert!(scale_point(&s1, -1.0, &z).is_err());
    }

    #[test]
    fn sigma_weight_examples() {
        let s11 = WeightSignature::new(vec![1, 1]).unwrap();
        let s2 = WeightSignature::new(vec![2]).unwrap();
        let s12 = WeightSignature::new(vec![1, 2]).unwrap();
        assert_eq!(sigma_weight(&s11, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 1.0);
        assert_relative_eq!(sigma_weight(&s2, &[c(1.0, 1.0)]).unwrap(), 4.0, epsilon = 1e-14);
        assert_relative_eq!(sigma_weight(&s12, &[c(2.0, 0.0), c(1.0, 0.0)]).unwrap(), 5.0);
    }

    #[test]
    fn exact_weights() {
        let s = WeightSignature::new(vec![4]).unwrap();
        assert_eq!(s.weight(&MultiIndex(vec![7])), Ratio::new(7, 8));
        assert_eq!(s.weight(&MultiIndex(vec![4])), Ratio::new(1, 2));
    }

    #[test]
    fn validate_ball_is_balanced_and_positive() {
        let r = validate(&fixtures::ball().to_spec(), &SearchConfig::default()).unwrap();
        assert!(r.valid && r.balanced);
        let pos = r.positivity.unwrap();
        assert_relative_eq!(pos.minimum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn validate_intro_example_is_unbalanced() {
        let r = validate(&fixtures::intro_example().to_spec(), &SearchConfig::default()).unwrap();
        assert!(r.valid);
        assert!(!r.balanced);
        assert!(r.weight_violations.is_empty() && r.hermitian_violations.is_empty());
    }

    #[test]
    fn validate_reports_non_real_diagonal() {
        let spec = PolynomialSpec { n: 2, m: vec![1], terms: vec![TermSpec::new(&[1], &[1], 0.0, 1.0)] };
        let r = validate(&spec, &SearchConfig::default()).unwrap();
        assert!(!r.valid);
        assert_eq!(r.hermitian_violations.len(), 1);
        assert_eq!(r.hermitian_violations[0].term, 0);
        assert!(r.positivity.is_none());
    }

    #[test]
    fn validate_reports_inconsistent_partner() {
        let spec = PolynomialSpec {
            n: 2,
            m: vec![4],
            terms: vec![
                TermSpec::new(&[4], &[4], 1.0, 0.0),
                TermSpec::new(&[7], &[1], 0.25, 0.1),
                TermSpec::new(&[1], &[7], 0.25, 0.1),
            ],
        };
        let r = validate(&spec, &SearchConfig::default()).unwrap();
        assert_eq!(r.hermitian_violations.len(), 1);
        assert!(WPolynomial::from_spec(&spec).is_err());
    }

    #[test]
    fn validate_reports_weight_violation() {
        let spec = PolynomialSpec {
            n: 2,
            m: vec![2],
            terms: vec![TermSpec::new(&[2], &[2], 1.0, 0.0), TermSpec::new(&[1], &[1], 1.0, 0.0)],
        };
        let r = validate(&spec, &SearchConfig::default()).unwrap();
        assert_eq!(r.weight_violations.len(), 1);
        assert_eq!(r.weight_violations[0].term, 1);
        assert_eq!(
            WPolynomial::from_spec(&spec).unwrap_err(),
            PolyError::WeightSum { term: 1, weight: "wt(K) + wt(L) = 1/2".into() }
        );
    }

    #[test]
    fn validate_rejects_bad_input() {
        let empty = PolynomialSpec { n: 2, m: vec![1], terms: vec![] };
        assert_eq!(validate(&empty, &SearchConfig::default()), Err(PolyError::EmptyTerms));
        let zero_m = PolynomialSpec { n: 2, m: vec![0], terms: vec![TermSpec::new(&[1], &[1], 1.0, 0.0)] };
        assert!(matches!(validate(&zero_m, &SearchConfig::default()), Err(PolyError::NonPositiveWeight { .. })));
        let frac: PolynomialSpec =
            serde_json::from_str(r#"{"n":2,"m":[1],"terms":[{"K":[1.5],"L":[0.5],"re":1}]}"#).unwrap();
        assert!(matches!(
            validate(&frac, &SearchConfig::default()),
            Err(PolyError::NonIntegerExponent { term: 0, .. })
        ));
        let bad_n = PolynomialSpec { n: 3, m: vec![1], terms: vec![TermSpec::new(&[1], &[1], 1.0, 0.0)] };
        assert!(matches!(validate(&bad_n, &SearchConfig::default()), Err(PolyError::SignatureMismatch { .. })));
    }

    #[test]
    fn indefinite_polynomial_fails_positivity() {
        // |z1|^2 - |z2|^2 vanishes on |z1| = |z2|
        let p = WPolynomial::from_terms(
            &[1, 1],
            &[(&[1, 0], &[1, 0], c(1.0, 0.0)), (&[0, 1], &[0, 1], c(-1.0, 0.0))],
        )
        .unwrap();
        let r = validate(&p.to_spec(), &SearchConfig::default()).unwrap();
        assert!(!r.valid);
        assert!(!r.positivity.as_ref().unwrap().positive);
        assert!(matches!(p.positive_comparability(), Err(PolyError::NotPositive { .. })));
    }

    #[test]
    fn comparability_of_sigma_is_one() {
        for m in [vec![1], vec![2], vec![1, 2], vec![2, 3]] {
            let sig = WeightSignature::new(m).unwrap();
            let c = WPolynomial::sigma(&sig).comparability().unwrap().clone();
            assert_relative_eq!(c.c1, 1.0, epsilon = 1e-12);
            assert_relative_eq!(c.c2, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn comparability_of_intro_example_matches_theta_grid() {
        // oracle: P = 1 + cos(6θ)/2 on |z1| = 1, dense θ grid
        let p = fixtures::intro_example();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..200_000 {
            let th = i as f64 * std::f64::consts::TAU / 200_000.0;
            let v = p.evaluate(&[Complex64::from_polar(1.0, th)]).unwrap();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert_relative_eq!(lo, 0.5, epsilon = 1e-9);
        assert_relative_eq!(hi, 1.5, epsilon = 1e-9);
        let c = p.comparability().unwrap();
        assert_relative_eq!(c.c1, lo, epsilon = 1e-9);
        assert_relative_eq!(c.c2, hi, epsilon = 1e-9);
    }

    #[test]
    fn hessian_examples() {
        let h = fixtures::ball().complex_hessian(&[c(0.4, -0.2)]).unwrap();
        assert_relative_eq!(h[(0, 0)].re, 1.0, epsilon = 1e-15);
        let q = fixtures::quartic();
        assert_eq!(q.complex_hessian(&[c(0.0, 0.0)]).unwrap()[(0, 0)], c(0.0, 0.0));
        // oracle: central differences of evaluate, (f_xx + f_yy)/4
        let f = |x: f64, y: f64| q.evaluate(&[c(x, y)]).unwrap();
        let h0 = 1e-4;
        let lap = (f(1.0 + h0, 1.0) + f(1.0 - h0, 1.0) + f(1.0, 1.0 + h0) + f(1.0, 1.0 - h0) - 4.0 * f(1.0, 1.0))
            / (h0 * h0);
        assert_relative_eq!(lap / 4.0, 8.0, epsilon = 1e-5);
        assert_relative_eq!(q.complex_hessian(&[c(1.0, 1.0)]).unwrap()[(0, 0)].re, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn implied_partner_equals_explicit_partner() {
        let implied = fixtures::intro_example();
        let explicit = WPolynomial::from_terms(
            &[4],
            &[
                (&[4], &[4], c(1.0, 0.0)),
                (&[7], &[1], c(0.25, 0.0)),
                (&[1], &[7], c(0.25, 0.0)),
            ],
        )
        .unwrap();
        let z = [c(0.3, 0.8)];
        assert_relative_eq!(implied.evaluate(&z).unwrap(), explicit.evaluate(&z).unwrap(), epsilon = 1e-15);
        assert_eq!(implied.term_count(), explicit.term_count());
    }
}
