//! JSON input formats: polynomial, domain and map descriptors.

use serde::{Deserialize, Serialize};

/// `{"n": 2, "m": [4], "terms": [{"K": [4], "L": [4], "re": 1.0, "im": 0.0}, ...]}`
///
/// Terms list coefficients `a_KL` of the Hermitian expansion. An off-diagonal
/// term whose conjugate partner `(L, K)` is absent has the partner implied;
/// when both are given they must be conjugate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSpec {
    pub n: i64,
    pub m: Vec<i64>,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(rename = "K")]
    pub k: Vec<serde_json::Number>,
    #[serde(rename = "L")]
    pub l: Vec<serde_json::Number>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl TermSpec {
    pub fn new(k: &[u32], l: &[u32], re: f64, im: f64) -> Self {
        Self {
            k: k.iter().map(|&v| v.into()).collect(),
            l: l.iter().map(|&v| v.into()).collect(),
            re,
            im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `|z_n|^2 + P(z')/r < 1`
    #[default]
    Ellipsoid,
    /// `P(z')/r < 2 Re z_n`
    Siegel,
    /// `λ|z_n|^2 + P(z') < 2 r Re z_n`
    Horosphere,
}

fn one() -> f64 {
    1.0
}

/// Polynomial spec plus the model selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub poly: PolynomialSpec,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Cayley,
    Automorphism,
    Dilation,
    Normalization,
    Identity,
}

/// `{"map": "automorphism", "a": [0.3, 0.1], "theta": 0.5}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub map: MapKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_domain_spec_with_defaults() {
        let s = r#"{"n": 2, "m": [1], "terms": [{"K": [1], "L": [1], "re": 1.0}]}"#;
        let d: DomainSpec = serde_json::from_str(s).unwrap();
        assert_eq!(d.model, ModelKind::Ellipsoid);
        assert_eq!(d.r, 1.0);
        assert_eq!(d.poly.terms[0].im, 0.0);
    }

    #[test]
    fn parses_map_descriptor() {
        let m: MapSpec = serde_json::from_str(r#"{"map": "automorphism", "a": [0.1, 0.2], "theta": 1.0}"#).unwrap();
        assert_eq!(m.map, MapKind::Automorphism);
        assert_eq!(m.a, Some([0.1, 0.2]));
    }
}
