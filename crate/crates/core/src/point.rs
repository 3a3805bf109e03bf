//! Points of C^n and their interleaved `[re, im, re, im, ...]` encoding.

use num_complex::Complex64;
use thiserror::Error;

/// A point of C^n, coordinates ordered `(z_1, ..., z_{n-1}, z_n)`.
pub type Point = Vec<Complex64>;

#[derive(Debug, Error, PartialEq)]
pub enum PointParseError {
    #[error("point has an odd number of real components ({0}); expected interleaved re,im pairs")]
    OddLength(usize),
    #[error("cannot parse `{0}` as a real number")]
    BadNumber(String),
    #[error("empty point")]
    Empty,
}

pub fn to_interleaved(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn from_interleaved(v: &[f64]) -> Result<Point, PointParseError> {
    if v.is_empty() {
        return Err(PointParseError::Empty);
    }
    if !v.len().is_multiple_of(2) {
        return Err(PointParseError::OddLength(v.len()));
    }
    Ok(v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

/// Parses `"0,0,0.01,0"` into `(0+0i, 0.01+0i)`.
pub fn parse_point(s: &str) -> Result<Point, PointParseError> {
    let vals = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| PointParseError::BadNumber(t.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    from_interleaved(&vals)
}

pub fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn to_real(z: &[Complex64]) -> Vec<f64> {
    to_interleaved(z)
}

pub(crate) fn from_real(v: &[f64]) -> Point {
    v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// Serde adapter: a point as a flat interleaved array.
pub mod interleaved {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        to_interleaved(z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Point, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        from_interleaved(&v).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(z: &Option<Point>, s: S) -> Result<S::Ok, S::Error> {
            z.as_ref().map(|p| to_interleaved(p)).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Point>, D::Error> {
            Option::<Vec<f64>>::deserialize(d)?
                .map(|v| from_interleaved(&v).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}
