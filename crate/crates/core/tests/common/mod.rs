//! Shared generators for the property tests.
#![allow(dead_code)]

use dpsqueeze::schema::{PolynomialSpec, TermSpec};
use dpsqueeze::{Complex64, Point, WPolynomial};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// All exponent pairs `(K, L)` with `wt(K) + wt(L) = 1`, `K <= L`.
pub fn homogeneous_pairs(m: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
    let total: u32 = m.iter().map(|v| 2 * v).product();
    let indices = |m: &[u32]| {
        let mut out = vec![vec![]];
        for &mj in m {
            out = out
                .into_iter()
                .flat_map(|p: Vec<u32>| {
                    (0..=2 * mj).map(move |k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        out
    };
    let weight = |k: &[u32]| k.iter().zip(m).map(|(kj, mj)| kj * total / (2 * mj)).sum::<u32>();
    let all = indices(m);
    let mut pairs = Vec::new();
    for k in &all {
        for l in &all {
            if k <= l && weight(k) + weight(l) == total {
                pairs.push((k.clone(), l.clone()));
            }
        }
    }
    pairs
}

/// Random weighted-homogeneous polynomial: positive pure powers plus a
/// few random cross terms.
pub fn arb_poly() -> impl Strategy<Value = WPolynomial> {
    let sig = prop_oneof![
        (1u32..=4).prop_map(|a| vec![a]),
        ((1u32..=3), (1u32..=3)).prop_map(|(a, b)| vec![a, b]),
    ];
    sig.prop_flat_map(|m| {
        let pairs = homogeneous_pairs(&m);
        let n = pairs.len();
        (Just(m), Just(pairs), prop::collection::vec((-0.3f64..0.3, -0.3f64..0.3, any::<bool>()), n))
    })
    .prop_map(|(m, pairs, coeffs)| {
        let mut terms = Vec::new();
        for ((k, l), (re, im, keep)) in pairs.into_iter().zip(coeffs) {
            let pure = k == l && k.iter().filter(|v| **v > 0).count() == 1;
            if pure {
                terms.push(TermSpec::new(&k, &l, 1.0, 0.0));
            } else if keep {
                let im = if k == l { 0.0 } else { im };
                terms.push(TermSpec::new(&k, &l, re, im));
            }
        }
        let spec = PolynomialSpec { n: m.len() as i64 + 1, m: m.iter().map(|&v| v as i64).collect(), terms };
        WPolynomial::from_spec(&spec).expect("generated polynomial is valid")
    })
}

pub fn arb_point(dim: usize, radius: f64) -> impl Strategy<Value = Point> {
    prop::collection::vec((-radius..radius, -radius..radius), dim)
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}
