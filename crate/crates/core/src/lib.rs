//! Numerical toolkit for general complex ellipsoids
//! `D_P = {|z_n|^2 + P(z') < 1}` with `P` weighted homogeneous.
//!
//! - [`wpoly`]: the polynomial `P`, its derivatives and sphere extrema.
//! - [`domains`]: `D_P`, `D^r`, the Siegel model `E_P`, horospheres `D(r)`,
//!   cone regions, and inscribed/circumscribed radii.
//! - [`holomaps`]: the Cayley map, ellipsoid automorphisms, dilations and
//!   the normalization `ψ∘Λ_λ`.
//! - [`levi`]: Levi-form eigenvalues and the WB-domain sampling check.
//! - [`squeeze`]: lower bounds for the squeezing function.

pub mod domains;
pub mod fixtures;
pub mod holomaps;
pub mod levi;
pub mod optim;
pub mod point;
pub mod sampling;
pub mod schema;
pub mod squeeze;
pub mod wpoly;

pub use num_complex::Complex64;
pub use point::Point;
pub use wpoly::{WPolynomial, WeightSignature};
