//! Standard polynomials used throughout the tests, the CLI examples and the
//! browser demo.

use num_complex::Complex64;

use crate::wpoly::WPolynomial;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `|z_1|^2`, m = (1): D_P is the unit ball of C^2.
pub fn ball() -> WPolynomial {
    WPolynomial::from_terms(&[1], &[(&[1], &[1], one())]).expect("valid fixture")
}

/// `|z_1|^{2m}`, weight (m).
pub fn power(m: u32) -> WPolynomial {
    WPolynomial::from_terms(&[m], &[(&[m], &[m], one())]).expect("valid fixture")
}

/// `|z_1|^4`, m = (2).
pub fn quartic() -> WPolynomial {
    power(2)
}

/// `|z_1|^4 + |z_2|^6`, m = (2, 3).
pub fn two_variable() -> WPolynomial {
    WPolynomial::from_terms(&[2, 3], &[(&[2, 0], &[2, 0], one()), (&[0, 3], &[0, 3], one())])
        .expect("valid fixture")
}

/// `|z_1|^8 + |z_1|^2 Re(z_1^6)/2`, m = (4). Not balanced.
pub fn intro_example() -> WPolynomial {
    perturbed_power(4, 0.5)
}

/// `|z_1|^{2m} + κ |z_1|^2 Re(z_1^{2m-2})`, m ≥ 2, positive for `|κ| < 1`.
pub fn perturbed_power(m: u32, kappa: f64) -> WPolynomial {
    let c = Complex64::new(kappa / 2.0, 0.0);
    WPolynomial::from_terms(&[m], &[(&[m], &[m], one()), (&[2 * m - 1], &[1], c)]).expect("valid fixture")
}

/// Balanced, non-diagonal: `|z_1|^4 + |z_2|^4 + κ Re(z_1^2 conj(z_2)^2)`, m = (2, 2),
/// positive for `|κ| < 2`.
pub fn coupled_quartic(kappa: f64) -> WPolynomial {
    WPolynomial::from_terms(
        &[2, 2],
        &[
            (&[2, 0], &[2, 0], one()),
            (&[0, 2], &[0, 2], one()),
            (&[2, 0], &[0, 2], Complex64::new(kappa / 2.0, 0.0)),
        ],
    )
    .expect("valid fixture")
}
