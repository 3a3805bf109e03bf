//! Seeded random streams and sphere sampling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::point::Point;
use crate::wpoly::WeightSignature;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point on the unit sphere of R^dim.
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point on the unit sphere of C^dim.
pub fn unit_complex_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Point {
    let v = unit_sphere(rng, 2 * dim);
    v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// Random point of the weighted sphere `{σ_Λ(z') = 1}`.
pub fn weighted_direction<R: Rng + ?Sized>(sig: &WeightSignature, rng: &mut R) -> Point {
    let u = unit_complex_sphere(rng, sig.inner_dim());
    sig.retract_to_weighted_sphere(&u)
}

pub fn phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}
