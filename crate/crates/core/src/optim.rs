//! Riemannian gradient descent on spheres and products of spheres.
//!
//! Every search in the crate (sphere extrema of P, boundary distances,
//! circumscribed radii, diameters) reduces to a smooth objective on a
//! compact manifold, so one descent routine with backtracking serves them
//! all. Maximization is done by negating the objective.

use serde::{Deserialize, Serialize};

/// Multi-start local search budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iter: 500,
            grad_tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

pub(crate) trait Manifold {
    /// Projects an ambient gradient onto the tangent space at `x`.
    fn project(&self, x: &[f64], g: &mut [f64]);
    fn retract(&self, x: &mut [f64]);
}

/// Unit sphere in R^d.
pub(crate) struct Sphere;

/// Product of two unit spheres, split at `split`.
pub(crate) struct SpherePair {
    pub split: usize,
}

fn project_sphere(x: &[f64], g: &mut [f64]) {
    let dot: f64 = x.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
    for (gi, xi) in g.iter_mut().zip(x) {
        *gi -= dot * xi;
    }
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

impl Manifold for Sphere {
    fn project(&self, x: &[f64], g: &mut [f64]) {
        project_sphere(x, g);
    }
    fn retract(&self, x: &mut [f64]) {
        normalize(x);
    }
}

impl Manifold for SpherePair {
    fn project(&self, x: &[f64], g: &mut [f64]) {
        let (g1, g2) = g.split_at_mut(self.split);
        project_sphere(&x[..self.split], g1);
        project_sphere(&x[self.split..], g2);
    }
    fn retract(&self, x: &mut [f64]) {
        let (a, b) = x.split_at_mut(self.split);
        normalize(a);
        normalize(b);
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    #[allow(dead_code)]
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `objective` from `x0`. The objective returns the value and the
/// ambient gradient, or `None` where it is undefined (treated as a rejected
/// step).
pub(crate) fn descend<M, F>(
    manifold: &M,
    mut objective: F,
    mut x: Vec<f64>,
    max_iter: usize,
    grad_tol: f64,
) -> Option<LocalResult>
where
    M: Manifold,
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    manifold.retract(&mut x);
    let (mut fx, mut g) = objective(&x)?;
    manifold.project(&x, &mut g);
    let mut step = 1.0_f64;
    let mut trial = vec![0.0; x.len()];
    let mut stalled = 0;

    for it in 0..max_iter {
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm <= grad_tol {
            return Some(LocalResult { x, value: fx, iterations: it, converged: true });
        }
        // keep the geodesic step below half a radian
        step = step.min(0.5 / gnorm);
        let mut accepted = None;
        while step * gnorm > 1e-17 {
            for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&g) {
                *t = xi - step * gi;
            }
            manifold.retract(&mut trial);
            if let Some((ft, gt)) = objective(&trial) {
                if ft <= fx - 1e-4 * step * gnorm * gnorm {
                    accepted = Some((ft, gt));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((ft, mut gt)) => {
                // decreases at rounding level carry no information
                if fx - ft <= 4.0 * f64::EPSILON * fx.abs().max(1e-300) {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
                std::mem::swap(&mut x, &mut trial);
                manifold.project(&x, &mut gt);
                fx = ft;
                g = gt;
                step *= 2.0;
                if stalled >= 3 && gnorm < 1e-6 {
                    return Some(LocalResult { x, value: fx, iterations: it + 1, converged: true });
                }
            }
            None => {
                // no decrease representable in floating point: stationary
                return Some(LocalResult { x, value: fx, iterations: it, converged: gnorm < 1e-6 });
            }
        }
    }
    let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    Some(LocalResult { x, value: fx, iterations: max_iter, converged: gnorm <= grad_tol })
}

/// Central finite-difference gradient.
pub(crate) fn fd_gradient<F: FnMut(&[f64]) -> Option<f64>>(
    mut f: F,
    x: &[f64],
    h: f64,
) -> Option<Vec<f64>> {
    let mut xp = x.to_vec();
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f(&xp)?;
        xp[i] = orig - h;
        let fm = f(&xp)?;
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    Some(g)
}
