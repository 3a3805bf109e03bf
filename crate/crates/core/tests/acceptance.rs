//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use dpsqueeze::domains::{self, Domain, GeneralEllipsoid, GeometryConfig};
use dpsqueeze::holomaps::{self, CayleyMap, Dilation, EllipsoidAutomorphism, HolomorphicMap};
use dpsqueeze::levi::{self, WbConfig, LEVI_TOL};
use dpsqueeze::squeeze::{self, ExtremeParams, OrbitCase, SqueezeConfig, SqueezeError};
use dpsqueeze::{fixtures, point, sampling, Complex64, Point, WPolynomial};
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit(p: WPolynomial) -> GeneralEllipsoid {
    GeneralEllipsoid::unit(Arc::new(p)).expect("fixture is positive")
}

struct Outcome {
    failures: Vec<String>,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { failures: Vec::new(), details: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.details.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn time(&mut self, start: Instant, limit: Duration) {
        let el = start.elapsed();
        self.check(el < limit, format!("runtime {:.2?} < {:?}", el, limit));
    }
}

fn map_identities() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let fixtures = [
        ("|z1|^2", fixtures::ball()),
        ("|z1|^4", fixtures::quartic()),
        ("|z1|^4+|z2|^6", fixtures::two_variable()),
    ];
    for (name, poly) in fixtures {
        let dom = unit(poly.clone());
        let psi = CayleyMap::new(&poly).unwrap();
        let pts = domains::sample_interior(&dom, 10_000, 11);
        let mut inv: f64 = 0.0;
        let mut ident: f64 = 0.0;
        for z in &pts {
            let w = psi.apply(z).unwrap();
            let back = psi.apply(&w).unwrap();
            inv = inv.max(point::distance(&back, z));
            ident = ident.max(holomaps::cayley_identity_residual(&poly, z, &w));
        }
        out.check(inv <= 1e-9, format!("{name}: max |ψψz - z| = {inv:.2e}"));
        out.check(ident <= 1e-9, format!("{name}: Cayley identity residual {ident:.2e}"));

        let mut rng = sampling::seeded(12);
        let mut disagreements = 0;
        for k in 0..1_000 {
            let a = rng.random::<f64>().sqrt() * 0.95 * sampling::phase(&mut rng);
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let phi = HolomorphicMap::Automorphism(EllipsoidAutomorphism::new(&poly, a, theta).unwrap());
            let rep = holomaps::verify_map(&phi, &dom, &dom, 10, 1_000 + k);
            disagreements += rep.sign_disagreements;
            // each interior sample goes through exactly one of the maps
            for z in &pts[10 * k as usize..10 * (k as usize + 1)] {
                if !dom.contains(&phi.apply(z).unwrap()).unwrap() {
                    disagreements += 1;
                }
            }
        }
        out.check(disagreements == 0, format!("{name}: φ sign disagreements over 10^3 (a, θ): {disagreements}"));

        let sig = poly.signature();
        let mut group: f64 = 0.0;
        for (k, z) in pts.iter().take(1_000).enumerate() {
            let (l, m) = (0.1 + (k % 17) as f64 * 0.3, 0.2 + (k % 5) as f64 * 0.7);
            let (dl, dm) = (Dilation::new(sig, l).unwrap(), Dilation::new(sig, m).unwrap());
            let two = dl.apply(&dm.apply(z).unwrap()).unwrap();
            let one = dl.compose(&dm).apply(z).unwrap();
            group = group.max(point::distance(&one, &two));
        }
        out.check(group <= 1e-12, format!("{name}: Λ group law residual {group:.2e}"));
    }
    out.time(start, Duration::from_secs(30));
    out
}

/// `∂²f/∂z_j∂conj(z_k)` by central differences of the real function `f`.
fn fd_complex_hessian(f: &dyn Fn(&[Complex64]) -> f64, z: &[Complex64], h: f64) -> Vec<Vec<Complex64>> {
    let n = z.len();
    let shift = |z: &[Complex64], i: usize, di: Complex64, j: usize, dj: Complex64| {
        let mut w = z.to_vec();
        w[i] += di;
        w[j] += dj;
        f(&w)
    };
    let second = |i: usize, di: Complex64, j: usize, dj: Complex64| {
        (shift(z, i, di * h, j, dj * h) - shift(z, i, di * h, j, -dj * h) - shift(z, i, -di * h, j, dj * h)
            + shift(z, i, -di * h, j, -dj * h))
            / (4.0 * h * h)
    };
    let (x, y) = (c(1.0, 0.0), c(0.0, 1.0));
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let re = second(j, x, k, x) + second(j, y, k, y);
                    let im = second(j, x, k, y) - second(j, y, k, x);
                    c(re, im) / 4.0
                })
                .collect()
        })
        .collect()
}

fn levi_suite() -> Outcome {
    let mut out = Outcome::new();
    let ball = unit(fixtures::ball());
    let pts = domains::sample_boundary(&ball, 1_000, 21);
    let worst = pts
        .iter()
        .map(|q| (levi::levi_report(&ball, q, LEVI_TOL).unwrap().min_eigenvalue() - 1.0).abs())
        .fold(0.0, f64::max);
    out.check(worst <= 1e-8, format!("ball: max |λ - 1| = {worst:.2e} over 10^3 points"));

    let quartic = unit(fixtures::quartic());
    let e = levi::levi_report(&quartic, &[c(0.0, 0.0), c(1.0, 0.0)], LEVI_TOL).unwrap().min_eigenvalue();
    out.check(e <= 1e-8, format!("|z1|^4 at (0,1): min eigenvalue {e:.2e}"));

    let mut worst_rel: f64 = 0.0;
    for poly in [fixtures::quartic(), fixtures::two_variable(), fixtures::intro_example(), fixtures::coupled_quartic(0.7)] {
        let mut rng = sampling::seeded(22);
        let n1 = poly.signature().inner_dim();
        for _ in 0..20 {
            let z: Point = (0..n1).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let sym = poly.complex_hessian(&z).unwrap();
            let f = |w: &[Complex64]| poly.evaluate(w).unwrap();
            let fd = fd_complex_hessian(&f, &z, 1e-4);
            let scale = sym.norm().max(1e-12);
            let mut err: f64 = 0.0;
            for j in 0..n1 {
                for k in 0..n1 {
                    err = err.max((sym[(j, k)] - fd[j][k]).norm());
                }
            }
            worst_rel = worst_rel.max(err / scale);
        }
    }
    out.check(worst_rel <= 1e-5, format!("Hessian vs finite differences: relative error {worst_rel:.2e}"));
    out
}

fn wb_certification() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let dom = unit(fixtures::intro_example());
    let mut mins = Vec::new();
    for radius in [0.3, 0.1, 0.03] {
        let cfg = WbConfig {
            exclusion_radius: radius,
            samples: 10_000,
            seed: 31,
            trend_factors: vec![1.0],
            trend_samples: 0,
            ..WbConfig::default()
        };
        let rep = levi::wb_check(&dom, &cfg);
        out.check(
            rep.pass && rep.samples == 10_000 && rep.min_eigenvalue > 0.0,
            format!("radius {radius}: min eigenvalue {:.4e} over {} samples", rep.min_eigenvalue, rep.samples),
        );
        // {σ >= 0.03} ⊃ {σ >= 0.1} ⊃ {σ >= 0.3}: the minimum over the union
        let prev = mins.last().copied().unwrap_or(f64::INFINITY);
        mins.push(rep.min_eigenvalue.min(prev));
    }
    let monotone = mins.windows(2).all(|w| w[1] <= w[0]) && mins[2] < mins[0];
    out.check(monotone, format!("trend decreasing toward the circle: {mins:?}"));
    out.time(start, Duration::from_secs(60));
    out
}

fn ball_bounds() -> Outcome {
    let mut out = Outcome::new();
    let ball = unit(fixtures::ball());
    let cfg = SqueezeConfig { uniform_samples: 0, ..SqueezeConfig::default() };
    let b0 = squeeze::lemma21_bound(&ball, &[c(0.0, 0.0), c(0.0, 0.0)], &cfg).unwrap().bound;
    out.check((b0 - 1.0).abs() <= 1e-9, format!("lemma21(0,0) = {b0:.12}"));
    let b1 = squeeze::lemma21_bound(&ball, &[c(0.0, 0.0), c(0.5, 0.0)], &cfg).unwrap().bound;
    out.check((b1 - 1.0 / 3.0).abs() <= 1e-6, format!("lemma21(0,0.5) = {b1:.9}"));
    let worst = domains::sample_interior(&ball, 100, 41)
        .iter()
        .map(|p| (squeeze::slice_reduced_bound(&ball, p, &cfg).unwrap().bound - 1.0).abs())
        .fold(0.0, f64::max);
    out.check(worst <= 1e-6, format!("slice-reduced: max |bound - 1| = {worst:.2e} over 100 points"));
    let prof = squeeze::hhr_scan(&ball, &[0.19], 16, 42, &GeometryConfig::default()).unwrap();
    let h = prof.levels[0].bound;
    out.check((h - 0.0526).abs() <= 1e-3, format!("hhr_scan(ε = 0.19) = {h:.6}"));
    out
}

fn extreme_pipeline() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let poly = Arc::new(fixtures::ball());
    let params = ExtremeParams { r: 1.0, r_prime: 0.5, c: 1.0 };
    let cfg = SqueezeConfig::default();
    let mut bounds = Vec::new();
    for t in [0.1, 0.05, 0.01] {
        let rep = squeeze::extreme_point_bound(poly.clone(), params, &[c(0.0, 0.0), c(t, 0.0)], &cfg).unwrap();
        let lambda = rep.trace.lambda.unwrap();
        out.check((lambda - t).abs() <= 1e-12, format!("t = {t}: λ = {lambda}"));
        out.check((0.3..=0.5).contains(&rep.bound), format!("t = {t}: bound {:.6}", rep.bound));
        bounds.push(rep.bound);
    }
    out.check(bounds.windows(2).all(|w| w[1] > w[0]), format!("bound increases toward 1/2: {bounds:.6?}"));
    let err = squeeze::extreme_point_bound(poly, params, &[c(0.0, 0.0), c(0.05, 0.2)], &cfg);
    out.check(
        matches!(err, Err(SqueezeError::ConeMembership { .. })),
        "point outside the cone rejected with a cone-membership error",
    );
    out.time(start, Duration::from_secs(30));
    out
}

fn appendix_dichotomy() -> Outcome {
    let mut out = Outcome::new();
    let dom = unit(fixtures::quartic());
    let case1: Vec<Point> = (2..=2_000).map(|j| vec![c(0.0, 0.0), c(1.0 - 1.0 / j as f64, 0.0)]).collect();
    let t1 = squeeze::orbit_trace(&dom, &case1).unwrap();
    let zero = t1.records.iter().all(|r| r.p_image == 0.0);
    out.check(t1.case == OrbitCase::Case1 && zero, format!("(0', 1 - 1/j): {:?}, P(b_j) = 0: {zero}", t1.case));

    let js: Vec<f64> = (2..=4_000).map(f64::from).collect();
    let case2: Vec<Point> = js
        .iter()
        .map(|&j| {
            let an: f64 = 1.0 - 1.0 / j.sqrt();
            let p = (1.0 - 1.0 / j) * (1.0 - an * an);
            vec![c(p.powf(0.25), 0.0), c(an, 0.0)]
        })
        .collect();
    let t2 = squeeze::orbit_trace(&dom, &case2).unwrap();
    let dev = t2.records.iter().zip(&js).map(|(r, j)| (r.p_image - (1.0 - 1.0 / j)).abs()).fold(0.0, f64::max);
    let id = t2.records.iter().map(|r| r.identity_residual).fold(0.0, f64::max);
    out.check(t2.case == OrbitCase::Case2, format!("P(a') = (1 - 1/j)(1 - |a_n|^2): {:?}", t2.case));
    out.check(dev <= 1e-12, format!("max |P(b_j) - (1 - 1/j)| = {dev:.2e}"));
    out.check(id <= 1e-12, format!("identity residual {id:.2e}"));
    out
}

/// Phase-aligned boundary points `(s, sqrt(1 - s^4))` of `|z2|^2 + |z1|^4 = 1`.
fn quartic_profile(a: f64, b: f64, sign: f64) -> f64 {
    let f = |s: f64| (a + sign * s).powi(2) + (b + sign * (1.0 - s.powi(4)).max(0.0).sqrt()).powi(2);
    let n = 20_000;
    let mut best = (0.0, f(0.0));
    for k in 1..=n {
        let s = k as f64 / n as f64;
        let v = f(s);
        if (sign < 0.0 && v < best.1) || (sign > 0.0 && v > best.1) {
            best = (s, v);
        }
    }
    // golden-section polish on the bracketing cell
    let (mut lo, mut hi) = ((best.0 - 1.0 / n as f64).max(0.0), (best.0 + 1.0 / n as f64).min(1.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        let better = if sign < 0.0 { f(x1) < f(x2) } else { f(x1) > f(x2) };
        if better {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let v = f(0.5 * (lo + hi));
    let v = if sign < 0.0 { v.min(best.1) } else { v.max(best.1) };
    v.sqrt()
}

fn geometry_oracles() -> Outcome {
    let mut out = Outcome::new();
    let dom = unit(fixtures::quartic());
    let cfg = GeometryConfig::default();
    let mut worst_r: f64 = 0.0;
    let mut worst_big: f64 = 0.0;
    for z in domains::sample_interior(&dom, 20, 71) {
        let (a, b) = (z[0].norm(), z[1].norm());
        let r = domains::boundary_distance(&dom, &z, &cfg).unwrap().distance;
        let big = domains::circumscribed_radius(&dom, &z, &cfg).unwrap().radius;
        worst_r = worst_r.max((r - quartic_profile(a, b, -1.0)).abs());
        worst_big = worst_big.max((big - quartic_profile(a, b, 1.0)).abs());
    }
    out.check(worst_r <= 1e-4, format!("boundary_distance vs oracle: max error {worst_r:.2e}"));
    out.check(worst_big <= 1e-4, format!("circumscribed_radius vs oracle: max error {worst_big:.2e}"));
    out
}

fn reports_json(seed: u64) -> String {
    let dom = unit(fixtures::intro_example());
    let wb = levi::wb_check(&dom, &WbConfig { samples: 500, trend_samples: 100, seed, ..WbConfig::default() });
    let cfg = SqueezeConfig { seed, uniform_samples: 8, geometry: GeometryConfig { seed, ..GeometryConfig::default() } };
    let ext = squeeze::extreme_point_bound(
        Arc::new(fixtures::quartic()),
        ExtremeParams { r: 1.0, r_prime: 0.5, c: 1.0 },
        &[c(0.01, 0.0), c(0.02, 0.0)],
        &cfg,
    )
    .unwrap();
    let hhr = squeeze::hhr_scan(&unit(fixtures::quartic()), &[0.5, 0.2], 4, seed, &cfg.geometry).unwrap();
    serde_json::to_string(&(wb, ext, hhr)).unwrap()
}

fn determinism() -> Outcome {
    let mut out = Outcome::new();
    let (a, b) = (reports_json(5), reports_json(5));
    out.check(a == b, format!("identical seeds give byte-identical reports ({} bytes)", a.len()));
    out.check(a != reports_json(6), "a different seed changes the report");
    out
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 map identities", map_identities),
        ("2 Levi suite", levi_suite),
        ("3 WB certification", wb_certification),
        ("4 ball bounds", ball_bounds),
        ("5 extreme-point pipeline", extreme_pipeline),
        ("6 orbit dichotomy", appendix_dichotomy),
        ("7 geometry oracles", geometry_oracles),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let out = run();
        let ok = out.failures.is_empty();
        println!("{} criterion {name}", if ok { "PASS" } else { "FAIL" });
        for d in &out.details {
            println!("    ok   {d}");
        }
        for f in &out.failures {
            println!("    FAIL {f}");
        }
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
