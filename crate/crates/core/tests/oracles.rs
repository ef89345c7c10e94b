//! Cross-checks of the numerical kernels against independent oracles:
//! quadrature-based normal CDF inverted by pure bisection, brute-force
//! order-statistic scans, and Richardson-refined reference integrations.
//! The oracles deliberately share no code with the implementations they
//! check.

use qmfg::normal::{probit, std_normal_cdf, QuantileLevel};
use qmfg::params::ModelParams;
use qmfg::quantile::empirical_quantile;
use qmfg::solver::{offset_backward, riccati_backward};
use qmfg::{ScalarPath, TimeGrid};

/// Standard normal CDF by composite Simpson quadrature of the density
/// from 0 to |x| (8000 panels keep the truncation below ~1e-13 on [-8, 8]).
fn simpson_cdf(x: f64) -> f64 {
    let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let n = 8000usize;
    let h = x.abs() / n as f64;
    let mut acc = density(0.0) + density(x.abs());
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * density(k as f64 * h);
    }
    let integral = acc * h / 3.0;
    if x >= 0.0 {
        0.5 + integral
    } else {
        0.5 - integral
    }
}

/// Inverse of the quadrature CDF by 90 bisection steps on [-10, 10].
fn bisection_probit(alpha: f64) -> f64 {
    assert!(alpha > simpson_cdf(-10.0) && alpha < simpson_cdf(10.0));
    let (mut lo, mut hi) = (-10.0f64, 10.0f64);
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if simpson_cdf(mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn cdf_agrees_with_quadrature() {
    let mut x = -8.0;
    while x <= 8.0 {
        let diff = (std_normal_cdf(x) - simpson_cdf(x)).abs();
        assert!(diff < 1e-12, "cdf mismatch at x = {x}: {diff:e}");
        x += 0.25;
    }
}

#[test]
fn probit_matches_bisection_oracle_to_1e10() {
    let mut alpha = 0.001;
    while alpha < 0.9995 {
        let lib = probit(QuantileLevel::new(alpha).unwrap());
        let oracle = bisection_probit(alpha);
        assert!(
            (lib - oracle).abs() <= 1e-10,
            "alpha = {alpha}: {lib} vs {oracle}"
        );
        alpha += 0.0173;
    }
}

#[test]
fn probit_frozen_reference_points() {
    // frozen from the bisection oracle
    let p975 = probit(QuantileLevel::new(0.975).unwrap());
    assert!((p975 - bisection_probit(0.975)).abs() <= 1e-10);
    assert!((p975 - 1.959_964).abs() < 1e-5);

    // forward-evaluate Phi(1), then invert
    let phi1 = simpson_cdf(1.0);
    assert!((phi1 - 0.841_344_746_068_543).abs() < 1e-13);
    let back = probit(QuantileLevel::new(0.841_344_746).unwrap());
    assert!((back - 1.0).abs() < 1e-6);
}

/// First sorted sample value whose empirical CDF reaches alpha — the
/// inf-definition evaluated by exhaustive scan.
fn brute_force_quantile(samples: &[f64], alpha: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sorted.len() as f64;
    for &z in &sorted {
        let mass = samples.iter().filter(|&&x| x <= z).count() as f64 / m;
        if mass >= alpha {
            return z;
        }
    }
    *sorted.last().unwrap()
}

#[test]
fn empirical_quantile_matches_brute_force_scan() {
    let xs = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
    assert_eq!(brute_force_quantile(&xs, 0.95), 9.0);
    assert_eq!(
        empirical_quantile(&xs, QuantileLevel::new(0.95).unwrap()).unwrap(),
        9.0
    );

    // seeded pseudo-random integer samples with ties
    let mut state = 0x1234_5678_u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) % 23) as f64 - 11.0
    };
    for trial in 0..200 {
        let m = 1 + (trial % 37);
        let samples: Vec<f64> = (0..m).map(|_| next()).collect();
        for &alpha in &[0.05, 0.25, 0.5, 0.733, 0.9, 0.99] {
            let level = QuantileLevel::new(alpha).unwrap();
            let lib = empirical_quantile(&samples, level).unwrap();
            let brute = brute_force_quantile(&samples, alpha);
            assert_eq!(lib, brute, "m = {m}, alpha = {alpha}, samples = {samples:?}");
        }
    }
}

/// Reference backward integration: Heun steps on grids n and 2n combined
/// by Richardson extrapolation (second order each, so (4 y_2n - y_n)/3).
fn richardson_backward(rhs: impl Fn(f64, f64) -> f64 + Copy, t_end: f64, n: usize) -> f64 {
    let solve = |steps: usize| -> f64 {
        let h = t_end / steps as f64;
        let mut y = 0.0;
        let mut t = t_end;
        for _ in 0..steps {
            // -ydot = rhs  =>  ydot = -rhs, stepped with Heun
            let k1 = -rhs(t, y);
            let k2 = -rhs(t - h, y - h * k1);
            y -= 0.5 * h * (k1 + k2);
            t -= h;
        }
        y
    };
    let coarse = solve(n);
    let fine = solve(2 * n);
    (4.0 * fine - coarse) / 3.0
}

#[test]
fn offset_sweep_agrees_with_richardson_reference() {
    // constant-coefficient case first: a = 0, b = r = 1, pi = 0, q_t = 1,
    // xbar = 1; the reference lands on s(0) = -1
    let p = ModelParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 0.95, 0.0, 1.0, 1.0).unwrap();
    let grid = TimeGrid::new(1.0, 1000).unwrap();
    let pi = ScalarPath::constant(grid, 0.0);
    let qa = ScalarPath::constant(grid, 1.0);
    let mean = ScalarPath::constant(grid, 1.0);
    let s = offset_backward(&pi, &qa, &mean, &p).unwrap();
    let reference = richardson_backward(|_, y| -y * 0.0 - 1.0, 1.0, 20_000);
    assert!((reference + 1.0).abs() < 1e-10);
    assert!((s.first() - reference).abs() < 1e-6);

    // non-constant coefficients: gain from a constant-source Riccati sweep
    let p2 = ModelParams::new(0.3, 1.0, 2.0, 1.0, 1.0, 0.9, 0.5, 1.0, 1.0).unwrap();
    let qa2 = ScalarPath::constant(grid, 1.7);
    let pi2 = riccati_backward(&qa2, &p2).unwrap();
    let mean2 = ScalarPath::from_fn(grid, |t| (p2.a * t).exp() * p2.mu0).unwrap();
    let s2 = offset_backward(&pi2, &qa2, &mean2, &p2).unwrap();
    let c = p2.b * p2.b / p2.r;
    let reference2 = richardson_backward(
        |t, y| (p2.a - c * pi2.sample(t)) * y - qa2.sample(t) * mean2.sample(t),
        1.0,
        20_000,
    );
    assert!(
        (s2.first() - reference2).abs() < 1e-6,
        "{} vs {}",
        s2.first(),
        reference2
    );
}

#[test]
fn riccati_sweep_agrees_with_richardson_reference() {
    // a = 0, b = r = 1, q_t = 1: closed form tanh(T - t) cross-checked by
    // the independent integrator as well
    let p = ModelParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 0.95, 0.0, 1.0, 1.0).unwrap();
    let grid = TimeGrid::new(1.0, 2000).unwrap();
    let qa = ScalarPath::constant(grid, 1.0);
    let pi = riccati_backward(&qa, &p).unwrap();
    let reference = richardson_backward(|_, y| -y * y + 1.0, 1.0, 20_000);
    assert!((reference - 1.0f64.tanh()).abs() < 1e-9);
    assert!((pi.first() - reference).abs() < 1e-6);
}
