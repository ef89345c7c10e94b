//! Standard-normal CDF, density and quantile (probit).
//!
//! The CDF is built from an error-function pair chosen for certifiable
//! accuracy rather than speed: a positive-term confluent series for small
//! arguments (no cancellation, converges to machine precision) and a Lentz
//! continued fraction for the complementary function in the tail (full
//! relative precision where 1 - erf would cancel). The probit is then the
//! numerical inverse of that CDF: bisection to isolate the root, Newton to
//! polish it. Absolute accuracy is far below the 1e-10 the rest of the
//! crate relies on.

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Quantile level strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QuantileLevel(f64);

impl QuantileLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
            return Err(Error::QuantileOutOfRange(alpha));
        }
        Ok(Self(alpha))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// erf(z) for 0 <= z < 2 via the confluent series
/// erf(z) = (2z/sqrt(pi)) e^{-z^2} sum_k (2z^2)^k / (2k+1)!!.
/// All terms are positive, so there is no cancellation.
fn erf_series(z: f64) -> f64 {
    debug_assert!((0.0..2.5).contains(&z));
    if z == 0.0 {
        return 0.0;
    }
    let two_z2 = 2.0 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= two_z2 / (2 * k + 1) as f64;
        sum += term;
        if term < sum * 1e-17 || k > 200 {
            break;
        }
    }
    2.0 * z / SQRT_PI * (-z * z).exp() * sum
}

/// erfc(z) for z >= 2 via the continued fraction
/// sqrt(pi) e^{z^2} erfc(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),
/// evaluated with the modified Lentz algorithm.
fn erfc_cf(z: f64) -> f64 {
    debug_assert!(z >= 2.0);
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..200 {
        let a = n as f64 / 2.0;
        d = z + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = z + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (SQRT_PI * f)
}

/// Upper tail P(X > x) for x >= 0, with full relative precision far out.
fn upper_tail(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    let z = x * FRAC_1_SQRT_2;
    if z < 2.0 {
        0.5 * (1.0 - erf_series(z))
    } else {
        0.5 * erfc_cf(z)
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 - upper_tail(x)
    } else {
        upper_tail(-x)
    }
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Probit (inverse standard-normal CDF) at `alpha`.
///
/// The root is found on the side of the smaller tail (1 - alpha is exact
/// in floating point for alpha >= 1/2), so the 1/pdf amplification of
/// rounding near CDF values close to one never enters: bisection isolates
/// the root of `upper_tail(x) = tail`, Newton polishes it.
pub fn probit(alpha: QuantileLevel) -> f64 {
    let a = alpha.get();
    if a == 0.5 {
        return 0.0;
    }
    let (tail, sign) = if a < 0.5 { (a, -1.0) } else { (1.0 - a, 1.0) };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while upper_tail(hi) > tail && hi < 800.0 {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if upper_tail(mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let pdf = std_normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        // f(x) = upper_tail(x) - tail, f'(x) = -pdf(x)
        let step = (upper_tail(x) - tail) / pdf;
        x = (x + step).clamp(lo, hi);
        if step.abs() <= 1e-16 * x.max(1.0) {
            break;
        }
    }
    sign * x
}

/// Quantile of N(mu, sigma^2): mu + sigma * probit(alpha).
///
/// `sigma` must be nonnegative; sigma = 0 returns `mu` for every level.
pub fn gaussian_quantile(mu: f64, sigma: f64, alpha: QuantileLevel) -> f64 {
    assert!(sigma >= 0.0, "gaussian_quantile needs sigma >= 0");
    mu + sigma * probit(alpha)
}
