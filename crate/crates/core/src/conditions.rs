//! Sufficient conditions for existence and uniqueness of the fixed point.
//!
//! Both checks quantify over a ball radius M for the gain path. Existence
//! asks that the horizon-scaled bound
//!
//! ```text
//!   T [ 2|a| M + (b^2/r) M^2 + q
//!       + q exp( mu* + |probit| (v0 + sigma^2 T)^{1/2} e^{T (|a| + (b^2/r) M)} ) ]
//! ```
//!
//! stays within M, with `mu* = max(mu0, e^{aT} mu0)`. Uniqueness asks that
//! the contraction factor
//!
//! ```text
//!   T ( 2|a| + (b^2/r) M^2
//!       + q |probit| (b^2/r) T (v0 + sigma^2 T)^{1/2}
//!         e^{ mu* + 3T(|a| + (b^2/r) M)
//!             + |probit| (v0 + sigma^2 T)^{1/2} e^{T (|a| + (b^2/r) M)} } )
//! ```
//!
//! is below one. Both are sufficient only: parameter sets failing them can
//! still be solved numerically.

use crate::error::{Error, Result};
use crate::normal::probit;
use crate::params::ModelParams;

/// Evaluated inequalities at one ball radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// `max(mu0, e^{aT} mu0)` — the mean-path envelope.
    pub mu_star: f64,
    /// Ball radius the report was evaluated at.
    pub m_witness: f64,
    pub existence_lhs: f64,
    /// `existence_lhs <= m_witness`
    pub existence_holds: bool,
    pub contraction_lhs: f64,
    /// `contraction_lhs < 1`
    pub contraction_holds: bool,
}

/// Mean-path envelope `max(mu0, e^{aT} mu0)`; the maximum is taken
/// unconditionally, also for negative initial means.
pub fn mu_star(params: &ModelParams) -> f64 {
    params.mu0.max((params.a * params.horizon).exp() * params.mu0)
}

/// Left-hand side of the existence inequality at ball radius `m`.
pub fn existence_lhs(params: &ModelParams, m: f64) -> f64 {
    debug_assert!(m >= 0.0);
    let t = params.horizon;
    let abs_a = params.a.abs();
    let c = params.b2_over_r();
    let phi = probit(params.alpha).abs();
    let spread = (params.v0 + params.sigma * params.sigma * t).sqrt();
    let growth = (t * (abs_a + c * m)).exp();
    t * (2.0 * abs_a * m
        + c * m * m
        + params.q
        + params.q * (mu_star(params) + phi * spread * growth).exp())
}

/// Left-hand side of the contraction inequality at ball radius `m`.
pub fn contraction_lhs(params: &ModelParams, m: f64) -> f64 {
    debug_assert!(m >= 0.0);
    let t = params.horizon;
    let abs_a = params.a.abs();
    let c = params.b2_over_r();
    let phi = probit(params.alpha).abs();
    let spread = (params.v0 + params.sigma * params.sigma * t).sqrt();
    let growth = (t * (abs_a + c * m)).exp();
    let exponent = mu_star(params) + 3.0 * t * (abs_a + c * m) + phi * spread * growth;
    t * (2.0 * abs_a + c * m * m + params.q * phi * c * t * spread * exponent.exp())
}

/// Evaluates both inequalities at radius `m`.
pub fn check(params: &ModelParams, m: f64) -> ConditionReport {
    let existence = existence_lhs(params, m);
    let contraction = contraction_lhs(params, m);
    ConditionReport {
        mu_star: mu_star(params),
        m_witness: m,
        existence_lhs: existence,
        existence_holds: existence <= m,
        contraction_lhs: contraction,
        contraction_holds: contraction < 1.0,
    }
}

/// Smallest radius in `m_grid` satisfying both inequalities, if any.
///
/// The grid must be nonempty and strictly increasing; a scan is used
/// because the inequalities are not convex in M in general.
pub fn search_witness(params: &ModelParams, m_grid: &[f64]) -> Option<f64> {
    debug_assert!(!m_grid.is_empty());
    debug_assert!(m_grid.windows(2).all(|w| w[0] < w[1]));
    m_grid.iter().copied().find(|&m| {
        let report = check(params, m);
        report.existence_holds && report.contraction_holds
    })
}

/// Both sides of the scaled square-root exponential gap bound
///
/// ```text
///   |e^{c sqrt(x)} - e^{c sqrt(y)}|
///     <= e^{max(c sqrt(x), c sqrt(y))} / (2 min(c sqrt(x), c sqrt(y)))
///        * c^2 * |x - y|
/// ```
///
/// for positive `x`, `y`, `c`. Returns `(lhs, rhs)`; callers assert
/// `lhs <= rhs`.
pub fn exp_sqrt_gap_bound(x: f64, y: f64, c: f64) -> Result<(f64, f64)> {
    for v in [x, y, c] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonPositiveArgument(v));
        }
    }
    let (sx, sy) = (c * x.sqrt(), c * y.sqrt());
    let lhs = (sx.exp() - sy.exp()).abs();
    let rhs = sx.max(sy).exp() / (2.0 * sx.min(sy)) * c * c * (x - y).abs();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contractive_params() -> ModelParams {
        ModelParams::new(-0.15, 0.75, 3.5, 1.0, 0.45, 0.975, 1.0, 0.5, 0.2).unwrap()
    }

    fn strong_coupling_params() -> ModelParams {
        ModelParams::new(0.5, 1.0, 1.0, 1.0, 1.0, 0.95, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn zero_penalty_existence_value() {
        let p = ModelParams::new(0.0, 1.0, 1.0, 1.0, 0.0, 0.95, 0.0, 1.0, 0.1).unwrap();
        assert!((existence_lhs(&p, 1.0) - 0.1).abs() < 1e-15);
        assert!((contraction_lhs(&p, 1.0) - 0.1).abs() < 1e-15);
        let report = check(&p, 1.0);
        assert!(report.existence_holds);
        assert!(report.contraction_holds);
    }

    #[test]
    fn contractive_set_passes_at_radius_three() {
        let p = contractive_params();
        let report = check(&p, 3.0);
        assert!(report.existence_lhs <= 3.0, "lhs = {}", report.existence_lhs);
        assert!(report.existence_holds);
        assert!(report.contraction_lhs < 1.0, "lhs = {}", report.contraction_lhs);
        assert!(report.contraction_holds);
    }

    #[test]
    fn strong_coupling_set_has_no_witness() {
        let p = strong_coupling_params();
        let m_grid: Vec<f64> = (1..=500).map(|k| k as f64 * 0.1).collect();
        assert_eq!(search_witness(&p, &m_grid), None);
        for &m in &m_grid {
            assert!(existence_lhs(&p, m) > m);
        }
    }

    #[test]
    fn contractive_set_witness_is_at_most_three() {
        let p = contractive_params();
        let m_grid: Vec<f64> = (1..=20).map(|k| k as f64 * 0.5).collect();
        let witness = search_witness(&p, &m_grid).expect("witness expected");
        assert!(witness <= 3.0);
    }

    #[test]
    fn long_horizon_breaks_contraction() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.95, 0.0, 1.0, 10.0).unwrap();
        assert!(contraction_lhs(&p, 1.0) >= 1.0);
        assert!(!check(&p, 1.0).contraction_holds);
    }

    #[test]
    fn mu_star_handles_negative_means() {
        // With mu0 < 0 and a > 0 the max is the less negative value mu0.
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.95, -1.0, 1.0, 1.0).unwrap();
        assert_eq!(mu_star(&p), -1.0);
        let p2 = ModelParams::new(-1.0, 1.0, 1.0, 1.0, 1.0, 0.95, -1.0, 1.0, 1.0).unwrap();
        assert_eq!(mu_star(&p2), -(-1.0f64).exp());
    }

    #[test]
    fn both_sides_increase_with_horizon() {
        let mk = |t: f64| ModelParams::new(0.3, 1.0, 2.0, 0.7, 0.8, 0.9, 0.2, 0.4, t).unwrap();
        let mut prev_e = 0.0;
        let mut prev_c = 0.0;
        for k in 1..=8 {
            let p = mk(0.25 * k as f64);
            let e = existence_lhs(&p, 1.5);
            let c = contraction_lhs(&p, 1.5);
            assert!(e > prev_e && c > prev_c, "not increasing at T = {}", p.horizon);
            prev_e = e;
            prev_c = c;
        }
    }

    #[test]
    fn small_radius_limit_matches_closed_form() {
        // With a = 0 and sigma = 0 the m -> 0 limit collapses to
        // T q (1 + e^{mu* + |probit| sqrt(v0)}).
        let p = ModelParams::new(0.0, 1.0, 1.0, 0.0, 1.0, 0.9, 0.3, 1.0, 0.5).unwrap();
        let phi = probit(p.alpha).abs();
        let limit = p.horizon * p.q * (1.0 + (mu_star(&p) + phi * p.v0.sqrt()).exp());
        assert!((existence_lhs(&p, 1e-9) - limit).abs() < 1e-6);
    }

    #[test]
    fn reports_are_deterministic() {
        let p = contractive_params();
        assert_eq!(check(&p, 2.0), check(&p, 2.0));
    }

    #[test]
    fn gap_bound_identical_arguments() {
        let (lhs, rhs) = exp_sqrt_gap_bound(1.0, 1.0, 1.0).unwrap();
        assert_eq!(lhs, 0.0);
        assert_eq!(rhs, 0.0);
    }

    #[test]
    fn gap_bound_worked_example() {
        let (lhs, rhs) = exp_sqrt_gap_bound(4.0, 1.0, 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((lhs - (e * e - e)).abs() < 1e-12);
        assert!((rhs - e * e / 2.0 * 3.0).abs() < 1e-12);
        assert!(lhs <= rhs);
    }

    #[test]
    fn gap_bound_rejects_nonpositive_inputs() {
        assert!(exp_sqrt_gap_bound(0.0, 1.0, 1.0).is_err());
        assert!(exp_sqrt_gap_bound(1.0, -2.0, 1.0).is_err());
        assert!(exp_sqrt_gap_bound(1.0, 1.0, 0.0).is_err());
    }
}
