//! Empirical quantiles as order statistics.
//!
//! The quantile of a sample follows the inf-definition
//! `inf { z : F(z) >= alpha }` applied to the empirical CDF, which lands
//! exactly on an order statistic — no interpolation between neighbours.

use crate::error::{Error, Result};
use crate::normal::QuantileLevel;

/// 1-based rank of the order statistic realizing the alpha-quantile of a
/// sample of size `m`: the smallest j with j/m >= alpha, clamped to [1, m].
///
/// Computed as ceil(alpha * m) and then adjusted against the defining
/// inequality so float rounding in the product cannot shift the rank.
pub(crate) fn order_statistic_rank(m: usize, alpha: QuantileLevel) -> usize {
    let a = alpha.get();
    let mf = m as f64;
    let mut j = (a * mf).ceil() as usize;
    j = j.clamp(1, m);
    while j > 1 && (j - 1) as f64 / mf >= a {
        j -= 1;
    }
    while j < m && (j as f64) / mf < a {
        j += 1;
    }
    j
}

/// Alpha-quantile of a finite sample: the `ceil(alpha * m)`-th smallest
/// element. Errors on empty input or non-finite values.
pub fn empirical_quantile(samples: &[f64], alpha: QuantileLevel) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample(k));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let j = order_statistic_rank(sorted.len(), alpha);
    Ok(sorted[j - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(a: f64) -> QuantileLevel {
        QuantileLevel::new(a).unwrap()
    }

    #[test]
    fn median_of_four_is_second_order_statistic() {
        assert_eq!(empirical_quantile(&[1.0, 2.0, 3.0, 4.0], level(0.5)).unwrap(), 2.0);
    }

    #[test]
    fn single_sample_is_its_own_quantile() {
        assert_eq!(empirical_quantile(&[7.0], level(0.3)).unwrap(), 7.0);
    }

    #[test]
    fn high_quantile_of_eight_samples() {
        let xs = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        assert_eq!(empirical_quantile(&xs, level(0.95)).unwrap(), 9.0);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            empirical_quantile(&[], level(0.5)),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn non_finite_input_is_an_error() {
        assert!(empirical_quantile(&[1.0, f64::NAN], level(0.5)).is_err());
        assert!(empirical_quantile(&[1.0, f64::INFINITY], level(0.5)).is_err());
    }

    #[test]
    fn rank_matches_definition_on_exact_fractions() {
        // alpha * m landing exactly on an integer must not round up.
        assert_eq!(order_statistic_rank(4, level(0.5)), 2);
        assert_eq!(order_statistic_rank(10, level(0.3)), 3);
        assert_eq!(order_statistic_rank(8, level(0.95)), 8);
        assert_eq!(order_statistic_rank(5, level(0.0001)), 1);
        assert_eq!(order_statistic_rank(5, level(0.9999)), 5);
    }

    #[test]
    fn rank_agrees_with_linear_scan() {
        for m in 1..=40usize {
            for &a in &[0.01, 0.1, 0.2, 0.25, 0.5, 1.0 / 3.0, 0.75, 0.9, 0.99] {
                let alpha = level(a);
                let fast = order_statistic_rank(m, alpha);
                let slow = (1..=m)
                    .find(|j| *j as f64 / m as f64 >= a)
                    .unwrap_or(m);
                assert_eq!(fast, slow, "m = {m}, alpha = {a}");
            }
        }
    }
}
