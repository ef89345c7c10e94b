//! Model data and solver settings.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::normal::QuantileLevel;

/// Default number of grid steps for a solve.
pub const DEFAULT_N_STEPS: usize = 2000;
/// Default sup-norm stopping threshold of the Picard iteration.
pub const DEFAULT_PICARD_TOL: f64 = 1e-10;
/// Default iteration cap of the Picard loop.
pub const DEFAULT_MAX_ITERS: u32 = 200;
/// Default relaxation weight (0 = undamped Picard).
pub const DEFAULT_DAMPING: f64 = 0.0;

/// Scalar game data: dynamics `dx = (a x + b u) dt + sigma dw`, running
/// cost weights `q` (deviation, scaled by the quantile coefficient) and
/// `r` (control), initial law N(mu0, v0), horizon `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub sigma: f64,
    pub q: f64,
    pub alpha: QuantileLevel,
    pub mu0: f64,
    pub v0: f64,
    pub horizon: f64,
}

impl ModelParams {
    /// Standing assumptions are enforced here once, not per call:
    /// b != 0, r > 0, sigma >= 0, q >= 0, v0 >= 0, T > 0.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        r: f64,
        sigma: f64,
        q: f64,
        alpha: f64,
        mu0: f64,
        v0: f64,
        horizon: f64,
    ) -> Result<Self> {
        let params = Self {
            a,
            b,
            r,
            sigma,
            q,
            alpha: QuantileLevel::new(alpha)?,
            mu0,
            v0,
            horizon,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |name: &'static str, reason: &str| {
            Err(Error::InvalidParam {
                name,
                reason: reason.to_string(),
            })
        };
        if !self.a.is_finite() {
            return fail("a", "drift must be finite");
        }
        if !self.b.is_finite() || self.b == 0.0 {
            return fail("b", "input gain must be nonzero");
        }
        if !self.r.is_finite() || self.r <= 0.0 {
            return fail("r", "control weight must be positive");
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return fail("sigma", "noise intensity must be nonnegative");
        }
        if !self.q.is_finite() || self.q < 0.0 {
            return fail("q", "base penalty must be nonnegative");
        }
        if !self.mu0.is_finite() {
            return fail("mu0", "initial mean must be finite");
        }
        if !self.v0.is_finite() || self.v0 < 0.0 {
            return fail("v0", "initial variance must be nonnegative");
        }
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return fail("horizon", "time horizon must be positive");
        }
        Ok(())
    }

    /// The coupling ratio b^2 / r that multiplies every quadratic gain term.
    #[inline]
    pub fn b2_over_r(&self) -> f64 {
        self.b * self.b / self.r
    }
}

/// Settings of the Picard fixed-point loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub grid: TimeGrid,
    pub picard_tol: f64,
    pub max_iters: u32,
    pub damping: f64,
}

impl SolverConfig {
    pub fn new(grid: TimeGrid, picard_tol: f64, max_iters: u32, damping: f64) -> Result<Self> {
        if !(picard_tol.is_finite() && picard_tol > 0.0) {
            return Err(Error::InvalidParam {
                name: "picard_tol",
                reason: "stopping threshold must be positive".to_string(),
            });
        }
        if max_iters < 1 {
            return Err(Error::InvalidParam {
                name: "max_iters",
                reason: "iteration cap must be at least 1".to_string(),
            });
        }
        if !(0.0..1.0).contains(&damping) {
            return Err(Error::InvalidParam {
                name: "damping",
                reason: "relaxation weight must lie in [0, 1)".to_string(),
            });
        }
        Ok(Self {
            grid,
            picard_tol,
            max_iters,
            damping,
        })
    }

    /// Default tolerances on the given grid.
    pub fn with_defaults(grid: TimeGrid) -> Self {
        Self {
            grid,
            picard_tol: DEFAULT_PICARD_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            damping: DEFAULT_DAMPING,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams::new(-0.15, 0.75, 3.5, 1.0, 0.45, 0.975, 1.0, 0.5, 0.2).unwrap()
    }

    #[test]
    fn valid_params_pass() {
        let p = base();
        assert!((p.b2_over_r() - 0.75 * 0.75 / 3.5).abs() < 1e-15);
    }

    #[test]
    fn zero_gain_is_rejected() {
        assert!(ModelParams::new(0.0, 0.0, 1.0, 1.0, 1.0, 0.5, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn nonpositive_control_weight_is_rejected() {
        assert!(ModelParams::new(0.0, 1.0, 0.0, 1.0, 1.0, 0.5, 0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, -2.0, 1.0, 1.0, 0.5, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn negative_variance_and_penalty_are_rejected() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0, -0.1, 0.5, 0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.0, -0.5, 1.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, 1.0, -1.0, 1.0, 0.5, 0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn alpha_outside_open_interval_is_rejected() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn solver_config_bounds() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        assert!(SolverConfig::new(grid, 1e-10, 200, 0.0).is_ok());
        assert!(SolverConfig::new(grid, 0.0, 200, 0.0).is_err());
        assert!(SolverConfig::new(grid, 1e-10, 0, 0.0).is_err());
        assert!(SolverConfig::new(grid, 1e-10, 200, 1.0).is_err());
        assert!(SolverConfig::new(grid, 1e-10, 200, -0.1).is_err());
    }
}
