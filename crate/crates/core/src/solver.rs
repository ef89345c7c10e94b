//! Mean field equilibrium solver.
//!
//! The equilibrium couples a backward Riccati equation for the feedback
//! gain with a forward variance equation through the running-cost
//! coefficient
//!
//! ```text
//!   q_t = q (1 + exp(xbar(t) + sqrt(V(t)) * probit(alpha)))
//! ```
//!
//! where the mean path has the closed form `xbar(t) = e^{a t} mu0` and thus
//! never enters the fixed point. The solver iterates Picard sweeps on the
//! gain: start from `pi = 0`, push the variance forward, rebuild the
//! coefficient, re-solve the Riccati equation backward, repeat until the
//! sup-norm update drops below tolerance. The tracking offset is one more
//! backward sweep against the converged gain.
//!
//! The variance-only special case (coefficient without the mean term)
//! additionally produces the decoupling gain `p` with `s = p * xbar`; the
//! sum `pi + p` satisfies a source-free Riccati equation with zero terminal
//! data, so it must vanish identically. Integrating `p` jointly with a
//! replayed gain sweep makes that cancellation exact in the discretization
//! as well, which is what the identity check relies on.

use crate::error::{Error, Result};
use crate::grid::{ScalarPath, TimeGrid};
use crate::normal::probit;
use crate::ode::{integrate_backward, integrate_backward_pair, integrate_forward};
use crate::params::{ModelParams, SolverConfig};

/// Variance nodes below this are an integrator failure, not roundoff.
const VARIANCE_FAILURE_TOL: f64 = -1e-12;
/// Allowed sup-norm of `pi + p` in the variance-only special case.
pub const GAIN_IDENTITY_TOL: f64 = 1e-8;

/// Equilibrium bundle: gain, variance, coefficient, offset and mean paths
/// plus the fixed-point iteration metadata.
#[derive(Debug, Clone)]
pub struct CoupledSolution {
    /// Riccati gain, zero at the horizon.
    pub pi: ScalarPath,
    /// State variance, `v0` at time zero.
    pub variance: ScalarPath,
    /// Quantile-dependent running-cost coefficient.
    pub q_alpha: ScalarPath,
    /// Tracking offset, zero at the horizon.
    pub offset: ScalarPath,
    /// Population mean `e^{a t} mu0`.
    pub mean: ScalarPath,
    /// Picard sweeps performed.
    pub iterations: u32,
    /// Sup-norm of the last gain update.
    pub final_update_norm: f64,
    /// Whether the update norm reached the configured tolerance.
    pub converged: bool,
}

impl CoupledSolution {
    pub fn grid(&self) -> TimeGrid {
        self.pi.grid()
    }
}

/// Variance-only special case: the coupled bundle plus the decoupling gain
/// `p` and the (identically zero) sum `h = pi + p`.
#[derive(Debug, Clone)]
pub struct SpecialCaseSolution {
    pub base: CoupledSolution,
    pub p: ScalarPath,
    pub h: ScalarPath,
}

/// Closed-form mean path `xbar(t) = e^{a t} mu0`.
pub fn mean_path(params: &ModelParams, grid: TimeGrid) -> Result<ScalarPath> {
    let (a, mu0) = (params.a, params.mu0);
    ScalarPath::from_fn(grid, |t| (a * t).exp() * mu0)
}

fn clamped_sqrt_variance(variance: &ScalarPath) -> Result<Vec<f64>> {
    variance
        .values()
        .iter()
        .enumerate()
        .map(|(node, &v)| {
            if v < VARIANCE_FAILURE_TOL {
                Err(Error::NegativeVariance { node, value: v })
            } else {
                Ok(v.max(0.0).sqrt())
            }
        })
        .collect()
}

fn coefficient_path(
    mean: Option<&ScalarPath>,
    variance: &ScalarPath,
    params: &ModelParams,
) -> Result<ScalarPath> {
    if let Some(mean) = mean {
        if mean.grid() != variance.grid() {
            return Err(Error::GridMismatch);
        }
    }
    let phi = probit(params.alpha);
    let q = params.q;
    let sqrt_v = clamped_sqrt_variance(variance)?;
    let values = sqrt_v
        .iter()
        .enumerate()
        .map(|(k, &sv)| {
            let m = mean.map_or(0.0, |p| p.value(k));
            q * (1.0 + (m + sv * phi).exp())
        })
        .collect();
    ScalarPath::new(variance.grid(), values)
}

/// Running-cost coefficient `q (1 + exp(mean + sqrt(variance) * probit))`,
/// node by node. Tiny negative variance from roundoff is clamped to zero;
/// anything beyond roundoff is an error.
pub fn q_path(
    mean: &ScalarPath,
    variance: &ScalarPath,
    params: &ModelParams,
) -> Result<ScalarPath> {
    coefficient_path(Some(mean), variance, params)
}

/// Coefficient of the variance-only special case, without the mean term.
pub fn q_path_variance_only(variance: &ScalarPath, params: &ModelParams) -> Result<ScalarPath> {
    coefficient_path(None, variance, params)
}

/// Backward Riccati sweep: `-pidot = 2 a pi - (b^2/r) pi^2 + q_t`,
/// `pi(T) = 0`. Nonnegative source keeps the gain nonnegative.
pub fn riccati_backward(q_alpha: &ScalarPath, params: &ModelParams) -> Result<ScalarPath> {
    let (a, c) = (params.a, params.b2_over_r());
    integrate_backward(
        |t, y| 2.0 * a * y - c * y * y + q_alpha.sample(t),
        0.0,
        q_alpha.grid(),
    )
}

/// Forward variance sweep: `vdot = 2 (a - (b^2/r) pi) v + sigma^2`,
/// `v(0) = v0`.
pub fn variance_forward(pi: &ScalarPath, params: &ModelParams) -> Result<ScalarPath> {
    let (a, c, s2) = (params.a, params.b2_over_r(), params.sigma * params.sigma);
    integrate_forward(
        |t, y| 2.0 * (a - c * pi.sample(t)) * y + s2,
        params.v0,
        pi.grid(),
    )
}

/// Backward offset sweep: `-sdot = (a - (b^2/r) pi) s - q_t xbar`,
/// `s(T) = 0`.
pub fn offset_backward(
    pi: &ScalarPath,
    q_alpha: &ScalarPath,
    mean: &ScalarPath,
    params: &ModelParams,
) -> Result<ScalarPath> {
    if pi.grid() != q_alpha.grid() || pi.grid() != mean.grid() {
        return Err(Error::GridMismatch);
    }
    let (a, c) = (params.a, params.b2_over_r());
    integrate_backward(
        |t, y| (a - c * pi.sample(t)) * y - q_alpha.sample(t) * mean.sample(t),
        0.0,
        pi.grid(),
    )
}

/// Feedback law `u = -(b/r) (pi x + s)`.
pub fn feedback_control(pi_t: f64, s_t: f64, x: f64, params: &ModelParams) -> f64 {
    -(params.b / params.r) * (pi_t * x + s_t)
}

fn relaxed(previous: &ScalarPath, update: &ScalarPath, damping: f64) -> ScalarPath {
    if damping == 0.0 {
        return update.clone();
    }
    let values = previous
        .values()
        .iter()
        .zip(update.values())
        .map(|(&old, &new)| damping * old + (1.0 - damping) * new)
        .collect();
    ScalarPath::new(previous.grid(), values).expect("relaxation of finite paths is finite")
}

struct PicardOutcome {
    pi: ScalarPath,
    variance: ScalarPath,
    q_alpha: ScalarPath,
    iterations: u32,
    final_update_norm: f64,
    converged: bool,
}

fn picard_loop(
    params: &ModelParams,
    config: &SolverConfig,
    mean: Option<&ScalarPath>,
) -> Result<PicardOutcome> {
    let grid = config.grid;
    let mut pi = ScalarPath::constant(grid, 0.0);
    let mut iterations = 0u32;
    loop {
        let variance = variance_forward(&pi, params)?;
        let q_alpha = coefficient_path(mean, &variance, params)?;
        let pi_new = riccati_backward(&q_alpha, params)?;
        iterations += 1;
        let update_norm = pi_new.sup_distance(&pi);
        if update_norm <= config.picard_tol || iterations >= config.max_iters {
            return Ok(PicardOutcome {
                pi: pi_new,
                variance,
                q_alpha,
                iterations,
                final_update_norm: update_norm,
                converged: update_norm <= config.picard_tol,
            });
        }
        pi = relaxed(&pi, &pi_new, config.damping);
    }
}

/// Solves the coupled gain/variance fixed point by Picard iteration and
/// completes the bundle with the offset sweep.
///
/// Starts from `pi = 0` (the uncoupled solution). On hitting the iteration
/// cap the bundle is still returned, flagged `converged = false`, so the
/// caller can inspect the partial result.
pub fn solve_fixed_point(params: &ModelParams, config: &SolverConfig) -> Result<CoupledSolution> {
    params.validate()?;
    let mean = mean_path(params, config.grid)?;
    let outcome = picard_loop(params, config, Some(&mean))?;
    let offset = offset_backward(&outcome.pi, &outcome.q_alpha, &mean, params)?;
    Ok(CoupledSolution {
        pi: outcome.pi,
        variance: outcome.variance,
        q_alpha: outcome.q_alpha,
        offset,
        mean,
        iterations: outcome.iterations,
        final_update_norm: outcome.final_update_norm,
        converged: outcome.converged,
    })
}

/// Forward-integrates the mean equation
/// `xdot = (a - (b^2/r) pi) x - (b^2/r) s` with the solution's gain and
/// offset and returns the sup-norm deviation from the closed form
/// `e^{a t} mu0`. Small values certify that the direct offset solve and
/// the closed-form mean are mutually consistent.
pub fn mean_ode_consistency(solution: &CoupledSolution, params: &ModelParams) -> Result<f64> {
    let grid = solution.grid();
    let (a, c) = (params.a, params.b2_over_r());
    let pi = &solution.pi;
    let s = &solution.offset;
    let numeric = integrate_forward(
        |t, x| (a - c * pi.sample(t)) * x - c * s.sample(t),
        params.mu0,
        grid,
    )?;
    let deviation = grid
        .nodes()
        .enumerate()
        .fold(0.0f64, |acc, (k, t)| {
            acc.max((numeric.value(k) - (a * t).exp() * params.mu0).abs())
        });
    Ok(deviation)
}

/// Solves the variance-only special case and the decoupling gain `p`.
///
/// The Picard loop runs with the mean-free coefficient. The `p` sweep is
/// integrated jointly with a replay of the final gain sweep so both see
/// identical stage values; their sum then cancels term by term and the
/// identity `pi + p = 0` holds to roundoff. A violation beyond
/// [`GAIN_IDENTITY_TOL`] is reported as an integration bug.
pub fn solve_special_case(
    params: &ModelParams,
    config: &SolverConfig,
) -> Result<SpecialCaseSolution> {
    params.validate()?;
    let grid = config.grid;
    let mean = mean_path(params, grid)?;
    let outcome = picard_loop(params, config, None)?;
    let q_alpha = outcome.q_alpha;

    let (a, c) = (params.a, params.b2_over_r());
    let (pi, p) = integrate_backward_pair(
        |t, y| {
            let q = q_alpha.sample(t);
            [
                2.0 * a * y[0] - c * y[0] * y[0] + q,
                2.0 * (a - c * y[0]) * y[1] - c * y[1] * y[1] - q,
            ]
        },
        [0.0, 0.0],
        grid,
    )?;

    let h_values: Vec<f64> = pi
        .values()
        .iter()
        .zip(p.values())
        .map(|(&g, &d)| g + d)
        .collect();
    let h = ScalarPath::new(grid, h_values)?;
    if h.sup_norm() > GAIN_IDENTITY_TOL {
        return Err(Error::IdentityViolation(h.sup_norm()));
    }

    let offset = offset_backward(&pi, &q_alpha, &mean, params)?;
    Ok(SpecialCaseSolution {
        base: CoupledSolution {
            pi,
            variance: outcome.variance,
            q_alpha,
            offset,
            mean,
            iterations: outcome.iterations,
            final_update_norm: outcome.final_update_norm,
            converged: outcome.converged,
        },
        p,
        h,
    })
}

/// Sup-norms of central-difference residuals of the returned paths against
/// their right-hand sides, taken over interior nodes.
#[derive(Debug, Clone, Copy)]
pub struct OdeResiduals {
    pub riccati: f64,
    pub variance: f64,
    pub offset: f64,
}

fn central_residual(path: &ScalarPath, rhs_at_node: impl Fn(usize) -> f64) -> f64 {
    let grid = path.grid();
    let two_dt = 2.0 * grid.dt();
    (1..grid.n_steps())
        .map(|k| ((path.value(k + 1) - path.value(k - 1)) / two_dt - rhs_at_node(k)).abs())
        .fold(0.0, f64::max)
}

/// Residual diagnostics for a coupled solution.
pub fn ode_residuals(solution: &CoupledSolution, params: &ModelParams) -> OdeResiduals {
    let (a, c, s2) = (params.a, params.b2_over_r(), params.sigma * params.sigma);
    let (pi, v, s) = (&solution.pi, &solution.variance, &solution.offset);
    let (qa, mean) = (&solution.q_alpha, &solution.mean);
    OdeResiduals {
        riccati: central_residual(pi, |k| {
            -(2.0 * a * pi.value(k) - c * pi.value(k) * pi.value(k) + qa.value(k))
        }),
        variance: central_residual(v, |k| 2.0 * (a - c * pi.value(k)) * v.value(k) + s2),
        offset: central_residual(s, |k| {
            -((a - c * pi.value(k)) * s.value(k) - qa.value(k) * mean.value(k))
        }),
    }
}

/// Residual of the decoupling-gain path in the special case.
pub fn decoupling_residual(special: &SpecialCaseSolution, params: &ModelParams) -> f64 {
    let (a, c) = (params.a, params.b2_over_r());
    let (pi, p, qa) = (&special.base.pi, &special.p, &special.base.q_alpha);
    central_residual(p, |k| {
        -(2.0 * (a - c * pi.value(k)) * p.value(k) - c * p.value(k) * p.value(k) - qa.value(k))
    })
}
