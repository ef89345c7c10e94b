//! Error type shared by the solver, condition checker and simulator.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or solver parameter violates a standing assumption.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// Quantile levels must lie strictly inside (0, 1); the probit
    /// function diverges at the endpoints.
    #[error("quantile level must lie in (0, 1), got {0}")]
    QuantileOutOfRange(f64),

    #[error("empirical quantile requires a nonempty sample")]
    EmptySample,

    #[error("sample value at index {0} is not finite")]
    NonFiniteSample(usize),

    #[error("time grid requires a positive horizon and at least 2 steps")]
    InvalidGrid,

    #[error("path has {got} values but the grid has {expected} nodes")]
    PathLength { expected: usize, got: usize },

    #[error("path value at node {0} is not finite")]
    NonFinitePath(usize),

    /// Finite-escape guard: an integration stage left the representable
    /// range, so the ODE solution blew up before the end of the sweep.
    #[error("integration diverged near t = {t:.6}")]
    FiniteEscape { t: f64 },

    #[error("paths live on different time grids")]
    GridMismatch,

    /// Variance nodes slightly below zero are roundoff and get clamped;
    /// anything below -1e-12 signals an integrator failure instead.
    #[error("variance {value:e} at node {node} is negative beyond roundoff")]
    NegativeVariance { node: usize, value: f64 },

    /// The decoupling-gain identity pi + p = 0 failed beyond tolerance,
    /// which can only come from an integration bug.
    #[error("gain identity violated: max |pi + p| = {0:e}")]
    IdentityViolation(f64),

    #[error("agent index {index} out of range for population of {n_agents}")]
    AgentIndex { index: usize, n_agents: usize },

    #[error("population simulation needs at least 2 agents, got {0}")]
    PopulationTooSmall(usize),

    #[error("positive-domain function called with nonpositive argument {0}")]
    NonPositiveArgument(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
