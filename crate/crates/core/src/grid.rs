//! Uniform time grids on [0, T] and scalar trajectories sampled on them.
//!
//! Every coupled sweep of the solver (Riccati, variance, offset) and the
//! population simulator share one grid, so the Picard iteration can compare
//! iterates node by node.

use crate::error::{Error, Result};

/// Uniform discretization of [0, T] with `n_steps` intervals
/// (`n_steps + 1` nodes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !t_end.is_finite() || t_end <= 0.0 || n_steps < 2 {
            return Err(Error::InvalidGrid);
        }
        Ok(Self { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// k-th node; computed as T*(k/n) so the last node is exactly `t_end`.
    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n_steps);
        self.t_end * k as f64 / self.n_steps as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(move |k| self.node(k))
    }

    /// Same horizon with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.t_end, self.n_steps * factor.max(1))
    }
}

/// A scalar trajectory on a [`TimeGrid`]: one finite value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl ScalarPath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::PathLength {
                expected: grid.n_nodes(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePath(k));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TimeGrid, value: f64) -> Self {
        Self {
            values: vec![value; grid.n_nodes()],
            grid,
        }
    }

    /// Evaluates `f` at every node.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Linear interpolation between the two neighbouring nodes; exact at
    /// nodes up to one rounding. Integration stages query midpoints here.
    pub fn sample(&self, t: f64) -> f64 {
        let n = self.grid.n_steps;
        let u = t / self.grid.t_end * n as f64;
        let i = (u.floor() as usize).min(n - 1);
        let theta = u - i as f64;
        self.values[i] + theta * (self.values[i + 1] - self.values[i])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm distance to a path on the same grid.
    pub fn sup_distance(&self, other: &ScalarPath) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }
}
