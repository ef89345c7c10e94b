//! Classic fixed-grid RK4 sweeps for the scalar equations of the model.
//!
//! Two directions are needed: terminal-value equations (Riccati, offset)
//! march from T down to 0, initial-value equations (variance, mean) from 0
//! up to T. Coefficient paths are known at the grid nodes only; callers
//! sample them linearly at the half-step stage times, which keeps the
//! sweeps well above the accuracy the Picard loop needs at the default
//! resolution.
//!
//! Every stage is guarded against leaving the representable range so a
//! finite-escape of the quadratic terms surfaces as an error instead of a
//! NaN path.

use crate::error::{Error, Result};
use crate::grid::{ScalarPath, TimeGrid};

#[inline]
fn guard(v: f64, t: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::FiniteEscape { t })
    }
}

/// Integrates `ydot = rhs(t, y)` from `y(0) = initial` up to the horizon.
pub fn integrate_forward(
    rhs: impl Fn(f64, f64) -> f64,
    initial: f64,
    grid: TimeGrid,
) -> Result<ScalarPath> {
    let n = grid.n_steps();
    let dt = grid.dt();
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut y = initial;
    values.push(y);
    for k in 0..n {
        let t = grid.node(k);
        let k1 = guard(rhs(t, y), t)?;
        let k2 = guard(rhs(t + 0.5 * dt, y + 0.5 * dt * k1), t)?;
        let k3 = guard(rhs(t + 0.5 * dt, y + 0.5 * dt * k2), t)?;
        let k4 = guard(rhs(t + dt, y + dt * k3), t)?;
        y = guard(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t)?;
        values.push(y);
    }
    ScalarPath::new(grid, values)
}

/// Integrates the terminal-value equation `-ydot = rhs(t, y)` with
/// `y(T) = terminal`, marching from the last node down to the first.
pub fn integrate_backward(
    rhs: impl Fn(f64, f64) -> f64,
    terminal: f64,
    grid: TimeGrid,
) -> Result<ScalarPath> {
    let n = grid.n_steps();
    let dt = grid.dt();
    let mut values = vec![0.0; grid.n_nodes()];
    let mut y = terminal;
    values[n] = y;
    for k in (1..=n).rev() {
        let t = grid.node(k);
        // -ydot = rhs  <=>  ydot = -rhs; step size is -dt.
        let k1 = guard(rhs(t, y), t)?;
        let k2 = guard(rhs(t - 0.5 * dt, y + 0.5 * dt * k1), t)?;
        let k3 = guard(rhs(t - 0.5 * dt, y + 0.5 * dt * k2), t)?;
        let k4 = guard(rhs(t - dt, y + dt * k3), t)?;
        y = guard(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t)?;
        values[k - 1] = y;
    }
    ScalarPath::new(grid, values)
}

/// Backward RK4 for a coupled pair `-ydot = rhs(t, y)` with terminal data.
///
/// The second component may depend on the first through the stage values
/// themselves (not through a stored interpolated path), which is what makes
/// structural identities between the two components hold to roundoff.
pub(crate) fn integrate_backward_pair(
    rhs: impl Fn(f64, [f64; 2]) -> [f64; 2],
    terminal: [f64; 2],
    grid: TimeGrid,
) -> Result<(ScalarPath, ScalarPath)> {
    let n = grid.n_steps();
    let dt = grid.dt();
    let mut first = vec![0.0; grid.n_nodes()];
    let mut second = vec![0.0; grid.n_nodes()];
    let mut y = terminal;
    first[n] = y[0];
    second[n] = y[1];
    let add = |y: [f64; 2], h: f64, k: [f64; 2]| [y[0] + h * k[0], y[1] + h * k[1]];
    for k in (1..=n).rev() {
        let t = grid.node(k);
        let k1 = rhs(t, y);
        let k2 = rhs(t - 0.5 * dt, add(y, 0.5 * dt, k1));
        let k3 = rhs(t - 0.5 * dt, add(y, 0.5 * dt, k2));
        let k4 = rhs(t - dt, add(y, dt, k3));
        for i in 0..2 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            guard(y[i], t)?;
        }
        first[k - 1] = y[0];
        second[k - 1] = y[1];
    }
    Ok((ScalarPath::new(grid, first)?, ScalarPath::new(grid, second)?))
}
