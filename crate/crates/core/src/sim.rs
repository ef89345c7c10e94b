//! Finite-population Monte Carlo validation of the equilibrium.
//!
//! `n` agents run the solved feedback law under Euler–Maruyama; the run
//! records states, controls, the population mean, each agent's empirical
//! quantile coefficient (over the other `n - 1` agents) and realized costs.
//! The best-response baseline freezes everybody else's trajectories, solves
//! the induced time-varying tracking problem for one agent, and re-simulates
//! it with the same noise (common random numbers), which makes the cost gap
//! of the equilibrium policy visible at desk-scale trial counts.
//!
//! Since the feedback law depends only on an agent's own state and the
//! precomputed gain/offset paths, agent trajectories are independent and
//! simulated in parallel; all reductions run in fixed index order so the
//! output is bit-identical for any worker count.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ScalarPath, TimeGrid};
use crate::params::ModelParams;
use crate::quantile::order_statistic_rank;
use crate::rng::{agent_rng, trial_seed};
use crate::solver::{feedback_control, offset_backward, riccati_backward, CoupledSolution};

/// Settings of one simulation batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub n_agents: usize,
    /// Must coincide with the grid the control gains were solved on.
    pub grid: TimeGrid,
    pub seed: u64,
    pub n_trials: usize,
    /// Euler–Maruyama substeps per grid interval (1 = step on the grid);
    /// gains are interpolated linearly at substep times.
    pub substeps: usize,
}

impl SimulationConfig {
    pub fn new(n_agents: usize, grid: TimeGrid, seed: u64, n_trials: usize) -> Result<Self> {
        if n_agents < 2 {
            return Err(Error::PopulationTooSmall(n_agents));
        }
        if n_trials < 1 {
            return Err(Error::InvalidParam {
                name: "n_trials",
                reason: "at least one trial is required".to_string(),
            });
        }
        Ok(Self {
            n_agents,
            grid,
            seed,
            n_trials,
            substeps: 1,
        })
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps.max(1);
        self
    }
}

/// One simulated trial of the finite population.
#[derive(Debug, Clone)]
pub struct PopulationRun {
    /// `states[i][k]` — state of agent `i` at node `k`.
    pub states: Vec<Vec<f64>>,
    /// `controls[i][k]` — control applied by agent `i` on step `k`.
    pub controls: Vec<Vec<f64>>,
    /// Arithmetic mean of the states at each node.
    pub pop_mean: ScalarPath,
    /// `emp_coeff[i][k]` — quantile coefficient of agent `i` at node `k`,
    /// built from the empirical distribution of the other agents.
    pub emp_coeff: Vec<Vec<f64>>,
    /// Realized cost of each agent along its trajectory.
    pub costs: Vec<f64>,
    /// Trial-scoped seed the noise streams descend from.
    pub seed: u64,
    /// Substep count used by the Euler–Maruyama sweep.
    pub substeps: usize,
}

impl PopulationRun {
    pub fn n_agents(&self) -> usize {
        self.states.len()
    }

    pub fn grid(&self) -> TimeGrid {
        self.pop_mean.grid()
    }
}

/// One row of the population-size study.
#[derive(Debug, Clone, Copy)]
pub struct GapStudyRow {
    pub n_agents: usize,
    /// Equilibrium-policy cost scored in the frozen tracking problem of
    /// each agent (reference and coefficient taken from the realized run),
    /// averaged over agents and trials.
    pub mean_cost_mfg: f64,
    /// Best-response cost in the same frozen problem, same noise.
    pub mean_cost_best_response: f64,
    /// `mean_cost_mfg - mean_cost_best_response`; nonnegative up to
    /// discretization and Monte Carlo noise because the best response is
    /// optimal against the frozen data.
    pub cost_gap: f64,
    /// Max over nodes of |population mean - limit mean|, averaged over trials.
    pub max_mean_deviation: f64,
    /// Standard error of the per-trial cost gaps.
    pub gap_std_err: f64,
}

/// Simulates one trial of `n` agents under the solved feedback law.
///
/// Agent `i` draws its initial state and Brownian increments from the
/// stream `(config.seed, i)`; reruns with the same config are bit-identical
/// regardless of thread count.
pub fn simulate_population(
    params: &ModelParams,
    solution: &CoupledSolution,
    config: &SimulationConfig,
) -> Result<PopulationRun> {
    params.validate()?;
    if config.grid != solution.grid() {
        return Err(Error::GridMismatch);
    }
    if config.n_agents < 2 {
        return Err(Error::PopulationTooSmall(config.n_agents));
    }
    let n = config.n_agents;
    let grid = config.grid;
    let n_nodes = grid.n_nodes();

    let paths: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            simulate_agent(
                params,
                &solution.pi,
                &solution.offset,
                config,
                i as u64,
                None,
            )
        })
        .collect();

    let mut pop_mean = Vec::with_capacity(n_nodes);
    for k in 0..n_nodes {
        let sum: f64 = paths.iter().map(|(states, _)| states[k]).sum();
        pop_mean.push(sum / n as f64);
    }
    let pop_mean = ScalarPath::new(grid, pop_mean)?;

    // Empirical quantile over the other n-1 agents, all agents at once:
    // sort the node column once, then removing one element shifts the
    // order statistic by at most one slot.
    let rank = order_statistic_rank(n - 1, params.alpha);
    let j1 = rank - 1; // 0-based index into the leave-one-out sample
    let q = params.q;
    let coeff_by_node: Vec<Vec<f64>> = (0..n_nodes)
        .into_par_iter()
        .map(|k| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_unstable_by(|&p, &r| {
                paths[p].0[k]
                    .total_cmp(&paths[r].0[k])
                    .then(p.cmp(&r))
            });
            let mut position = vec![0usize; n];
            for (pos, &agent) in order.iter().enumerate() {
                position[agent] = pos;
            }
            (0..n)
                .map(|i| {
                    let p = position[i];
                    let idx = if j1 < p { j1 } else { j1 + 1 };
                    let quantile = paths[order[idx]].0[k];
                    q * (1.0 + quantile.exp())
                })
                .collect()
        })
        .collect();

    let mut emp_coeff = vec![vec![0.0; n_nodes]; n];
    for (k, row) in coeff_by_node.iter().enumerate() {
        for i in 0..n {
            emp_coeff[i][k] = row[i];
        }
    }

    let (states, controls): (Vec<_>, Vec<_>) = paths.into_iter().unzip();
    let mut run = PopulationRun {
        states,
        controls,
        pop_mean,
        emp_coeff,
        costs: Vec::new(),
        seed: config.seed,
        substeps: config.substeps.max(1),
    };
    run.costs = (0..n)
        .map(|i| realized_cost(&run, i, params))
        .collect::<Result<Vec<f64>>>()?;
    Ok(run)
}

/// Euler–Maruyama sweep of a single agent under the feedback law
/// `u = -(b/r)(pi x + s)`. With `initial = Some(x0)` the sweep replays the
/// agent's noise stream against different gains (the initial-state draw is
/// still consumed, so the increments line up with the original run).
fn simulate_agent(
    params: &ModelParams,
    pi: &ScalarPath,
    s: &ScalarPath,
    config: &SimulationConfig,
    agent: u64,
    initial: Option<f64>,
) -> (Vec<f64>, Vec<f64>) {
    let grid = config.grid;
    let n_steps = grid.n_steps();
    let sub = config.substeps.max(1);
    let dt = grid.dt();
    let h = dt / sub as f64;
    let sqrt_h = h.sqrt();
    let (a, b, sigma) = (params.a, params.b, params.sigma);

    let mut rng = agent_rng(config.seed, agent);
    let z0: f64 = rng.sample(StandardNormal);
    let mut x = initial.unwrap_or_else(|| params.mu0 + params.v0.sqrt() * z0);

    let mut states = Vec::with_capacity(n_steps + 1);
    let mut controls = Vec::with_capacity(n_steps);
    states.push(x);
    for k in 0..n_steps {
        let u_node = feedback_control(pi.value(k), s.value(k), x, params);
        controls.push(u_node);
        if sub == 1 {
            let z: f64 = rng.sample(StandardNormal);
            x += (a * x + b * u_node) * dt + sigma * sqrt_h * z;
        } else {
            let t_k = grid.node(k);
            for j in 0..sub {
                let u = if j == 0 {
                    u_node
                } else {
                    let t = t_k + j as f64 * h;
                    feedback_control(pi.sample(t), s.sample(t), x, params)
                };
                let z: f64 = rng.sample(StandardNormal);
                x += (a * x + b * u) * h + sigma * sqrt_h * z;
            }
        }
        states.push(x);
    }
    (states, controls)
}

/// Pathwise cost of an agent along its realized trajectory: trapezoidal
/// quadrature of `q_emp (x - pop_mean)^2` plus the control term with the
/// controls held left-constant on each step.
pub fn realized_cost(run: &PopulationRun, agent: usize, params: &ModelParams) -> Result<f64> {
    let n = run.n_agents();
    if agent >= n {
        return Err(Error::AgentIndex {
            index: agent,
            n_agents: n,
        });
    }
    tracking_cost(
        &run.states[agent],
        &run.controls[agent],
        run.pop_mean.values(),
        &run.emp_coeff[agent],
        params,
        run.grid(),
    )
}

fn tracking_cost(
    states: &[f64],
    controls: &[f64],
    reference: &[f64],
    coeff: &[f64],
    params: &ModelParams,
    grid: TimeGrid,
) -> Result<f64> {
    let n_steps = grid.n_steps();
    debug_assert_eq!(states.len(), n_steps + 1);
    debug_assert_eq!(controls.len(), n_steps);
    let dt = grid.dt();
    let dev = |k: usize| {
        let d = states[k] - reference[k];
        coeff[k] * d * d
    };
    let mut total = 0.0;
    for (k, &u) in controls.iter().enumerate() {
        let g = 0.5 * (dev(k) + dev(k + 1));
        total += (g + params.r * u * u) * dt;
    }
    Ok(total)
}

/// Reference and coefficient of the frozen tracking problem of one agent:
/// the mean over the other agents and the agent's own empirical coefficient
/// path, both taken from the realized run.
fn frozen_problem(run: &PopulationRun, agent: usize) -> Result<(ScalarPath, ScalarPath)> {
    let n = run.n_agents() as f64;
    let grid = run.grid();
    let z: Vec<f64> = (0..grid.n_nodes())
        .map(|k| (n * run.pop_mean.value(k) - run.states[agent][k]) / (n - 1.0))
        .collect();
    Ok((
        ScalarPath::new(grid, z)?,
        ScalarPath::new(grid, run.emp_coeff[agent].clone())?,
    ))
}

/// Costs of the equilibrium policy and of the best response, both scored
/// in the frozen tracking problem of `agent` with common random numbers.
fn frozen_cost_pair(
    run: &PopulationRun,
    agent: usize,
    params: &ModelParams,
) -> Result<(f64, f64)> {
    let n = run.n_agents();
    if agent >= n {
        return Err(Error::AgentIndex {
            index: agent,
            n_agents: n,
        });
    }
    let grid = run.grid();
    let (reference, coeff) = frozen_problem(run, agent)?;

    let mfg_cost = tracking_cost(
        &run.states[agent],
        &run.controls[agent],
        reference.values(),
        coeff.values(),
        params,
        grid,
    )?;

    let gain = riccati_backward(&coeff, params)?;
    let offset = offset_backward(&gain, &coeff, &reference, params)?;
    let config = SimulationConfig {
        n_agents: n,
        grid,
        seed: run.seed,
        n_trials: 1,
        substeps: run.substeps,
    };
    let (br_states, br_controls) = simulate_agent(
        params,
        &gain,
        &offset,
        &config,
        agent as u64,
        Some(run.states[agent][0]),
    );
    let br_cost = tracking_cost(
        &br_states,
        &br_controls,
        reference.values(),
        coeff.values(),
        params,
        grid,
    )?;
    Ok((mfg_cost, br_cost))
}

/// Cost of the anticipative best response of `agent`: freeze the other
/// agents' realized trajectories, solve the time-varying LQ tracking
/// problem against their mean with the agent's own coefficient path, then
/// re-simulate with the identical noise increments.
pub fn best_response_cost(run: &PopulationRun, agent: usize, params: &ModelParams) -> Result<f64> {
    frozen_cost_pair(run, agent, params).map(|(_, br)| br)
}

/// Sweeps population sizes and measures the per-agent cost gap and the
/// deviation of the population mean from the limit mean.
pub fn gap_study(
    params: &ModelParams,
    solution: &CoupledSolution,
    n_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<GapStudyRow>> {
    if n_list.is_empty() {
        return Err(Error::InvalidParam {
            name: "n_list",
            reason: "population list must be nonempty".to_string(),
        });
    }
    if !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParam {
            name: "n_list",
            reason: "population list must be strictly increasing".to_string(),
        });
    }
    if trials < 1 {
        return Err(Error::InvalidParam {
            name: "trials",
            reason: "at least one trial is required".to_string(),
        });
    }
    let grid = solution.grid();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut trial_mfg = Vec::with_capacity(trials);
        let mut trial_br = Vec::with_capacity(trials);
        let mut trial_dev = Vec::with_capacity(trials);
        for t in 0..trials {
            let config = SimulationConfig::new(n, grid, trial_seed(seed, t as u64), 1)?;
            let run = simulate_population(params, solution, &config)?;
            let pairs: Vec<(f64, f64)> = (0..n)
                .into_par_iter()
                .map(|i| frozen_cost_pair(&run, i, params))
                .collect::<Result<Vec<_>>>()?;
            let mfg: f64 = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
            let br: f64 = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
            trial_mfg.push(mfg);
            trial_br.push(br);
            trial_dev.push(run.pop_mean.sup_distance(&solution.mean));
        }
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        let gaps: Vec<f64> = trial_mfg
            .iter()
            .zip(&trial_br)
            .map(|(m, b)| m - b)
            .collect();
        let gap_mean = mean(&gaps);
        let gap_std_err = if trials > 1 {
            let var = gaps
                .iter()
                .map(|g| (g - gap_mean) * (g - gap_mean))
                .sum::<f64>()
                / (trials - 1) as f64;
            (var / trials as f64).sqrt()
        } else {
            0.0
        };
        rows.push(GapStudyRow {
            n_agents: n,
            mean_cost_mfg: mean(&trial_mfg),
            mean_cost_best_response: mean(&trial_br),
            cost_gap: gap_mean,
            max_mean_deviation: mean(&trial_dev),
            gap_std_err,
        });
    }
    Ok(rows)
}
