//! Implementations behind the `qmfg` binary's subcommands.
//!
//! Each command loads a validated [`RunConfig`], runs the requested
//! computation and emits machine-readable files into the configured output
//! directory. Outcomes map onto a fixed exit-code contract:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 1    | configuration or I/O error                |
//! | 2    | solver failure (non-convergence, blow-up) |
//! | 3    | conditions not satisfied                  |
//! | 4    | resource budget refusal                   |

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use crate::config::{ConfigError, EmitKind, RunConfig};
use crate::conditions;
use crate::error::Error;
use crate::report;
use crate::rng::trial_seed;
use crate::sim::{best_response_cost, gap_study, simulate_population, SimulationConfig};
use crate::solver::{solve_fixed_point, CoupledSolution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_CONDITIONS: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CmdError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver did not converge: |update| = {update_norm:e} after {iterations} iterations")]
    NonConvergence { iterations: u32, update_norm: f64 },
    #[error("solver failed: {0}")]
    Solver(Error),
    #[error("conditions not satisfied{0}")]
    ConditionsFailed(String),
    #[error("refusing to run: {0}")]
    ResourceRefusal(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) | CmdError::Io(_) => EXIT_CONFIG,
            CmdError::NonConvergence { .. } | CmdError::Solver(_) => EXIT_SOLVER,
            CmdError::ConditionsFailed(_) => EXIT_CONDITIONS,
            CmdError::ResourceRefusal(_) => EXIT_RESOURCE,
        }
    }
}

fn solve_from_config(config: &RunConfig) -> Result<CoupledSolution, CmdError> {
    let params = config
        .model
        .to_params()
        .map_err(|e| ConfigError::Invalid(format!("model.{e}")))?;
    let solver_cfg = config
        .solver
        .to_config(config.model.horizon)
        .map_err(|e| ConfigError::Invalid(format!("solver.{e}")))?;
    solve_fixed_point(&params, &solver_cfg).map_err(CmdError::Solver)
}

fn emit_solution(config: &RunConfig, solution: &CoupledSolution) -> Result<(), CmdError> {
    let out = &config.output_dir;
    if config.emits(EmitKind::PathsCsv) {
        report::write_atomic(&out.join("paths.csv"), report::paths_csv(solution).as_bytes())?;
    }
    if config.emits(EmitKind::SummaryJson) {
        report::write_atomic(
            &out.join("summary.json"),
            report::summary_json(solution).as_bytes(),
        )?;
    }
    if config.emits(EmitKind::Plotdata) {
        let grid = solution.grid();
        let series: [(&str, &str, &crate::ScalarPath); 5] = [
            ("pi", "pi", &solution.pi),
            ("variance", "V", &solution.variance),
            ("q_alpha", "q_alpha", &solution.q_alpha),
            ("offset", "s", &solution.offset),
            ("mean", "xbar", &solution.mean),
        ];
        for (file, column, path) in series {
            let points: Vec<(f64, f64)> = grid
                .nodes()
                .enumerate()
                .map(|(k, t)| (t, path.value(k)))
                .collect();
            report::write_atomic(
                &out.join("plotdata").join(format!("{file}.csv")),
                report::series_csv("t", column, &points).as_bytes(),
            )?;
        }
    }
    Ok(())
}

/// `solve`: fixed-point solve, `paths.csv` + `summary.json`.
/// Non-convergence still writes the flagged artifacts, then exits 2.
pub fn cmd_solve(config: &RunConfig) -> Result<(), CmdError> {
    let solution = solve_from_config(config)?;
    emit_solution(config, &solution)?;
    if !solution.converged {
        return Err(CmdError::NonConvergence {
            iterations: solution.iterations,
            update_norm: solution.final_update_norm,
        });
    }
    Ok(())
}

/// Ball radius argument of `check`: a single value or a scan grid.
#[derive(Debug, Clone)]
pub enum RadiusSpec {
    Single(f64),
    Grid { start: f64, stop: f64, step: f64 },
}

impl RadiusSpec {
    /// Default scan over (0, 50] in steps of 0.1.
    pub fn default_grid() -> Self {
        RadiusSpec::Grid {
            start: 0.1,
            stop: 50.0,
            step: 0.1,
        }
    }

    /// Parses `start:stop:step`.
    pub fn parse_grid(text: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(ConfigError::Parse(format!(
                "radius grid `{text}` must be start:stop:step"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|e| ConfigError::Parse(format!("radius grid `{text}`: {e}")))
            })
            .collect::<Result<_, _>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(start > 0.0 && stop >= start && step > 0.0) {
            return Err(ConfigError::Parse(format!(
                "radius grid `{text}` must have 0 < start <= stop and step > 0"
            )));
        }
        Ok(RadiusSpec::Grid { start, stop, step })
    }

    fn values(&self) -> Vec<f64> {
        match *self {
            RadiusSpec::Single(m) => vec![m],
            RadiusSpec::Grid { start, stop, step } => {
                let mut values = Vec::new();
                let mut k = 0u64;
                loop {
                    let m = start + step * k as f64;
                    if m > stop * (1.0 + 1e-12) {
                        break;
                    }
                    values.push(m);
                    k += 1;
                }
                values
            }
        }
    }
}

/// `check`: evaluates the existence/uniqueness inequalities at the given
/// radius (or scans a grid for a witness), writes `conditions.json`, exits
/// 3 if no radius satisfies both.
pub fn cmd_check(config: &RunConfig, spec: &RadiusSpec) -> Result<(), CmdError> {
    let params = config
        .model
        .to_params()
        .map_err(|e| ConfigError::Invalid(format!("model.{e}")))?;
    let grid = spec.values();
    if grid.iter().any(|&m| m < 0.0) {
        return Err(ConfigError::Invalid("check radius must be nonnegative".into()).into());
    }
    let witness = conditions::search_witness(&params, &grid);
    // reported at the witness when found, otherwise at the last scanned radius
    let at = witness.unwrap_or_else(|| *grid.last().expect("nonempty radius grid"));
    let report = conditions::check(&params, at);
    let text = report::conditions_json(&report, witness);
    print!("{text}");
    report::write_atomic(&config.output_dir.join("conditions.json"), text.as_bytes())?;
    if witness.is_none() {
        let detail = match spec {
            RadiusSpec::Single(m) => format!(
                ": at M = {m}, existence {} (lhs = {:.6}), contraction {} (lhs = {:.6})",
                if report.existence_holds { "holds" } else { "fails" },
                report.existence_lhs,
                if report.contraction_holds { "holds" } else { "fails" },
                report.contraction_lhs
            ),
            RadiusSpec::Grid { start, stop, step } => format!(
                ": no witness in the scan {start}:{stop}:{step}"
            ),
        };
        return Err(CmdError::ConditionsFailed(detail));
    }
    Ok(())
}

fn budget_check(elements: u64, budget: u64) -> Result<(), CmdError> {
    if elements > budget {
        return Err(CmdError::ResourceRefusal(format!(
            "job size {elements} elements (agents x steps x trials) exceeds \
             limits.max_sim_elements = {budget}"
        )));
    }
    Ok(())
}

/// `simulate`: solves, then runs the configured trials and writes
/// `population.csv`, `pop_mean.csv` and `costs.csv`. Deterministic for a
/// fixed seed, independent of worker count.
pub fn cmd_simulate(config: &RunConfig) -> Result<(), CmdError> {
    let sim = config.simulation.as_ref().ok_or_else(|| {
        ConfigError::Invalid("simulation: section required for the simulate command".into())
    })?;
    let elements = sim.n_agents as u64 * config.solver.n_steps as u64 * sim.n_trials as u64;
    budget_check(elements, config.limits.max_sim_elements)?;

    let params = config
        .model
        .to_params()
        .map_err(|e| ConfigError::Invalid(format!("model.{e}")))?;
    let solution = solve_from_config(config)?;
    if !solution.converged {
        return Err(CmdError::NonConvergence {
            iterations: solution.iterations,
            update_norm: solution.final_update_norm,
        });
    }

    let out = &config.output_dir;
    fs::create_dir_all(out)?;
    let pop_tmp = out.join("population.csv.tmp");
    let mean_tmp = out.join("pop_mean.csv.tmp");
    let mut pop = BufWriter::new(fs::File::create(&pop_tmp)?);
    let mut mean = BufWriter::new(fs::File::create(&mean_tmp)?);
    pop.write_all(b"trial,agent,t,x,u,q_emp\n")?;
    mean.write_all(b"trial,t,xbar_n\n")?;

    let grid = solution.grid();
    let times: Vec<String> = grid.nodes().map(|t| t.to_string()).collect();
    let mut cost_rows: Vec<(usize, usize, f64, f64)> = Vec::new();

    for trial in 0..sim.n_trials {
        let trial_cfg = SimulationConfig {
            n_agents: sim.n_agents,
            grid,
            seed: trial_seed(sim.seed, trial as u64),
            n_trials: 1,
            substeps: sim.substeps,
        };
        let run = simulate_population(&params, &solution, &trial_cfg).map_err(CmdError::Solver)?;

        let mut block = String::new();
        for agent in 0..run.n_agents() {
            for (k, t) in times.iter().enumerate() {
                let _ = write!(
                    block,
                    "{},{},{},{},",
                    trial, agent, t, run.states[agent][k]
                );
                if k < grid.n_steps() {
                    let _ = write!(block, "{}", run.controls[agent][k]);
                }
                let _ = writeln!(block, ",{}", run.emp_coeff[agent][k]);
            }
        }
        pop.write_all(block.as_bytes())?;

        let mut mean_block = String::new();
        for (k, t) in times.iter().enumerate() {
            let _ = writeln!(mean_block, "{},{},{}", trial, t, run.pop_mean.value(k));
        }
        mean.write_all(mean_block.as_bytes())?;

        for agent in 0..run.n_agents() {
            let br = best_response_cost(&run, agent, &params).map_err(CmdError::Solver)?;
            cost_rows.push((trial, agent, run.costs[agent], br));
        }
    }

    pop.flush()?;
    mean.flush()?;
    drop(pop);
    drop(mean);
    fs::rename(&pop_tmp, out.join("population.csv"))?;
    fs::rename(&mean_tmp, out.join("pop_mean.csv"))?;
    report::write_atomic(&out.join("costs.csv"), report::costs_csv(&cost_rows).as_bytes())?;
    Ok(())
}

/// `study`: population-size sweep, `gap_study.csv` plus two-column plot
/// series under `plotdata/`.
pub fn cmd_study(config: &RunConfig) -> Result<(), CmdError> {
    let study = config.study.as_ref().ok_or_else(|| {
        ConfigError::Invalid("study: section required for the study command".into())
    })?;
    let total: u64 = study
        .n_list
        .iter()
        .map(|&n| n as u64 * config.solver.n_steps as u64 * study.trials as u64)
        .sum();
    budget_check(total, config.limits.max_sim_elements)?;

    let params = config
        .model
        .to_params()
        .map_err(|e| ConfigError::Invalid(format!("model.{e}")))?;
    let solution = solve_from_config(config)?;
    if !solution.converged {
        return Err(CmdError::NonConvergence {
            iterations: solution.iterations,
            update_norm: solution.final_update_norm,
        });
    }

    let rows = gap_study(
        &params,
        &solution,
        &study.n_list,
        study.trials,
        config.study_seed(),
    )
    .map_err(CmdError::Solver)?;

    let out = &config.output_dir;
    if config.emits(EmitKind::GapCsv) {
        report::write_atomic(&out.join("gap_study.csv"), report::gap_study_csv(&rows).as_bytes())?;
    }
    if config.emits(EmitKind::Plotdata) {
        let gap: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.n_agents as f64, r.cost_gap))
            .collect();
        let dev: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.n_agents as f64, r.max_mean_deviation))
            .collect();
        report::write_atomic(
            &out.join("plotdata").join("cost_gap_vs_n.csv"),
            report::series_csv("n", "cost_gap", &gap).as_bytes(),
        )?;
        report::write_atomic(
            &out.join("plotdata").join("max_mean_dev_vs_n.csv"),
            report::series_csv("n", "max_mean_dev", &dev).as_bytes(),
        )?;
    }
    Ok(())
}

/// Loads a config file, applies `--set` overrides and the CLI-level
/// output-dir/seed overrides.
pub fn load_config(
    path: &Path,
    sets: &[String],
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<RunConfig, CmdError> {
    let mut config = RunConfig::load(path, sets)?;
    if let Some(dir) = output_dir {
        config.output_dir = dir;
    }
    if let Some(seed) = seed {
        if let Some(sim) = &mut config.simulation {
            sim.seed = seed;
        }
        if let Some(study) = &mut config.study {
            study.seed = Some(seed);
        }
    }
    Ok(config)
}
