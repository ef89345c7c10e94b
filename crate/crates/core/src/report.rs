//! Machine-readable result files: CSV tables, JSON summaries, plot series.
//!
//! Floats are serialized with Rust's shortest round-trip formatting, so
//! re-parsing a file reproduces the in-memory values exactly and reruns
//! with the same seed are byte-identical. Writes go through a temp file
//! and an atomic rename.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::conditions::ConditionReport;
use crate::sim::{GapStudyRow, PopulationRun};
use crate::solver::CoupledSolution;

/// Writes `bytes` to `path` via a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

/// `paths.csv`: one row per grid node with every solved path.
pub fn paths_csv(solution: &CoupledSolution) -> String {
    let grid = solution.grid();
    let mut out = String::from("t,pi,V,q_alpha,s,xbar\n");
    for (k, t) in grid.nodes().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            t,
            solution.pi.value(k),
            solution.variance.value(k),
            solution.q_alpha.value(k),
            solution.offset.value(k),
            solution.mean.value(k),
        );
    }
    out
}

#[derive(Serialize)]
struct SolveSummary {
    iterations: u32,
    final_update_norm: f64,
    pi0: f64,
    #[serde(rename = "vT")]
    v_t: f64,
    converged: bool,
}

/// `summary.json` with the solve endpoints and convergence metadata.
pub fn summary_json(solution: &CoupledSolution) -> String {
    let summary = SolveSummary {
        iterations: solution.iterations,
        final_update_norm: solution.final_update_norm,
        pi0: solution.pi.first(),
        v_t: solution.variance.last(),
        converged: solution.converged,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct ConditionsOut {
    mu_star: f64,
    m: f64,
    existence_lhs: f64,
    existence_holds: bool,
    contraction_lhs: f64,
    contraction_holds: bool,
    witness: Option<f64>,
}

/// `conditions.json` for a report plus the scan witness (if any).
pub fn conditions_json(report: &ConditionReport, witness: Option<f64>) -> String {
    let out = ConditionsOut {
        mu_star: report.mu_star,
        m: report.m_witness,
        existence_lhs: report.existence_lhs,
        existence_holds: report.existence_holds,
        contraction_lhs: report.contraction_lhs,
        contraction_holds: report.contraction_holds,
        witness,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("report serializes");
    text.push('\n');
    text
}

/// `population.csv` in long format: `trial,agent,t,x,u,q_emp`.
/// The control column is empty on the terminal node (no step starts there).
pub fn population_csv(runs: &[PopulationRun]) -> String {
    let mut out = String::from("trial,agent,t,x,u,q_emp\n");
    for (trial, run) in runs.iter().enumerate() {
        let grid = run.grid();
        let times: Vec<String> = grid.nodes().map(|t| t.to_string()).collect();
        for agent in 0..run.n_agents() {
            for (k, t) in times.iter().enumerate() {
                let control = if k < grid.n_steps() {
                    run.controls[agent][k].to_string()
                } else {
                    String::new()
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    trial, agent, t, run.states[agent][k], control, run.emp_coeff[agent][k],
                );
            }
        }
    }
    out
}

/// `pop_mean.csv`: `trial,t,xbar_n`.
pub fn pop_mean_csv(runs: &[PopulationRun]) -> String {
    let mut out = String::from("trial,t,xbar_n\n");
    for (trial, run) in runs.iter().enumerate() {
        for (k, t) in run.grid().nodes().enumerate() {
            let _ = writeln!(out, "{},{},{}", trial, t, run.pop_mean.value(k));
        }
    }
    out
}

/// `costs.csv`: `trial,agent,cost_mfg,cost_best_response`.
pub fn costs_csv(rows: &[(usize, usize, f64, f64)]) -> String {
    let mut out = String::from("trial,agent,cost_mfg,cost_best_response\n");
    for (trial, agent, mfg, br) in rows {
        let _ = writeln!(out, "{},{},{},{}", trial, agent, mfg, br);
    }
    out
}

/// `gap_study.csv`: `n,mean_cost_mfg,mean_cost_br,cost_gap,max_mean_dev`.
pub fn gap_study_csv(rows: &[GapStudyRow]) -> String {
    let mut out = String::from("n,mean_cost_mfg,mean_cost_br,cost_gap,max_mean_dev\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.n_agents,
            row.mean_cost_mfg,
            row.mean_cost_best_response,
            row.cost_gap,
            row.max_mean_deviation,
        );
    }
    out
}

/// Two-column series file for any plotting tool.
pub fn series_csv(x_name: &str, y_name: &str, points: &[(f64, f64)]) -> String {
    let mut out = format!("{x_name},{y_name}\n");
    for (x, y) in points {
        let _ = writeln!(out, "{},{}", x, y);
    }
    out
}
