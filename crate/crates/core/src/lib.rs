//! Linear-quadratic mean field games with quantile-dependent cost
//! coefficients: equilibrium solver, existence/uniqueness condition
//! checker and finite-population Monte Carlo validation.
//!
//! The model is a population of scalar agents `dx = (a x + b u) dt +
//! sigma dw` penalized for deviating from the population mean, where the
//! penalty weight depends on a quantile of the population state
//! distribution. In the population limit the distribution is Gaussian, the
//! quantile collapses to `mean + sqrt(variance) * probit(alpha)`, and the
//! equilibrium reduces to a Riccati equation coupled to a variance
//! equation through that coefficient. See [`solver`] for the fixed-point
//! computation, [`conditions`] for the sufficient existence/uniqueness
//! inequalities and [`sim`] for the finite-n experiments.

pub mod cli;
pub mod conditions;
pub mod config;
pub mod error;
pub mod grid;
pub mod normal;
pub mod ode;
pub mod params;
pub mod quantile;
pub mod report;
pub mod rng;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{ScalarPath, TimeGrid};
pub use normal::{gaussian_quantile, probit, std_normal_cdf, QuantileLevel};
pub use params::{ModelParams, SolverConfig};
pub use quantile::empirical_quantile;
pub use sim::{GapStudyRow, PopulationRun, SimulationConfig};
pub use solver::{CoupledSolution, SpecialCaseSolution};
