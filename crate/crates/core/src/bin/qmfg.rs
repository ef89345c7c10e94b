//! Command-line front end: solve / check / simulate / study.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qmfg::cli::{self, CmdError, RadiusSpec};

#[derive(Parser)]
#[command(
    name = "qmfg",
    about = "Linear-quadratic mean field games with quantile-dependent costs: \
             solver, condition checker and population simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON, schema version 1)
    #[arg(long)]
    config: PathBuf,
    /// Override a config field by dotted path, e.g. --set model.q=0.45
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Override the configured output directory
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the configured seed(s)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for internal parallelism (default: all cores);
    /// results do not depend on this
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the coupled gain/variance fixed point and write the paths
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the existence and uniqueness inequalities
    Check {
        #[command(flatten)]
        common: Common,
        /// Single ball radius M to test
        #[arg(long, conflicts_with = "m_grid")]
        m: Option<f64>,
        /// Radius scan as start:stop:step (default 0.1:50:0.1)
        #[arg(long)]
        m_grid: Option<String>,
    },
    /// Simulate the finite population under the solved feedback law
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep population sizes and measure cost gaps and mean deviations
    Study {
        #[command(flatten)]
        common: Common,
    },
}

fn run_in_pool<T>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    match workers {
        None => job(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(job),
    }
}

fn dispatch(command: Command) -> Result<(), CmdError> {
    match command {
        Command::Solve { common } => {
            let config = cli::load_config(
                &common.config,
                &common.sets,
                common.output_dir,
                common.seed,
            )?;
            run_in_pool(common.workers, || cli::cmd_solve(&config))
        }
        Command::Check { common, m, m_grid } => {
            let config = cli::load_config(
                &common.config,
                &common.sets,
                common.output_dir,
                common.seed,
            )?;
            let spec = match (m, m_grid) {
                (Some(m), None) => RadiusSpec::Single(m),
                (None, Some(text)) => RadiusSpec::parse_grid(&text)?,
                (None, None) => RadiusSpec::default_grid(),
                (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
            };
            cli::cmd_check(&config, &spec)
        }
        Command::Simulate { common } => {
            let config = cli::load_config(
                &common.config,
                &common.sets,
                common.output_dir,
                common.seed,
            )?;
            run_in_pool(common.workers, || cli::cmd_simulate(&config))
        }
        Command::Study { common } => {
            let config = cli::load_config(
                &common.config,
                &common.sets,
                common.output_dir,
                common.seed,
            )?;
            run_in_pool(common.workers, || cli::cmd_study(&config))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
