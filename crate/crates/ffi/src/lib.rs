//! C ABI for the quantile-cost mean field game solver.
//!
//! Solutions are returned as opaque handles; callers copy paths out into
//! their own buffers and release the handle with [`qmfg_solution_free`].
//! Every fallible entry point reports a [`QmfgStatus`]; no function
//! panics across the boundary.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmfg::conditions;
use qmfg::params::{ModelParams, SolverConfig};
use qmfg::solver::{feedback_control, solve_fixed_point, solve_special_case};
use qmfg::{empirical_quantile, probit, QuantileLevel, ScalarPath, TimeGrid};

/// Outcome of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmfgStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter violates its domain (see the library's standing
    /// assumptions: b != 0, r > 0, sigma >= 0, q >= 0, v0 >= 0, T > 0,
    /// alpha in (0, 1)).
    InvalidArgument = 2,
    /// The fixed-point iteration hit its cap; the handle is still
    /// populated and flagged not converged.
    NonConvergence = 3,
    /// Integration failure (finite escape or identity violation).
    SolverFailure = 4,
    /// The caller's buffer does not hold `n_nodes` values.
    BufferTooSmall = 5,
    /// The requested path does not exist on this solution.
    NoSuchPath = 6,
}

/// Scalar model data; same fields and conventions as the Rust API.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QmfgModelParams {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub sigma: f64,
    pub q: f64,
    pub alpha: f64,
    pub mu0: f64,
    pub v0: f64,
    pub horizon: f64,
}

/// Fixed-point solver settings.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QmfgSolverOptions {
    /// Grid steps on [0, T]; at least 2.
    pub n_steps: usize,
    /// Sup-norm stopping threshold of the Picard iteration.
    pub picard_tol: f64,
    /// Iteration cap.
    pub max_iters: u32,
    /// Relaxation weight in [0, 1); 0 is undamped.
    pub damping: f64,
}

/// Existence/uniqueness inequalities evaluated at one ball radius.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QmfgConditionReport {
    pub mu_star: f64,
    pub m: f64,
    pub existence_lhs: f64,
    pub existence_holds: bool,
    pub contraction_lhs: f64,
    pub contraction_holds: bool,
}

/// Selects a solved path when copying out of a solution handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmfgPath {
    /// Riccati feedback gain.
    Gain = 0,
    /// State variance.
    Variance = 1,
    /// Quantile-dependent cost coefficient.
    Coefficient = 2,
    /// Tracking offset.
    Offset = 3,
    /// Population mean.
    Mean = 4,
    /// Decoupling gain (variance-only special case solutions).
    DecouplingGain = 5,
    /// Gain-identity path pi + p (special case solutions).
    GainIdentity = 6,
}

/// Opaque solution handle.
pub struct QmfgSolution {
    base: qmfg::CoupledSolution,
    special: Option<(ScalarPath, ScalarPath)>,
}

fn to_params(raw: &QmfgModelParams) -> Result<ModelParams, QmfgStatus> {
    ModelParams::new(
        raw.a, raw.b, raw.r, raw.sigma, raw.q, raw.alpha, raw.mu0, raw.v0, raw.horizon,
    )
    .map_err(|_| QmfgStatus::InvalidArgument)
}

fn to_config(raw: &QmfgSolverOptions, horizon: f64) -> Result<SolverConfig, QmfgStatus> {
    let grid = TimeGrid::new(horizon, raw.n_steps).map_err(|_| QmfgStatus::InvalidArgument)?;
    SolverConfig::new(grid, raw.picard_tol, raw.max_iters, raw.damping)
        .map_err(|_| QmfgStatus::InvalidArgument)
}

fn guarded(job: impl FnOnce() -> QmfgStatus) -> QmfgStatus {
    match catch_unwind(AssertUnwindSafe(job)) {
        Ok(status) => status,
        Err(_) => QmfgStatus::SolverFailure,
    }
}

/// Default solver options (2000 steps, tol 1e-10, 200 iterations, no
/// damping).
#[no_mangle]
pub extern "C" fn qmfg_default_options() -> QmfgSolverOptions {
    QmfgSolverOptions {
        n_steps: qmfg::params::DEFAULT_N_STEPS,
        picard_tol: qmfg::params::DEFAULT_PICARD_TOL,
        max_iters: qmfg::params::DEFAULT_MAX_ITERS,
        damping: qmfg::params::DEFAULT_DAMPING,
    }
}

/// Solves the coupled gain/variance fixed point.
///
/// On `Ok` and on `NonConvergence`, `*out` owns a solution handle that
/// must be released with `qmfg_solution_free`.
///
/// # Safety
/// `params` and `options` must point to valid structs; `out` must point
/// to writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn qmfg_solve(
    params: *const QmfgModelParams,
    options: *const QmfgSolverOptions,
    out: *mut *mut QmfgSolution,
) -> QmfgStatus {
    if params.is_null() || options.is_null() || out.is_null() {
        return QmfgStatus::NullPointer;
    }
    let (raw_params, raw_options) = (*params, *options);
    guarded(|| {
        *out = ptr::null_mut();
        let model = match to_params(&raw_params) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let config = match to_config(&raw_options, raw_params.horizon) {
            Ok(c) => c,
            Err(status) => return status,
        };
        match solve_fixed_point(&model, &config) {
            Ok(solution) => {
                let converged = solution.converged;
                let handle = Box::new(QmfgSolution {
                    base: solution,
                    special: None,
                });
                *out = Box::into_raw(handle);
                if converged {
                    QmfgStatus::Ok
                } else {
                    QmfgStatus::NonConvergence
                }
            }
            Err(_) => QmfgStatus::SolverFailure,
        }
    })
}

/// Solves the variance-only special case; the handle additionally carries
/// the decoupling gain and the gain-identity path.
///
/// # Safety
/// Same contracts as [`qmfg_solve`].
#[no_mangle]
pub unsafe extern "C" fn qmfg_solve_special(
    params: *const QmfgModelParams,
    options: *const QmfgSolverOptions,
    out: *mut *mut QmfgSolution,
) -> QmfgStatus {
    if params.is_null() || options.is_null() || out.is_null() {
        return QmfgStatus::NullPointer;
    }
    let (raw_params, raw_options) = (*params, *options);
    guarded(|| {
        *out = ptr::null_mut();
        let model = match to_params(&raw_params) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let config = match to_config(&raw_options, raw_params.horizon) {
            Ok(c) => c,
            Err(status) => return status,
        };
        match solve_special_case(&model, &config) {
            Ok(special) => {
                let converged = special.base.converged;
                let handle = Box::new(QmfgSolution {
                    base: special.base,
                    special: Some((special.p, special.h)),
                });
                *out = Box::into_raw(handle);
                if converged {
                    QmfgStatus::Ok
                } else {
                    QmfgStatus::NonConvergence
                }
            }
            Err(_) => QmfgStatus::SolverFailure,
        }
    })
}

/// Releases a solution handle. Null is a no-op.
///
/// # Safety
/// `solution` must be null or a pointer previously returned by
/// `qmfg_solve` / `qmfg_solve_special` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn qmfg_solution_free(solution: *mut QmfgSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of grid nodes in the solution's paths (0 for null).
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmfg_solution_n_nodes(solution: *const QmfgSolution) -> usize {
    if solution.is_null() {
        return 0;
    }
    (*solution).base.grid().n_nodes()
}

/// Copies one solved path into `buffer` (length `len >= n_nodes`).
///
/// # Safety
/// `solution` must be a live handle and `buffer` must point to at least
/// `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qmfg_solution_path(
    solution: *const QmfgSolution,
    which: QmfgPath,
    buffer: *mut f64,
    len: usize,
) -> QmfgStatus {
    if solution.is_null() || buffer.is_null() {
        return QmfgStatus::NullPointer;
    }
    let handle = &*solution;
    let path = match which {
        QmfgPath::Gain => &handle.base.pi,
        QmfgPath::Variance => &handle.base.variance,
        QmfgPath::Coefficient => &handle.base.q_alpha,
        QmfgPath::Offset => &handle.base.offset,
        QmfgPath::Mean => &handle.base.mean,
        QmfgPath::DecouplingGain => match &handle.special {
            Some((p, _)) => p,
            None => return QmfgStatus::NoSuchPath,
        },
        QmfgPath::GainIdentity => match &handle.special {
            Some((_, h)) => h,
            None => return QmfgStatus::NoSuchPath,
        },
    };
    let values = path.values();
    if len < values.len() {
        return QmfgStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buffer, values.len());
    QmfgStatus::Ok
}

/// Picard sweeps performed by the solve behind the handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmfg_solution_iterations(solution: *const QmfgSolution) -> u32 {
    if solution.is_null() {
        return 0;
    }
    (*solution).base.iterations
}

/// Sup-norm of the last gain update (NaN for null).
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmfg_solution_final_update_norm(solution: *const QmfgSolution) -> f64 {
    if solution.is_null() {
        return f64::NAN;
    }
    (*solution).base.final_update_norm
}

/// Whether the iteration met its tolerance.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmfg_solution_converged(solution: *const QmfgSolution) -> bool {
    if solution.is_null() {
        return false;
    }
    (*solution).base.converged
}

/// Inverse standard-normal CDF at `alpha` in (0, 1).
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qmfg_probit(alpha: f64, out: *mut f64) -> QmfgStatus {
    if out.is_null() {
        return QmfgStatus::NullPointer;
    }
    match QuantileLevel::new(alpha) {
        Ok(level) => {
            *out = probit(level);
            QmfgStatus::Ok
        }
        Err(_) => QmfgStatus::InvalidArgument,
    }
}

/// Alpha-quantile (inf-definition order statistic) of `values[0..len]`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmfg_empirical_quantile(
    values: *const f64,
    len: usize,
    alpha: f64,
    out: *mut f64,
) -> QmfgStatus {
    if values.is_null() || out.is_null() {
        return QmfgStatus::NullPointer;
    }
    let level = match QuantileLevel::new(alpha) {
        Ok(level) => level,
        Err(_) => return QmfgStatus::InvalidArgument,
    };
    let slice = std::slice::from_raw_parts(values, len);
    match empirical_quantile(slice, level) {
        Ok(q) => {
            *out = q;
            QmfgStatus::Ok
        }
        Err(_) => QmfgStatus::InvalidArgument,
    }
}

/// Feedback law u = -(b/r)(pi x + s).
///
/// # Safety
/// `params` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qmfg_feedback_control(
    params: *const QmfgModelParams,
    pi_t: f64,
    s_t: f64,
    x: f64,
    out: *mut f64,
) -> QmfgStatus {
    if params.is_null() || out.is_null() {
        return QmfgStatus::NullPointer;
    }
    let model = match to_params(&*params) {
        Ok(p) => p,
        Err(status) => return status,
    };
    *out = feedback_control(pi_t, s_t, x, &model);
    QmfgStatus::Ok
}

/// Evaluates the existence and uniqueness inequalities at radius `m >= 0`.
///
/// # Safety
/// `params` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qmfg_check_conditions(
    params: *const QmfgModelParams,
    m: f64,
    out: *mut QmfgConditionReport,
) -> QmfgStatus {
    if params.is_null() || out.is_null() {
        return QmfgStatus::NullPointer;
    }
    if !(m.is_finite() && m >= 0.0) {
        return QmfgStatus::InvalidArgument;
    }
    let model = match to_params(&*params) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let report = conditions::check(&model, m);
    *out = QmfgConditionReport {
        mu_star: report.mu_star,
        m: report.m_witness,
        existence_lhs: report.existence_lhs,
        existence_holds: report.existence_holds,
        contraction_lhs: report.contraction_lhs,
        contraction_holds: report.contraction_holds,
    };
    QmfgStatus::Ok
}
