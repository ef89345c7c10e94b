#ifndef QMFG_H
#define QMFG_H

/* Generated by cbindgen from qmfg-ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Selects a solved path when copying out of a solution handle.
typedef enum QmfgPath {
  // Riccati feedback gain.
  QMFG_PATH_GAIN = 0,
  // State variance.
  QMFG_PATH_VARIANCE = 1,
  // Quantile-dependent cost coefficient.
  QMFG_PATH_COEFFICIENT = 2,
  // Tracking offset.
  QMFG_PATH_OFFSET = 3,
  // Population mean.
  QMFG_PATH_MEAN = 4,
  // Decoupling gain (variance-only special case solutions).
  QMFG_PATH_DECOUPLING_GAIN = 5,
  // Gain-identity path pi + p (special case solutions).
  QMFG_PATH_GAIN_IDENTITY = 6,
} QmfgPath;

// Outcome of an FFI call.
typedef enum QmfgStatus {
  // Success.
  QMFG_STATUS_OK = 0,
  // A required pointer argument was null.
  QMFG_STATUS_NULL_POINTER = 1,
  // A parameter violates its domain (see the library's standing
  // assumptions: b != 0, r > 0, sigma >= 0, q >= 0, v0 >= 0, T > 0,
  // alpha in (0, 1)).
  QMFG_STATUS_INVALID_ARGUMENT = 2,
  // The fixed-point iteration hit its cap; the handle is still
  // populated and flagged not converged.
  QMFG_STATUS_NON_CONVERGENCE = 3,
  // Integration failure (finite escape or identity violation).
  QMFG_STATUS_SOLVER_FAILURE = 4,
  // The caller's buffer does not hold `n_nodes` values.
  QMFG_STATUS_BUFFER_TOO_SMALL = 5,
  // The requested path does not exist on this solution.
  QMFG_STATUS_NO_SUCH_PATH = 6,
} QmfgStatus;

// Opaque solution handle.
typedef struct QmfgSolution QmfgSolution;

// Fixed-point solver settings.
typedef struct QmfgSolverOptions {
  // Grid steps on [0, T]; at least 2.
  size_t n_steps;
  // Sup-norm stopping threshold of the Picard iteration.
  double picard_tol;
  // Iteration cap.
  uint32_t max_iters;
  // Relaxation weight in [0, 1); 0 is undamped.
  double damping;
} QmfgSolverOptions;

// Scalar model data; same fields and conventions as the Rust API.
typedef struct QmfgModelParams {
  double a;
  double b;
  double r;
  double sigma;
  double q;
  double alpha;
  double mu0;
  double v0;
  double horizon;
} QmfgModelParams;

// Existence/uniqueness inequalities evaluated at one ball radius.
typedef struct QmfgConditionReport {
  double mu_star;
  double m;
  double existence_lhs;
  bool existence_holds;
  double contraction_lhs;
  bool contraction_holds;
} QmfgConditionReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Default solver options (2000 steps, tol 1e-10, 200 iterations, no
// damping).
struct QmfgSolverOptions qmfg_default_options(void);

// Solves the coupled gain/variance fixed point.
//
// On `Ok` and on `NonConvergence`, `*out` owns a solution handle that
// must be released with `qmfg_solution_free`.
//
// # Safety
// `params` and `options` must point to valid structs; `out` must point
// to writable pointer storage.
enum QmfgStatus qmfg_solve(const struct QmfgModelParams *params,
                           const struct QmfgSolverOptions *options,
                           struct QmfgSolution **out);

// Solves the variance-only special case; the handle additionally carries
// the decoupling gain and the gain-identity path.
//
// # Safety
// Same contracts as [`qmfg_solve`].
enum QmfgStatus qmfg_solve_special(const struct QmfgModelParams *params,
                                   const struct QmfgSolverOptions *options,
                                   struct QmfgSolution **out);

// Releases a solution handle. Null is a no-op.
//
// # Safety
// `solution` must be null or a pointer previously returned by
// `qmfg_solve` / `qmfg_solve_special` that has not been freed yet.
void qmfg_solution_free(struct QmfgSolution *solution);

// Number of grid nodes in the solution's paths (0 for null).
//
// # Safety
// `solution` must be null or a live handle.
size_t qmfg_solution_n_nodes(const struct QmfgSolution *solution);

// Copies one solved path into `buffer` (length `len >= n_nodes`).
//
// # Safety
// `solution` must be a live handle and `buffer` must point to at least
// `len` writable doubles.
enum QmfgStatus qmfg_solution_path(const struct QmfgSolution *solution,
                                   enum QmfgPath which,
                                   double *buffer,
                                   size_t len);

// Picard sweeps performed by the solve behind the handle.
//
// # Safety
// `solution` must be null or a live handle.
uint32_t qmfg_solution_iterations(const struct QmfgSolution *solution);

// Sup-norm of the last gain update (NaN for null).
//
// # Safety
// `solution` must be null or a live handle.
double qmfg_solution_final_update_norm(const struct QmfgSolution *solution);

// Whether the iteration met its tolerance.
//
// # Safety
// `solution` must be null or a live handle.
bool qmfg_solution_converged(const struct QmfgSolution *solution);

// Inverse standard-normal CDF at `alpha` in (0, 1).
//
// # Safety
// `out` must point to a writable double.
enum QmfgStatus qmfg_probit(double alpha, double *out);

// Alpha-quantile (inf-definition order statistic) of `values[0..len]`.
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be writable.
enum QmfgStatus qmfg_empirical_quantile(const double *values,
                                        size_t len,
                                        double alpha,
                                        double *out);

// Feedback law u = -(b/r)(pi x + s).
//
// # Safety
// `params` must be valid and `out` writable.
enum QmfgStatus qmfg_feedback_control(const struct QmfgModelParams *params,
                                      double pi_t,
                                      double s_t,
                                      double x,
                                      double *out);

// Evaluates the existence and uniqueness inequalities at radius `m >= 0`.
//
// # Safety
// `params` must be valid and `out` writable.
enum QmfgStatus qmfg_check_conditions(const struct QmfgModelParams *params,
                                      double m,
                                      struct QmfgConditionReport *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QMFG_H */
