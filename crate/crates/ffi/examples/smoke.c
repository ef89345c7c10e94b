#include <stdio.h>
#include <stdlib.h>
#include "qmfg.h"

int main(void) {
    QmfgModelParams params = {
        .a = -0.15, .b = 0.75, .r = 3.5, .sigma = 1.0, .q = 0.45,
        .alpha = 0.975, .mu0 = 1.0, .v0 = 0.5, .horizon = 0.2,
    };
    QmfgSolverOptions options = qmfg_default_options();
    options.n_steps = 500;

    QmfgSolution *solution = NULL;
    QmfgStatus status = qmfg_solve(&params, &options, &solution);
    if (status != QMFG_STATUS_OK || !qmfg_solution_converged(solution)) {
        fprintf(stderr, "solve failed: %d\n", (int)status);
        return 1;
    }
    size_t n = qmfg_solution_n_nodes(solution);
    double *gain = malloc(n * sizeof(double));
    if (qmfg_solution_path(solution, QMFG_PATH_GAIN, gain, n) != QMFG_STATUS_OK) return 1;
    if (gain[n - 1] != 0.0) return 1;
    if (gain[0] <= 0.0) return 1;

    double probit975 = 0.0;
    if (qmfg_probit(0.975, &probit975) != QMFG_STATUS_OK) return 1;

    QmfgConditionReport report;
    if (qmfg_check_conditions(&params, 3.0, &report) != QMFG_STATUS_OK) return 1;
    if (!report.existence_holds || !report.contraction_holds) return 1;

    printf("ok: pi(0)=%.9f probit(0.975)=%.9f existence_lhs=%.6f\n",
           gain[0], probit975, report.existence_lhs);
    free(gain);
    qmfg_solution_free(solution);
    return 0;
}
