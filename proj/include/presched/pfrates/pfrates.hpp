#pragma once

#include <presched/core/matrix.hpp>
#include <presched/core/types.hpp>

#include <cstddef>
#include <utility>
#include <vector>

namespace presched {

/// Fractional assignment for the active jobs. Column c of x and entry c of
/// y belong to active[c].
struct PFRates {
    std::vector<JobIndex> active;
    Matrix x;              ///< machines x active jobs
    std::vector<double> y; ///< y[c] = sum_i rate(i, active[c]) * x(i, c)
    double objective = 0.0;
    double gap = 0.0; ///< Frank-Wolfe duality gap of the returned point
    int iterations = 0;
    bool converged = false;
    std::vector<double> history; ///< objective after each iteration, when requested
};

struct PFOptions {
    double tol = 1e-7;
    int max_iterations = 10'000;
    bool record_history = false;
};

/// Maximizes sum of log y_j over doubly substochastic x restricted to the
/// active jobs. Pairs with zero rate stay at 0. Throws SchedError(InfeasibleJob)
/// when an active job has no positive rate. Hitting the iteration cap is not
/// an error: the best point is returned with converged == false.
PFRates solve_pf(const Matrix& rates, const std::vector<JobIndex>& active, const PFOptions& options = {});

struct PartialMatching {
    std::vector<std::pair<MachineIndex, JobIndex>> pairs; ///< (row, column), ascending rows
    double value = 0.0;
};

/// Maximum-weight partial matching of rows to columns. Pairs with
/// non-positive weight are never selected.
PartialMatching lmo_assignment(const Matrix& weights);

/// Sum of natural logs. Throws SchedError(NonpositiveRate) on y_j <= 0.
double pf_objective(const std::vector<double>& y);

} // namespace presched
