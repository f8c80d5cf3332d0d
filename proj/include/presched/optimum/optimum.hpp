#pragma once

#include <presched/core/matrix.hpp>
#include <presched/core/types.hpp>

#include <cstddef>
#include <vector>

namespace presched {

/// Rows are matched to distinct columns; rows <= cols.
struct AssignmentProblem {
    Matrix cost;
    std::vector<std::size_t> solution; ///< column chosen for each row
    double value = 0.0;
};

enum class TieBreak {
    Any,           ///< first optimum found by the Hungarian method
    Lexicographic, ///< lexicographically smallest optimal column vector
};

/// Exact minimum-cost matching of every row to a distinct column.
/// Entries equal to +infinity are forbidden pairs. Throws
/// SchedError(Infeasible) when no finite matching exists.
AssignmentProblem min_cost_assignment(const Matrix& cost, TieBreak tie = TieBreak::Lexicographic);

/// Optimum value plus a schedule realizing it.
struct OptSolution {
    double value = 0.0;
    Trace certificate;
};

/// Smith's rule on one machine, all jobs at time 0: order by p / (rate * w).
OptSolution solve_opt_single_machine(const Instance& instance);
double opt_single_machine(const Instance& instance);

/// Exact non-preemptive optimum for unit weights and r = 0 as a matching
/// of jobs to (machine, position-from-last) slots with cost k * p / rate.
OptSolution solve_opt_unrelated(const Instance& instance);
double opt_unrelated_matching(const Instance& instance);

/// Exhaustive oracle for n <= 6, m <= 3. With r = 0: minimum over all
/// assignments and per-machine orders (weighted). With release times and
/// n <= 3: minimum over preemptive schedules that switch only at releases
/// and completions, which is exact on one machine. Throws TooLarge.
double brute_force_opt(const Instance& instance);

/// Total completion time of preemptive SRPT on one machine with releases.
double srpt_lower_bound(const Instance& instance);

} // namespace presched
