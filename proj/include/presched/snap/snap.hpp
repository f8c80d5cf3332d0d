#pragma once

#include <presched/core/geometric.hpp>
#include <presched/core/policy.hpp>
#include <presched/pfrates/pfrates.hpp>

#include <cstddef>
#include <memory>
#include <ostream>
#include <utility>
#include <vector>

namespace presched {

/// Next checkpoint of a job: the smallest power of (1 + delta) that is at
/// least p_hat and strictly above q.
double next_checkpoint(const GeometricScale& scale, double p_hat, double q);

/// Work left until the next checkpoint. Throws InvalidParameter unless
/// p_hat >= 1, q >= 0 and delta > 0.
double next_checkpoint_gap(double p_hat, double q, double delta);

/// ceil(beta * n), guarded against rounding (0.7 * 10 gives 7).
std::size_t exhaustion_target(double beta, std::size_t n);

/// Simulation length and per-job targets from gaps u and rates y: jobs are
/// ranked by u / y (ties by position), the length is the
/// ceil(beta * n)-th ratio and v_j = min(u_j, length * y_j).
std::pair<double, std::vector<double>> simulation_length(const std::vector<double>& u, const std::vector<double>& y,
                                                         double beta);

/// Machine per job: argmax_i rate(i, j) * x(i, c). Near-equal scores
/// (relative 1e-9) go to the machine with the least planned time
/// sum v / rate so far, then the lowest index.
std::vector<MachineIndex> dispatch_by_rates(const Matrix& rates, const PFRates& pf, const std::vector<double>& v);

struct EpochPlan {
    std::size_t k = 0;
    double start = 0.0;
    std::vector<JobIndex> jobs;
    std::vector<double> u;
    std::vector<double> v;
    double length = 0.0;
    std::size_t target = 0;
    std::vector<MachineIndex> assignment; ///< parallel to jobs
    PFRates pf;
};

/// Steps 1 to 3 plus dispatch for the jobs in `jobs`, whose predictions and
/// processed amounts are given in parallel vectors.
EpochPlan plan_epoch(const Matrix& rates, const std::vector<JobIndex>& jobs, const std::vector<double>& p_hat,
                     const std::vector<double>& processed, double delta, double beta, const PFOptions& pf = {});

enum class SnapMode {
    Experimental, ///< per-machine PMLF, epoch ends after ceil(beta n_k) jobs exhaust
    GreedyStep4,  ///< each machine runs its jobs for v_j work, largest first, without preemption
};

struct SnapParams {
    double delta = 1.0;
    double beta = 0.7;
    SnapMode mode = SnapMode::Experimental;
    double tol = 1e-7;
};

std::unique_ptr<Policy> snap_policy(const SnapParams& params = {});

/// SNAP that, at the first epoch boundary with n_k <= g / epsilon, resets
/// every alive prediction to the smallest power of (1 + delta) at or above
/// the processed amount (1 when nothing was processed).
std::unique_ptr<Policy> snap_two_stage_policy(const SnapParams& params, std::size_t g, double epsilon);

/// Group 1 jobs are dispatched like Doubling with milestones
/// c (1 + delta)^i p_hat; at milestone number `milestones` a job moves to
/// Group 2 for good, which SNAP schedules. Group 1 work runs first on
/// every machine.
std::unique_ptr<Policy> hybrid_snap_policy(double c, const SnapParams& params = {}, int milestones = 1);

/// k,e_k,n_k,l_k,achieved_length,exhaustions,preemptions_in_epoch
void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& epochs);

} // namespace presched
