#pragma once

#include <presched/core/matrix.hpp>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace presched {

/// Index of a job inside Instance::jobs. External ids live in Job::id.
using JobIndex = std::size_t;
/// Index of a machine (row of the rate matrix).
using MachineIndex = std::size_t;

inline constexpr JobIndex kNoJob = std::numeric_limits<JobIndex>::max();

/// Absolute tolerance used for work and time crossings.
inline constexpr double kTolerance = 1e-9;

/// Tolerance scaled to the magnitude of a work target.
inline double work_tolerance(double target) noexcept {
    return kTolerance * (target > 1.0 ? target : 1.0);
}

struct Job {
    std::int64_t id = 0;
    double p = 1.0;     ///< true processing requirement, hidden from policies
    double p_hat = 1.0; ///< predicted requirement, clamped to >= 1
    double r = 0.0;     ///< release time
    double w = 1.0;     ///< weight
};

enum class Environment { Single, Identical, Unrelated };

std::string_view to_string(Environment env) noexcept;

/// Jobs plus a machine-by-job rate matrix. Machine i processes job j at
/// rate rates(i, j) units of work per unit of time.
class Instance {
public:
    Instance() = default;

    /// Builds and validates an instance. Predictions below 1 are clamped
    /// to 1 and jobs are stored in ascending id order (the rate matrix
    /// columns are permuted along).
    Instance(std::vector<Job> jobs, Matrix rates, Environment env);

    static Instance single(std::vector<Job> jobs);
    static Instance identical(std::size_t machines, std::vector<Job> jobs);
    static Instance unrelated(Matrix rates, std::vector<Job> jobs);

    const std::vector<Job>& jobs() const noexcept { return jobs_; }
    const Job& job(JobIndex j) const { return jobs_.at(j); }
    const Matrix& rates() const noexcept { return rates_; }
    double rate(MachineIndex i, JobIndex j) const { return rates_(i, j); }
    Environment environment() const noexcept { return env_; }

    std::size_t job_count() const noexcept { return jobs_.size(); }
    std::size_t machine_count() const noexcept { return rates_.rows(); }

    bool all_released_at_zero() const noexcept;

    /// Same rates and release data, new true sizes (used for what-if runs).
    Instance with_sizes(const std::vector<double>& sizes) const;
    /// Same everything, new predictions.
    Instance with_predictions(const std::vector<double>& predictions) const;

private:
    void validate();

    std::vector<Job> jobs_;
    Matrix rates_;
    Environment env_ = Environment::Unrelated;
};

/// Strict enforcement of underestimation: every job's true size becomes
/// max(p, p_hat), so a job stays alive until it has received at least its
/// prediction. Predictions are left unchanged.
Instance enforce_underestimates_strict(const Instance& instance);

/// Work on one machine for one job over [t0, t1] at a constant rate.
struct Segment {
    JobIndex job = 0;
    MachineIndex machine = 0;
    double t0 = 0.0;
    double t1 = 0.0;
    double rate = 0.0;

    double work() const noexcept { return rate * (t1 - t0); }
    friend bool operator==(const Segment&, const Segment&) = default;
};

struct Trace {
    std::vector<Segment> segments;
    /// Completion time per job index; nullopt while unfinished.
    std::vector<std::optional<double>> completion;
};

/// One per-epoch record emitted by epoch-based policies.
struct EpochRecord {
    std::size_t k = 0;
    double start = 0.0;
    std::size_t alive = 0;       ///< n_k
    double planned_length = 0.0; ///< l_k
    double achieved_length = 0.0;
    std::size_t exhaustions = 0;
    std::size_t target_exhaustions = 0; ///< ceil(beta * n_k)
    std::size_t preemptions = 0;        ///< filled from the trace afterwards
    bool prediction_reset = false;
    bool finished_all = false;
};

/// A prediction replaced by a policy at run time.
struct PredictionReset {
    double time = 0.0;
    JobIndex job = 0;
    double processed = 0.0;
    double old_prediction = 0.0;
    double new_prediction = 0.0;
};

/// Instrumentation a policy reports to the metrics layer.
struct PolicyStats {
    std::int64_t queue_moves = 0;
    std::int64_t redispatches = 0;
    std::vector<std::int64_t> queue_moves_per_job;
    std::vector<std::int64_t> redispatches_per_job;
    std::vector<EpochRecord> epochs;
    std::vector<PredictionReset> resets;
};

struct Metrics {
    double total_completion = 0.0; ///< sum of w_j * C_j
    std::vector<double> per_job_completion;
    std::int64_t preemptions = 0;
    std::int64_t migrations = 0;
    std::int64_t queue_moves = 0;
    std::vector<std::int64_t> preemptions_per_job;
    double d_benchmark = 0.0;
    std::optional<double> ratio;
};

} // namespace presched
