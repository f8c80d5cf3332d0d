#include <presched/core/types.hpp>

#include <presched/core/error.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace presched {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::InfeasibleJob: return "InfeasibleJob";
    case Errc::PolicyAssignedUnknownJob: return "PolicyAssignedUnknownJob";
    case Errc::NonterminatingPolicy: return "NonterminatingPolicy";
    case Errc::InvalidInstance: return "InvalidInstance";
    case Errc::InvalidTrace: return "InvalidTrace";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::WrongEnvironment: return "WrongEnvironment";
    case Errc::NonpositiveRate: return "NonpositiveRate";
    case Errc::NoFeasibleMachine: return "NoFeasibleMachine";
    case Errc::Infeasible: return "Infeasible";
    case Errc::TooLarge: return "TooLarge";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::InvalidSpeedup: return "InvalidSpeedup";
    case Errc::NegativeArgument: return "NegativeArgument";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

std::string_view to_string(Environment env) noexcept {
    switch (env) {
    case Environment::Single: return "single";
    case Environment::Identical: return "identical";
    case Environment::Unrelated: return "unrelated";
    }
    return "unrelated";
}

Instance::Instance(std::vector<Job> jobs, Matrix rates, Environment env)
    : jobs_(std::move(jobs)), rates_(std::move(rates)), env_(env) {
    if (rates_.cols() != jobs_.size()) {
        throw SchedError(Errc::InvalidInstance, "rate matrix has " + std::to_string(rates_.cols()) +
                                                    " columns for " + std::to_string(jobs_.size()) + " jobs");
    }
    std::vector<std::size_t> order(jobs_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return jobs_[a].id < jobs_[b].id; });
    if (!std::is_sorted(jobs_.begin(), jobs_.end(), [](const Job& a, const Job& b) { return a.id < b.id; })) {
        std::vector<Job> sorted;
        Matrix permuted(rates_.rows(), rates_.cols());
        sorted.reserve(jobs_.size());
        for (std::size_t c = 0; c < order.size(); ++c) {
            sorted.push_back(jobs_[order[c]]);
            for (std::size_t i = 0; i < rates_.rows(); ++i) {
                permuted(i, c) = rates_(i, order[c]);
            }
        }
        jobs_ = std::move(sorted);
        rates_ = std::move(permuted);
    }
    for (auto& job : jobs_) {
        if (job.p_hat < 1.0) {
            job.p_hat = 1.0;
        }
    }
    validate();
}

Instance Instance::single(std::vector<Job> jobs) {
    Matrix rates(1, jobs.size(), 1.0);
    return Instance(std::move(jobs), std::move(rates), Environment::Single);
}

Instance Instance::identical(std::size_t machines, std::vector<Job> jobs) {
    if (machines == 0) {
        throw SchedError(Errc::InvalidInstance, "identical environment needs at least one machine");
    }
    Matrix rates(machines, jobs.size(), 1.0);
    return Instance(std::move(jobs), std::move(rates), Environment::Identical);
}

Instance Instance::unrelated(Matrix rates, std::vector<Job> jobs) {
    return Instance(std::move(jobs), std::move(rates), Environment::Unrelated);
}

void Instance::validate() {
    if (rates_.rows() == 0) {
        throw SchedError(Errc::InvalidInstance, "instance has no machines");
    }
    std::set<std::int64_t> ids;
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
        const Job& job = jobs_[j];
        if (!ids.insert(job.id).second) {
            throw SchedError(Errc::InvalidInstance, "duplicate job id " + std::to_string(job.id));
        }
        if (!(job.p > 0.0) || !std::isfinite(job.p)) {
            throw SchedError(Errc::InvalidInstance, "job " + std::to_string(job.id) + " needs p > 0");
        }
        if (!std::isfinite(job.p_hat)) {
            throw SchedError(Errc::InvalidInstance, "job " + std::to_string(job.id) + " has non-finite p_hat");
        }
        if (!(job.r >= 0.0) || !std::isfinite(job.r)) {
            throw SchedError(Errc::InvalidInstance, "job " + std::to_string(job.id) + " needs r >= 0");
        }
        if (!(job.w > 0.0) || !std::isfinite(job.w)) {
            throw SchedError(Errc::InvalidInstance, "job " + std::to_string(job.id) + " needs w > 0");
        }
        bool runnable = false;
        for (std::size_t i = 0; i < rates_.rows(); ++i) {
            const double rate = rates_(i, j);
            if (!(rate >= 0.0) || !std::isfinite(rate)) {
                throw SchedError(Errc::InvalidInstance, "rates must be finite and non-negative");
            }
            runnable = runnable || rate > 0.0;
        }
        if (!runnable) {
            throw SchedError(Errc::InfeasibleJob, "job " + std::to_string(job.id) + " has an all-zero rate row");
        }
    }
    const bool all_one = std::all_of(rates_.data().begin(), rates_.data().end(), [](double v) { return v == 1.0; });
    if (env_ == Environment::Single && rates_.rows() != 1) {
        throw SchedError(Errc::InvalidInstance, "single environment needs exactly one machine");
    }
    if ((env_ == Environment::Single || env_ == Environment::Identical) && !all_one) {
        throw SchedError(Errc::InvalidInstance, "single/identical environments need all rates equal to 1");
    }
}

bool Instance::all_released_at_zero() const noexcept {
    return std::all_of(jobs_.begin(), jobs_.end(), [](const Job& j) { return j.r == 0.0; });
}

Instance Instance::with_sizes(const std::vector<double>& sizes) const {
    if (sizes.size() != jobs_.size()) {
        throw SchedError(Errc::InvalidInstance, "size vector length mismatch");
    }
    auto jobs = jobs_;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        jobs[j].p = sizes[j];
    }
    return Instance(std::move(jobs), rates_, env_);
}

Instance Instance::with_predictions(const std::vector<double>& predictions) const {
    if (predictions.size() != jobs_.size()) {
        throw SchedError(Errc::InvalidInstance, "prediction vector length mismatch");
    }
    auto jobs = jobs_;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        jobs[j].p_hat = predictions[j];
    }
    return Instance(std::move(jobs), rates_, env_);
}

Instance enforce_underestimates_strict(const Instance& instance) {
    std::vector<double> sizes;
    sizes.reserve(instance.job_count());
    for (const Job& job : instance.jobs()) {
        sizes.push_back(std::max(job.p, job.p_hat));
    }
    return instance.with_sizes(sizes);
}

} // namespace presched
